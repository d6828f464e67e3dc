#pragma once

// The dominating uniform-routing chain. In equilibrium it is c independent
// geometric queues and it is reversible, so its past can be simulated by
// running a fresh copy forward; the marks driving the (real) forward
// transitions are then reconstructed from consecutive states.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "lbexact/chain.hpp"
#include "lbexact/random.hpp"
#include "lbexact/state.hpp"

namespace lbexact {

// c i.i.d. draws from gamma(n) = (1 - rho) rho^n by inversion,
// floor(log U / log rho) with log rho = log lambda - log c.
QueueState sample_stationary(const NetworkParams& params, CounterStream& rng);

// One backward step: a fresh mark applied to y_next with the sorted UR rule.
SortedLengths backward_step(const NetworkParams& params, const SortedLengths& y_next,
                            CounterStream& rng);

// Mark that drove the forward transition y -> y_next of the sorted UR chain,
// drawn from its conditional law. Throws InfeasibleTransition.
Mark reconstruct_mark(std::span<const Length> y, std::span<const Length> y_next,
                      CounterStream& rng);

// Backward path Y_0, Y_{-1}, ..., Y_{-depth} and marks theta_0, ..., theta_{-depth+1}
// where theta_t drives Y_{t-1} -> Y_t. Only every kCheckpointStride-th state
// is stored; others are recovered by replaying marks forward.
class BackwardSegment {
 public:
  static constexpr std::size_t kCheckpointStride = 1024;

  explicit BackwardSegment(SortedLengths newest);

  std::size_t depth() const noexcept { return marks_.size(); }
  const SortedLengths& newest() const noexcept { return newest_; }
  // Y_{-depth}.
  const SortedLengths& deepest() const noexcept { return deepest_; }

  // theta_t for -depth < t <= 0.
  Mark mark_at(std::int64_t time) const { return decode(marks_.at(static_cast<std::size_t>(-time))); }
  // Y_t for -depth <= t <= 0.
  SortedLengths state_at(std::int64_t time) const;

  // Y_{-depth-1} from Y_{-depth}; appends the reconstructed mark.
  void extend(const NetworkParams& params, CounterStream& rng);

  // Shallowest depth at which the chain was observed empty, or depth()+1 if never.
  std::size_t first_empty_depth() const noexcept { return first_empty_depth_; }

 private:
  // Marks are packed as +-(rank + 1).
  static std::int32_t encode(Mark m) noexcept {
    const auto r = static_cast<std::int32_t>(m.rank) + 1;
    return m.event == Event::kArrival ? r : -r;
  }
  static Mark decode(std::int32_t v) noexcept {
    return v > 0 ? Mark{Event::kArrival, static_cast<std::size_t>(v - 1)}
                 : Mark{Event::kDeparture, static_cast<std::size_t>(-v - 1)};
  }

  SortedLengths newest_;
  SortedLengths deepest_;
  std::vector<std::int32_t> marks_;
  std::map<std::size_t, SortedLengths> checkpoints_;
  std::size_t first_empty_depth_;
};

using BackwardStop = std::function<bool(std::int64_t time, const SortedLengths& state)>;

// Extends backward from y0 until stop(time, Y_time) fires (checked at the
// starting state too). Throws DepthExceeded when max_depth steps were taken
// without stopping.
BackwardSegment simulate_backward_until(const NetworkParams& params, SortedLengths y0,
                                        const BackwardStop& stop, CounterStream& rng,
                                        std::uint64_t max_depth);

}  // namespace lbexact
