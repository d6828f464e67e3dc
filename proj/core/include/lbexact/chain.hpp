#pragma once

// The embedded jump chain. Arrivals and potential service completions form a
// marked Poisson stream of intensity lambda + c; each event carries a uniform
// rank in 0..c-1 that names the reference queue in nondecreasing order.
// Two representations are advanced:
//  - generic: (QueueState, SortedView) with sigma maintained by single swaps;
//  - sorted:  a nondecreasing vector, valid for exchangeable rules only.

#include <cstddef>
#include <cstdint>

#include "lbexact/policy.hpp"
#include "lbexact/random.hpp"
#include "lbexact/state.hpp"

namespace lbexact {

enum class Event : std::int8_t { kDeparture = -1, kArrival = +1 };

struct Mark {
  Event event = Event::kDeparture;
  std::size_t rank = 0;

  friend bool operator==(const Mark&, const Mark&) = default;
};

// The per-step auxiliary randomness, one 64-bit seed per time index. Policy
// sub-draws come from stream(), so replaying a step with the same seed
// consumes bit-identical randomness.
struct StepRandomness {
  std::uint64_t seed = 0;

  CounterStream stream() const noexcept { return CounterStream(seed, StreamDomain::kPolicy, 0); }
  static StepRandomness for_time(std::uint64_t draw_key, std::int64_t time,
                                 std::uint32_t round = 0) noexcept {
    return {derive_key(draw_key, StreamDomain::kStep, static_cast<std::uint64_t>(time), round)};
  }
};

Mark draw_mark(const NetworkParams& params, CounterStream& rng) noexcept;

// Generic update phi with the swap rule for sigma. Throws InconsistentView if
// the touched entry of the view disagrees with the state.
void step_generic(QueueState& state, SortedView& view, Mark mark, StepRandomness u,
                  const PolicyDescriptor& policy);

// Sorted update for an exchangeable rule. Throws NonExchangeablePolicy.
void step_sorted(SortedLengths& sorted, Mark mark, StepRandomness u,
                 const PolicyDescriptor& policy);

// Sorted uniform-routing update (the dominating chain); deterministic given the mark.
void step_sorted_ur(SortedLengths& sorted, Mark mark);

// Primitive single-coordinate moves on a sorted array. `hint` is any index of
// the level block; returns the index that changed.
std::size_t raise_level_at(SortedLengths& sorted, std::size_t hint);
std::size_t lower_level_at(SortedLengths& sorted, std::size_t hint);

// Joint step of a generic chain and the sorted UR chain on the same mark.
// With check = true, throws InvariantViolation if x <= y held before the
// step but not after.
void coupled_step(QueueState& x, SortedView& view, SortedLengths& y_sorted, Mark mark,
                  StepRandomness u, const PolicyDescriptor& policy, bool check = false);

}  // namespace lbexact
