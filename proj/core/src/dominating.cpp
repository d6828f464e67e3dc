#include "lbexact/dominating.hpp"

#include <algorithm>
#include <cmath>

#include "lbexact/errors.hpp"

namespace lbexact {

namespace {

bool all_zero(std::span<const Length> y) {
  return std::all_of(y.begin(), y.end(), [](Length v) { return v == 0; });
}

}  // namespace

QueueState sample_stationary(const NetworkParams& params, CounterStream& rng) {
  const double log_rho = std::log(params.lambda()) - std::log(static_cast<double>(params.servers()));
  std::vector<Length> lengths(params.servers());
  for (auto& v : lengths) {
    const double draw = std::floor(std::log(rng.uniform01_open_closed()) / log_rho);
    if (!(draw < static_cast<double>(kLengthCap))) throw CapacityExceeded("geometric draw exceeds cap");
    v = static_cast<Length>(draw);
  }
  return QueueState(std::move(lengths));
}

SortedLengths backward_step(const NetworkParams& params, const SortedLengths& y_next,
                            CounterStream& rng) {
  SortedLengths y_prev = y_next;
  step_sorted_ur(y_prev, draw_mark(params, rng));
  return y_prev;
}

Mark reconstruct_mark(std::span<const Length> y, std::span<const Length> y_next,
                      CounterStream& rng) {
  if (y.size() != y_next.size()) throw InfeasibleTransition("reconstruct_mark: size mismatch");
  const std::size_t c = y.size();
  std::size_t diff = c;
  for (std::size_t i = 0; i < c; ++i) {
    if (y[i] == y_next[i]) continue;
    if (diff != c) throw InfeasibleTransition("states differ in more than one coordinate");
    diff = i;
  }
  const auto uniform_rank = [&rng](std::size_t first, std::size_t last) {
    return first + static_cast<std::size_t>(rng.below(last - first));
  };
  if (diff == c) {
    const std::size_t empties = count_at_most(y, 0);
    if (empties == 0) throw InfeasibleTransition("self-transition without an empty queue");
    return {Event::kDeparture, uniform_rank(0, empties)};
  }
  const Length level = y[diff];
  const auto [first, last] = level_block(y, level);
  if (y_next[diff] == level + 1) {
    // A UR arrival at level m raises the last cell of the level-m block.
    if (diff + 1 != last) throw InfeasibleTransition("increment not at the end of its level block");
    return {Event::kArrival, uniform_rank(first, last)};
  }
  if (y_next[diff] == level - 1 && level >= 1) {
    if (diff != first) throw InfeasibleTransition("decrement not at the start of its level block");
    return {Event::kDeparture, uniform_rank(first, last)};
  }
  throw InfeasibleTransition("coordinate changed by more than one");
}

BackwardSegment::BackwardSegment(SortedLengths newest)
    : newest_(newest), deepest_(std::move(newest)) {
  checkpoints_.emplace(0, deepest_);
  first_empty_depth_ = all_zero(deepest_) ? 0 : 1;
}

void BackwardSegment::extend(const NetworkParams& params, CounterStream& rng) {
  SortedLengths previous = backward_step(params, deepest_, rng);
  marks_.push_back(encode(reconstruct_mark(previous, deepest_, rng)));
  deepest_ = std::move(previous);
  const std::size_t d = marks_.size();
  if (d % kCheckpointStride == 0) checkpoints_.emplace(d, deepest_);
  if (first_empty_depth_ == d) {
    if (!all_zero(deepest_)) first_empty_depth_ = d + 1;
  }
}

SortedLengths BackwardSegment::state_at(std::int64_t time) const {
  if (time > 0 || static_cast<std::size_t>(-time) > depth()) {
    throw std::out_of_range("BackwardSegment::state_at: time outside segment");
  }
  const auto target = static_cast<std::size_t>(-time);
  // Nearest stored state at or below the target depth.
  std::size_t from = depth();
  SortedLengths state = deepest_;
  if (const auto it = checkpoints_.lower_bound(target); it != checkpoints_.end() && it->first < from) {
    from = it->first;
    state = it->second;
  }
  for (std::size_t d = from; d > target; --d) step_sorted_ur(state, decode(marks_[d - 1]));
  return state;
}

BackwardSegment simulate_backward_until(const NetworkParams& params, SortedLengths y0,
                                        const BackwardStop& stop, CounterStream& rng,
                                        std::uint64_t max_depth) {
  if (max_depth < 1) throw ConfigError("max_depth must be at least 1");
  BackwardSegment segment(std::move(y0));
  while (!stop(-static_cast<std::int64_t>(segment.depth()), segment.deepest())) {
    if (segment.depth() >= max_depth) throw DepthExceeded(max_depth);
    segment.extend(params, rng);
  }
  return segment;
}

}  // namespace lbexact
