#include "lbexact/chain.hpp"

#include <algorithm>
#include <utility>

#include "lbexact/errors.hpp"

namespace lbexact {

Mark draw_mark(const NetworkParams& params, CounterStream& rng) noexcept {
  const double c = static_cast<double>(params.servers());
  const bool arrival = rng.uniform01() * (params.lambda() + c) < params.lambda();
  const auto rank = static_cast<std::size_t>(rng.below(params.servers()));
  return {arrival ? Event::kArrival : Event::kDeparture, rank};
}

std::size_t raise_level_at(SortedLengths& sorted, std::size_t hint) {
  const Length level = sorted[hint];
  if (level >= kLengthCap) throw CapacityExceeded("queue length exceeds cap 2^62");
  const auto last = std::upper_bound(sorted.begin() + static_cast<std::ptrdiff_t>(hint),
                                     sorted.end(), level) - 1;
  ++*last;
  return static_cast<std::size_t>(last - sorted.begin());
}

std::size_t lower_level_at(SortedLengths& sorted, std::size_t hint) {
  const Length level = sorted[hint];
  if (level <= 0) throw InfeasibleTransition("decrement of an empty queue");
  const auto first = std::lower_bound(sorted.begin(),
                                      sorted.begin() + static_cast<std::ptrdiff_t>(hint) + 1, level);
  --*first;
  return static_cast<std::size_t>(first - sorted.begin());
}

namespace {

void swap_ranks(SortedView& view, std::size_t a, std::size_t b) {
  if (a == b) return;
  std::swap(view.sigma[a], view.sigma[b]);
  view.rank_of[view.sigma[a]] = a;
  view.rank_of[view.sigma[b]] = b;
}

}  // namespace

void step_generic(QueueState& state, SortedView& view, Mark mark, StepRandomness u,
                  const PolicyDescriptor& policy) {
  if (view.size() != state.size()) throw InconsistentView("view and state sizes differ");
  CounterStream rng = u.stream();
  if (mark.event == Event::kArrival) {
    const std::size_t queue = route_arrival(policy, state, view, mark.rank, rng);
    const std::size_t pos = view.rank_of[queue];
    if (view.sorted[pos] != state[queue]) throw InconsistentView("sorted view out of sync with state");
    state.increment(queue);
    const std::size_t target = raise_level_at(view.sorted, pos);
    swap_ranks(view, pos, target);
  } else {
    const auto queue = select_departure(policy, state, view, mark.rank, rng);
    if (!queue) return;
    const std::size_t pos = view.rank_of[*queue];
    if (view.sorted[pos] != state[*queue]) throw InconsistentView("sorted view out of sync with state");
    state.decrement(*queue);
    const std::size_t target = lower_level_at(view.sorted, pos);
    swap_ranks(view, pos, target);
  }
}

void step_sorted(SortedLengths& sorted, Mark mark, StepRandomness u,
                 const PolicyDescriptor& policy) {
  if (!policy.exchangeable()) {
    throw NonExchangeablePolicy("sorted update needs an exchangeable policy, got " + policy.name());
  }
  CounterStream rng = u.stream();
  if (mark.event == Event::kArrival) {
    raise_level_at(sorted, arrival_rank(policy, sorted, mark.rank, rng));
  } else if (const auto rank = departure_rank(policy, sorted, mark.rank, rng)) {
    lower_level_at(sorted, *rank);
  }
}

void step_sorted_ur(SortedLengths& sorted, Mark mark) {
  if (mark.event == Event::kArrival) {
    raise_level_at(sorted, mark.rank);
  } else if (sorted[mark.rank] > 0) {
    lower_level_at(sorted, mark.rank);
  }
}

void coupled_step(QueueState& x, SortedView& view, SortedLengths& y_sorted, Mark mark,
                  StepRandomness u, const PolicyDescriptor& policy, bool check) {
  const bool ordered_before = check && preorder_leq_sorted(view.sorted, y_sorted);
  step_generic(x, view, mark, u, policy);
  step_sorted_ur(y_sorted, mark);
  if (ordered_before && !preorder_leq_sorted(view.sorted, y_sorted)) {
    throw InvariantViolation("coupling lost the preorder: x=" + to_string(x) +
                             " y=" + to_string(y_sorted));
  }
}

}  // namespace lbexact
