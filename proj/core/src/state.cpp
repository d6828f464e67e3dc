#include "lbexact/state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lbexact/errors.hpp"

namespace lbexact {

NetworkParams::NetworkParams(std::size_t servers, double lambda)
    : servers_(servers), lambda_(lambda) {
  if (servers < 2) throw ConfigError("server count c must be at least 2");
  if (!std::isfinite(lambda) || lambda <= 0.0) {
    throw ConfigError("arrival rate lambda must be positive");
  }
  if (lambda >= static_cast<double>(servers)) {
    throw ConfigError("unstable network: stability requires lambda < c (lambda=" +
                      std::to_string(lambda) + ", c=" + std::to_string(servers) + ")");
  }
}

QueueState::QueueState(std::vector<Length> lengths) : lengths_(std::move(lengths)) {
  for (Length v : lengths_) {
    if (v < 0) throw ConfigError("queue lengths must be nonnegative");
    if (v > kLengthCap) throw CapacityExceeded("queue length exceeds cap 2^62");
  }
}

bool QueueState::is_empty() const noexcept {
  return std::all_of(lengths_.begin(), lengths_.end(), [](Length v) { return v == 0; });
}

void QueueState::increment(std::size_t queue) {
  if (lengths_[queue] >= kLengthCap) throw CapacityExceeded("queue length exceeds cap 2^62");
  ++lengths_[queue];
}

void QueueState::decrement(std::size_t queue) {
  if (lengths_[queue] <= 0) throw InfeasibleTransition("decrement of an empty queue");
  --lengths_[queue];
}

std::size_t alpha(std::span<const Length> x, Length n) noexcept {
  return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [n](Length v) { return v > n; }));
}

Length beta(std::span<const Length> x, Length n) noexcept {
  Length total = 0;
  for (Length v : x) total += v > n ? v - n : 0;
  return total;
}

std::size_t count_at_most(std::span<const Length> sorted, Length n) noexcept {
  if (n < 0) return 0;
  return static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), n) - sorted.begin());
}

std::pair<std::size_t, std::size_t> level_block(std::span<const Length> sorted, Length n) noexcept {
  const auto range = std::equal_range(sorted.begin(), sorted.end(), n);
  return {static_cast<std::size_t>(range.first - sorted.begin()),
          static_cast<std::size_t>(range.second - sorted.begin())};
}

std::size_t alpha_sorted(std::span<const Length> sorted, Length n) noexcept {
  return sorted.size() - count_at_most(sorted, n);
}

Length beta_sorted(std::span<const Length> sorted, Length n) noexcept {
  Length total = 0;
  for (std::size_t i = count_at_most(sorted, n); i < sorted.size(); ++i) total += sorted[i] - n;
  return total;
}

bool preorder_leq_sorted(std::span<const Length> x, std::span<const Length> y) {
  if (x.size() != y.size()) throw DimensionMismatch("preorder_leq: dimension mismatch");
  // beta_n(x) - beta_n(y) is piecewise linear in n with breakpoints at the
  // coordinate values, and both vanish beyond the maxima, so it suffices to
  // compare at n = 0 and at every coordinate value. Walk the values upward.
  const std::size_t c = x.size();
  Length sum_x = std::accumulate(x.begin(), x.end(), Length{0});
  Length sum_y = std::accumulate(y.begin(), y.end(), Length{0});
  std::size_t ix = 0, iy = 0;  // entries <= current level
  Length level = 0;
  while (true) {
    while (ix < c && x[ix] <= level) sum_x -= x[ix++];
    while (iy < c && y[iy] <= level) sum_y -= y[iy++];
    const Length bx = sum_x - level * static_cast<Length>(c - ix);
    const Length by = sum_y - level * static_cast<Length>(c - iy);
    if (bx > by) return false;
    if (ix == c) return true;
    Length next = x[ix];
    if (iy < c) next = std::min(next, y[iy]);
    level = next;
  }
}

bool preorder_leq(std::span<const Length> x, std::span<const Length> y) {
  if (x.size() != y.size()) throw DimensionMismatch("preorder_leq: dimension mismatch");
  if (is_nondecreasing(x) && is_nondecreasing(y)) return preorder_leq_sorted(x, y);
  const SortedLengths sx = sorted_lengths(x);
  const SortedLengths sy = sorted_lengths(y);
  return preorder_leq_sorted(sx, sy);
}

bool equivalent(std::span<const Length> x, std::span<const Length> y) {
  if (x.size() != y.size()) throw DimensionMismatch("equivalent: dimension mismatch");
  return sorted_lengths(x) == sorted_lengths(y);
}

SortedView sort_state(const QueueState& x) {
  SortedView view;
  const std::size_t c = x.size();
  view.sigma.resize(c);
  std::iota(view.sigma.begin(), view.sigma.end(), std::size_t{0});
  std::stable_sort(view.sigma.begin(), view.sigma.end(),
                   [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  view.sorted.resize(c);
  view.rank_of.resize(c);
  for (std::size_t r = 0; r < c; ++r) {
    view.sorted[r] = x[view.sigma[r]];
    view.rank_of[view.sigma[r]] = r;
  }
  return view;
}

SortedLengths sorted_lengths(std::span<const Length> x) {
  SortedLengths s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

bool is_nondecreasing(std::span<const Length> x) noexcept {
  return std::is_sorted(x.begin(), x.end());
}

bool is_consistent(const QueueState& x, const SortedView& view) noexcept {
  const std::size_t c = x.size();
  if (view.sorted.size() != c || view.sigma.size() != c || view.rank_of.size() != c) return false;
  if (!is_nondecreasing(view.sorted)) return false;
  std::vector<bool> seen(c, false);
  for (std::size_t r = 0; r < c; ++r) {
    const std::size_t q = view.sigma[r];
    if (q >= c || seen[q]) return false;
    seen[q] = true;
    if (view.rank_of[q] != r || view.sorted[r] != x[q]) return false;
  }
  return true;
}

std::string to_string(std::span<const Length> x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(x[i]);
  }
  return out + ")";
}

}  // namespace lbexact
