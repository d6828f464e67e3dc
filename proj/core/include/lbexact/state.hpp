#pragma once

// Network states, the beta-preorder and sorted views.
//
// A state x in N_0^c is compared through the excess counts
//   alpha_n(x) = #{i : x_i > n},   beta_n(x) = sum_i (x_i - n)^+ = sum_{k>=n} alpha_k(x).
// x <= y (preorder) iff beta_n(x) <= beta_n(y) for every n; two states are
// equivalent iff they are permutations of each other.
//
// Queue indices and ranks are 0-based throughout the library.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lbexact {

using Length = std::int64_t;

inline constexpr Length kLengthCap = Length{1} << 62;

// Server count c >= 2 and arrival rate 0 < lambda < c. Service rate is 1 per server.
class NetworkParams {
 public:
  NetworkParams(std::size_t servers, double lambda);

  std::size_t servers() const noexcept { return servers_; }
  double lambda() const noexcept { return lambda_; }
  double rho() const noexcept { return lambda_ / static_cast<double>(servers_); }

  friend bool operator==(const NetworkParams&, const NetworkParams&) = default;

 private:
  std::size_t servers_;
  double lambda_;
};

class QueueState {
 public:
  QueueState() = default;
  explicit QueueState(std::vector<Length> lengths);
  static QueueState empty(std::size_t servers) {
    return QueueState(std::vector<Length>(servers, 0));
  }

  std::size_t size() const noexcept { return lengths_.size(); }
  Length operator[](std::size_t i) const noexcept { return lengths_[i]; }
  std::span<const Length> lengths() const noexcept { return lengths_; }
  const std::vector<Length>& vector() const noexcept { return lengths_; }
  bool is_empty() const noexcept;

  void increment(std::size_t queue);
  void decrement(std::size_t queue);

  friend bool operator==(const QueueState&, const QueueState&) = default;

 private:
  std::vector<Length> lengths_;
};

// Nondecreasing arrangement of a QueueState together with the permutation
// sigma realizing it: sorted[r] == state[sigma[r]]. rank_of is sigma's inverse.
struct SortedView {
  std::vector<Length> sorted;
  std::vector<std::size_t> sigma;
  std::vector<std::size_t> rank_of;

  std::size_t size() const noexcept { return sorted.size(); }
  friend bool operator==(const SortedView&, const SortedView&) = default;
};

using SortedLengths = std::vector<Length>;

std::size_t alpha(std::span<const Length> x, Length n) noexcept;
Length beta(std::span<const Length> x, Length n) noexcept;

// O(log c) versions on nondecreasing data.
std::size_t alpha_sorted(std::span<const Length> sorted, Length n) noexcept;
Length beta_sorted(std::span<const Length> sorted, Length n) noexcept;

inline std::size_t alpha(const QueueState& x, Length n) noexcept { return alpha(x.lengths(), n); }
inline std::size_t alpha(const SortedView& v, Length n) noexcept { return alpha_sorted(v.sorted, n); }
inline Length beta(const QueueState& x, Length n) noexcept { return beta(x.lengths(), n); }
inline Length beta(const SortedView& v, Length n) noexcept { return beta_sorted(v.sorted, n); }

// Number of coordinates <= n; 0 for n = -1. The level-n block of a sorted
// array is the index range [count_at_most(n-1), count_at_most(n)).
std::size_t count_at_most(std::span<const Length> sorted, Length n) noexcept;
inline std::size_t count_at_most(const SortedView& v, Length n) noexcept {
  return count_at_most(v.sorted, n);
}

// Half-open index range of the level-n block.
std::pair<std::size_t, std::size_t> level_block(std::span<const Length> sorted, Length n) noexcept;

// Throws DimensionMismatch on size mismatch. Works on unsorted inputs.
bool preorder_leq(std::span<const Length> x, std::span<const Length> y);
inline bool preorder_leq(const QueueState& x, const QueueState& y) {
  return preorder_leq(x.lengths(), y.lengths());
}

// Both inputs nondecreasing; O(c).
bool preorder_leq_sorted(std::span<const Length> x, std::span<const Length> y);

bool equivalent(std::span<const Length> x, std::span<const Length> y);
inline bool equivalent(const QueueState& x, const QueueState& y) {
  return equivalent(x.lengths(), y.lengths());
}

// Ties broken by ascending queue index.
SortedView sort_state(const QueueState& x);
SortedLengths sorted_lengths(std::span<const Length> x);

bool is_nondecreasing(std::span<const Length> x) noexcept;
// Checks every SortedView invariant against the state; O(c).
bool is_consistent(const QueueState& x, const SortedView& view) noexcept;

std::string to_string(std::span<const Length> x);
inline std::string to_string(const QueueState& x) { return to_string(x.lengths()); }

}  // namespace lbexact
