#pragma once

// Load-balancing decision rules. Every rule obeys the two network constraints:
//  - an arrival whose reference queue is j goes to a queue i with x_i <= x_j;
//  - a service completion at a non-empty queue j removes a task from a queue i
//    with x_i >= x_j >= 1 (work stealing collapses steal + serve into one
//    decrement of the donor).
// The reference queue of a mark with rank k is sigma[k], the rank-k queue in
// the nondecreasing ordering.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbexact/random.hpp"
#include "lbexact/state.hpp"

namespace lbexact {

enum class PolicyKind {
  kUniformRouting,   // UR
  kJoinShortest,     // JSQ
  kPowerOfD,         // JSQ(d)
  kIdleFirst,        // IQF
  kIdleOneFirst,     // IOF
  kMmcSteal,         // IQF at arrivals + work stealing at completions
  kGraphRestricted,  // base rule on the out-neighborhood of the reference queue
};

// Directed graph on queues; every vertex implicitly neighbors itself.
class Topology {
 public:
  explicit Topology(std::vector<std::vector<std::size_t>> out_neighbors);

  // Ring where each queue sees its successor (and itself).
  static Topology ring(std::size_t servers);

  std::size_t size() const noexcept { return neighborhoods_.size(); }
  // Sorted, deduplicated, includes the vertex itself.
  std::span<const std::size_t> neighborhood(std::size_t queue) const noexcept {
    return neighborhoods_[queue];
  }

 private:
  std::vector<std::vector<std::size_t>> neighborhoods_;
};

// Text format, one line per queue, 1-based: "i: j1 j2 ...". Blank lines and
// '#' comments are ignored; queues without a line only see themselves.
Topology parse_topology(std::istream& in, std::size_t servers);
Topology load_topology(const std::filesystem::path& path, std::size_t servers);

class PolicyDescriptor {
 public:
  static PolicyDescriptor uniform_routing();
  static PolicyDescriptor join_shortest();
  static PolicyDescriptor power_of_d(std::size_t d, bool with_replacement = false);
  static PolicyDescriptor idle_first();
  static PolicyDescriptor idle_one_first();
  static PolicyDescriptor mmc_steal();
  static PolicyDescriptor graph_restricted(PolicyDescriptor base, Topology topology);

  PolicyKind kind() const noexcept { return kind_; }
  std::size_t d() const noexcept { return d_; }
  bool with_replacement() const noexcept { return with_replacement_; }
  const PolicyDescriptor* base() const noexcept { return base_.get(); }
  const Topology* topology() const noexcept { return topology_.get(); }

  // True for every rule except graph-restricted ones (conservatively false
  // even on vertex-transitive graphs).
  bool exchangeable() const noexcept { return kind_ != PolicyKind::kGraphRestricted; }

  // Throws ConfigError when the descriptor cannot run on c servers.
  void validate(std::size_t servers) const;

  std::string name() const;

 private:
  PolicyDescriptor() = default;

  PolicyKind kind_ = PolicyKind::kUniformRouting;
  std::size_t d_ = 1;
  bool with_replacement_ = false;
  std::shared_ptr<const PolicyDescriptor> base_;
  std::shared_ptr<const Topology> topology_;
};

// CLI grammar: ur | jsq | jsq-d:<d>[:repl] | iqf | iof | mmc-steal | graph:<base>.
// graph:<base> requires a topology.
PolicyDescriptor parse_policy(std::string_view text, const Topology* topology = nullptr);

// Rank-level choices used by every exchangeable rule. They read only the
// nondecreasing lengths and return a rank whose length is the level the move
// acts on; mapping the rank through sigma yields a queue with uniform
// tie-breaking among equal lengths.
std::size_t arrival_rank(const PolicyDescriptor& policy, std::span<const Length> sorted,
                         std::size_t k, CounterStream& rng);
std::optional<std::size_t> departure_rank(const PolicyDescriptor& policy,
                                          std::span<const Length> sorted, std::size_t k,
                                          CounterStream& rng);

// Queue receiving an arrival whose reference rank is k. Throws InvalidRank.
std::size_t route_arrival(const PolicyDescriptor& policy, const QueueState& state,
                          const SortedView& view, std::size_t k, CounterStream& rng);

// Queue losing a task at a potential completion of the rank-k queue; nullopt
// iff that queue is empty. Throws InvalidRank.
std::optional<std::size_t> select_departure(const PolicyDescriptor& policy,
                                            const QueueState& state, const SortedView& view,
                                            std::size_t k, CounterStream& rng);

}  // namespace lbexact
