#include "lbexact/policy.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "lbexact/errors.hpp"

namespace lbexact {

namespace {

std::size_t uniform_in(CounterStream& rng, std::size_t first, std::size_t last) {
  return first + static_cast<std::size_t>(rng.below(last - first));
}

// Floyd's algorithm: `count` distinct values uniform in [0, n).
std::vector<std::size_t> distinct_sample(CounterStream& rng, std::size_t n, std::size_t count) {
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  for (std::size_t j = n - count; j < n; ++j) {
    const auto t = static_cast<std::size_t>(rng.below(j + 1));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(j);
    }
  }
  return chosen;
}

// Uniform choice among the candidates of minimal length (candidates nonempty).
template <class LengthOf>
std::size_t argmin_uniform(std::span<const std::size_t> candidates, LengthOf length_of,
                           CounterStream& rng) {
  Length best = length_of(candidates[0]);
  for (std::size_t c : candidates) best = std::min(best, length_of(c));
  std::vector<std::size_t> ties;
  for (std::size_t c : candidates) {
    if (length_of(c) == best && std::find(ties.begin(), ties.end(), c) == ties.end()) {
      ties.push_back(c);
    }
  }
  return ties.size() == 1 ? ties[0] : ties[uniform_in(rng, 0, ties.size())];
}

void check_rank(std::size_t k, std::size_t c) {
  if (k >= c) {
    throw InvalidRank("rank " + std::to_string(k) + " out of range for c=" + std::to_string(c));
  }
}

// JSQ(d) candidate ranks: k plus d-1 further ranks.
std::vector<std::size_t> power_of_d_candidates(const PolicyDescriptor& policy, std::size_t c,
                                               std::size_t k, CounterStream& rng) {
  std::vector<std::size_t> candidates{k};
  const std::size_t extra = policy.d() - 1;
  if (policy.with_replacement()) {
    for (std::size_t i = 0; i < extra; ++i) candidates.push_back(uniform_in(rng, 0, c));
  } else {
    for (std::size_t r : distinct_sample(rng, c - 1, extra)) candidates.push_back(r < k ? r : r + 1);
  }
  return candidates;
}

std::size_t graph_arrival(const PolicyDescriptor& policy, const QueueState& state,
                          std::size_t reference, CounterStream& rng) {
  const PolicyDescriptor& base = *policy.base();
  const auto hood = policy.topology()->neighborhood(reference);
  const auto length_of = [&state](std::size_t q) { return state[q]; };
  const auto uniform_with_length = [&](Length level) -> std::optional<std::size_t> {
    std::vector<std::size_t> matches;
    for (std::size_t q : hood) {
      if (state[q] == level) matches.push_back(q);
    }
    if (matches.empty()) return std::nullopt;
    return matches[uniform_in(rng, 0, matches.size())];
  };

  switch (base.kind()) {
    case PolicyKind::kUniformRouting:
      return reference;
    case PolicyKind::kJoinShortest:
      return argmin_uniform(hood, length_of, rng);
    case PolicyKind::kPowerOfD: {
      std::vector<std::size_t> others;
      for (std::size_t q : hood) {
        if (q != reference) others.push_back(q);
      }
      std::vector<std::size_t> candidates{reference};
      const std::size_t extra = base.d() - 1;
      if (base.with_replacement()) {
        for (std::size_t i = 0; i < extra; ++i) candidates.push_back(hood[uniform_in(rng, 0, hood.size())]);
      } else {
        const std::size_t take = std::min(extra, others.size());
        for (std::size_t r : distinct_sample(rng, others.size(), take)) candidates.push_back(others[r]);
      }
      return argmin_uniform(candidates, length_of, rng);
    }
    case PolicyKind::kIdleFirst:
    case PolicyKind::kMmcSteal:
      return uniform_with_length(0).value_or(reference);
    case PolicyKind::kIdleOneFirst: {
      if (auto q = uniform_with_length(0)) return *q;
      if (state[reference] >= 1) {
        if (auto q = uniform_with_length(1)) return *q;
      }
      return reference;
    }
    case PolicyKind::kGraphRestricted:
      break;
  }
  throw ConfigError("nested graph-restricted policies are not supported");
}

std::optional<std::size_t> graph_departure(const PolicyDescriptor& policy, const QueueState& state,
                                           std::size_t reference, CounterStream& rng) {
  if (state[reference] == 0) return std::nullopt;
  if (policy.base()->kind() != PolicyKind::kMmcSteal || state[reference] != 1) return reference;
  const auto hood = policy.topology()->neighborhood(reference);
  std::vector<std::size_t> donors;
  for (std::size_t q : hood) {
    if (state[q] >= 2) donors.push_back(q);
  }
  if (donors.empty()) return reference;
  return argmin_uniform(donors, [&state](std::size_t q) { return state[q]; }, rng);
}

}  // namespace

Topology::Topology(std::vector<std::vector<std::size_t>> out_neighbors)
    : neighborhoods_(std::move(out_neighbors)) {
  const std::size_t c = neighborhoods_.size();
  for (std::size_t q = 0; q < c; ++q) {
    auto& hood = neighborhoods_[q];
    for (std::size_t j : hood) {
      if (j >= c) throw ConfigError("topology neighbor index out of range");
    }
    hood.push_back(q);
    std::sort(hood.begin(), hood.end());
    hood.erase(std::unique(hood.begin(), hood.end()), hood.end());
  }
}

Topology Topology::ring(std::size_t servers) {
  std::vector<std::vector<std::size_t>> out(servers);
  for (std::size_t q = 0; q < servers; ++q) out[q] = {(q + 1) % servers};
  return Topology(std::move(out));
}

Topology parse_topology(std::istream& in, std::size_t servers) {
  std::vector<std::vector<std::size_t>> out(servers);
  std::vector<bool> seen(servers, false);
  std::string line;
  std::size_t line_no = 0;
  const auto fail = [&line_no](const std::string& what) {
    throw ConfigError("topology line " + std::to_string(line_no) + ": " + what);
  };
  const auto parse_index = [&](std::string_view token) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size()) fail("bad index '" + std::string(token) + "'");
    if (value < 1 || value > servers) fail("index " + std::string(token) + " outside 1.." + std::to_string(servers));
    return value - 1;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) fail("expected 'i: j1 j2 ...'");
    std::istringstream head(line.substr(0, colon));
    std::string token;
    if (!(head >> token)) fail("missing queue index");
    const std::size_t queue = parse_index(token);
    if (seen[queue]) fail("duplicate entry for queue " + token);
    seen[queue] = true;
    std::istringstream rest(line.substr(colon + 1));
    while (rest >> token) out[queue].push_back(parse_index(token));
  }
  return Topology(std::move(out));
}

Topology load_topology(const std::filesystem::path& path, std::size_t servers) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open topology file " + path.string());
  return parse_topology(in, servers);
}

PolicyDescriptor PolicyDescriptor::uniform_routing() { return PolicyDescriptor(); }

PolicyDescriptor PolicyDescriptor::join_shortest() {
  PolicyDescriptor p;
  p.kind_ = PolicyKind::kJoinShortest;
  return p;
}

PolicyDescriptor PolicyDescriptor::power_of_d(std::size_t d, bool with_replacement) {
  if (d < 1) throw ConfigError("JSQ(d) requires d >= 1");
  PolicyDescriptor p;
  p.kind_ = PolicyKind::kPowerOfD;
  p.d_ = d;
  p.with_replacement_ = with_replacement;
  return p;
}

PolicyDescriptor PolicyDescriptor::idle_first() {
  PolicyDescriptor p;
  p.kind_ = PolicyKind::kIdleFirst;
  return p;
}

PolicyDescriptor PolicyDescriptor::idle_one_first() {
  PolicyDescriptor p;
  p.kind_ = PolicyKind::kIdleOneFirst;
  return p;
}

PolicyDescriptor PolicyDescriptor::mmc_steal() {
  PolicyDescriptor p;
  p.kind_ = PolicyKind::kMmcSteal;
  return p;
}

PolicyDescriptor PolicyDescriptor::graph_restricted(PolicyDescriptor base, Topology topology) {
  if (base.kind() == PolicyKind::kGraphRestricted) {
    throw ConfigError("nested graph-restricted policies are not supported");
  }
  PolicyDescriptor p;
  p.kind_ = PolicyKind::kGraphRestricted;
  p.base_ = std::make_shared<const PolicyDescriptor>(std::move(base));
  p.topology_ = std::make_shared<const Topology>(std::move(topology));
  return p;
}

void PolicyDescriptor::validate(std::size_t servers) const {
  switch (kind_) {
    case PolicyKind::kPowerOfD:
      if (d_ < 1) throw ConfigError("JSQ(d) requires d >= 1");
      if (!with_replacement_ && d_ > servers) {
        throw ConfigError("JSQ(d) without replacement requires d <= c");
      }
      break;
    case PolicyKind::kGraphRestricted:
      if (topology_->size() != servers) {
        throw ConfigError("topology has " + std::to_string(topology_->size()) +
                          " queues but c=" + std::to_string(servers));
      }
      base_->validate(servers);
      break;
    default:
      break;
  }
}

std::string PolicyDescriptor::name() const {
  switch (kind_) {
    case PolicyKind::kUniformRouting: return "ur";
    case PolicyKind::kJoinShortest: return "jsq";
    case PolicyKind::kPowerOfD:
      return "jsq-d:" + std::to_string(d_) + (with_replacement_ ? ":repl" : "");
    case PolicyKind::kIdleFirst: return "iqf";
    case PolicyKind::kIdleOneFirst: return "iof";
    case PolicyKind::kMmcSteal: return "mmc-steal";
    case PolicyKind::kGraphRestricted: return "graph:" + base_->name();
  }
  return "?";
}

PolicyDescriptor parse_policy(std::string_view text, const Topology* topology) {
  if (text.starts_with("graph:")) {
    if (topology == nullptr) throw ConfigError("policy '" + std::string(text) + "' needs a topology");
    return PolicyDescriptor::graph_restricted(parse_policy(text.substr(6)), *topology);
  }
  if (text == "ur") return PolicyDescriptor::uniform_routing();
  if (text == "jsq") return PolicyDescriptor::join_shortest();
  if (text == "iqf") return PolicyDescriptor::idle_first();
  if (text == "iof") return PolicyDescriptor::idle_one_first();
  if (text == "mmc-steal") return PolicyDescriptor::mmc_steal();
  if (text.starts_with("jsq-d:")) {
    std::string_view rest = text.substr(6);
    bool repl = false;
    if (rest.ends_with(":repl")) {
      repl = true;
      rest.remove_suffix(5);
    }
    std::size_t d = 0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), d);
    if (ec != std::errc() || ptr != rest.data() + rest.size() || d < 1) {
      throw ConfigError("bad JSQ(d) policy '" + std::string(text) + "'");
    }
    return PolicyDescriptor::power_of_d(d, repl);
  }
  throw ConfigError("unknown policy '" + std::string(text) +
                    "' (expected ur|jsq|jsq-d:<d>[:repl]|iqf|iof|mmc-steal|graph:<base>)");
}

std::size_t arrival_rank(const PolicyDescriptor& policy, std::span<const Length> sorted,
                         std::size_t k, CounterStream& rng) {
  const std::size_t c = sorted.size();
  check_rank(k, c);
  switch (policy.kind()) {
    case PolicyKind::kUniformRouting:
      return k;
    case PolicyKind::kJoinShortest:
      return uniform_in(rng, 0, count_at_most(sorted, sorted[0]));
    case PolicyKind::kPowerOfD: {
      const auto candidates = power_of_d_candidates(policy, c, k, rng);
      return argmin_uniform(candidates, [sorted](std::size_t r) { return sorted[r]; }, rng);
    }
    case PolicyKind::kIdleFirst:
    case PolicyKind::kMmcSteal:
      return sorted[0] == 0 ? uniform_in(rng, 0, count_at_most(sorted, 0)) : k;
    case PolicyKind::kIdleOneFirst:
      if (sorted[0] <= 1) return uniform_in(rng, 0, count_at_most(sorted, sorted[0]));
      return k;
    case PolicyKind::kGraphRestricted:
      break;
  }
  throw NonExchangeablePolicy("policy " + policy.name() + " has no rank-level rule");
}

std::optional<std::size_t> departure_rank(const PolicyDescriptor& policy,
                                          std::span<const Length> sorted, std::size_t k,
                                          CounterStream& rng) {
  const std::size_t c = sorted.size();
  check_rank(k, c);
  if (policy.kind() == PolicyKind::kGraphRestricted) {
    throw NonExchangeablePolicy("policy " + policy.name() + " has no rank-level rule");
  }
  if (sorted[k] == 0) return std::nullopt;
  if (policy.kind() == PolicyKind::kMmcSteal && sorted[k] == 1 && sorted[c - 1] >= 2) {
    // Donor: uniform among the shortest queues holding at least two tasks.
    const std::size_t first = count_at_most(sorted, 1);
    const std::size_t last = count_at_most(sorted, sorted[first]);
    return uniform_in(rng, first, last);
  }
  return k;
}

std::size_t route_arrival(const PolicyDescriptor& policy, const QueueState& state,
                          const SortedView& view, std::size_t k, CounterStream& rng) {
  check_rank(k, state.size());
  if (policy.kind() == PolicyKind::kGraphRestricted) {
    return graph_arrival(policy, state, view.sigma[k], rng);
  }
  return view.sigma[arrival_rank(policy, view.sorted, k, rng)];
}

std::optional<std::size_t> select_departure(const PolicyDescriptor& policy,
                                            const QueueState& state, const SortedView& view,
                                            std::size_t k, CounterStream& rng) {
  check_rank(k, state.size());
  if (policy.kind() == PolicyKind::kGraphRestricted) {
    return graph_departure(policy, state, view.sigma[k], rng);
  }
  const auto rank = departure_rank(policy, view.sorted, k, rng);
  if (!rank) return std::nullopt;
  return view.sigma[*rank];
}

}  // namespace lbexact
