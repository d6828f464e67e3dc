#include <gtest/gtest.h>

#include <map>
#include <sstream>
#include <vector>

#include "lbexact/chain.hpp"
#include "lbexact/errors.hpp"
#include "lbexact/policy.hpp"
#include "stats.hpp"

namespace lbexact {
namespace {

using V = std::vector<Length>;

std::vector<PolicyDescriptor> exchangeable_policies() {
  return {PolicyDescriptor::uniform_routing(), PolicyDescriptor::join_shortest(),
          PolicyDescriptor::power_of_d(2),     PolicyDescriptor::power_of_d(3, true),
          PolicyDescriptor::idle_first(),      PolicyDescriptor::idle_one_first(),
          PolicyDescriptor::mmc_steal()};
}

Topology random_topology(CounterStream& rng, std::size_t c) {
  std::vector<std::vector<std::size_t>> hoods(c);
  for (auto& h : hoods)
    for (std::size_t j = 0; j < c; ++j)
      if (rng.bernoulli(0.4)) h.push_back(j);
  return Topology(std::move(hoods));
}

V random_state(CounterStream& rng, std::size_t c, Length max) {
  V x(c);
  for (auto& v : x) v = static_cast<Length>(rng.below(static_cast<std::uint64_t>(max) + 1));
  return x;
}

std::size_t rank_of_queue(const SortedView& v, std::size_t q) { return v.rank_of[q]; }

TEST(PolicyParse, Grammar) {
  EXPECT_EQ(parse_policy("ur").kind(), PolicyKind::kUniformRouting);
  EXPECT_EQ(parse_policy("jsq").kind(), PolicyKind::kJoinShortest);
  const auto d2 = parse_policy("jsq-d:2");
  EXPECT_EQ(d2.kind(), PolicyKind::kPowerOfD);
  EXPECT_EQ(d2.d(), 2u);
  EXPECT_FALSE(d2.with_replacement());
  EXPECT_TRUE(parse_policy("jsq-d:3:repl").with_replacement());
  EXPECT_EQ(parse_policy("iqf").kind(), PolicyKind::kIdleFirst);
  EXPECT_EQ(parse_policy("iof").kind(), PolicyKind::kIdleOneFirst);
  EXPECT_EQ(parse_policy("mmc-steal").kind(), PolicyKind::kMmcSteal);
  const Topology ring = Topology::ring(4);
  const auto g = parse_policy("graph:jsq", &ring);
  EXPECT_EQ(g.kind(), PolicyKind::kGraphRestricted);
  EXPECT_EQ(g.base()->kind(), PolicyKind::kJoinShortest);
  EXPECT_FALSE(g.exchangeable());
  for (const auto& p : exchangeable_policies()) {
    EXPECT_TRUE(p.exchangeable());
    EXPECT_EQ(parse_policy(p.name()).name(), p.name());
  }
}

TEST(PolicyParse, Rejects) {
  EXPECT_THROW(parse_policy("nope"), ConfigError);
  EXPECT_THROW(parse_policy("jsq-d:0"), ConfigError);
  EXPECT_THROW(parse_policy("jsq-d:x"), ConfigError);
  EXPECT_THROW(parse_policy("graph:jsq"), ConfigError);
  EXPECT_THROW(PolicyDescriptor::power_of_d(5).validate(4), ConfigError);
  EXPECT_NO_THROW(PolicyDescriptor::power_of_d(5, true).validate(4));
  const Topology ring = Topology::ring(4);
  EXPECT_THROW(parse_policy("graph:jsq", &ring).validate(3), ConfigError);
  EXPECT_THROW(PolicyDescriptor::graph_restricted(parse_policy("graph:ur", &ring), ring), ConfigError);
}

TEST(Topology, ParsesOneBasedLines) {
  std::istringstream in("# ring\n1: 2\n\n2: 3 1\n3: 1\n");
  const Topology t = parse_topology(in, 4);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(std::vector<std::size_t>(t.neighborhood(0).begin(), t.neighborhood(0).end()),
            (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(std::vector<std::size_t>(t.neighborhood(1).begin(), t.neighborhood(1).end()),
            (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(std::vector<std::size_t>(t.neighborhood(3).begin(), t.neighborhood(3).end()),
            (std::vector<std::size_t>{3}));
}

TEST(Topology, RejectsBadLines) {
  const auto fails_on_line = [](const std::string& text, const std::string& line) {
    std::istringstream in(text);
    try {
      parse_topology(in, 3);
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(line) != std::string::npos;
    }
    return false;
  };
  EXPECT_TRUE(fails_on_line("1: 2\n2: 4\n", "line 2"));
  EXPECT_TRUE(fails_on_line("1: 2\n1: 3\n", "line 2"));
  EXPECT_TRUE(fails_on_line("garbage\n", "line 1"));
  EXPECT_TRUE(fails_on_line("0: 1\n", "line 1"));
}

TEST(RouteArrival, Examples) {
  CounterStream rng(1, StreamDomain::kAux, 0);
  const auto route = [&](const PolicyDescriptor& p, V lengths, std::size_t k) {
    const QueueState x(std::move(lengths));
    return route_arrival(p, x, sort_state(x), k, rng);
  };
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(route(PolicyDescriptor::join_shortest(), {3, 1, 2}, k), 1u);
    EXPECT_EQ(route(PolicyDescriptor::idle_one_first(), {2, 0, 1}, k), 1u);
    EXPECT_EQ(route(PolicyDescriptor::idle_one_first(), {2, 3, 1}, k), 2u);
  }
  const QueueState x(V{2, 3, 2});
  const SortedView v = sort_state(x);
  EXPECT_EQ(route_arrival(PolicyDescriptor::idle_one_first(), x, v, rank_of_queue(v, 0), rng), 0u);
  EXPECT_EQ(route_arrival(PolicyDescriptor::uniform_routing(), x, v, rank_of_queue(v, 1), rng), 1u);
  EXPECT_THROW(route_arrival(PolicyDescriptor::uniform_routing(), x, v, 3, rng), InvalidRank);
}

TEST(SelectDeparture, Examples) {
  CounterStream rng(2, StreamDomain::kAux, 0);
  {
    const QueueState x(V{0, 2});
    const SortedView v = sort_state(x);
    EXPECT_FALSE(select_departure(PolicyDescriptor::uniform_routing(), x, v, v.rank_of[0], rng));
  }
  {
    const QueueState x(V{1, 2});
    const SortedView v = sort_state(x);
    EXPECT_EQ(select_departure(PolicyDescriptor::join_shortest(), x, v, v.rank_of[1], rng), 1u);
  }
  {
    const QueueState x(V{1, 3});
    const SortedView v = sort_state(x);
    EXPECT_EQ(select_departure(PolicyDescriptor::mmc_steal(), x, v, v.rank_of[0], rng), 1u);
    EXPECT_THROW(select_departure(PolicyDescriptor::mmc_steal(), x, v, 2, rng), InvalidRank);
  }
}

// Arrivals never go to a queue longer than the reference queue; completions
// at a nonempty queue remove from a queue at least as long.
TEST(PolicyContract, RoutingAndDepartureRules) {
  CounterStream rng(3, StreamDomain::kAux, 0);
  std::vector<PolicyDescriptor> bases = exchangeable_policies();
  for (int trial = 0; trial < 100000; ++trial) {
    const std::size_t c = 2 + rng.below(5);
    const QueueState x(random_state(rng, c, 4));
    const SortedView v = sort_state(x);
    PolicyDescriptor p = bases[rng.below(bases.size())];
    if (trial % 3 == 0) p = PolicyDescriptor::graph_restricted(p, random_topology(rng, c));
    if (p.kind() == PolicyKind::kPowerOfD || (p.base() && p.base()->kind() == PolicyKind::kPowerOfD)) {
      const auto& q = p.base() ? *p.base() : p;
      if (!q.with_replacement() && q.d() > c) continue;
    }
    const std::size_t k = rng.below(c);
    const std::size_t ref = v.sigma[k];
    const std::size_t i = route_arrival(p, x, v, k, rng);
    ASSERT_LT(i, c);
    ASSERT_LE(x[i], x[ref]) << p.name() << " " << to_string(x);
    const auto d = select_departure(p, x, v, k, rng);
    if (x[ref] == 0) {
      ASSERT_FALSE(d.has_value()) << p.name();
    } else {
      ASSERT_TRUE(d.has_value()) << p.name();
      ASSERT_GE(x[*d], x[ref]) << p.name() << " " << to_string(x);
    }
  }
}

using Outcome = std::map<V, double>;

Outcome one_step_law(const PolicyDescriptor& p, const V& start, Event event, std::uint64_t seed,
                     int n) {
  Outcome law;
  CounterStream rng(seed, StreamDomain::kAux, 0);
  for (int i = 0; i < n; ++i) {
    QueueState x(start);
    SortedView v = sort_state(x);
    const Mark m{event, static_cast<std::size_t>(rng.below(start.size()))};
    step_generic(x, v, m, StepRandomness{rng()}, p);
    law[x.vector()] += 1.0;
  }
  return law;
}

double two_sample_p(const Outcome& a, const Outcome& b) {
  std::map<V, std::pair<double, double>> joint;
  for (const auto& [k, n] : a) joint[k].first += n;
  for (const auto& [k, n] : b) joint[k].second += n;
  std::vector<double> ca, cb;
  for (const auto& [k, n] : joint) {
    ca.push_back(n.first);
    cb.push_back(n.second);
  }
  return test::chi_square_two_sample(ca, cb).p;
}

TEST(PowerOfD, ExtremesMatchUrAndJsq) {
  const std::vector<V> starts{{0, 1, 3, 1}, {2, 2, 0, 5}, {1, 1, 1, 1}, {4, 0, 0, 2}};
  std::uint64_t seed = 10;
  for (const V& s : starts) {
    EXPECT_GT(two_sample_p(one_step_law(PolicyDescriptor::power_of_d(1), s, Event::kArrival, seed++, 100000),
                           one_step_law(PolicyDescriptor::uniform_routing(), s, Event::kArrival, seed++, 100000)),
              1e-3);
    EXPECT_GT(two_sample_p(one_step_law(PolicyDescriptor::power_of_d(4), s, Event::kArrival, seed++, 100000),
                           one_step_law(PolicyDescriptor::join_shortest(), s, Event::kArrival, seed++, 100000)),
              1e-3);
  }
}

TEST(MmcSteal, NeverIdleBesideBacklog) {
  const NetworkParams params(4, 3.0);
  const auto policy = PolicyDescriptor::mmc_steal();
  CounterStream rng(4, StreamDomain::kAux, 0);
  QueueState x = QueueState::empty(4);
  SortedView v = sort_state(x);
  for (int n = 0; n < 100000; ++n) {
    step_generic(x, v, draw_mark(params, rng), StepRandomness{rng()}, policy);
    const auto [lo, hi] = std::minmax_element(x.vector().begin(), x.vector().end());
    ASSERT_FALSE(*lo == 0 && *hi >= 2) << to_string(x);
  }
}

TEST(Exchangeability, PermutationEquivariantOneStepLaw) {
  const V start{0, 1, 1, 3};
  const std::vector<std::size_t> perm{2, 0, 3, 1};  // permuted[i] = start[perm[i]]
  V permuted(start.size());
  for (std::size_t i = 0; i < start.size(); ++i) permuted[i] = start[perm[i]];
  std::uint64_t seed = 100;
  for (const auto& p : exchangeable_policies()) {
    for (Event e : {Event::kArrival, Event::kDeparture}) {
      const Outcome direct = one_step_law(p, start, e, seed++, 100000);
      Outcome undone;
      for (const auto& [state, n] : one_step_law(p, permuted, e, seed++, 100000)) {
        V back(state.size());
        for (std::size_t i = 0; i < state.size(); ++i) back[perm[i]] = state[i];
        undone[back] += n;
      }
      EXPECT_GT(two_sample_p(direct, undone), 1e-3) << p.name();
    }
  }
}

}  // namespace
}  // namespace lbexact
