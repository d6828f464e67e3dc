// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "lbexact/chain.hpp"
#include "lbexact/dominating.hpp"
#include "lbexact/estimate.hpp"
#include "lbexact/sampler.hpp"
#include "lbexact/state.hpp"
#include "stats.hpp"

using namespace lbexact;

namespace {

using V = std::vector<Length>;

// Pinned thresholds.
constexpr double kTvJoint = 0.02;
constexpr double kMinP = 1e-3;
constexpr double kErlangTolerance = 0.01;
constexpr double kTvMmc = 0.02;
constexpr double kTvAr = 0.05;
constexpr double kDominanceSigmas = 3.0;

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<Sample> draws(const NetworkParams& params, const PolicyDescriptor& policy,
                          Algorithm algorithm, std::uint64_t seed, std::uint64_t n,
                          SamplerOptions options = {}) {
  SamplerConfig config{params, policy, algorithm, seed, options};
  return sample_many(config, n, workers());
}

std::vector<double> total_histogram(const std::vector<Sample>& samples, std::size_t bins) {
  std::vector<double> h(bins, 0.0);
  for (const Sample& s : samples) {
    h[static_cast<std::size_t>(std::min<Length>(beta(s.state, 0), static_cast<Length>(bins - 1)))] += 1.0;
  }
  return h;
}

void criterion1() {
  const NetworkParams params(2, 1.0);
  const double rho = 0.5;
  SamplerOptions options;
  options.sorted_fast_path = false;
  const auto samples = draws(params, PolicyDescriptor::uniform_routing(), Algorithm::kDomCftpEmpty,
                             1001, 100000, options);
  const double n = static_cast<double>(samples.size());
  std::vector<double> joint(121, 0.0);
  std::vector<std::vector<double>> marginal(2, std::vector<double>(11, 0.0));
  std::vector<double> marginal_overflow(2, 0.0);
  for (const Sample& s : samples) {
    if (s.state[0] <= 10 && s.state[1] <= 10) joint[s.state[0] * 11 + s.state[1]] += 1.0;
    for (std::size_t q = 0; q < 2; ++q) {
      if (s.state[q] <= 10) marginal[q][s.state[q]] += 1.0; else marginal_overflow[q] += 1.0;
    }
  }
  double tv = 0.0, inside_emp = 0.0, inside_model = 0.0;
  for (long a = 0; a <= 10; ++a) {
    for (long b = 0; b <= 10; ++b) {
      const double p = test::geometric_pmf(rho, a) * test::geometric_pmf(rho, b);
      const double e = joint[a * 11 + b] / n;
      tv += std::abs(e - p);
      inside_emp += e;
      inside_model += p;
    }
  }
  tv = 0.5 * (tv + std::abs(inside_emp - inside_model));
  std::vector<double> probs;
  for (long k = 0; k <= 10; ++k) probs.push_back(test::geometric_pmf(rho, k));
  const double p0 = test::chi_square_gof(marginal[0], probs, marginal_overflow[0]).p;
  const double p1 = test::chi_square_gof(marginal[1], probs, marginal_overflow[1]).p;
  report(1, "UR exactness, c=2 lambda=1, empty-start DomCFTP, 1e5 draws",
         tv < kTvJoint && p0 > kMinP && p1 > kMinP,
         fmt("TV=%.4f < 0.02", tv) + fmt(", marginal p=%.4f", p0) + fmt(", %.4f > 0.001", p1));
}

void criterion2() {
  const NetworkParams params(3, 2.0);
  const auto samples = draws(params, PolicyDescriptor::mmc_steal(), Algorithm::kDomCftpSandwich,
                             2002, 100000);
  const auto hist = total_histogram(samples, 200);
  const auto emp = test::normalized(hist);
  double wait = 0.0;
  for (std::size_t k = 3; k < emp.size(); ++k) wait += emp[k];
  std::vector<double> model;
  for (std::int64_t k = 0; k < 199; ++k) model.push_back(mmc_pmf(3, 2.0, k));
  double tail = 1.0;
  for (double p : model) tail -= p;
  model.push_back(tail);
  const double tv = test::tv_distance(emp, model);
  const double target = erlang_c(3, 2.0);
  report(2, "M/M/c via work stealing, c=3 lambda=2, sandwich DomCFTP, 1e5 draws",
         std::abs(wait - target) <= kErlangTolerance && tv < kTvMmc,
         fmt("P(total>=3)=%.4f", wait) + fmt(" vs %.4f", target) + fmt(" +-0.01, TV=%.4f < 0.02", tv));
}

void criterion3() {
  const NetworkParams heavy(4, 3.0);
  const auto jsq2 = PolicyDescriptor::power_of_d(2);
  const auto a = draws(heavy, jsq2, Algorithm::kDomCftpEmpty, 3003, 100000);
  const auto b = draws(heavy, jsq2, Algorithm::kDomCftpSandwich, 3004, 100000);
  const double p = test::chi_square_two_sample(total_histogram(a, 200), total_histogram(b, 200)).p;

  const NetworkParams light(2, 0.2);
  SamplerOptions ar_options;
  ar_options.max_trials = 1000000;
  const auto policy = PolicyDescriptor::join_shortest();
  const auto ar = draws(light, policy, Algorithm::kAcceptReject, 3005, 10000, ar_options);
  const auto empty = draws(light, policy, Algorithm::kDomCftpEmpty, 3006, 10000);
  const double tv = test::tv_distance(test::normalized(total_histogram(ar, 20)),
                                      test::normalized(total_histogram(empty, 20)));
  report(3, "cross-algorithm agreement (JSQ(2) c=4 lambda=3 empty vs sandwich; JSQ c=2 lambda=0.2 AR vs empty)",
         p > kMinP && tv < kTvAr, fmt("two-sample p=%.4f > 0.001", p) + fmt(", AR TV=%.4f < 0.05", tv));
}

// beta_n(x) <= beta_n(y) for every n, by definition.
bool dominated_by_definition(const std::vector<Length>& x, const std::vector<Length>& y) {
  const Length top = std::max(*std::max_element(x.begin(), x.end()), *std::max_element(y.begin(), y.end()));
  for (Length n = 0; n <= top; ++n) {
    Length bx = 0, by = 0;
    for (Length v : x) bx += std::max<Length>(v - n, 0);
    for (Length v : y) by += std::max<Length>(v - n, 0);
    if (bx > by) return false;
  }
  return true;
}

void criterion4() {
  CounterStream rng(4004, StreamDomain::kAux, 0);
  std::uint64_t violations = 0, steps = 0;
  for (int scenario = 0; scenario < 1000; ++scenario) {
    const std::size_t c = 2 + static_cast<std::size_t>(rng.below(7));
    auto base = std::vector<PolicyDescriptor>{
        PolicyDescriptor::uniform_routing(), PolicyDescriptor::join_shortest(),
        PolicyDescriptor::power_of_d(1 + rng.below(c)), PolicyDescriptor::power_of_d(2, true),
        PolicyDescriptor::idle_first(), PolicyDescriptor::idle_one_first(),
        PolicyDescriptor::mmc_steal()};
    PolicyDescriptor policy = base[rng.below(base.size())];
    if (rng.bernoulli(0.3)) {
      std::vector<std::vector<std::size_t>> hoods(c);
      for (auto& h : hoods)
        for (std::size_t j = 0; j < c; ++j)
          if (rng.bernoulli(0.5)) h.push_back(j);
      policy = PolicyDescriptor::graph_restricted(policy, Topology(std::move(hoods)));
    }
    const NetworkParams params(c, (0.05 + 0.9 * rng.uniform01()) * static_cast<double>(c));

    V y(c);
    for (auto& v : y) v = static_cast<Length>(rng.below(8));
    V x = y;
    // Move tasks downward: removals and transfers from a queue to a queue at
    // least two shorter.
    const int moves = static_cast<int>(rng.below(12));
    for (int m = 0; m < moves; ++m) {
      const std::size_t i = rng.below(c), j = rng.below(c);
      if (rng.bernoulli(0.5)) {
        if (x[i] > 0) --x[i];
      } else if (x[i] >= x[j] + 2) {
        --x[i];
        ++x[j];
      }
    }
    if (!dominated_by_definition(x, y)) ++violations;

    QueueState xs(x);
    SortedView view = sort_state(xs);
    V ys = sorted_lengths(y);
    for (int n = 0; n < 10000; ++n) {
      coupled_step(xs, view, ys, draw_mark(params, rng), StepRandomness{rng()}, policy);
      ++steps;
      const bool ok = preorder_leq_sorted(view.sorted, ys) &&
                      (n % 64 != 0 || dominated_by_definition(xs.vector(), ys));
      if (!ok) ++violations;
    }
  }
  report(4, "coupling preserves the preorder, 1e3 scenarios x 1e4 steps", violations == 0,
         std::to_string(violations) + " violations in " + std::to_string(steps) + " steps");
}

void criterion5() {
  std::vector<V> all;
  for (Length a = 0; a < 4; ++a)
    for (Length b = 0; b < 4; ++b)
      for (Length c = 0; c < 4; ++c) all.push_back({a, b, c});
  const std::size_t k = all.size();
  std::vector<char> leq(k * k);
  std::uint64_t mismatches = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      leq[i * k + j] = preorder_leq(all[i], all[j]);
      if (leq[i * k + j] != dominated_by_definition(all[i], all[j])) ++mismatches;
    }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const bool mutual = leq[i * k + j] && leq[j * k + i];
      if (mutual != (sorted_lengths(all[i]) == sorted_lengths(all[j]))) ++mismatches;
    }
  std::uint64_t intransitive = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      if (!leq[i * k + j]) continue;
      for (std::size_t l = 0; l < k; ++l) {
        if (leq[j * k + l] && !leq[i * k + l]) ++intransitive;
      }
    }
  report(5, "preorder brute force over {0..3}^3", mismatches == 0 && intransitive == 0,
         std::to_string(mismatches) + " mismatches, " + std::to_string(intransitive) +
             " transitivity failures");
}

void criterion6() {
  const NetworkParams params(3, 2.5);
  CounterStream rng(6006, StreamDomain::kAux, 0);
  std::uint64_t mismatches = 0;
  for (int s = 0; s < 1000; ++s) {
    BackwardSegment seg(sorted_lengths(sample_stationary(params, rng).lengths()));
    std::vector<V> stored{seg.newest()};
    for (int i = 0; i < 1000; ++i) {
      seg.extend(params, rng);
      stored.push_back(seg.deepest());
    }
    V y = seg.deepest();
    for (std::int64_t t = -999; t <= 0; ++t) {
      step_sorted_ur(y, seg.mark_at(t));
      if (y != stored[static_cast<std::size_t>(-t)]) ++mismatches;
    }
  }
  report(6, "backward segments replay forward exactly, 1e3 x 1e3", mismatches == 0,
         std::to_string(mismatches) + " mismatched states");
}

void criterion7() {
  const NetworkParams params(4, 3.0);
  const std::vector<Functional> f{Functional{FunctionalKind::kBeta, 1}};
  const auto jsq = estimate(draws(params, PolicyDescriptor::join_shortest(), Algorithm::kDomCftpEmpty, 7007, 100000), f);
  const auto ur = estimate(draws(params, PolicyDescriptor::uniform_routing(), Algorithm::kDomCftpEmpty, 7008, 100000), f);
  const auto& a = jsq.functionals[0];
  const auto& b = ur.functionals[0];
  const double se = std::hypot(a.std_error, b.std_error);
  const double gap = b.mean - a.mean;
  report(7, "JSQ below UR in E[beta_1], c=4 lambda=3, 1e5 draws each", gap > kDominanceSigmas * se,
         fmt("JSQ %.4f", a.mean) + fmt(", UR %.4f", b.mean) + fmt(", gap/se=%.1f > 3", gap / se));
}

void criterion8() {
  const NetworkParams params(2, 1.0);
  SamplerOptions options;
  options.max_depth = 1000000;
  std::vector<Sample> samples;
  bool all_terminate = true;
  try {
    samples = draws(params, PolicyDescriptor::join_shortest(), Algorithm::kDomCftpEmpty, 8008, 10000, options);
  } catch (const std::exception&) {
    all_terminate = false;
  }
  std::string detail = all_terminate ? "10000/10000 terminated within 1e6" : "some draws exceeded 1e6";
  if (all_terminate) {
    std::vector<double> depth;
    for (const Sample& s : samples) depth.push_back(static_cast<double>(s.depth));
    std::sort(depth.begin(), depth.end());
    const double n = static_cast<double>(depth.size());
    // Least-squares slope of log S(d) over 1e-2 <= S(d) <= 1e-1.
    double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
    for (std::size_t i = 0; i < depth.size(); ++i) {
      const double surv = (n - static_cast<double>(i + 1)) / n;
      if (surv < 1e-2 || surv > 1e-1) continue;
      const double y = std::log(surv);
      sx += depth[i]; sy += y; sxx += depth[i] * depth[i]; sxy += depth[i] * y; ++m;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    detail += fmt(", max |N|=%.0f", depth.back()) + fmt(", log-survival slope %.4f per step", slope);
  }
  report(8, "empty-start DomCFTP terminates, c=2 lambda=1, 1e4 draws", all_terminate, detail);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                    criterion5, criterion6, criterion7, criterion8};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), "raised", false, e.what());
    }
  }
  return failures == 0 ? 0 : 1;
}
