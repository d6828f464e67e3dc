#include "lbexact/estimate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "lbexact/errors.hpp"

namespace lbexact {

namespace {

Length parse_level(std::string_view text, std::string_view whole) {
  Length n = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, n);
  if (ec != std::errc{} || ptr != end || n < 0) {
    throw ConfigError("bad functional '" + std::string(whole) + "': level must be a nonnegative integer");
  }
  return n;
}

}  // namespace

Functional Functional::parse(std::string_view text) {
  if (text == "total") return {FunctionalKind::kTotal, 0};
  if (text == "max") return {FunctionalKind::kMax, 0};
  if (text.starts_with("beta:")) return {FunctionalKind::kBeta, parse_level(text.substr(5), text)};
  if (text.starts_with("alpha:")) return {FunctionalKind::kAlpha, parse_level(text.substr(6), text)};
  throw ConfigError("unknown functional '" + std::string(text) +
                    "' (expected beta:<n>|alpha:<n>|total|max)");
}

std::string Functional::name() const {
  switch (kind) {
    case FunctionalKind::kBeta: return "beta:" + std::to_string(n);
    case FunctionalKind::kAlpha: return "alpha:" + std::to_string(n);
    case FunctionalKind::kTotal: return "total";
    case FunctionalKind::kMax: return "max";
  }
  return "?";
}

double Functional::evaluate(std::span<const Length> state) const noexcept {
  switch (kind) {
    case FunctionalKind::kBeta: return static_cast<double>(beta(state, n));
    case FunctionalKind::kAlpha: return static_cast<double>(alpha(state, n));
    case FunctionalKind::kTotal: return static_cast<double>(beta(state, 0));
    case FunctionalKind::kMax:
      return state.empty() ? 0.0 : static_cast<double>(*std::max_element(state.begin(), state.end()));
  }
  return 0.0;
}

void RunningMoments::add(double x) noexcept {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

double RunningMoments::variance() const noexcept {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningMoments::std_error() const noexcept {
  return n_ < 2 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

EstimateReport estimate(std::span<const Sample> samples, std::span<const Functional> functionals) {
  if (samples.empty()) throw ConfigError("estimate needs at least one sample");
  EstimateReport report;
  std::vector<RunningMoments> moments(functionals.size());
  RunningMoments depth;
  RunningMoments rounds;
  for (const Sample& s : samples) {
    for (std::size_t f = 0; f < functionals.size(); ++f) {
      moments[f].add(functionals[f].evaluate(s.state));
    }
    depth.add(static_cast<double>(s.depth));
    rounds.add(static_cast<double>(s.rounds));
    report.depth.max_depth = std::max(report.depth.max_depth, s.depth);
  }
  report.depth.mean_depth = depth.mean();
  report.depth.mean_rounds = rounds.mean();
  for (std::size_t f = 0; f < functionals.size(); ++f) {
    FunctionalEstimate e;
    e.functional = functionals[f];
    e.mean = moments[f].mean();
    e.std_error = moments[f].std_error();
    e.ci_low = e.mean - kNormalQuantile975 * e.std_error;
    e.ci_high = e.mean + kNormalQuantile975 * e.std_error;
    e.count = moments[f].count();
    e.single_sample = e.count == 1;
    report.functionals.push_back(e);
  }
  return report;
}

double erlang_c(int c, double a) {
  if (c < 1) throw ConfigError("erlang_c needs c >= 1");
  if (!(a > 0.0) || !(a < static_cast<double>(c))) {
    throw ConfigError("erlang_c needs 0 < a < c (stability)");
  }
  double b = 1.0;
  for (int k = 1; k <= c; ++k) b = a * b / (k + a * b);
  return c * b / (c - a * (1.0 - b));
}

double mmc_pmf(int c, double lambda, std::int64_t n) {
  if (c < 1) throw ConfigError("mmc_pmf needs c >= 1");
  if (!(lambda > 0.0) || !(lambda < static_cast<double>(c))) {
    throw ConfigError("mmc_pmf needs 0 < lambda < c (stability)");
  }
  if (n < 0) return 0.0;
  const double rho = lambda / c;
  // Unnormalized t_k = lambda^k / prod_{j<=k} min(j, c).
  double t = 1.0;
  double z = 0.0;
  double tn = 0.0;
  for (int k = 0; k < c; ++k) {
    if (k > 0) t *= lambda / k;
    z += t;
    if (k == n) tn = t;
  }
  t *= lambda / c;  // t_c
  z += t / (1.0 - rho);
  if (n >= c) tn = t * std::pow(rho, static_cast<double>(n - c));
  return tn / z;
}

}  // namespace lbexact
