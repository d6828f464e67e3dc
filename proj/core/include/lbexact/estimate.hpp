#pragma once

// Monte Carlo estimation over perfect draws, and the M/M/c closed forms used
// as oracles.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbexact/sampler.hpp"
#include "lbexact/state.hpp"

namespace lbexact {

enum class FunctionalKind { kBeta, kAlpha, kTotal, kMax };

struct Functional {
  FunctionalKind kind = FunctionalKind::kTotal;
  Length n = 0;  // level for kBeta / kAlpha

  // beta:<n> | alpha:<n> | total | max
  static Functional parse(std::string_view text);
  std::string name() const;
  double evaluate(std::span<const Length> state) const noexcept;

  friend bool operator==(const Functional&, const Functional&) = default;
};

// Welford one-pass mean and variance.
class RunningMoments {
 public:
  void add(double x) noexcept;

  std::uint64_t count() const noexcept { return n_; }
  double mean() const noexcept { return mean_; }
  // Unbiased sample variance; 0 when fewer than two values.
  double variance() const noexcept;
  double std_error() const noexcept;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline constexpr double kNormalQuantile975 = 1.96;

struct FunctionalEstimate {
  Functional functional;
  double mean = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t count = 0;
  bool single_sample = false;  // std_error undefined, reported as 0
};

struct DepthStats {
  double mean_depth = 0.0;
  std::uint64_t max_depth = 0;
  double mean_rounds = 0.0;
};

struct EstimateReport {
  std::vector<FunctionalEstimate> functionals;
  DepthStats depth;
  double wall_seconds = 0.0;
};

// Throws ConfigError on empty input.
EstimateReport estimate(std::span<const Sample> samples, std::span<const Functional> functionals);

// M/M/c delay probability for offered load a, 0 < a < c, via the Erlang-B recursion.
double erlang_c(int c, double a);

// Stationary P(N = n) of the M/M/c queue with unit service rate per server.
double mmc_pmf(int c, double lambda, std::int64_t n);

}  // namespace lbexact
