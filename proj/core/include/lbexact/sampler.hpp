#pragma once

// Perfect samplers for the invariant law of a load-balancing network.
//
//  - kAcceptReject     Palm acceptance-rejection in direct time. Finite but
//                      infinite-mean number of trials; needs a trial budget.
//  - kDomCftpEmpty     dominated CFTP: run the dominating chain backward until
//                      it is empty, then replay the reconstructed marks
//                      forward from the empty state. Any policy.
//  - kDomCftpSandwich  dominated CFTP with doubling back-off and lower/upper
//                      sandwiching on sorted states. Exchangeable policies.
//
// Every draw is a pure function of (seed, draw_index, attempt, configuration).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "lbexact/chain.hpp"
#include "lbexact/policy.hpp"
#include "lbexact/state.hpp"

namespace lbexact {

enum class Algorithm { kAcceptReject, kDomCftpEmpty, kDomCftpSandwich };

std::string_view algorithm_name(Algorithm algorithm) noexcept;  // "ar" | "empty" | "sandwich"
Algorithm parse_algorithm(std::string_view text);

struct Sample {
  std::vector<Length> state;
  bool sorted = false;  // state is a nondecreasing arrangement
  Algorithm algorithm = Algorithm::kDomCftpEmpty;
  std::uint64_t depth = 0;   // |N| (empty), |M_K| (sandwich), L (ar)
  std::uint64_t rounds = 0;  // K (sandwich, ar); 0 for empty
  std::uint64_t seed = 0;    // master seed
  std::uint64_t draw_index = 0;

  friend bool operator==(const Sample&, const Sample&) = default;
};

// Doubling back-off M_k = 2^{k-1} m1.
struct BackoffStrategy {
  std::uint64_t m1 = 1;

  // ceil(c / (c - lambda)).
  static BackoffStrategy for_params(const NetworkParams& params);
  std::uint64_t depth_for_round(std::uint64_t round) const noexcept;
};

// How the sandwich bounds are advanced for a given exchangeable policy.
//  kMonotone       lower and upper both follow the policy (UR, JSQ, JSQ(d)).
//  kClassMonotone  MMC_STEAL: the policy update is monotone on the closed class
//                  "no empty queue beside a queue of length >= 2"; the upper
//                  bound uses the UR move while it lies outside that class.
//  kConservative   IQF, IOF: no monotone update exists; the lower bound takes
//                  JSQ arrivals and always-effective departures from the
//                  longest queue, the upper bound follows the UR move.
enum class SandwichMode { kMonotone, kClassMonotone, kConservative };
SandwichMode sandwich_mode(const PolicyDescriptor& policy);

// Closed class of the work-stealing network.
bool in_steal_class(std::span<const Length> sorted) noexcept;

// Lower-bound move used in kConservative mode; below every network chain.
void step_universal_lower(SortedLengths& sorted, Mark mark);

struct SandwichStep {
  std::uint64_t round;
  std::int64_t time;
  std::uint64_t u_seed;
  const SortedLengths& lower;
  const SortedLengths& upper;
  bool coalesced;
};

struct SamplerOptions {
  std::uint64_t max_depth = 10'000'000;
  std::uint64_t max_trials = 0;  // acceptance-rejection; must be set >= 1
  BackoffStrategy backoff{0};    // m1 = 0 selects BackoffStrategy::for_params
  bool redraw_u = false;         // fresh U_n in every back-off round
  bool sorted_fast_path = true;  // exchangeable policies replay on sorted states
  bool permute_output = false;   // uniformly permute sorted outputs
  bool verify = true;            // per-step ordering assertions
  std::function<void(const SandwichStep&)> on_sandwich_step;
};

struct DrawSeed {
  std::uint64_t seed = 0;
  std::uint64_t draw_index = 0;
  std::uint32_t attempt = 0;

  std::uint64_t key() const noexcept;
};

Sample sample_ar(const NetworkParams& params, const PolicyDescriptor& policy, DrawSeed seed,
                 const SamplerOptions& options);
Sample sample_domcftp_empty(const NetworkParams& params, const PolicyDescriptor& policy,
                            DrawSeed seed, const SamplerOptions& options);
Sample sample_domcftp_sandwich(const NetworkParams& params, const PolicyDescriptor& policy,
                               DrawSeed seed, const SamplerOptions& options);

Sample sample_one(const NetworkParams& params, const PolicyDescriptor& policy,
                  Algorithm algorithm, DrawSeed seed, const SamplerOptions& options);

struct SamplerConfig {
  NetworkParams params;
  PolicyDescriptor policy;
  Algorithm algorithm = Algorithm::kDomCftpEmpty;
  std::uint64_t seed = 0;
  SamplerOptions options;
  // Acceptance-rejection only: re-run a draw that ran out of trials with a
  // fresh attempt number, at most this many times.
  std::uint32_t max_retries = 0;
};

// Throws ConfigError on bad arguments, BatchError if any draw failed.
std::vector<Sample> sample_many(const SamplerConfig& config, std::uint64_t n, std::size_t workers = 1);

}  // namespace lbexact
