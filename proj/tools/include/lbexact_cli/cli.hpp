#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lbexact/estimate.hpp"
#include "lbexact/policy.hpp"
#include "lbexact/sampler.hpp"
#include "lbexact/state.hpp"

namespace lbexact::cli {

enum class OutputFormat { kJsonl, kCsv };

struct RunConfig {
  NetworkParams params;
  PolicyDescriptor policy;
  Algorithm algorithm = Algorithm::kDomCftpEmpty;
  std::uint64_t n_samples = 1;
  std::uint64_t seed = 0;
  SamplerOptions options;
  std::uint32_t max_retries = 0;
  std::vector<Functional> functionals;
  std::optional<std::string> output;
  OutputFormat format = OutputFormat::kJsonl;
  std::size_t workers = 1;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSampler = 3;

// Parses flags (and an optional --config key=value file, overridden by flags).
// Returns the exit code when the run should stop early (help, errors).
std::optional<RunConfig> parse_run_config(int argc, const char* const* argv, std::ostream& out,
                                          std::ostream& err, int& exit_code);

void print_summary(std::ostream& out, const RunConfig& config, const EstimateReport& report);

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lbexact::cli
