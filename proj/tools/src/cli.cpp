#include "lbexact_cli/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "lbexact/errors.hpp"
#include "lbexact/sample_io.hpp"

namespace lbexact::cli {

namespace {

struct RawFlags {
  std::size_t c = 0;
  double lambda = 0.0;
  std::string policy = "ur";
  std::string topology;
  std::string algorithm = "empty";
  std::uint64_t samples = 1000;
  std::uint64_t seed = 0;
  std::uint64_t backoff_m1 = 0;
  bool redraw_u = false;
  std::uint64_t max_depth = 10'000'000;
  std::uint64_t max_trials = 0;
  std::uint32_t max_retries = 0;
  std::vector<std::string> functionals;
  std::string output;
  std::string format = "jsonl";
  std::size_t workers = 1;
  bool experimental_ar = false;
  bool no_verify = false;
  bool permute = false;
};

RunConfig build(const RawFlags& f) {
  NetworkParams params(f.c, f.lambda);

  std::optional<Topology> topology;
  if (!f.topology.empty()) topology = load_topology(f.topology, params.servers());
  PolicyDescriptor policy = parse_policy(f.policy, topology ? &*topology : nullptr);
  policy.validate(params.servers());

  const Algorithm algorithm = parse_algorithm(f.algorithm);
  if (algorithm == Algorithm::kDomCftpSandwich && !policy.exchangeable()) {
    throw ConfigError("policy " + policy.name() +
                      " is not exchangeable; the sandwich sampler needs sorted states. "
                      "Use --algorithm empty instead.");
  }
  if (algorithm == Algorithm::kAcceptReject) {
    if (!f.experimental_ar) {
      throw ConfigError("--algorithm ar has infinite expected running time; pass --experimental-ar");
    }
    if (f.max_trials < 1) throw ConfigError("--algorithm ar requires --max-trials >= 1");
  }
  if (f.samples < 1) throw ConfigError("--samples must be >= 1");
  if (f.workers < 1) throw ConfigError("--workers must be >= 1");
  if (f.max_depth < 1) throw ConfigError("--max-depth must be >= 1");

  RunConfig config{params, policy};
  config.algorithm = algorithm;
  config.n_samples = f.samples;
  config.seed = f.seed;
  config.options.max_depth = f.max_depth;
  config.options.max_trials = f.max_trials;
  config.options.backoff = BackoffStrategy{f.backoff_m1};
  config.options.redraw_u = f.redraw_u;
  config.options.verify = !f.no_verify;
  config.options.permute_output = f.permute;
  config.max_retries = f.max_retries;
  for (const std::string& text : f.functionals) config.functionals.push_back(Functional::parse(text));
  if (config.functionals.empty()) config.functionals.push_back(Functional{FunctionalKind::kTotal, 0});
  if (!f.output.empty()) config.output = f.output;
  if (f.format == "jsonl") {
    config.format = OutputFormat::kJsonl;
  } else if (f.format == "csv") {
    config.format = OutputFormat::kCsv;
  } else {
    throw ConfigError("--format must be jsonl or csv");
  }
  config.workers = f.workers;
  return config;
}

}  // namespace

std::optional<RunConfig> parse_run_config(int argc, const char* const* argv, std::ostream& out,
                                          std::ostream& err, int& exit_code) {
  RawFlags f;
  CLI::App app{"Perfect sampling of Markovian load-balancing networks", "lbexact"};
  app.set_config("--config", "", "key=value file mirroring the flags; flags take precedence");
  app.add_option("--c", f.c, "number of servers (>= 2)")->required();
  app.add_option("--lambda", f.lambda, "arrival rate, 0 < lambda < c")->required();
  app.add_option("--policy", f.policy, "ur|jsq|jsq-d:<d>[:repl]|iqf|iof|mmc-steal|graph:<base>");
  app.add_option("--topology", f.topology, "neighborhood file for graph:<base>");
  app.add_option("--algorithm", f.algorithm, "ar|empty|sandwich");
  app.add_option("--samples", f.samples, "number of draws");
  app.add_option("--seed", f.seed, "master seed");
  app.add_option("--backoff-m1", f.backoff_m1, "first back-off depth (default ceil(c/(c-lambda)))");
  app.add_flag("--redraw-u", f.redraw_u, "fresh policy randomness in every back-off round");
  app.add_option("--max-depth", f.max_depth, "backward depth budget per draw");
  app.add_option("--max-trials", f.max_trials, "acceptance-rejection trial budget per draw");
  app.add_option("--max-retries", f.max_retries, "acceptance-rejection retries after running out of trials");
  app.add_option("--functional", f.functionals, "beta:<n>|alpha:<n>|total|max (repeatable)");
  app.add_option("--output", f.output, "output file");
  app.add_option("--format", f.format, "jsonl (samples) | csv (summary)");
  app.add_option("--workers", f.workers, "worker threads");
  app.add_flag("--experimental-ar", f.experimental_ar, "enable --algorithm ar");
  app.add_flag("--no-verify", f.no_verify, "skip per-step ordering assertions");
  app.add_flag("--permute", f.permute, "uniformly permute sorted draws");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    exit_code = kExitOk;
    return std::nullopt;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    exit_code = kExitConfig;
    return std::nullopt;
  }

  try {
    return build(f);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    exit_code = kExitConfig;
    return std::nullopt;
  }
}

void print_summary(std::ostream& out, const RunConfig& config, const EstimateReport& report) {
  out << "# c=" << config.params.servers() << " lambda=" << config.params.lambda()
      << " policy=" << config.policy.name() << " algorithm=" << algorithm_name(config.algorithm)
      << " samples=" << config.n_samples << " seed=" << config.seed << '\n';
  out << "# wall_seconds=" << std::fixed << std::setprecision(3) << report.wall_seconds
      << std::defaultfloat << " mean_depth=" << report.depth.mean_depth
      << " max_depth=" << report.depth.max_depth << " mean_rounds=" << report.depth.mean_rounds
      << '\n';
  write_summary_csv(out, report);
  for (const FunctionalEstimate& e : report.functionals) {
    if (e.single_sample) out << "# " << e.functional.name() << ": n=1, std_error reported as 0\n";
  }
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  int exit_code = kExitOk;
  const std::optional<RunConfig> config = parse_run_config(argc, argv, out, err, exit_code);
  if (!config) return exit_code;

  SamplerConfig sc{config->params, config->policy, config->algorithm, config->seed,
                   config->options, config->max_retries};
  const auto start = std::chrono::steady_clock::now();
  std::vector<Sample> samples;
  try {
    samples = sample_many(sc, config->n_samples, config->workers);
  } catch (const BatchError& e) {
    err << "error: " << e.what() << '\n';
    for (const DrawError& d : e.errors()) err << "  draw " << d.draw_index << ": " << d.message << '\n';
    return kExitSampler;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSampler;
  }
  EstimateReport report = estimate(samples, config->functionals);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (config->output) {
    std::ofstream file(*config->output);
    if (!file) {
      err << "error: cannot open " << *config->output << " for writing\n";
      return kExitConfig;
    }
    if (config->format == OutputFormat::kJsonl) {
      write_jsonl(file, samples);
    } else {
      write_summary_csv(file, report);
    }
  }
  print_summary(out, *config, report);
  return kExitOk;
}

}  // namespace lbexact::cli
