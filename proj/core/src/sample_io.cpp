#include "lbexact/sample_io.hpp"

#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "lbexact/errors.hpp"

namespace lbexact {

using nlohmann::json;

std::string to_jsonl(const Sample& sample) {
  json j;
  j["draw_index"] = sample.draw_index;
  j["state"] = sample.state;
  j["algorithm"] = std::string(algorithm_name(sample.algorithm));
  j["depth"] = sample.depth;
  j["rounds"] = sample.rounds;
  j["seed"] = sample.seed;
  j["sorted"] = sample.sorted;
  return j.dump();
}

Sample sample_from_jsonl(const std::string& line) {
  try {
    const json j = json::parse(line);
    Sample s;
    s.draw_index = j.at("draw_index").get<std::uint64_t>();
    s.state = j.at("state").get<std::vector<Length>>();
    s.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    s.depth = j.at("depth").get<std::uint64_t>();
    s.rounds = j.at("rounds").get<std::uint64_t>();
    s.seed = j.value("seed", std::uint64_t{0});
    s.sorted = j.value("sorted", false);
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed sample record: ") + e.what());
  }
}

void write_jsonl(std::ostream& out, std::span<const Sample> samples) {
  for (const Sample& s : samples) out << to_jsonl(s) << '\n';
}

std::vector<Sample> read_jsonl(std::istream& in) {
  std::vector<Sample> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      samples.push_back(sample_from_jsonl(line));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return samples;
}

void write_summary_csv(std::ostream& out, const EstimateReport& report) {
  out << "functional,estimate,std_error,ci_low,ci_high,n\n";
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  for (const FunctionalEstimate& e : report.functionals) {
    out << e.functional.name() << ',' << e.mean << ',' << e.std_error << ',' << e.ci_low << ','
        << e.ci_high << ',' << e.count << '\n';
  }
  out.precision(old_precision);
}

}  // namespace lbexact
