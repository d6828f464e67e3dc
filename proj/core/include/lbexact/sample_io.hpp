#pragma once

// Line-oriented sample files and the summary table.
//
// Sample file: one JSON object per line,
//   {"algorithm":"empty","depth":17,"draw_index":0,"rounds":0,"seed":7,"sorted":false,"state":[1,0,2]}

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lbexact/estimate.hpp"
#include "lbexact/sampler.hpp"

namespace lbexact {

std::string to_jsonl(const Sample& sample);
Sample sample_from_jsonl(const std::string& line);

void write_jsonl(std::ostream& out, std::span<const Sample> samples);
// Skips blank lines; throws ConfigError naming the line on malformed input.
std::vector<Sample> read_jsonl(std::istream& in);

// functional,estimate,std_error,ci_low,ci_high,n
void write_summary_csv(std::ostream& out, const EstimateReport& report);

}  // namespace lbexact
