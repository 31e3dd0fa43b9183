#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qboot {

// One metric value of one experiment at one sample size, plus the Monte
// Carlo uncertainty scale reported alongside it.
struct ReportRow {
  std::string experiment;
  std::size_t n = 0;
  std::string metric;
  double value = 0.0;
  double stderr_ = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  nlohmann::json config;        // re-runnable configuration
  std::uint64_t base_seed = 0;
  std::uint64_t config_hash = 0;
  double wall_seconds = 0.0;    // timing metadata, excluded from determinism checks
};

// Shortest round-trip decimal form (std::to_chars), identical across runs.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view s);

// Fixed column order: experiment,n,metric,value,stderr,seed.
void write_report_csv(std::ostream& os, const ExperimentReport& report);
nlohmann::json report_to_json(const ExperimentReport& report);

}  // namespace qboot
