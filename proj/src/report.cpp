#include "qboot/report.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace qboot {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec != std::errc{}) throw std::runtime_error("format_double: to_chars failed");
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_report_csv(std::ostream& os, const ExperimentReport& report) {
  os << "experiment,n,metric,value,stderr,seed\n";
  for (const ReportRow& r : report.rows) {
    os << r.experiment << ',' << r.n << ',' << r.metric << ',' << format_double(r.value) << ','
       << format_double(r.stderr_) << ',' << report.base_seed << "\n";
  }
}

nlohmann::json report_to_json(const ExperimentReport& report) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& r : report.rows) {
    rows.push_back({{"experiment", r.experiment},
                    {"n", r.n},
                    {"metric", r.metric},
                    {"value", r.value},
                    {"stderr", r.stderr_}});
  }
  return nlohmann::json{{"config", report.config},
                        {"config_hash", report.config_hash},
                        {"seed", report.base_seed},
                        {"rows", rows},
                        {"wall_seconds", report.wall_seconds}};
}

}  // namespace qboot
