#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qboot/dist_models.hpp"

namespace qboot {

enum class ProcessKind { Iid, GaussAr1, MDependent };

// Recipe for a stationary sequence with marginal exactly `marginal`:
// a unit-variance stationary Gaussian latent series Z is mapped through
// U = Phi(Z), X = F^{-1}(U). The latent dependence fixes the mixing rate
// (geometric for AR(1), cut off at lag m for the moving average), recorded
// in mixing_note.
struct ProcessSpec {
  ProcessKind kind = ProcessKind::Iid;
  double phi = 0.0;              // gauss_ar1 only, |phi| < 1
  std::vector<double> weights;   // m_dependent only, size m+1
  DistributionModel marginal = GaussianModel{};
  std::string mixing_note;

  static ProcessSpec iid(DistributionModel marginal);
  static ProcessSpec gauss_ar1(double phi, DistributionModel marginal);
  static ProcessSpec m_dependent(std::vector<double> weights, DistributionModel marginal);

  std::size_t dependence_order() const { return weights.empty() ? 0 : weights.size() - 1; }
};

struct Sample {
  std::vector<double> values;
  std::string spec_id;
  std::uint64_t seed = 0;

  std::size_t n() const { return values.size(); }
};

// Deterministic given (spec, n, seed).
Sample generate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

// Analytic autocorrelation of the latent Gaussian series at the given lag.
double latent_lag_correlation(const ProcessSpec& spec, std::size_t lag);

nlohmann::json to_json(const ProcessSpec& spec);
ProcessSpec process_from_json(const nlohmann::json& j);
std::string process_id(const ProcessSpec& spec);

// Single-column CSV, header comment carries the generating spec and seed.
void write_sample_csv(std::ostream& os, const Sample& sample, const ProcessSpec& spec);

}  // namespace qboot
