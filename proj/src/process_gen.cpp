#include "qboot/process_gen.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qboot/report.hpp"
#include "qboot/rng.hpp"

namespace qboot {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double weights_norm(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return std::sqrt(s);
}

}  // namespace

ProcessSpec ProcessSpec::iid(DistributionModel marginal) {
  ProcessSpec s;
  s.kind = ProcessKind::Iid;
  s.marginal = std::move(marginal);
  s.mixing_note = "iid: alpha(k) = 0 for all k >= 1";
  return s;
}

ProcessSpec ProcessSpec::gauss_ar1(double phi, DistributionModel marginal) {
  require(std::abs(phi) < 1.0, "gauss_ar1: |phi| must be < 1");
  ProcessSpec s;
  s.kind = ProcessKind::GaussAr1;
  s.phi = phi;
  s.marginal = std::move(marginal);
  std::ostringstream note;
  note << "gaussian AR(1) copula: alpha(k) decays geometrically, O(|phi|^k) with phi=" << phi
       << "; sum_k alpha(k) finite";
  s.mixing_note = note.str();
  return s;
}

ProcessSpec ProcessSpec::m_dependent(std::vector<double> weights, DistributionModel marginal) {
  require(!weights.empty(), "m_dependent: weights must be nonempty");
  require(weights_norm(weights) > 0.0, "m_dependent: weights must have a nonzero entry");
  ProcessSpec s;
  s.kind = ProcessKind::MDependent;
  s.weights = std::move(weights);
  s.marginal = std::move(marginal);
  std::ostringstream note;
  note << "m-dependent moving average: alpha(k) = 0 for k > " << s.dependence_order();
  s.mixing_note = note.str();
  return s;
}

Sample generate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "generate: n must be >= 1");
  Rng rng(seed);
  Sample out;
  out.values.resize(n);
  out.seed = seed;
  out.spec_id = process_id(spec);

  switch (spec.kind) {
    case ProcessKind::Iid: {
      for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = quantile(spec.marginal, rng.uniform01());
      }
      break;
    }
    case ProcessKind::GaussAr1: {
      const double phi = spec.phi;
      const double unit_scale = std::sqrt(1.0 - phi * phi);
      // Stationary start: Z_0 ~ N(0, 1/(1-phi^2)), no burn-in needed.
      double z = rng.normal() / unit_scale;
      for (std::size_t i = 0; i < n; ++i) {
        z = phi * z + rng.normal();
        out.values[i] = quantile(spec.marginal, std_normal_cdf(z * unit_scale));
      }
      break;
    }
    case ProcessKind::MDependent: {
      const std::size_t m = spec.dependence_order();
      const double norm = weights_norm(spec.weights);
      std::vector<double> eps(n + m);
      for (double& e : eps) e = rng.normal();
      for (std::size_t i = 0; i < n; ++i) {
        double z = 0.0;
        for (std::size_t j = 0; j <= m; ++j) z += spec.weights[j] * eps[i + j];
        out.values[i] = quantile(spec.marginal, std_normal_cdf(z / norm));
      }
      break;
    }
  }
  return out;
}

double latent_lag_correlation(const ProcessSpec& spec, std::size_t lag) {
  if (lag == 0) return 1.0;
  switch (spec.kind) {
    case ProcessKind::Iid:
      return 0.0;
    case ProcessKind::GaussAr1:
      return std::pow(spec.phi, static_cast<double>(lag));
    case ProcessKind::MDependent: {
      const std::size_t m = spec.dependence_order();
      if (lag > m) return 0.0;
      double num = 0.0;
      double den = 0.0;
      for (std::size_t j = 0; j + lag <= m; ++j) num += spec.weights[j] * spec.weights[j + lag];
      for (double w : spec.weights) den += w * w;
      return num / den;
    }
  }
  return 0.0;
}

nlohmann::json to_json(const ProcessSpec& spec) {
  nlohmann::json j;
  switch (spec.kind) {
    case ProcessKind::Iid:
      j["kind"] = "iid";
      break;
    case ProcessKind::GaussAr1:
      j["kind"] = "gauss_ar1";
      j["phi"] = spec.phi;
      break;
    case ProcessKind::MDependent:
      j["kind"] = "m_dependent";
      j["m"] = spec.dependence_order();
      j["weights"] = spec.weights;
      break;
  }
  j["marginal"] = to_json(spec.marginal);
  j["mixing_note"] = spec.mixing_note;
  return j;
}

ProcessSpec process_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind"), "process: expected object with 'kind'");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k != "kind" && k != "phi" && k != "m" && k != "weights" && k != "marginal" &&
        k != "mixing_note") {
      throw std::invalid_argument("process: unknown key '" + k + "'");
    }
  }
  const std::string kind = j.at("kind").get<std::string>();
  DistributionModel marginal =
      j.contains("marginal") ? model_from_json(j.at("marginal")) : DistributionModel(GaussianModel{});
  if (kind == "iid") return ProcessSpec::iid(std::move(marginal));
  if (kind == "gauss_ar1") return ProcessSpec::gauss_ar1(j.at("phi").get<double>(), std::move(marginal));
  if (kind == "m_dependent") {
    auto weights = j.at("weights").get<std::vector<double>>();
    if (j.contains("m")) {
      require(j.at("m").get<std::size_t>() + 1 == weights.size(),
              "m_dependent: m must equal len(weights) - 1");
    }
    return ProcessSpec::m_dependent(std::move(weights), std::move(marginal));
  }
  throw std::invalid_argument("process: unknown kind '" + kind + "'");
}

std::string process_id(const ProcessSpec& spec) {
  std::ostringstream os;
  switch (spec.kind) {
    case ProcessKind::Iid:
      os << "iid";
      break;
    case ProcessKind::GaussAr1:
      os << "gauss_ar1(phi=" << spec.phi << ")";
      break;
    case ProcessKind::MDependent:
      os << "m_dependent(m=" << spec.dependence_order() << ")";
      break;
  }
  os << "/" << model_id(spec.marginal);
  return os.str();
}

void write_sample_csv(std::ostream& os, const Sample& sample, const ProcessSpec& spec) {
  os << "# process=" << to_json(spec).dump() << " seed=" << sample.seed << "\n";
  os << "value\n";
  for (double v : sample.values) os << format_double(v) << "\n";
}

}  // namespace qboot
