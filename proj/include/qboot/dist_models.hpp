#pragma once

#include <string>
#include <variant>

#include <json.hpp>

namespace qboot {

// g(x) = m |x|^rho sgn(x), the local power transform of a cdf around its
// p-quantile. Strictly monotone for m != 0, odd, g(0) = 0.
struct GTransform {
  double rho = 1.0;
  double m_coef = 1.0;
};

double g_apply(const GTransform& g, double x);
// Unique x with g(x) = y.
double g_inverse(const GTransform& g, double y);

// Distribution whose cdf is exactly F(t) = p + m |t - t_p|^rho sgn(t - t_p)
// on [lo, hi], clamped to [0,1] outside. The local power expansion at t_p is
// exact (no higher-order term), so quantile-error experiments see pure
// sampling noise.
struct PowerLocalModel {
  double rho = 2.0;
  double m_coef = 0.5;
  double t_p = 0.0;
  double p = 0.5;
  double lo = -1.0;
  double hi = 1.0;

  // Symmetric instance with t_p = 0, p = 1/2, support [-(1/(2m))^{1/rho}, +].
  static PowerLocalModel canonical(double rho, double m_coef);
  // General instance; support endpoints are where the cdf hits 0 and 1.
  static PowerLocalModel make(double rho, double m_coef, double t_p, double p);
};

struct GaussianModel {
  double mean = 0.0;
  double sd = 1.0;
};

using DistributionModel = std::variant<PowerLocalModel, GaussianModel>;

double cdf(const PowerLocalModel& model, double t);
double quantile(const PowerLocalModel& model, double q);
double cdf(const GaussianModel& model, double t);
double quantile(const GaussianModel& model, double q);
double pdf(const GaussianModel& model, double t);
double cdf(const DistributionModel& model, double t);
double quantile(const DistributionModel& model, double q);

// Local expansion F(t_p + h) - F(t_p) = m_coef |h|^rho sgn(h) + o(|h|^rho)
// of a model at its p-quantile. For the Gaussian this is the differentiable
// case rho = 1, m_coef = f(t_p). PowerLocalModel only knows its expansion at
// its own p; asking for another probability is rejected.
struct LocalExpansion {
  double rho = 1.0;
  double m_coef = 1.0;
  double t_p = 0.0;
  double p = 0.5;

  GTransform transform() const { return GTransform{rho, m_coef}; }
};

LocalExpansion local_expansion(const DistributionModel& model, double p);

// Standard normal cdf/quantile, |abs error| below 1e-14; the quantile is the
// Wichura AS241 rational approximation.
double std_normal_cdf(double z);
double std_normal_quantile(double u);

nlohmann::json to_json(const DistributionModel& model);
DistributionModel model_from_json(const nlohmann::json& j);
std::string model_id(const DistributionModel& model);

}  // namespace qboot
