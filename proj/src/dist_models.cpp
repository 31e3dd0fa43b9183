#include "qboot/dist_models.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qboot {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double g_apply(const GTransform& g, double x) {
  return g.m_coef * std::pow(std::abs(x), g.rho) * sgn(x);
}

double g_inverse(const GTransform& g, double y) {
  return std::pow(std::abs(y) / std::abs(g.m_coef), 1.0 / g.rho) * sgn(y) * sgn(g.m_coef);
}

PowerLocalModel PowerLocalModel::canonical(double rho, double m_coef) {
  return make(rho, m_coef, 0.0, 0.5);
}

PowerLocalModel PowerLocalModel::make(double rho, double m_coef, double t_p, double p) {
  require(rho > 0.0, "power_local: rho must be > 0");
  require(m_coef > 0.0, "power_local: m must be > 0 for a nondecreasing cdf");
  require(p > 0.0 && p < 1.0, "power_local: p must lie in (0,1)");
  PowerLocalModel m;
  m.rho = rho;
  m.m_coef = m_coef;
  m.t_p = t_p;
  m.p = p;
  m.lo = t_p - std::pow(p / m_coef, 1.0 / rho);
  m.hi = t_p + std::pow((1.0 - p) / m_coef, 1.0 / rho);
  return m;
}

double cdf(const PowerLocalModel& model, double t) {
  if (t < model.lo) return 0.0;
  if (t >= model.hi) return 1.0;
  const double v = model.p + g_apply(GTransform{model.rho, model.m_coef}, t - model.t_p);
  return std::min(1.0, std::max(0.0, v));
}

double quantile(const PowerLocalModel& model, double q) {
  require(q > 0.0 && q < 1.0, "quantile: q must lie in (0,1)");
  return model.t_p + g_inverse(GTransform{model.rho, model.m_coef}, q - model.p);
}

double cdf(const GaussianModel& model, double t) {
  return std_normal_cdf((t - model.mean) / model.sd);
}

double quantile(const GaussianModel& model, double q) {
  require(q > 0.0 && q < 1.0, "quantile: q must lie in (0,1)");
  return model.mean + model.sd * std_normal_quantile(q);
}

double pdf(const GaussianModel& model, double t) {
  const double z = (t - model.mean) / model.sd;
  return std::exp(-0.5 * z * z) / (model.sd * std::sqrt(2.0 * M_PI));
}

double cdf(const DistributionModel& model, double t) {
  return std::visit([t](const auto& m) { return cdf(m, t); }, model);
}

double quantile(const DistributionModel& model, double q) {
  return std::visit([q](const auto& m) { return quantile(m, q); }, model);
}

LocalExpansion local_expansion(const DistributionModel& model, double p) {
  require(p > 0.0 && p < 1.0, "local_expansion: p must lie in (0,1)");
  if (const auto* pl = std::get_if<PowerLocalModel>(&model)) {
    require(std::abs(p - pl->p) < 1e-12,
            "local_expansion: power_local model only expands at its own p");
    return LocalExpansion{pl->rho, pl->m_coef, pl->t_p, pl->p};
  }
  const auto& g = std::get<GaussianModel>(model);
  const double t_p = quantile(g, p);
  return LocalExpansion{1.0, pdf(g, t_p), t_p, p};
}

double std_normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Wichura's algorithm AS241 (PPND16).
double std_normal_quantile(double u) {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::invalid_argument("std_normal_quantile: u must lie in (0,1)");
  }
  const double q = u - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                 6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
               1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
             1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                 3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
               5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
             4.2313330701600911252e1) * r + 1.0);
  }
  double r = q < 0.0 ? u : 1.0 - u;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
              3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
            4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
            2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
            5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
            5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

nlohmann::json to_json(const DistributionModel& model) {
  if (const auto* pl = std::get_if<PowerLocalModel>(&model)) {
    return nlohmann::json{{"kind", "power_local"}, {"rho", pl->rho}, {"m", pl->m_coef},
                          {"tp", pl->t_p},         {"p", pl->p},     {"lo", pl->lo},
                          {"hi", pl->hi}};
  }
  const auto& g = std::get<GaussianModel>(model);
  return nlohmann::json{{"kind", "gaussian"}, {"mean", g.mean}, {"sd", g.sd}};
}

namespace {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const char* where) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string(where) + ": unknown key '" + item.key() + "'");
    }
  }
}

}  // namespace

DistributionModel model_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind"), "model: expected object with 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power_local") {
    reject_unknown_keys(j, {"kind", "rho", "m", "tp", "p", "lo", "hi"}, "power_local model");
    const double rho = j.at("rho").get<double>();
    const double m = j.at("m").get<double>();
    const double tp = j.value("tp", 0.0);
    const double p = j.value("p", 0.5);
    PowerLocalModel model = PowerLocalModel::make(rho, m, tp, p);
    if (j.contains("lo")) {
      require(std::abs(j.at("lo").get<double>() - model.lo) < 1e-9,
              "power_local model: 'lo' inconsistent with (rho, m, tp, p)");
    }
    if (j.contains("hi")) {
      require(std::abs(j.at("hi").get<double>() - model.hi) < 1e-9,
              "power_local model: 'hi' inconsistent with (rho, m, tp, p)");
    }
    return model;
  }
  if (kind == "gaussian") {
    reject_unknown_keys(j, {"kind", "mean", "sd"}, "gaussian model");
    GaussianModel g{j.value("mean", 0.0), j.value("sd", 1.0)};
    require(g.sd > 0.0, "gaussian model: sd must be > 0");
    return g;
  }
  throw std::invalid_argument("model: unknown kind '" + kind + "'");
}

std::string model_id(const DistributionModel& model) {
  std::ostringstream os;
  if (const auto* pl = std::get_if<PowerLocalModel>(&model)) {
    os << "power_local(rho=" << pl->rho << ",m=" << pl->m_coef << ",tp=" << pl->t_p
       << ",p=" << pl->p << ")";
  } else {
    const auto& g = std::get<GaussianModel>(model);
    os << "gaussian(mean=" << g.mean << ",sd=" << g.sd << ")";
  }
  return os.str();
}

}  // namespace qboot
