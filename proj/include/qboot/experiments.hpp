#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "qboot/block_bootstrap.hpp"
#include "qboot/process_gen.hpp"
#include "qboot/quantile_core.hpp"
#include "qboot/report.hpp"
#include "qboot/rng.hpp"

namespace qboot {

// Limit law of the scaled quantile error: g^{-1}(W) with W ~ N(0, sigma_lr^2),
// i.e. (|W|/m)^{1/rho} sgn(W). For rho = 1 this is normal.
struct LimitLawSpec {
  double rho = 1.0;
  double m_coef = 1.0;
  double sigma_lr = 1.0;  // long-run sd of sqrt(n)(F_n(t_p) - p); must be > 0
};

struct McConfig {
  std::vector<std::size_t> n_grid{256, 1024, 4096};
  std::size_t replicates = 2000;  // R
  double p = 0.5;
  std::uint64_t base_seed = 12345;
  ProcessSpec process = ProcessSpec::gauss_ar1(0.5, GaussianModel{});
  BootstrapPlan plan;

  // Long-run-variance oracle and limit-law reference sizes; 0 = default rule.
  std::size_t oracle_n = std::size_t{1} << 14;
  std::size_t oracle_replicates = 0;  // 0 -> max(500, min(R, 2000))
  std::size_t limit_count = 0;        // 0 -> max(10 R, 10000)

  // Z_rho sampler sizes.
  std::size_t zrho_count = 2000;
  std::size_t zrho_inner = 5000;

  unsigned threads = 0;  // runtime concern, never serialized; 0 = all cores

  void validate() const;
  std::size_t effective_oracle_replicates() const;
  std::size_t effective_limit_count() const;
};

nlohmann::json to_json(const McConfig& cfg);
McConfig mc_config_from_json(const nlohmann::json& j);

// Exact two-sample Kolmogorov-Smirnov distance: sup over the union of jump
// points of both step functions.
double ks_distance(const Ecdf& a, const Ecdf& b);
double ks_distance_sorted(std::span<const double> a_sorted, std::span<const double> b_sorted);
// Exact sup distance between a finite ECDF and a continuous cdf.
double ks_distance_to_cdf(const Ecdf& e, const std::function<double(double)>& cdf);

// Monte Carlo estimate of sigma^2 = Var[sqrt(n)(F_n(t_p) - p)] over
// `replicates` independent paths. `degenerate` flags an estimate within
// 3 standard errors of 0, which would void the consistency corollaries.
struct LrvarEstimate {
  double sigma2 = 0.0;
  double stderr_ = 0.0;
  bool degenerate = false;
};

LrvarEstimate long_run_variance_oracle(const ProcessSpec& process, double p, std::size_t n,
                                       std::size_t replicates, std::uint64_t seed,
                                       unsigned threads = 0);

std::vector<double> sample_limit_law(const LimitLawSpec& spec, std::size_t count,
                                     std::uint64_t seed);

// Closed-form cdf of the limit law: t -> Phi(m |t|^rho sgn(t) / sigma_lr).
double limit_law_cdf(const LimitLawSpec& spec, double t);

// Per-replicate scaled quantile errors n^{1/(2 rho)} (F_n^{-1}(p) - t_p) for
// one grid entry; the building block the experiment drivers share.
std::vector<double> quantile_error_stats(const McConfig& cfg, std::size_t n,
                                         std::size_t n_index, SeedStream stream);

ExperimentReport run_clt_experiment(const McConfig& cfg);
ExperimentReport run_bahadur_experiment(const McConfig& cfg);
ExperimentReport run_bootstrap_consistency_experiment(const McConfig& cfg);
ExperimentReport run_inconsistency_experiment(const McConfig& cfg);
// Almost-sure-consistency necessary condition: one fixed stream, growing n.
ExperimentReport run_fixed_stream_consistency(const McConfig& cfg);
ExperimentReport run_lrvar_experiment(const McConfig& cfg);
ExperimentReport run_zrho_experiment(const McConfig& cfg,
                                     std::optional<double> sigma_lr_override = std::nullopt);

// Sorted reference sample of g^{-1}(W1) used by the Z_rho sampler.
std::vector<double> z_rho_reference(double rho, double m_coef, double sigma_lr,
                                    std::size_t count, std::uint64_t seed);

// One conditional draw: KS distance between the ecdf of
// g^{-1}(W1 + w2) - g^{-1}(w2) over inner_count draws of W1 and the shared
// reference ecdf of g^{-1}(W1).
double z_rho_conditional(double rho, double m_coef, double sigma_lr, std::size_t inner_count,
                         double w2, std::uint64_t seed,
                         std::span<const double> sorted_reference);

// Sample of size `count` from Z_rho: each draw conditions on a fresh W2.
std::vector<double> z_rho_sampler(double rho, double m_coef, double sigma_lr, std::size_t count,
                                  std::size_t inner_count, std::uint64_t seed,
                                  unsigned threads = 0);

// Finite-sample KS resolution of the Z_rho sampler: the degenerate case
// rho = 1 concentrates at this scale rather than exactly at 0.
double z_rho_noise_floor(std::size_t inner_count, std::size_t reference_count);

// Did the oracle flag a degenerate long-run variance anywhere in the report?
bool report_has_degenerate_lrvar(const ExperimentReport& report);

}  // namespace qboot
