#include "qboot/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "qboot/parallel.hpp"

namespace qboot {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

double vec_mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double vec_sd(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double vec_central4(std::span<const double> v, double mean) {
  double s = 0.0;
  for (double x : v) {
    const double d = x - mean;
    s += d * d * d * d;
  }
  return s / static_cast<double>(v.size());
}

// Delta-method standard error of the sample standard deviation.
double sd_stderr(std::span<const double> v, double mean, double sd) {
  if (sd <= 0.0 || v.size() < 2) return 0.0;
  const double m4 = vec_central4(v, mean);
  const double var_of_var = std::max(m4 - sd * sd * sd * sd, 0.0) / static_cast<double>(v.size());
  return std::sqrt(var_of_var) / (2.0 * sd);
}

struct QuantileWithSe {
  double value = 0.0;
  double se = 0.0;
};

// Order-statistic estimate with a rank-based +-1 sigma half width.
QuantileWithSe sorted_quantile_se(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  const std::size_t k = quantile_order_index(n, q);
  const auto m = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n) * q * (1.0 - q)))));
  const std::size_t lo = (k - 1 >= m) ? k - 1 - m : 0;
  const std::size_t hi = std::min(n - 1, k - 1 + m);
  return {sorted[k - 1], (sorted[hi] - sorted[lo]) / 2.0};
}

ExperimentReport make_report(const McConfig& cfg, const char* name) {
  ExperimentReport rep;
  rep.config = to_json(cfg);
  rep.config["experiment"] = name;
  rep.base_seed = cfg.base_seed;
  rep.config_hash = fnv1a64(rep.config.dump());
  return rep;
}

class WallClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// KS noise yardstick for comparing two ECDFs built from m and n draws: the
// 95% null band of the two-sample statistic.
double ks_noise(std::size_t m, std::size_t n) {
  return 1.36 * std::sqrt(1.0 / static_cast<double>(m) + 1.0 / static_cast<double>(n));
}

}  // namespace

void McConfig::validate() const {
  require(!n_grid.empty(), "config: n_grid must be nonempty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    require(n_grid[i] >= 1, "config: n must be >= 1");
    if (i > 0) require(n_grid[i] > n_grid[i - 1], "config: n_grid must be strictly increasing");
  }
  require(replicates >= 2, "config: replicates must be >= 2");
  require(plan.num_resamples >= 2, "config: resamples must be >= 2");
  require(p > 0.0 && p < 1.0, "config: p must lie in (0,1)");
  require(zrho_count >= 2 && zrho_inner >= 2, "config: zrho sizes must be >= 2");
}

std::size_t McConfig::effective_oracle_replicates() const {
  if (oracle_replicates > 0) return oracle_replicates;
  return std::max<std::size_t>(500, std::min<std::size_t>(replicates, 2000));
}

std::size_t McConfig::effective_limit_count() const {
  if (limit_count > 0) return limit_count;
  return std::max<std::size_t>(10 * replicates, 10000);
}

nlohmann::json to_json(const McConfig& cfg) {
  return nlohmann::json{{"n_grid", cfg.n_grid},
                        {"replicates", cfg.replicates},
                        {"p", cfg.p},
                        {"seed", cfg.base_seed},
                        {"process", to_json(cfg.process)},
                        {"plan", to_json(cfg.plan)},
                        {"oracle_n", cfg.oracle_n},
                        {"oracle_replicates", cfg.oracle_replicates},
                        {"limit_count", cfg.limit_count},
                        {"zrho_count", cfg.zrho_count},
                        {"zrho_inner", cfg.zrho_inner}};
}

McConfig mc_config_from_json(const nlohmann::json& j) {
  require(j.is_object(), "config: expected object");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k != "n_grid" && k != "replicates" && k != "p" && k != "seed" && k != "process" &&
        k != "plan" && k != "oracle_n" && k != "oracle_replicates" && k != "limit_count" &&
        k != "zrho_count" && k != "zrho_inner" && k != "experiment" && k != "sigma_lr") {
      throw std::invalid_argument("config: unknown key '" + k + "'");
    }
  }
  McConfig cfg;
  if (j.contains("n_grid")) cfg.n_grid = j.at("n_grid").get<std::vector<std::size_t>>();
  if (j.contains("replicates")) cfg.replicates = j.at("replicates").get<std::size_t>();
  if (j.contains("p")) cfg.p = j.at("p").get<double>();
  if (j.contains("seed")) cfg.base_seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("process")) cfg.process = process_from_json(j.at("process"));
  if (j.contains("plan")) cfg.plan = plan_from_json(j.at("plan"));
  if (j.contains("oracle_n")) cfg.oracle_n = j.at("oracle_n").get<std::size_t>();
  if (j.contains("oracle_replicates"))
    cfg.oracle_replicates = j.at("oracle_replicates").get<std::size_t>();
  if (j.contains("limit_count")) cfg.limit_count = j.at("limit_count").get<std::size_t>();
  if (j.contains("zrho_count")) cfg.zrho_count = j.at("zrho_count").get<std::size_t>();
  if (j.contains("zrho_inner")) cfg.zrho_inner = j.at("zrho_inner").get<std::size_t>();
  cfg.validate();
  return cfg;
}

double ks_distance_sorted(std::span<const double> a, std::span<const double> b) {
  require(!a.empty() && !b.empty(), "ks_distance: empty sample");
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() || j < b.size()) {
    double t;
    if (i < a.size() && (j >= b.size() || a[i] <= b[j])) {
      t = a[i];
    } else {
      t = b[j];
    }
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_distance(const Ecdf& a, const Ecdf& b) {
  return ks_distance_sorted(a.sorted_values(), b.sorted_values());
}

double ks_distance_to_cdf(const Ecdf& e, const std::function<double(double)>& cdf) {
  const auto& v = e.sorted_values();
  const auto n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double g = cdf(v[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - g);
    d = std::max(d, g - static_cast<double>(i) / n);
  }
  return d;
}

LrvarEstimate long_run_variance_oracle(const ProcessSpec& process, double p, std::size_t n,
                                       std::size_t replicates, std::uint64_t seed,
                                       unsigned threads) {
  require(n >= 2, "lrvar: n must be >= 2");
  require(replicates >= 2, "lrvar: replicates must be >= 2");
  const LocalExpansion ex = local_expansion(process.marginal, p);
  std::vector<double> stats(replicates);
  const double scale = std::sqrt(static_cast<double>(n));
  parallel_for(replicates, threads, [&](std::size_t r) {
    const Sample path = generate(process, n, seed_for(seed, r, SeedStream::Replicate));
    std::size_t leq = 0;
    for (double v : path.values) leq += (v <= ex.t_p) ? 1 : 0;
    stats[r] = scale * (static_cast<double>(leq) / static_cast<double>(n) - p);
  });
  const double mean = vec_mean(stats);
  double var = 0.0;
  for (double s : stats) var += (s - mean) * (s - mean);
  var /= static_cast<double>(replicates - 1);
  // MC error of a variance estimate: sqrt((m4 - var^2)/R).
  const double m4 = vec_central4(stats, mean);
  const double se = std::sqrt(std::max(m4 - var * var, 0.0) / static_cast<double>(replicates));
  LrvarEstimate est;
  est.sigma2 = var;
  est.stderr_ = se;
  est.degenerate = var <= 3.0 * se;
  return est;
}

std::vector<double> sample_limit_law(const LimitLawSpec& spec, std::size_t count,
                                     std::uint64_t seed) {
  require(spec.rho > 0.0 && spec.m_coef != 0.0, "limit law: invalid transform");
  require(spec.sigma_lr > 0.0, "limit law: sigma_lr must be > 0");
  const GTransform g{spec.rho, spec.m_coef};
  Rng rng(seed);
  std::vector<double> out(count);
  for (double& v : out) v = g_inverse(g, spec.sigma_lr * rng.normal());
  return out;
}

double limit_law_cdf(const LimitLawSpec& spec, double t) {
  return std_normal_cdf(g_apply(GTransform{spec.rho, spec.m_coef}, t) / spec.sigma_lr);
}

std::vector<double> quantile_error_stats(const McConfig& cfg, std::size_t n, std::size_t n_index,
                                         SeedStream stream) {
  const LocalExpansion ex = local_expansion(cfg.process.marginal, cfg.p);
  const double scale = std::pow(static_cast<double>(n), 1.0 / (2.0 * ex.rho));
  const std::size_t k = quantile_order_index(n, cfg.p);
  const std::uint64_t grid_seed = seed_for(cfg.base_seed, n_index, SeedStream::Grid);
  std::vector<double> out(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
    Sample path = generate(cfg.process, n, seed_for(grid_seed, r, stream));
    std::nth_element(path.values.begin(), path.values.begin() + (k - 1), path.values.end());
    out[r] = scale * (path.values[k - 1] - ex.t_p);
  });
  return out;
}

ExperimentReport run_clt_experiment(const McConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport rep = make_report(cfg, "clt");
  const LocalExpansion ex = local_expansion(cfg.process.marginal, cfg.p);

  const LrvarEstimate oracle =
      long_run_variance_oracle(cfg.process, cfg.p, cfg.oracle_n, cfg.effective_oracle_replicates(),
                               seed_for(cfg.base_seed, 0, SeedStream::Oracle), cfg.threads);
  const double sigma_lr = std::sqrt(std::max(oracle.sigma2, 1e-12));
  const std::size_t limit_count = cfg.effective_limit_count();
  std::vector<double> limit =
      sample_limit_law(LimitLawSpec{ex.rho, ex.m_coef, sigma_lr}, limit_count,
                       seed_for(cfg.base_seed, 0, SeedStream::LimitLaw));
  std::sort(limit.begin(), limit.end());

  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const std::size_t n = cfg.n_grid[ni];
    std::vector<double> stats = quantile_error_stats(cfg, n, ni, SeedStream::Replicate);
    std::sort(stats.begin(), stats.end());
    rep.rows.push_back({"clt", n, "ks_to_limit", ks_distance_sorted(stats, limit),
                        ks_noise(cfg.replicates, limit_count)});
    const double mean = vec_mean(stats);
    const double sd = vec_sd(stats, mean);
    const double ks_norm = ks_distance_to_cdf(
        Ecdf::from_sorted(stats),
        [mean, sd](double t) { return std_normal_cdf((t - mean) / (sd > 0.0 ? sd : 1.0)); });
    rep.rows.push_back({"clt", n, "ks_to_matched_normal", ks_norm,
                        1.36 / std::sqrt(static_cast<double>(cfg.replicates))});
  }
  rep.rows.push_back({"clt", cfg.oracle_n, "lrvar_sigma2", oracle.sigma2, oracle.stderr_});
  rep.rows.push_back(
      {"clt", cfg.oracle_n, "lrvar_degenerate_flag", oracle.degenerate ? 1.0 : 0.0, 0.0});
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport run_bahadur_experiment(const McConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport rep = make_report(cfg, "bahadur");
  const LocalExpansion ex = local_expansion(cfg.process.marginal, cfg.p);

  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const std::size_t n = cfg.n_grid[ni];
    const std::size_t l = block_length(cfg.plan.schedule, n);
    const std::uint64_t grid_seed = seed_for(cfg.base_seed, ni, SeedStream::Grid);
    std::vector<double> abs_data(cfg.replicates);
    std::vector<double> abs_boot(cfg.replicates);
    parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
      const std::uint64_t rep_seed = seed_for(grid_seed, r, SeedStream::Replicate);
      const Sample path = generate(cfg.process, n, rep_seed);
      abs_data[r] = std::abs(bahadur_decompose(std::span<const double>(path.values), ex)
                                 .scaled_remainder);
      const BootstrapSample bs =
          resample(path, l, seed_for(rep_seed ^ cfg.plan.seed, 0, SeedStream::Resample));
      abs_boot[r] = std::abs(bootstrap_bahadur_decompose(bs, ex).scaled_remainder);
    });
    std::sort(abs_data.begin(), abs_data.end());
    std::sort(abs_boot.begin(), abs_boot.end());
    const auto d50 = sorted_quantile_se(abs_data, 0.5);
    const auto d90 = sorted_quantile_se(abs_data, 0.9);
    const auto b50 = sorted_quantile_se(abs_boot, 0.5);
    const auto b90 = sorted_quantile_se(abs_boot, 0.9);
    rep.rows.push_back({"bahadur", n, "abs_scaled_remainder_median", d50.value, d50.se});
    rep.rows.push_back({"bahadur", n, "abs_scaled_remainder_q90", d90.value, d90.se});
    rep.rows.push_back({"bahadur", n, "boot_abs_scaled_remainder_median", b50.value, b50.se});
    rep.rows.push_back({"bahadur", n, "boot_abs_scaled_remainder_q90", b90.value, b90.se});
  }
  rep.wall_seconds = clock.seconds();
  return rep;
}

namespace {

// Shared core of the consistency/inconsistency experiments: per data
// replicate, the KS contrast between the bootstrap law of
// (bl)^{1/(2rho)} (F*^{-1}(p) - F_n^{-1}(p)) over B resamples and an
// independent MC proxy of the sampling law of n^{1/(2rho)} (F_n^{-1}(p) - t_p).
ExperimentReport run_contrast_impl(const McConfig& cfg, const char* name) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport rep = make_report(cfg, name);
  const LocalExpansion ex = local_expansion(cfg.process.marginal, cfg.p);
  const double expo = 1.0 / (2.0 * ex.rho);
  const std::size_t R = cfg.replicates;
  const std::size_t B = cfg.plan.num_resamples;

  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const std::size_t n = cfg.n_grid[ni];
    std::vector<double> proxy = quantile_error_stats(cfg, n, ni, SeedStream::Proxy);
    std::sort(proxy.begin(), proxy.end());

    const std::size_t l = block_length(cfg.plan.schedule, n);
    const std::size_t b = n / l;
    const std::size_t bl = b * l;
    const std::size_t k_boot = quantile_order_index(bl, cfg.p);
    const std::size_t k_data = quantile_order_index(n, cfg.p);
    const double boot_scale = std::pow(static_cast<double>(bl), expo);
    const std::uint64_t grid_seed = seed_for(cfg.base_seed, ni, SeedStream::Grid);

    std::vector<double> contrast(R);
    parallel_for(R, cfg.threads, [&](std::size_t r) {
      const std::uint64_t rep_seed = seed_for(grid_seed, r, SeedStream::Replicate);
      const Sample path = generate(cfg.process, n, rep_seed);
      std::vector<double> buf = path.values;
      std::nth_element(buf.begin(), buf.begin() + (k_data - 1), buf.end());
      const double eq = buf[k_data - 1];

      // Circularly extended copy makes every block a contiguous window.
      std::vector<double> ext = path.values;
      ext.insert(ext.end(), path.values.begin(), path.values.begin() + (l - 1));
      std::vector<double> boot_buf(bl);
      std::vector<double> stats(B);
      const std::uint64_t resample_base = rep_seed ^ cfg.plan.seed;
      for (std::size_t j = 0; j < B; ++j) {
        Rng rng(seed_for(resample_base, j, SeedStream::Resample));
        for (std::size_t kb = 0; kb < b; ++kb) {
          const auto start = static_cast<std::size_t>(rng.uniform_index(n));
          std::memcpy(boot_buf.data() + kb * l, ext.data() + start, l * sizeof(double));
        }
        std::nth_element(boot_buf.begin(), boot_buf.begin() + (k_boot - 1), boot_buf.end());
        stats[j] = boot_scale * (boot_buf[k_boot - 1] - eq);
      }
      std::sort(stats.begin(), stats.end());
      contrast[r] = ks_distance_sorted(stats, proxy);
    });

    std::sort(contrast.begin(), contrast.end());
    const double mean = vec_mean(contrast);
    const double sd = vec_sd(contrast, mean);
    const auto q90 = sorted_quantile_se(contrast, 0.9);
    const auto q25 = sorted_quantile_se(contrast, 0.25);
    const auto q75 = sorted_quantile_se(contrast, 0.75);
    rep.rows.push_back({name, n, "d_mean", mean, sd / std::sqrt(static_cast<double>(R))});
    rep.rows.push_back({name, n, "d_sd", sd, sd_stderr(contrast, mean, sd)});
    rep.rows.push_back({name, n, "d_q90", q90.value, q90.se});
    rep.rows.push_back({name, n, "d_iqr", q75.value - q25.value,
                        std::sqrt(q25.se * q25.se + q75.se * q75.se)});
  }
  rep.wall_seconds = clock.seconds();
  return rep;
}

}  // namespace

ExperimentReport run_bootstrap_consistency_experiment(const McConfig& cfg) {
  return run_contrast_impl(cfg, "boot-consistency");
}

ExperimentReport run_inconsistency_experiment(const McConfig& cfg) {
  return run_contrast_impl(cfg, "inconsistency");
}

ExperimentReport run_fixed_stream_consistency(const McConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport rep = make_report(cfg, "fixed-stream");
  const LocalExpansion ex = local_expansion(cfg.process.marginal, cfg.p);
  const double expo = 1.0 / (2.0 * ex.rho);
  const std::size_t n_max = cfg.n_grid.back();
  const std::uint64_t stream_seed = seed_for(cfg.base_seed, 0, SeedStream::Stream);
  const Sample full = generate(cfg.process, n_max, stream_seed);

  for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
    const std::size_t n = cfg.n_grid[ni];
    Sample prefix;
    prefix.values.assign(full.values.begin(), full.values.begin() + n);
    prefix.seed = stream_seed;
    prefix.spec_id = full.spec_id;

    const std::size_t k_data = quantile_order_index(n, cfg.p);
    std::vector<double> buf = prefix.values;
    std::nth_element(buf.begin(), buf.begin() + (k_data - 1), buf.end());
    const double eq = buf[k_data - 1];

    const std::size_t l = block_length(cfg.plan.schedule, n);
    const std::size_t b = n / l;
    const std::size_t bl = b * l;
    const std::size_t k_boot = quantile_order_index(bl, cfg.p);
    const double boot_scale = std::pow(static_cast<double>(bl), expo);

    std::vector<double> ext = prefix.values;
    ext.insert(ext.end(), prefix.values.begin(), prefix.values.begin() + (l - 1));
    const std::uint64_t resample_base =
        seed_for(stream_seed, ni, SeedStream::Grid) ^ cfg.plan.seed;
    std::vector<double> stats(cfg.plan.num_resamples);
    std::vector<double> boot_buf(bl);
    for (std::size_t j = 0; j < cfg.plan.num_resamples; ++j) {
      Rng rng(seed_for(resample_base, j, SeedStream::Resample));
      for (std::size_t kb = 0; kb < b; ++kb) {
        const auto start = static_cast<std::size_t>(rng.uniform_index(n));
        std::memcpy(boot_buf.data() + kb * l, ext.data() + start, l * sizeof(double));
      }
      std::nth_element(boot_buf.begin(), boot_buf.begin() + (k_boot - 1), boot_buf.end());
      stats[j] = boot_scale * (boot_buf[k_boot - 1] - eq);
    }
    std::sort(stats.begin(), stats.end());

    std::vector<double> proxy = quantile_error_stats(cfg, n, ni, SeedStream::Proxy);
    std::sort(proxy.begin(), proxy.end());
    rep.rows.push_back({"fixed-stream", n, "d_fixed", ks_distance_sorted(stats, proxy),
                        ks_noise(cfg.plan.num_resamples, cfg.replicates)});
  }
  rep.wall_seconds = clock.seconds();
  return rep;
}

ExperimentReport run_lrvar_experiment(const McConfig& cfg) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport rep = make_report(cfg, "lrvar");
  const LrvarEstimate est =
      long_run_variance_oracle(cfg.process, cfg.p, cfg.oracle_n, cfg.effective_oracle_replicates(),
                               seed_for(cfg.base_seed, 0, SeedStream::Oracle), cfg.threads);
  rep.rows.push_back({"lrvar", cfg.oracle_n, "lrvar_sigma2", est.sigma2, est.stderr_});
  rep.rows.push_back(
      {"lrvar", cfg.oracle_n, "lrvar_degenerate_flag", est.degenerate ? 1.0 : 0.0, 0.0});
  rep.wall_seconds = clock.seconds();
  return rep;
}

std::vector<double> z_rho_reference(double rho, double m_coef, double sigma_lr,
                                    std::size_t count, std::uint64_t seed) {
  std::vector<double> ref = sample_limit_law(LimitLawSpec{rho, m_coef, sigma_lr}, count, seed);
  std::sort(ref.begin(), ref.end());
  return ref;
}

namespace {

double z_rho_draw(const GTransform& g, double sigma_lr, std::size_t inner_count, double w2,
                  Rng& rng, std::span<const double> sorted_reference) {
  const double offset = g_inverse(g, w2);
  std::vector<double> diffs(inner_count);
  for (double& d : diffs) d = g_inverse(g, sigma_lr * rng.normal() + w2) - offset;
  std::sort(diffs.begin(), diffs.end());
  return ks_distance_sorted(diffs, sorted_reference);
}

std::size_t z_rho_reference_count(std::size_t inner_count) {
  return std::max<std::size_t>(10 * inner_count, 20000);
}

}  // namespace

double z_rho_conditional(double rho, double m_coef, double sigma_lr, std::size_t inner_count,
                         double w2, std::uint64_t seed,
                         std::span<const double> sorted_reference) {
  Rng rng(seed);
  return z_rho_draw(GTransform{rho, m_coef}, sigma_lr, inner_count, w2, rng, sorted_reference);
}

std::vector<double> z_rho_sampler(double rho, double m_coef, double sigma_lr, std::size_t count,
                                  std::size_t inner_count, std::uint64_t seed, unsigned threads) {
  require(sigma_lr > 0.0, "z_rho_sampler: sigma_lr must be > 0");
  const GTransform g{rho, m_coef};
  const std::vector<double> ref =
      z_rho_reference(rho, m_coef, sigma_lr, z_rho_reference_count(inner_count),
                      seed_for(seed, 0, SeedStream::LimitLaw));
  std::vector<double> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng rng(seed_for(seed, i, SeedStream::Replicate));
    const double w2 = sigma_lr * rng.normal();
    out[i] = z_rho_draw(g, sigma_lr, inner_count, w2, rng, ref);
  });
  return out;
}

double z_rho_noise_floor(std::size_t inner_count, std::size_t reference_count) {
  return ks_noise(inner_count, reference_count);
}

ExperimentReport run_zrho_experiment(const McConfig& cfg, std::optional<double> sigma_lr_override) {
  cfg.validate();
  const WallClock clock;
  ExperimentReport rep = make_report(cfg, "zrho");
  const LocalExpansion ex = local_expansion(cfg.process.marginal, cfg.p);

  double sigma_lr;
  if (sigma_lr_override.has_value()) {
    require(*sigma_lr_override > 0.0, "zrho: sigma_lr must be > 0");
    sigma_lr = *sigma_lr_override;
    rep.config["sigma_lr"] = sigma_lr;
  } else {
    const LrvarEstimate oracle = long_run_variance_oracle(
        cfg.process, cfg.p, cfg.oracle_n, cfg.effective_oracle_replicates(),
        seed_for(cfg.base_seed, 0, SeedStream::Oracle), cfg.threads);
    sigma_lr = std::sqrt(std::max(oracle.sigma2, 1e-12));
    rep.rows.push_back({"zrho", cfg.oracle_n, "lrvar_sigma2", oracle.sigma2, oracle.stderr_});
    rep.rows.push_back(
        {"zrho", cfg.oracle_n, "lrvar_degenerate_flag", oracle.degenerate ? 1.0 : 0.0, 0.0});
  }
  rep.config_hash = fnv1a64(rep.config.dump());

  std::vector<double> z = z_rho_sampler(ex.rho, ex.m_coef, sigma_lr, cfg.zrho_count,
                                        cfg.zrho_inner, cfg.base_seed, cfg.threads);
  std::sort(z.begin(), z.end());
  const double mean = vec_mean(z);
  const double sd = vec_sd(z, mean);
  const auto q90 = sorted_quantile_se(z, 0.9);
  const double floor = z_rho_noise_floor(cfg.zrho_inner, z_rho_reference_count(cfg.zrho_inner));
  rep.rows.push_back({"zrho", cfg.zrho_count, "z_mean", mean, floor});
  rep.rows.push_back({"zrho", cfg.zrho_count, "z_sd", sd, sd_stderr(z, mean, sd)});
  rep.rows.push_back({"zrho", cfg.zrho_count, "z_q90", q90.value, q90.se});
  rep.rows.push_back({"zrho", cfg.zrho_count, "sigma_lr", sigma_lr, 0.0});
  rep.wall_seconds = clock.seconds();
  return rep;
}

bool report_has_degenerate_lrvar(const ExperimentReport& report) {
  for (const ReportRow& r : report.rows) {
    if (r.metric == "lrvar_degenerate_flag" && r.value != 0.0) return true;
  }
  return false;
}

}  // namespace qboot
