#include "qboot/block_bootstrap.hpp"

#include <bit>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "qboot/report.hpp"
#include "qboot/rng.hpp"

namespace qboot {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::size_t floor_clip(double raw, std::size_t n) {
  if (!(raw >= 1.0)) return 1;
  const double f = std::floor(raw);
  if (f >= static_cast<double>(n)) return n;
  return static_cast<std::size_t>(f);
}

}  // namespace

BlockLengthSchedule BlockLengthSchedule::fixed(std::size_t l) {
  require(l >= 1, "schedule: fixed l must be >= 1");
  BlockLengthSchedule s;
  s.kind = Kind::Fixed;
  s.fixed_l = l;
  return s;
}

BlockLengthSchedule BlockLengthSchedule::power(double c, double gamma) {
  require(c > 0.0, "schedule: c must be > 0");
  require(gamma > 0.0 && gamma < 1.0, "schedule: gamma must lie in (0,1)");
  BlockLengthSchedule s;
  s.kind = Kind::Power;
  s.c = c;
  s.gamma = gamma;
  return s;
}

BlockLengthSchedule BlockLengthSchedule::dyadic_power(double c, double gamma) {
  BlockLengthSchedule s = power(c, gamma);
  s.kind = Kind::DyadicPower;
  return s;
}

std::size_t block_length(const BlockLengthSchedule& schedule, std::size_t n) {
  require(n >= 1, "block_length: n must be >= 1");
  switch (schedule.kind) {
    case BlockLengthSchedule::Kind::Fixed:
      return std::min(schedule.fixed_l, n);
    case BlockLengthSchedule::Kind::Power:
      return floor_clip(schedule.c * std::pow(static_cast<double>(n), schedule.gamma), n);
    case BlockLengthSchedule::Kind::DyadicPower: {
      const std::size_t a_n = std::bit_floor(n);
      return floor_clip(schedule.c * std::pow(static_cast<double>(a_n), schedule.gamma), a_n);
    }
  }
  return 1;
}

BootstrapSample resample(const Sample& sample, std::size_t l, std::uint64_t seed) {
  const std::size_t n = sample.n();
  require(l >= 1 && l <= n, "resample: need 1 <= l <= n");
  const std::size_t b = n / l;
  Rng rng(seed);
  std::vector<std::size_t> starts(b);
  for (std::size_t k = 0; k < b; ++k) starts[k] = static_cast<std::size_t>(rng.uniform_index(n)) + 1;
  return resample_with_starts(sample, l, starts);
}

BootstrapSample resample_with_starts(const Sample& sample, std::size_t l,
                                     std::span<const std::size_t> starts_1based) {
  const std::size_t n = sample.n();
  require(l >= 1 && l <= n, "resample: need 1 <= l <= n");
  BootstrapSample bs;
  bs.block_len = l;
  bs.block_starts.assign(starts_1based.begin(), starts_1based.end());
  bs.values.resize(starts_1based.size() * l);
  std::size_t out = 0;
  for (std::size_t start : starts_1based) {
    require(start >= 1 && start <= n, "resample: block start out of [1, n]");
    for (std::size_t i = 0; i < l; ++i) {
      bs.values[out++] = sample.values[(start - 1 + i) % n];
    }
  }
  return bs;
}

Ecdf bootstrap_ecdf(const BootstrapSample& bs) { return Ecdf(bs.values); }

double expected_bootstrap_ecdf(const Sample& sample, std::size_t l, double t) {
  const std::size_t n = sample.n();
  require(l >= 1 && l <= n, "expected_bootstrap_ecdf: need 1 <= l <= n");
  // Integer accumulation over all n starts keeps the identity with F_n(t)
  // exact in floating point.
  std::size_t total = 0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < l; ++i) {
      total += (sample.values[(j + i) % n] <= t) ? 1 : 0;
    }
  }
  return static_cast<double>(total) / static_cast<double>(n * l);
}

double bootstrap_quantile(const BootstrapSample& bs, double q) {
  return Ecdf(bs.values).quantile(q);
}

BahadurDecomposition bootstrap_bahadur_decompose(const BootstrapSample& bs,
                                                 const LocalExpansion& expansion) {
  // Identical structure to the sample-side decomposition with F*_n for F_n
  // and bl for n in the remainder scaling.
  return bahadur_decompose(std::span<const double>(bs.values), expansion);
}

BahadurDecomposition bootstrap_bahadur_decompose(const BootstrapSample& bs,
                                                 const PowerLocalModel& model) {
  return bootstrap_bahadur_decompose(
      bs, LocalExpansion{model.rho, model.m_coef, model.t_p, model.p});
}

std::vector<double> bootstrap_quantile_distribution(const Sample& sample,
                                                    const BootstrapPlan& plan, double q) {
  const std::size_t l = block_length(plan.schedule, sample.n());
  std::vector<double> stats(plan.num_resamples);
  for (std::size_t j = 0; j < plan.num_resamples; ++j) {
    const BootstrapSample bs = resample(sample, l, seed_for(plan.seed, j, SeedStream::Resample));
    stats[j] = bootstrap_quantile(bs, q);
  }
  return stats;
}

void write_bootstrap_distribution_csv(std::ostream& os, std::span<const double> statistics) {
  os << "resample_index,statistic\n";
  for (std::size_t j = 0; j < statistics.size(); ++j) {
    os << j << ',' << format_double(statistics[j]) << "\n";
  }
}

nlohmann::json to_json(const BlockLengthSchedule& schedule) {
  switch (schedule.kind) {
    case BlockLengthSchedule::Kind::Fixed:
      return nlohmann::json{{"kind", "fixed"}, {"l", schedule.fixed_l}};
    case BlockLengthSchedule::Kind::Power:
      return nlohmann::json{{"kind", "power"}, {"c", schedule.c}, {"gamma", schedule.gamma}};
    case BlockLengthSchedule::Kind::DyadicPower:
      return nlohmann::json{{"kind", "dyadic_power"}, {"c", schedule.c}, {"gamma", schedule.gamma}};
  }
  throw std::logic_error("schedule: bad kind");
}

BlockLengthSchedule schedule_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind"), "schedule: expected object with 'kind'");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k != "kind" && k != "l" && k != "c" && k != "gamma") {
      throw std::invalid_argument("schedule: unknown key '" + k + "'");
    }
  }
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "fixed") return BlockLengthSchedule::fixed(j.at("l").get<std::size_t>());
  if (kind == "power") {
    return BlockLengthSchedule::power(j.value("c", 1.0), j.value("gamma", 0.5));
  }
  if (kind == "dyadic_power") {
    return BlockLengthSchedule::dyadic_power(j.value("c", 1.0), j.value("gamma", 0.5));
  }
  throw std::invalid_argument("schedule: unknown kind '" + kind + "'");
}

nlohmann::json to_json(const BootstrapPlan& plan) {
  return nlohmann::json{
      {"schedule", to_json(plan.schedule)}, {"resamples", plan.num_resamples}, {"seed", plan.seed}};
}

BootstrapPlan plan_from_json(const nlohmann::json& j) {
  require(j.is_object(), "plan: expected object");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k != "schedule" && k != "resamples" && k != "seed") {
      throw std::invalid_argument("plan: unknown key '" + k + "'");
    }
  }
  BootstrapPlan plan;
  if (j.contains("schedule")) plan.schedule = schedule_from_json(j.at("schedule"));
  plan.num_resamples = j.value("resamples", std::size_t{1000});
  require(plan.num_resamples >= 1, "plan: resamples must be >= 1");
  plan.seed = j.value("seed", std::uint64_t{0});
  return plan;
}

}  // namespace qboot
