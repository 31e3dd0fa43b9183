#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "qboot/process_gen.hpp"
#include "qboot/quantile_core.hpp"

namespace qboot {

// Block-length rule l_n. The dyadic variant evaluates the power rule at
// a_n = 2^floor(log2 n), so l is constant on every range [2^k, 2^{k+1}-1].
struct BlockLengthSchedule {
  enum class Kind { Fixed, Power, DyadicPower };

  Kind kind = Kind::Power;
  std::size_t fixed_l = 1;
  double c = 1.0;
  double gamma = 0.5;

  static BlockLengthSchedule fixed(std::size_t l);
  static BlockLengthSchedule power(double c, double gamma);
  static BlockLengthSchedule dyadic_power(double c, double gamma);
};

// l_n per schedule, floor-discretized and clipped to [1, n].
std::size_t block_length(const BlockLengthSchedule& schedule, std::size_t n);

struct BootstrapPlan {
  BlockLengthSchedule schedule;
  std::size_t num_resamples = 1000;  // B
  std::uint64_t seed = 0;
};

// b = floor(n/l) circular blocks of length l; the trailing partial block is
// never drawn, so values has exactly b*l entries. block_starts are 1-based
// positions into the source sample.
struct BootstrapSample {
  std::vector<double> values;
  std::vector<std::size_t> block_starts;
  std::size_t block_len = 0;

  std::size_t num_blocks() const { return block_starts.size(); }
};

BootstrapSample resample(const Sample& sample, std::size_t l, std::uint64_t seed);
BootstrapSample resample_with_starts(const Sample& sample, std::size_t l,
                                     std::span<const std::size_t> starts_1based);

Ecdf bootstrap_ecdf(const BootstrapSample& bs);

// Exact conditional mean of the bootstrap ecdf at t: the average over all n
// equally likely block starts, which equals F_n(t) since every sample point
// lies in exactly l circular windows.
double expected_bootstrap_ecdf(const Sample& sample, std::size_t l, double t);

double bootstrap_quantile(const BootstrapSample& bs, double q);

// Decomposition of the bootstrap quantile, centered at the
// true t_p; the remainder is scaled by (bl)^{1/(2 rho)}.
BahadurDecomposition bootstrap_bahadur_decompose(const BootstrapSample& bs,
                                                 const LocalExpansion& expansion);
BahadurDecomposition bootstrap_bahadur_decompose(const BootstrapSample& bs,
                                                 const PowerLocalModel& model);

// The bootstrap distribution of the q-quantile under a plan: one statistic
// per resample, block length from the plan's schedule at n = sample size.
std::vector<double> bootstrap_quantile_distribution(const Sample& sample,
                                                    const BootstrapPlan& plan, double q);
void write_bootstrap_distribution_csv(std::ostream& os, std::span<const double> statistics);

nlohmann::json to_json(const BlockLengthSchedule& schedule);
BlockLengthSchedule schedule_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BootstrapPlan& plan);
BootstrapPlan plan_from_json(const nlohmann::json& j);

}  // namespace qboot
