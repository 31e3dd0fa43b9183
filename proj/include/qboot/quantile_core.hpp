#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qboot/dist_models.hpp"

namespace qboot {

struct Sample;

// Empirical distribution function: right-continuous step function with jumps
// k/n at the sorted sample values.
class Ecdf {
 public:
  explicit Ecdf(std::vector<double> values);
  static Ecdf from_sorted(std::vector<double> sorted_values);

  // F_n(t): exact count of values <= t over n.
  double operator()(double t) const;
  std::size_t count_leq(double t) const;

  // ceil(n q)-th order statistic == inf{t : F_n(t) >= q}; rejects q outside (0,1).
  double quantile(double q) const;

  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted_values() const { return sorted_; }

 private:
  struct SortedTag {};
  Ecdf(std::vector<double> sorted_values, SortedTag);
  std::vector<double> sorted_;
};

inline double ecdf_eval(const Ecdf& e, double t) { return e(t); }
inline double empirical_quantile(const Ecdf& e, double q) { return e.quantile(q); }

// Smallest 1-based k with k >= q * n, i.e. the order-statistic index of the
// empirical q-quantile.
std::size_t quantile_order_index(std::size_t n, double q);

// F_n^{-1}(p) - t_p = linearized_term + remainder, with
// linearized_term = g^{-1}(p - F_n(t_p)) and the remainder the exact excess.
struct BahadurDecomposition {
  double empirical_quantile = 0.0;
  double linearized_term = 0.0;
  double remainder = 0.0;
  double scaled_remainder = 0.0;  // count^{1/(2 rho)} * remainder
};

// count^{1/(2 rho)} * remainder, the scale at which the remainder vanishes.
double scale_remainder(double remainder, std::size_t count, double rho);

BahadurDecomposition bahadur_decompose(std::span<const double> values,
                                       const LocalExpansion& expansion);
BahadurDecomposition bahadur_decompose(const Sample& sample, const PowerLocalModel& model);

std::string bahadur_csv_row(std::size_t n, std::uint64_t seed, const BahadurDecomposition& d);

}  // namespace qboot
