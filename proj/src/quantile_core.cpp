#include "qboot/quantile_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qboot/process_gen.hpp"
#include "qboot/report.hpp"

namespace qboot {

Ecdf::Ecdf(std::vector<double> values) : sorted_(std::move(values)) {
  if (sorted_.empty()) throw std::invalid_argument("Ecdf: empty sample");
  for (double v : sorted_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Ecdf: nonfinite value");
  }
  std::sort(sorted_.begin(), sorted_.end());
}

Ecdf::Ecdf(std::vector<double> sorted_values, SortedTag) : sorted_(std::move(sorted_values)) {}

Ecdf Ecdf::from_sorted(std::vector<double> sorted_values) {
  if (sorted_values.empty()) throw std::invalid_argument("Ecdf: empty sample");
  return Ecdf(std::move(sorted_values), SortedTag{});
}

std::size_t Ecdf::count_leq(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(sorted_.begin(), sorted_.end(), t) - sorted_.begin());
}

double Ecdf::operator()(double t) const {
  return static_cast<double>(count_leq(t)) / static_cast<double>(sorted_.size());
}

std::size_t quantile_order_index(std::size_t n, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("quantile: q must lie in (0,1)");
  const double target = q * static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(target));
  // Settle ties with the defining inequality k >= q*n rather than trusting
  // ceil at exact integers.
  while (k > 1 && static_cast<double>(k - 1) >= target) --k;
  while (static_cast<double>(k) < target) ++k;
  if (k < 1) k = 1;
  if (k > n) k = n;
  return k;
}

double Ecdf::quantile(double q) const {
  return sorted_[quantile_order_index(sorted_.size(), q) - 1];
}

double scale_remainder(double remainder, std::size_t count, double rho) {
  return std::pow(static_cast<double>(count), 1.0 / (2.0 * rho)) * remainder;
}

BahadurDecomposition bahadur_decompose(std::span<const double> values,
                                       const LocalExpansion& expansion) {
  if (values.empty()) throw std::invalid_argument("bahadur_decompose: empty sample");
  std::vector<double> copy(values.begin(), values.end());
  const std::size_t n = copy.size();
  const std::size_t k = quantile_order_index(n, expansion.p);
  std::nth_element(copy.begin(), copy.begin() + (k - 1), copy.end());
  const double eq = copy[k - 1];

  std::size_t leq = 0;
  for (double v : values) leq += (v <= expansion.t_p) ? 1 : 0;
  const double fn_tp = static_cast<double>(leq) / static_cast<double>(n);

  BahadurDecomposition d;
  d.empirical_quantile = eq;
  d.linearized_term = g_inverse(expansion.transform(), expansion.p - fn_tp);
  d.remainder = (eq - expansion.t_p) - d.linearized_term;
  d.scaled_remainder = scale_remainder(d.remainder, n, expansion.rho);
  return d;
}

BahadurDecomposition bahadur_decompose(const Sample& sample, const PowerLocalModel& model) {
  return bahadur_decompose(std::span<const double>(sample.values),
                           LocalExpansion{model.rho, model.m_coef, model.t_p, model.p});
}

std::string bahadur_csv_row(std::size_t n, std::uint64_t seed, const BahadurDecomposition& d) {
  std::ostringstream os;
  os << n << ',' << seed << ',' << format_double(d.empirical_quantile) << ','
     << format_double(d.linearized_term) << ',' << format_double(d.remainder) << ','
     << format_double(d.scaled_remainder);
  return os.str();
}

}  // namespace qboot
