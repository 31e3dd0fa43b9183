#include "qboot/quantile_core.hpp"

#include <cmath>
#include <doctest.h>

#include "qboot/process_gen.hpp"
#include "qboot/rng.hpp"

using namespace qboot;

TEST_CASE("ecdf evaluation") {
  const Ecdf e(std::vector<double>{1, 2, 3, 4});
  CHECK(e(2.5) == doctest::Approx(0.5));
  CHECK(e(2.0) == doctest::Approx(0.5));  // ties included, right continuity
  CHECK(e(0.0) == 0.0);
  CHECK(e(100.0) == 1.0);
  CHECK(e.count_leq(3.0) == 3);
}

TEST_CASE("empirical quantile as order statistic") {
  const Ecdf e(std::vector<double>{1, 2, 3, 4});
  CHECK(e.quantile(0.5) == 2.0);
  const Ecdf c(std::vector<double>{5, 5, 5});
  for (double q : {0.01, 0.3, 0.5, 0.9, 0.99}) CHECK(c.quantile(q) == 5.0);
  const Ecdf s(std::vector<double>{3, 1, 4, 1, 5});
  CHECK(s.quantile(0.6) == 3.0);  // sorted {1,1,3,4,5}, ceil(3) = 3rd
  CHECK_THROWS(e.quantile(0.0));
  CHECK_THROWS(e.quantile(1.0));
  CHECK_THROWS(Ecdf(std::vector<double>{}));
  CHECK_THROWS(Ecdf(std::vector<double>{1.0, std::nan("")}));
}

TEST_CASE("order-statistic equality and inf characterization") {
  Rng rng(99);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + rng.uniform_index(60);
    std::vector<double> v(n);
    for (double& x : v) x = std::floor(rng.uniform01() * 20.0) / 4.0;  // plenty of ties
    const Ecdf e(v);
    const double q = rng.uniform01() * 0.98 + 0.01;
    const std::size_t k = quantile_order_index(n, q);
    const double eq = e.quantile(q);
    CHECK(eq == e.sorted_values()[k - 1]);
    // inf characterization, on exact counts
    CHECK(static_cast<double>(e.count_leq(eq)) >= q * static_cast<double>(n));
    const auto& srt = e.sorted_values();
    double below = srt.front() - 1.0;
    for (double x : srt) {
      if (x < eq) below = x;
    }
    if (below > srt.front() - 1.0) {
      CHECK(static_cast<double>(e.count_leq(below)) < q * static_cast<double>(n));
    }
  }
}

TEST_CASE("quantile map is nondecreasing in q") {
  const Ecdf e(std::vector<double>{0.4, -1.2, 3.3, 2.2, 2.2, -0.7, 9.9, 5.5});
  double prev = e.sorted_values().front();
  for (int i = 1; i < 500; ++i) {
    const double v = e.quantile(i / 500.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("bahadur decomposition, hand-checked cases") {
  // F_n(t_p) = p exactly: two values below, two above t_p = 0.
  {
    const LocalExpansion ex{2.0, 0.5, 0.0, 0.5};
    const std::vector<double> v{-0.8, -0.1, 0.2, 0.9};
    const auto d = bahadur_decompose(v, ex);
    CHECK(d.linearized_term == 0.0);
    CHECK(d.empirical_quantile == -0.1);
    CHECK(d.remainder == doctest::Approx(-0.1).epsilon(1e-15));
  }
  // rho=1, M=1, sample {-0.5, 0.5}: F_n(0) = 0.5, linearized 0, eq = -0.5.
  {
    const LocalExpansion ex{1.0, 1.0, 0.0, 0.5};
    const std::vector<double> v{-0.5, 0.5};
    const auto d = bahadur_decompose(v, ex);
    CHECK(d.linearized_term == 0.0);
    CHECK(d.empirical_quantile == -0.5);
    CHECK(d.remainder == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(d.scaled_remainder == doctest::Approx(-0.5 * std::sqrt(2.0)).epsilon(1e-15));
  }
}

TEST_CASE("decomposition identity holds to machine precision") {
  Rng rng(7);
  const LocalExpansion exps[] = {{1.0, 0.5, 0.0, 0.5}, {2.0, 0.5, 0.0, 0.5},
                                 {1.5, 1.2, 0.3, 0.4}};
  for (const auto& ex : exps) {
    for (int rep = 0; rep < 200; ++rep) {
      const std::size_t n = 1 + rng.uniform_index(200);
      std::vector<double> v(n);
      for (double& x : v) x = 2.0 * rng.uniform01() - 1.0;
      const auto d = bahadur_decompose(v, ex);
      CHECK(std::abs((d.empirical_quantile - ex.t_p) - (d.linearized_term + d.remainder)) <=
            1e-12);
    }
  }
}

TEST_CASE("remainder scaling uses count^{1/(2 rho)}") {
  CHECK(scale_remainder(1.5, 16, 2.0) == doctest::Approx(3.0).epsilon(1e-15));   // 16^{1/4} = 2
  CHECK(scale_remainder(2.0, 16, 1.0) == doctest::Approx(8.0).epsilon(1e-15));   // sqrt(16) = 4
  const LocalExpansion ex{2.0, 0.5, 0.0, 0.5};
  const std::vector<double> v{-0.9, -0.4, -0.1, 0.2, 0.3, 0.5, 0.6, 0.61, -0.3, 0.7,
                              -0.2, 0.1,  0.15, 0.9, -0.6, 0.35};
  const auto d = bahadur_decompose(v, ex);
  CHECK(d.scaled_remainder == doctest::Approx(2.0 * d.remainder).epsilon(1e-15));
}

TEST_CASE("sample overload matches span overload") {
  const auto model = PowerLocalModel::canonical(2.0, 0.5);
  const auto spec = ProcessSpec::iid(model);
  const Sample s = generate(spec, 257, 42);
  const auto a = bahadur_decompose(s, model);
  const auto b = bahadur_decompose(std::span<const double>(s.values),
                                   LocalExpansion{model.rho, model.m_coef, model.t_p, model.p});
  CHECK(a.empirical_quantile == b.empirical_quantile);
  CHECK(a.remainder == b.remainder);
  CHECK(a.scaled_remainder == b.scaled_remainder);
}

TEST_CASE("bahadur csv row") {
  const BahadurDecomposition d{1.5, 0.25, 0.1, 0.4};
  CHECK(bahadur_csv_row(100, 7, d) == "100,7,1.5,0.25,0.1,0.4");
}
