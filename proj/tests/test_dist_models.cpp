#include "qboot/dist_models.hpp"

#include <cmath>
#include <doctest.h>

#include "oracles.hpp"

using namespace qboot;

TEST_CASE("power-local cdf values") {
  const auto m2 = PowerLocalModel::canonical(2.0, 0.5);
  CHECK(cdf(m2, 0.5) == doctest::Approx(0.625).epsilon(1e-15));
  const auto m1 = PowerLocalModel::canonical(1.0, 0.5);
  CHECK(cdf(m1, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(cdf(m2, -2.0) == 0.0);
  CHECK(cdf(m2, 2.0) == 1.0);
  CHECK(cdf(m2, m2.lo) == 0.0);
  CHECK(cdf(m2, m2.hi) == 1.0);
}

TEST_CASE("power-local quantile, closed form against bisection") {
  const auto m2 = PowerLocalModel::canonical(2.0, 0.5);
  CHECK(quantile(m2, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(quantile(m2, 0.625) == doctest::Approx(0.5).epsilon(1e-12));
  const double bis = testing::quantile_by_bisection([&](double t) { return cdf(m2, t); },
                                                    m2.lo - 1.0, m2.hi + 1.0, 0.625);
  CHECK(quantile(m2, 0.625) == doctest::Approx(bis).epsilon(1e-10));

  const GaussianModel g{0.0, 1.0};
  CHECK(quantile(g, 0.5) == doctest::Approx(0.0).epsilon(1e-15));
  const double bg = testing::quantile_by_bisection([&](double t) { return cdf(g, t); }, -10.0,
                                                   10.0, 0.975);
  CHECK(quantile(g, 0.975) == doctest::Approx(bg).epsilon(1e-9));
}

TEST_CASE("g transform examples") {
  CHECK(g_apply(GTransform{1.0, 2.0}, 3.0) == doctest::Approx(6.0));
  CHECK(g_apply(GTransform{2.0, 0.5}, -2.0) == doctest::Approx(-2.0));
  CHECK(g_apply(GTransform{0.5, 1.0}, 4.0) == doctest::Approx(2.0));
  CHECK(g_inverse(GTransform{2.0, 0.5}, -2.0) == doctest::Approx(-2.0));
  CHECK(g_inverse(GTransform{1.0, 2.0}, 6.0) == doctest::Approx(3.0));
  CHECK(g_inverse(GTransform{3.0, 1.0}, 8.0) == doctest::Approx(2.0));
  CHECK(g_apply(GTransform{2.0, 0.5}, 0.0) == 0.0);
}

TEST_CASE("g round trip on a dense grid") {
  for (const GTransform g : {GTransform{1.0, 2.0}, GTransform{2.0, 0.5}, GTransform{0.5, 1.0},
                             GTransform{3.0, 0.25}}) {
    for (int i = 0; i <= 2000; ++i) {
      const double x = -10.0 + 20.0 * i / 2000.0;
      const double back = g_inverse(g, g_apply(g, x));
      const double tol = std::abs(x) > 1.0 ? 1e-12 * std::abs(x) : 1e-12;
      CHECK(std::abs(back - x) <= tol);
    }
  }
}

TEST_CASE("generalized-inverse law on a probability grid") {
  const DistributionModel models[] = {DistributionModel(PowerLocalModel::canonical(2.0, 0.5)),
                                      DistributionModel(PowerLocalModel::make(0.7, 1.3, 0.4, 0.3)),
                                      DistributionModel(GaussianModel{1.0, 2.0})};
  for (const auto& m : models) {
    for (int i = 1; i < 400; ++i) {
      const double q = i / 400.0;
      const double tq = quantile(m, q);
      CHECK(cdf(m, tq) >= q - 1e-12);
      for (double eps : {1e-6, 1e-3, 1e-1}) {
        CHECK(cdf(m, tq - eps) < q + 1e-12);
      }
    }
  }
}

TEST_CASE("cdf and quantile monotone on dense grids") {
  const auto m = PowerLocalModel::make(1.7, 0.8, -0.3, 0.4);
  double prev = -1.0;
  for (int i = 0; i <= 10000; ++i) {
    const double t = m.lo - 0.5 + (m.hi - m.lo + 1.0) * i / 10000.0;
    const double v = cdf(m, t);
    CHECK(v >= prev);
    prev = v;
  }
  prev = m.lo - 1.0;
  for (int i = 1; i < 1000; ++i) {
    const double v = quantile(m, i / 1000.0);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("local power law is exact for the canonical model") {
  const auto m = PowerLocalModel::canonical(2.0, 0.5);
  for (double h : {1e-1, 1e-2, 1e-3, 1e-4, -1e-1, -1e-2, -1e-3, -1e-4}) {
    const double lhs = cdf(m, m.t_p + h) - cdf(m, m.t_p);
    const double power = m.m_coef * std::pow(std::abs(h), m.rho) * (h > 0 ? 1.0 : -1.0);
    const double ratio = std::abs(lhs - power) / std::pow(std::abs(h), m.rho);
    CHECK(ratio <= (std::abs(h) <= 1e-4 ? 1e-3 : 1e-2));
  }
}

TEST_CASE("gaussian cdf/quantile accuracy") {
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std_normal_cdf(1.0) == doctest::Approx(0.841344746068543).epsilon(1e-13));
  CHECK(std_normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));

  const GaussianModel g{0.7, 1.9};
  for (int i = -60; i <= 60; ++i) {
    const double t = g.mean + g.sd * i / 10.0;
    CHECK(quantile(g, cdf(g, t)) == doctest::Approx(t).epsilon(2e-7).scale(1.0));
  }
  for (int i = -40; i <= 40; ++i) {
    const double t = g.mean + g.sd * i / 10.0;
    CHECK(quantile(g, cdf(g, t)) == doctest::Approx(t).epsilon(2e-10).scale(1.0));
  }
}

TEST_CASE("local expansion of both model kinds") {
  const auto pl = PowerLocalModel::canonical(2.0, 0.5);
  const auto le = local_expansion(pl, 0.5);
  CHECK(le.rho == 2.0);
  CHECK(le.m_coef == 0.5);
  CHECK(le.t_p == 0.0);
  CHECK_THROWS(local_expansion(DistributionModel(pl), 0.4));

  const GaussianModel g{0.0, 1.0};
  const auto lg = local_expansion(g, 0.5);
  CHECK(lg.rho == 1.0);
  CHECK(lg.t_p == doctest::Approx(0.0));
  CHECK(lg.m_coef == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("model json round trip and strictness") {
  const DistributionModel pm = PowerLocalModel::make(1.5, 0.75, 0.2, 0.35);
  const auto j = to_json(pm);
  const auto back = model_from_json(j);
  const auto& a = std::get<PowerLocalModel>(pm);
  const auto& b = std::get<PowerLocalModel>(back);
  CHECK(a.rho == b.rho);
  CHECK(a.m_coef == b.m_coef);
  CHECK(a.t_p == b.t_p);
  CHECK(a.p == b.p);
  CHECK(a.lo == doctest::Approx(b.lo).epsilon(1e-14));

  const DistributionModel gm = GaussianModel{0.5, 2.0};
  const auto g2 = std::get<GaussianModel>(model_from_json(to_json(gm)));
  CHECK(g2.mean == 0.5);
  CHECK(g2.sd == 2.0);

  CHECK_THROWS(model_from_json(nlohmann::json{{"kind", "power_local"}, {"rho", 1.0}, {"m", 1.0},
                                              {"bogus", 1}}));
  CHECK_THROWS(model_from_json(nlohmann::json{{"kind", "nope"}}));
  CHECK_THROWS(model_from_json(nlohmann::json{{"kind", "gaussian"}, {"sd", -1.0}}));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS(PowerLocalModel::make(0.0, 0.5, 0.0, 0.5));
  CHECK_THROWS(PowerLocalModel::make(2.0, 0.0, 0.0, 0.5));
  CHECK_THROWS(PowerLocalModel::make(2.0, 0.5, 0.0, 1.0));
  CHECK_THROWS(quantile(PowerLocalModel::canonical(2.0, 0.5), 0.0));
  CHECK_THROWS(quantile(PowerLocalModel::canonical(2.0, 0.5), 1.0));
  CHECK_THROWS(quantile(GaussianModel{}, -0.1));
  CHECK_THROWS(std_normal_quantile(0.0));
}

TEST_CASE("general power-local support endpoints") {
  const auto m = PowerLocalModel::make(2.0, 0.5, 1.0, 0.25);
  CHECK(m.lo == doctest::Approx(1.0 - std::sqrt(0.5)).epsilon(1e-14));
  CHECK(m.hi == doctest::Approx(1.0 + std::sqrt(1.5)).epsilon(1e-14));
  CHECK(cdf(m, m.lo) == doctest::Approx(0.0));
  CHECK(cdf(m, m.hi) == 1.0);
  CHECK(cdf(m, m.t_p) == doctest::Approx(0.25));
  CHECK(quantile(m, 0.25) == doctest::Approx(1.0));
}
