#include "nlh/density.hpp"
#include "nlh/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace nlh;

namespace {

double poly_rho(double gamma, double q) { return std::pow(1.0 - 0.5 * (gamma - 1.0) * q, 1.0 / (gamma - 1.0)); }

double simpson(const DensityModel& m, double q) {
  const int n = 2000;
  const double h = q / n;
  double s = m.rho(0.0) + m.rho(q);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * m.rho(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("polytropic density values") {
  for (double g : {1.2, 1.4, 2.0, 3.0}) {
    const auto m = DensityModel::polytropic(g);
    CHECK(m.rho(0.0) == 1.0);
    for (double q : {0.1, 0.3, 0.6}) CHECK(m.rho(q) == doctest::Approx(poly_rho(g, q)).epsilon(1e-14));
  }
  const auto m2 = DensityModel::polytropic(2.0);
  CHECK(m2.rho(0.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(m2.ellipticity_margin(0.5) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(m2.stored_energy_integrand(1.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(*m2.q_crit() == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(DensityModel::polytropic(0.9), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::polytropic(1.0), InvalidArgument);
}

TEST_CASE("constant density") {
  const auto m = DensityModel::constant();
  CHECK(m.rho(7.3) == 1.0);
  CHECK(m.drho(7.3) == 0.0);
  CHECK(m.stored_energy_integrand(3.0) == 3.0);
  for (double q : {0.0, 1.0, 100.0}) CHECK(m.ellipticity_margin(q) == 1.0);
  CHECK_FALSE(m.q_crit().has_value());
}

TEST_CASE("sonic point of the polytropic law at Q = 2/(gamma+1)") {
  const auto m = DensityModel::polytropic(1.4);
  CHECK(*m.q_crit() == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(std::abs(m.ellipticity_margin(5.0 / 6.0)) < 1e-14);
  CHECK(m.ellipticity_margin(0.8) > 0.0);
  CHECK(m.ellipticity_margin(0.9) < 0.0);
}

TEST_CASE("domain errors name Q_max") {
  const auto m = DensityModel::polytropic(1.4);
  CHECK(m.q_max() == doctest::Approx(5.0));
  CHECK(m.in_domain(4.9));
  CHECK_FALSE(m.in_domain(m.q_max()));
  CHECK_FALSE(m.in_domain(-0.1));
  try {
    m.check_domain(6.0);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.q() == 6.0);
    CHECK(e.q_max() == doctest::Approx(5.0));
  }
}

TEST_CASE("derivative and margin agree with finite differences") {
  for (const auto& m : {DensityModel::polytropic(1.4), DensityModel::polytropic(3.0),
                        DensityModel::minimal_surface(),
                        DensityModel::tabulated({0, 0.5, 1, 2}, {1, 0.8, 0.7, 0.65})}) {
    for (double q : {0.05, 0.3, 0.7, 1.3}) {
      if (!m.in_domain(q + 1e-4)) continue;
      const double e = 1e-6;
      const double fd = (m.rho(q + e) - m.rho(q - e)) / (2 * e);
      CHECK(m.drho(q) == doctest::Approx(fd).epsilon(1e-6));
      // rho + 2 Q rho' is d/dQ of Q rho plus Q rho'.
      const double qrho = ((q + e) * m.rho(q + e) - (q - e) * m.rho(q - e)) / (2 * e);
      CHECK(m.ellipticity_margin(q) == doctest::Approx(qrho + q * fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("stored energy integrand is the antiderivative of rho") {
  for (const auto& m : {DensityModel::constant(), DensityModel::polytropic(1.4), DensityModel::polytropic(2.0),
                        DensityModel::minimal_surface(),
                        DensityModel::tabulated({0, 0.5, 1, 2}, {1, 0.8, 0.7, 0.65})}) {
    CHECK(m.stored_energy_integrand(0.0) == 0.0);
    for (double q : {0.2, 0.9, 1.7})
      if (m.in_domain(q)) CHECK(m.stored_energy_integrand(q) == doctest::Approx(simpson(m, q)).epsilon(1e-9));
  }
}

TEST_CASE("polytropic density stays positive, decreasing and C1 on its domain") {
  for (double g : {1.1, 1.4, 2.0, 3.0, 5.0}) {
    const auto m = DensityModel::polytropic(g);
    double prev = m.rho(0.0);
    for (int i = 1; i < 1000; ++i) {
      const double q = m.q_max() * i / 1000.0;
      const double r = m.rho(q);
      CHECK(r > 0.0);
      CHECK(r < prev);
      CHECK(m.drho(q) < 0.0);
      prev = r;
    }
  }
}

TEST_CASE("minimal-surface margin is (1+Q)^{-3/2}") {
  const auto m = DensityModel::minimal_surface();
  for (double q : {0.0, 0.5, 3.0, 10.0})
    CHECK(m.ellipticity_margin(q) == doctest::Approx(std::pow(1.0 + q, -1.5)).epsilon(1e-13));
}

TEST_CASE("tabulated density interpolates its nodes") {
  const auto m = DensityModel::tabulated({0, 0.5, 1, 2}, {1, 0.8, 0.7, 0.65});
  CHECK(m.rho(0.5) == doctest::Approx(0.8));
  CHECK(m.rho(2.0) == doctest::Approx(0.65));
  CHECK_THROWS_AS(DensityModel::tabulated({0.1, 1}, {1, 1}), InvalidArgument);
  CHECK_THROWS_AS(DensityModel::tabulated({0, 1}, {1, -1}), InvalidArgument);
}

TEST_CASE("condition (2) certificates") {
  const auto m = DensityModel::polytropic(1.4);
  const double qc = *m.q_crit();

  const auto ok = certify_condition2(m, 0.0, 0.9 * qc, 0.0, 0.0);
  CHECK(ok.passed);
  CHECK(ok.samples == 10000);
  CHECK(ok.min_margin > 0.0);
  CHECK(ok.K == doctest::Approx(std::max(1.0 / ok.min_margin, ok.max_margin)).epsilon(1e-12));

  const auto bad = certify_condition2(m, 0.0, 1.1 * qc, 0.0, 0.0);
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.failure_q.has_value());
  const double step = 1.1 * qc / (bad.samples - 1);
  CHECK(std::abs(*bad.failure_q - qc) <= step);

  const auto ms = certify_condition2(DensityModel::minimal_surface(), 0.0, 10.0, 0.0, 0.0);
  CHECK(ms.passed);
  CHECK(ms.min_margin == doctest::Approx(std::pow(11.0, -1.5)).epsilon(1e-10));
  CHECK(ms.max_margin == doctest::Approx(1.0));

  const auto c = certify_condition2(DensityModel::constant(), 0.0, 50.0, 0.0, 0.0);
  CHECK(c.passed);
  CHECK(c.K == 1.0);
}

TEST_CASE("sonic failure sits at 2/(gamma+1) within one sampling step") {
  for (double g : {1.4, 2.0, 3.0}) {
    const auto m = DensityModel::polytropic(g);
    const double qc = 2.0 / (g + 1.0);
    const double hi = std::min(1.5 * qc, 0.999 * m.q_max());
    const auto cert = certify_condition2(m, 0.0, hi, 0.0, 0.0, 10000);
    REQUIRE(cert.failure_q.has_value());
    CHECK(*cert.failure_q >= qc);
    CHECK(*cert.failure_q - qc <= hi / 9999.0 + 1e-15);
  }
}
