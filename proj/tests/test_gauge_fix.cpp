#include "helpers.hpp"

#include "nlh/gauge_fix.hpp"

#include <doctest.h>

using namespace nlh;
using namespace nlh::gauge;
using lie::SO3;
using lie::SU2;
using lie::Vec3;

namespace {

template <class G>
double max_link_defect(const LatticeConnection<G>& c) {
  double m = 0.0;
  for (std::size_t e = 0; e < c.num_links(); ++e) m = std::max(m, (c.link(e) - G::identity()).norm());
  return m;
}

template <class G>
double max_link_diff(const LatticeConnection<G>& a, const LatticeConnection<G>& b) {
  double m = 0.0;
  for (std::size_t e = 0; e < a.num_links(); ++e) m = std::max(m, (a.link(e) - b.link(e)).norm());
  return m;
}

}  // namespace

TEST_CASE_TEMPLATE("identity links are a Coulomb fixed point", G, SU2, SO3) {
  auto k = test::grid({4, 4, 4}, 0.25);
  GaugeTransform<G> g;
  CoulombReport rep;
  const auto out = coulomb_gauge_fix(LatticeConnection<G>(k), {}, g, rep);
  CHECK(rep.converged);
  CHECK(rep.div_sup == 0.0);
  CHECK(max_link_defect(out) == 0.0);
  for (const auto& x : g) CHECK((x - G::identity()).norm() == 0.0);
}

TEST_CASE_TEMPLATE("pure gauge stays flat and becomes divergence free", G, SU2, SO3) {
  auto k = test::grid({5, 5, 5}, 0.2);
  lie::Rng rng(1);
  const auto pure = apply_gauge(LatticeConnection<G>(k), smooth_gauge<G>(*k, rng, 0.5));
  GaugeTransform<G> g;
  CoulombReport rep;
  CoulombOptions opt;
  opt.tol = 1e-10;
  const auto out = coulomb_gauge_fix(pure, opt, g, rep);
  CHECK(rep.converged);
  CHECK(link_divergence(out).max_abs() <= opt.tol);
  CHECK(curvature(out).max_abs() < 1e-10);
  CHECK(gauge_energy(out, DensityModel::constant()) < 1e-20);
}

TEST_CASE_TEMPLATE("Coulomb fixing of a small random connection", G, SU2, SO3) {
  auto k = test::grid({6, 6, 6}, 1.0);
  lie::Rng rng(2);
  const auto conn = random_connection<G>(k, rng, 0.1);
  GaugeTransform<G> g;
  CoulombReport rep;
  CoulombOptions opt;
  opt.tol = 1e-10;
  const auto out = coulomb_gauge_fix(conn, opt, g, rep);
  CHECK(rep.converged);
  CHECK(rep.div_sup <= opt.tol);
  CHECK(link_divergence(out).max_abs() <= opt.tol);
  // The returned transform reproduces the fixed connection and is the
  // identity on the boundary.
  CHECK(max_link_diff(apply_gauge(conn, g), out) < 1e-12);
  for (std::size_t v = 0; v < k->num_vertices(); ++v)
    if (k->on_boundary(k->cell(0, v).base)) CHECK((g[v] - G::identity()).norm() == 0.0);
  const auto q0 = gauge_Q(conn), q1 = gauge_Q(out);
  for (std::size_t i = 0; i < q0.size(); ++i) CHECK(q1.at(i) == doctest::Approx(q0.at(i)).epsilon(1e-12).scale(1e-12));
  CHECK(std::isfinite(rep.ratio_n2));
  CHECK(std::isfinite(rep.ratio_s));
}

TEST_CASE_TEMPLATE("exponential gauge flattens pure gauge connections", G, SU2, SO3) {
  auto k = test::grid({6, 6, 6}, 1.0 / 6);
  lie::Rng rng(3);
  const auto pure = apply_gauge(LatticeConnection<G>(k), random_gauge<G>(*k, rng));
  for (auto mode : {ExponentialMode::AxisTree, ExponentialMode::RadialTransport}) {
    GaugeTransform<G> g;
    ExponentialReport rep;
    const auto out = exponential_gauge_fix(pure, {3, 3, 3, 0}, mode, g, rep);
    CHECK(max_link_defect(out) < 1e-12);
    CHECK(max_link_diff(apply_gauge(pure, g), out) < 1e-12);
    CHECK(rep.origin_norm < 1e-12);
  }
}

TEST_CASE("axis tree links become the identity") {
  auto k = test::grid({5, 5}, 0.2);
  lie::Rng rng(4);
  const auto conn = random_connection<SU2>(k, rng, 0.3);
  GaugeTransform<SU2> g;
  ExponentialReport rep;
  const auto out = exponential_gauge_fix(conn, {2, 2, 0, 0}, ExponentialMode::AxisTree, g, rep);
  CHECK(rep.tree_defect < 1e-12);
  // Curvature is only conjugated.
  const auto q0 = gauge_Q(conn), q1 = gauge_Q(out);
  for (std::size_t i = 0; i < q0.size(); ++i) CHECK(q1.at(i) == doctest::Approx(q0.at(i)).epsilon(1e-12));
}

TEST_CASE("radial gauge of a constant field saturates |A| <= |x| |F| / 2") {
  const int m = 32;
  GridSpec spec{{m, m}, {1.0 / m, 1.0 / m}, {-0.5, -0.5}, {}};
  auto k = std::make_shared<const Complex>(spec);
  // Constant field x^0 dx^1 with the origin at the grid centre.
  const auto conn = constant_field<SU2>(k, 1.0, 0, 1, Vec3(0, 0, 1));
  GaugeTransform<SU2> g;
  ExponentialReport rep;
  const auto out = exponential_gauge_fix(conn, {m / 2, m / 2, 0, 0}, ExponentialMode::RadialTransport, g, rep);
  CHECK(rep.bound_ratio <= 1.1);
  CHECK(rep.bound_ratio >= 0.9);
  CHECK(rep.origin_norm < 1e-12);
  // A(x) = (B/2)(-y, x) in the radial gauge.
  const auto a = algebra_from_connection(out);
  for (std::size_t e = 0; e < a.size(); ++e) {
    const auto c = k->cell(1, e);
    const auto x = k->cell_center(1, e);
    const double expect = c.mask == 1u ? -0.5 * x[1] : 0.5 * x[0];
    CHECK(a.at(e, 2) == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("radial gauge bound on a smooth non-abelian connection") {
  const int m = 16;
  GridSpec spec{{m, m, m}, {1.0 / m, 1.0 / m, 1.0 / m}, {-0.5, -0.5, -0.5}, {}};
  auto k = std::make_shared<const Complex>(spec);
  const auto conn = test::smooth_connection<SU2>(k, 0.5);
  GaugeTransform<SU2> g;
  ExponentialReport rep;
  exponential_gauge_fix(conn, {m / 2, m / 2, m / 2, 0}, ExponentialMode::RadialTransport, g, rep);
  MESSAGE("smooth radial bound ratio " << rep.bound_ratio);
  CHECK(rep.bound_ratio <= 1.1);
}
