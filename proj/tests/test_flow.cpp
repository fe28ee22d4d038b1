#include "helpers.hpp"
#include "laplace_oracle.hpp"

#include "nlh/dec.hpp"
#include "nlh/errors.hpp"
#include "nlh/flow.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace nlh;

namespace {

flow::FlowProblem problem(ComplexPtr k, DensityModel m, const std::function<double(const Point&)>& bc) {
  flow::FlowProblem p;
  p.complex = k;
  p.density = m;
  p.boundary_phi.resize(k->num_vertices());
  for (std::size_t v = 0; v < p.boundary_phi.size(); ++v) p.boundary_phi[v] = bc(k->vertex_point(k->cell(0, v).base));
  return p;
}

Cochain sample(ComplexPtr k, const std::function<double(const Point&)>& f) {
  Cochain c(k, 0);
  for (std::size_t v = 0; v < c.size(); ++v) c.at(v) = f(k->vertex_point(k->cell(0, v).base));
  return c;
}

}  // namespace

TEST_CASE("flow energy closed forms") {
  auto k = test::grid({8, 8}, 0.125);
  const auto zero = [](const Point&) { return 0.0; };
  auto p = problem(k, DensityModel::constant(), zero);
  CHECK(flow::flow_energy(p, Cochain(k, 0)) == 0.0);
  CHECK(flow::flow_energy(p, sample(k, [](const Point& x) { return x[0]; })) == doctest::Approx(0.5).epsilon(1e-14));

  p.density = DensityModel::polytropic(2.0);
  const double s = std::sqrt(0.5);
  CHECK(flow::flow_energy(p, sample(k, [&](const Point& x) { return s * x[0]; })) ==
        doctest::Approx(0.21875).epsilon(1e-13));
}

TEST_CASE("linear potentials are discrete harmonic") {
  auto k = test::grid({10, 7}, 0.1);
  const auto lin = [](const Point& x) { return 0.3 * x[0] - 0.2 * x[1] + 1.0; };
  for (auto m : {DensityModel::constant(), DensityModel::polytropic(1.4)}) {
    auto p = problem(k, m, lin);
    CHECK(flow::flow_residual(p, sample(k, lin)).max_abs() < 1e-12);
  }
}

TEST_CASE("flow gradient matches central finite differences") {
  auto k = test::grid({6, 5}, 0.2);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto m : {DensityModel::constant(), DensityModel::polytropic(1.4), DensityModel::minimal_surface()}) {
    auto p = problem(k, m, [](const Point&) { return 0.0; });
    Cochain phi(k, 0);
    for (auto& v : phi.values()) v = 0.03 * u(rng);
    const auto g = flow::flow_energy_gradient(p, phi);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> dir(phi.size());
      double slope = 0.0;
      for (std::size_t v = 0; v < dir.size(); ++v) slope += g[v] * (dir[v] = u(rng));
      const double e = 1e-5;
      Cochain a = phi, b = phi;
      for (std::size_t v = 0; v < dir.size(); ++v) a.at(v) += e * dir[v], b.at(v) -= e * dir[v];
      const double fd = (flow::flow_energy(p, a) - flow::flow_energy(p, b)) / (2 * e);
      CHECK(std::abs(fd - slope) <= 1e-5 * std::max(std::abs(slope), 1e-3));
    }
  }
}

TEST_CASE("rho == 1 solve matches a direct sparse solve") {
  auto k = test::grid({32, 32}, 1.0 / 32);
  const auto bc = [](const Point& x) { return x[0] + 0.5 * x[1] + 0.2 * std::sin(std::numbers::pi * x[0]) * x[1]; };
  auto p = problem(k, DensityModel::constant(), bc);
  const auto sol = flow::solve_flow(p);
  const auto oracle = test::laplace_oracle(*k, p.boundary_phi);
  double err = 0.0;
  for (std::size_t v = 0; v < oracle.size(); ++v) err = std::max(err, std::abs(sol.phi.at(v) - oracle[v]));
  CHECK(err <= 1e-12);

  auto plin = problem(k, DensityModel::constant(), [](const Point& x) { return x[0]; });
  const auto lin = flow::solve_flow(plin);
  for (std::size_t v = 0; v < lin.phi.size(); ++v)
    CHECK(lin.phi.at(v) == doctest::Approx(k->vertex_point(k->cell(0, v).base)[0]).epsilon(1e-12));
}

TEST_CASE("low-Mach polytropic flow stays close to the linear one") {
  auto k = test::grid({16, 16}, 1.0 / 16);
  const auto bc = [](const Point& x) { return 0.1 * x[0] + 0.01 * std::sin(std::numbers::pi * x[0]) * x[1]; };
  auto plin = problem(k, DensityModel::constant(), bc);
  auto pgas = problem(k, DensityModel::polytropic(1.4), bc);
  const auto a = flow::solve_flow(plin);
  const auto b = flow::solve_flow(pgas);
  CHECK(b.residual_max <= 1e-8);
  CHECK(b.mach_ratio < 0.02);
  const double q = b.max_q;
  CHECK((a.phi - b.phi).max_abs() <= 10.0 * q * 0.1);
  for (double v : b.q.values()) CHECK(std::isfinite(v));
}

TEST_CASE("ramping the boundary speed hits the sonic limit without NaN") {
  auto k = test::grid({8, 8}, 0.125);
  bool raised = false;
  for (double c = 0.2; c < 2.0 && !raised; c += 0.1) {
    auto p = problem(k, DensityModel::polytropic(1.4), [&](const Point& x) { return c * x[0]; });
    try {
      const auto s = flow::solve_flow(p);
      CHECK(s.max_q <= s.q_cap);
      for (double v : s.phi.values()) CHECK(std::isfinite(v));
    } catch (const SonicLimitError& e) {
      raised = true;
      CHECK(std::isfinite(e.q()));
      CHECK(e.q() > 0.95 * 5.0 / 6.0);
    }
  }
  CHECK(raised);
}

TEST_CASE("circulation form must be closed") {
  auto k = test::grid({6, 6}, 1.0 / 6, {true, false});
  auto p = problem(k, DensityModel::constant(), [](const Point& x) { return x[1]; });
  Cochain lam(k, 1);
  for (std::size_t e = 0; e < lam.size(); ++e)
    if (k->cell(1, e).mask == 1u) lam.at(e) = 0.4;
  p.lambda = lam;
  CHECK_NOTHROW(flow::validate(p));
  const auto sol = flow::solve_flow(p);
  CHECK(sol.residual_max <= 1e-10);
  // The x-velocity carries the circulation.
  for (std::size_t e = 0; e < sol.omega.size(); ++e)
    if (k->cell(1, e).mask == 1u) CHECK(sol.omega.at(e) == doctest::Approx(0.4).epsilon(1e-9));

  lam.at(0) = 1.0;
  p.lambda = lam;
  CHECK_THROWS_AS(flow::validate(p), InvalidArgument);
}

TEST_CASE("Neumann faces give the natural boundary condition") {
  auto k = test::grid({8, 8}, 0.125);
  auto p = problem(k, DensityModel::polytropic(1.4), [](const Point& x) { return 0.3 * x[0]; });
  using F = flow::FaceKind;
  p.faces = {F::Dirichlet, F::Dirichlet, F::Neumann, F::Neumann};
  const auto sol = flow::solve_flow(p);
  // Uniform flow along x satisfies the no-flux condition on the y faces.
  for (std::size_t v = 0; v < sol.phi.size(); ++v)
    CHECK(sol.phi.at(v) == doctest::Approx(0.3 * k->vertex_point(k->cell(0, v).base)[0]).epsilon(1e-9));
  const auto fixed = flow::dirichlet_vertices(p);
  CHECK_FALSE(fixed[k->index(0, 0, {3, 0})]);
  CHECK(fixed[k->index(0, 0, {0, 3})]);
}

TEST_CASE("parallel residual") {
  auto k = test::grid({6, 6}, 0.2);
  Cochain v(k, 0, 2);
  for (std::size_t i = 0; i < v.size(); ++i) v.at(i, 0) = 0.4, v.at(i, 1) = -1.1;
  CHECK(flow::parallel_residual(v).max_abs() == 0.0);

  Cochain x(k, 0, 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto p = k->vertex_point(k->cell(0, i).base);
    x.at(i, 0) = p[0];
    x.at(i, 1) = p[1];
  }
  const auto r = flow::parallel_residual(x);
  for (std::size_t i = 0; i < r.size(); ++i)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) CHECK(r.at(i, a * 2 + b) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("great-circle flow on the round sphere is parallel but not closed") {
  // Chart (theta, phi), g = diag(1, sin^2 theta), v = d/dphi / sin(theta).
  const auto equator_residual = [](int m) {
    const double half = 0.4, h = 2 * half / m;
    GridSpec g{{m, m}, {h, h}, {std::numbers::pi / 2 - half, 0.0}, {false, false}};
    std::vector<double> diag;
    for (int j = 0; j <= m; ++j)
      for (int i = 0; i <= m; ++i) {
        const double s = std::sin(g.origin[0] + i * h);
        diag.push_back(1.0);
        diag.push_back(s * s);
      }
    auto k = std::make_shared<const Complex>(g, MetricSpec::diagonal(diag));
    Cochain v(k, 0, 2);
    Cochain w(k, 1);
    for (std::size_t i = 0; i < v.size(); ++i) v.at(i, 1) = 1.0 / std::sin(k->vertex_point(k->cell(0, i).base)[0]);
    for (std::size_t e = 0; e < w.size(); ++e) {
      const auto c = k->cell(1, e);
      if (c.mask == 2u) w.at(e) = std::sin(k->vertex_point(c.base)[0]);
    }
    const auto r = flow::parallel_residual(v);
    double worst = 0.0;
    for (int j = 1; j < m; ++j) {
      const std::size_t vi = k->index(0, 0, {m / 2, j});
      for (int c = 0; c < 4; ++c) worst = std::max(worst, std::abs(r.at(vi, c)));
    }
    return std::make_pair(worst, dec::exterior_derivative(w).max_abs());
  };
  const auto [r16, dw16] = equator_residual(16);
  const auto [r32, dw32] = equator_residual(32);
  CHECK(r16 < 1e-2);
  CHECK(r32 <= r16 / 3.0);
  CHECK(dw16 > 0.1);
  CHECK(dw32 > 0.1);
}
