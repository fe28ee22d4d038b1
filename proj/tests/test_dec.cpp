#include "helpers.hpp"

#include "nlh/dec.hpp"
#include "nlh/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace nlh;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Hand-written 2D stencils, independent of the generic d.
double oracle_d0(const Cochain& phi, unsigned mask, MultiIndex b) {
  const auto& k = phi.complex();
  const int a = mask == 1u ? 0 : 1;
  MultiIndex up = b;
  ++up[a];
  return (phi.at(k.index(0, 0, up)) - phi.at(k.index(0, 0, b))) / k.spacing(a);
}

double oracle_d1(const Cochain& w, MultiIndex b) {
  const auto& k = w.complex();
  MultiIndex bx = b, by = b;
  ++bx[0];
  ++by[1];
  const double dy_dx = (w.at(k.index(1, 2u, bx)) - w.at(k.index(1, 2u, b))) / k.spacing(0);
  const double dx_dy = (w.at(k.index(1, 1u, by)) - w.at(k.index(1, 1u, b))) / k.spacing(1);
  return dy_dx - dx_dy;
}

}  // namespace

TEST_CASE("cell counts follow the cubical product formula") {
  auto k = test::grid({4, 4}, 0.25);
  CHECK(k->num_cells(0) == 25);
  CHECK(k->num_cells(1) == 40);
  CHECK(k->num_cells(2) == 16);

  auto k3 = test::grid({3, 4, 5}, 0.1);
  CHECK(k3->num_cells(0) == 4 * 5 * 6);
  CHECK(k3->num_cells(1) == 3 * 5 * 6 + 4 * 4 * 6 + 4 * 5 * 5);
  CHECK(k3->num_cells(2) == 3 * 4 * 6 + 3 * 5 * 5 + 4 * 4 * 5);
  CHECK(k3->num_cells(3) == 60);

  auto kp = test::grid({4, 4}, 0.25, {true, true});
  CHECK(kp->num_cells(0) == 16);
  CHECK(kp->num_cells(1) == 32);
  CHECK(kp->num_cells(2) == 16);
}

TEST_CASE("cell index round-trips") {
  auto k = test::grid({3, 4, 2}, 0.5);
  for (int p = 0; p <= 3; ++p)
    for (std::size_t i = 0; i < k->num_cells(p); ++i) {
      const auto c = k->cell(p, i);
      CHECK(k->index(p, c.mask, c.base) == i);
    }
}

TEST_CASE("identity metric is flat with unit volume density") {
  auto k = test::grid({3, 3, 3}, 0.2);
  CHECK(k->flat());
  for (std::size_t v = 0; v < k->num_vertices(); ++v) {
    CHECK(k->sqrt_det(v) == 1.0);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) CHECK(k->christoffel(v, a, b, c) == 0.0);
  }
}

TEST_CASE("non positive-definite metric is rejected") {
  GridSpec g{{2, 2}, {1.0, 1.0}, {}, {}};
  std::vector<double> diag(9 * 2, 1.0);
  diag[8] = -1.0;
  CHECK_THROWS_AS(Complex(g, MetricSpec::diagonal(diag)), MetricError);
  CHECK_THROWS_AS(Complex(GridSpec{{2, 0}, {1.0, 1.0}, {}, {}}), InvalidArgument);
}

TEST_CASE("zero conformal factor reproduces the identity operators") {
  auto flat = test::grid({5, 4}, 0.2);
  auto conf = test::grid({5, 4}, 0.2, {}, MetricSpec::conformal(std::vector<double>(30, 0.0)));
  std::mt19937_64 rng(1);
  for (int p = 0; p <= 2; ++p) {
    auto a = test::random_cochain(flat, p, rng);
    Cochain b(conf, p, 1, a.values());
    CHECK(max_abs((dec::hodge_star(a) - Cochain(flat, 2 - p, 1, dec::hodge_star(b).values())).values()) < 1e-14);
    if (p > 0)
      CHECK(max_abs((dec::codifferential(a) - Cochain(flat, p - 1, 1, dec::codifferential(b).values())).values()) <
            1e-12);
  }
}

TEST_CASE("exterior derivative matches hand stencils") {
  auto k = test::grid({4, 3}, 0.25);
  std::mt19937_64 rng(2);
  auto phi = test::random_cochain(k, 0, rng);
  const auto w = dec::exterior_derivative(phi);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto c = k->cell(1, i);
    CHECK(w.at(i) == doctest::Approx(oracle_d0(phi, c.mask, c.base)).epsilon(1e-14));
  }
  auto om = test::random_cochain(k, 1, rng);
  const auto f = dec::exterior_derivative(om);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(f.at(i) == doctest::Approx(oracle_d1(om, k->cell(2, i).base)).epsilon(1e-13));
}

TEST_CASE("d of a constant vanishes and d(x) is the x-edge indicator") {
  auto k = test::grid({4, 4}, 1.0);
  Cochain c(k, 0);
  for (auto& v : c.values()) v = 3.7;
  CHECK(dec::exterior_derivative(c).max_abs() == 0.0);
  Cochain x(k, 0);
  for (std::size_t i = 0; i < x.size(); ++i) x.at(i) = k->vertex_point(k->cell(0, i).base)[0];
  const auto w = dec::exterior_derivative(x);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(w.at(i) == (k->cell(1, i).mask == 1u ? 1.0 : 0.0));
}

TEST_CASE("d o d vanishes") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> small(-1000, 1000);
  for (bool per : {false, true}) {
    // Integer data on dyadic spacing: every difference is exact.
    auto k = test::grid({4, 3, 5}, 0.25, {per, false, per});
    for (int p = 0; p <= 1; ++p) {
      Cochain c(k, p, 3);
      for (auto& v : c.values()) v = small(rng);
      CHECK(dec::exterior_derivative(dec::exterior_derivative(c)).max_abs() == 0.0);
    }
    // Random reals: zero up to rounding of the difference quotients.
    auto k2 = test::grid({4, 3, 5}, 0.3, {per, false, per});
    for (int p = 0; p <= 1; ++p) {
      auto c = test::random_cochain(k2, p, rng, 3);
      const double scale = dec::exterior_derivative(c).max_abs() / 0.3;
      CHECK(dec::exterior_derivative(dec::exterior_derivative(c)).max_abs() <= 1e-13 * scale);
    }
  }
  auto k4 = test::grid({2, 3, 2, 2}, 0.5);
  Cochain c(k4, 2);
  for (auto& v : c.values()) v = small(rng);
  CHECK(dec::exterior_derivative(dec::exterior_derivative(c)).max_abs() == 0.0);
}

TEST_CASE("d of a top cochain is a degree error") {
  auto k = test::grid({2, 2}, 1.0);
  CHECK_THROWS_AS(dec::exterior_derivative(Cochain(k, 2)), DegreeError);
  CHECK_THROWS_AS(dec::codifferential(Cochain(k, 0)), DegreeError);
}

TEST_CASE("star of the unit function is the volume form") {
  auto k = test::grid({3, 3}, 0.5);
  Cochain one(k, 0);
  for (auto& v : one.values()) v = 1.0;
  const auto s = dec::hodge_star(one);
  CHECK(s.degree() == 2);
  for (double v : s.values()) CHECK(v == 1.0);
}

TEST_CASE("star is an involution with sign (-1)^{p(n-p)} on periodic flat grids") {
  std::mt19937_64 rng(4);
  for (int n : {2, 3, 4}) {
    std::vector<int> dims(n, 3);
    auto k = test::grid(dims, 0.25, std::vector<bool>(n, true));
    for (int p = 0; p <= n; ++p) {
      auto c = test::random_cochain(k, p, rng, 2);
      const auto ss = dec::hodge_star(dec::hodge_star(c));
      const double sign = ((p * (n - p)) % 2 == 0) ? 1.0 : -1.0;
      CHECK((ss - sign * c).max_abs() == 0.0);
    }
  }
}

TEST_CASE("2D star on 1-forms ignores a conformal factor") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> factor(6 * 6);
  for (auto& f : factor) f = u(rng);
  auto flat = test::grid({5, 5}, 0.2);
  auto conf = test::grid({5, 5}, 0.2, {}, MetricSpec::conformal(factor));
  auto a = test::random_cochain(flat, 1, rng);
  const auto s_flat = dec::hodge_star(a);
  const auto s_conf = dec::hodge_star(Cochain(conf, 1, 1, a.values()));
  for (std::size_t i = 0; i < s_flat.size(); ++i) CHECK(s_conf.at(i) == doctest::Approx(s_flat.at(i)).epsilon(1e-13));
}

TEST_CASE("codifferential of dphi for a quadratic is -2 inside") {
  const int m = 16;
  auto k = test::grid({m, m}, 1.0 / m);
  Cochain phi(k, 0);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const auto x = k->vertex_point(k->cell(0, i).base);
    phi.at(i) = 0.5 * (x[0] * x[0] + x[1] * x[1]);
  }
  const auto lap = dec::codifferential(dec::exterior_derivative(phi));
  double worst = 0.0;
  for (std::size_t i = 0; i < lap.size(); ++i)
    if (!k->on_boundary(k->cell(0, i).base)) worst = std::max(worst, std::abs(lap.at(i) + 2.0));
  CHECK(worst < 1e-10);
  CHECK(dec::codifferential(Cochain(k, 1)).max_abs() == 0.0);
}

TEST_CASE("codifferential is the adjoint of d for interior-supported cochains") {
  std::mt19937_64 rng(6);
  for (auto dims : {std::vector<int>{12, 10}, std::vector<int>{6, 5, 7}}) {
    auto k = test::grid(dims, 0.125);
    for (int p = 0; p + 1 <= k->dim(); ++p) {
      auto a = test::random_cochain(k, p, rng);
      auto b = test::random_cochain(k, p + 1, rng);
      test::clear_boundary_band(a, 1);
      test::clear_boundary_band(b, 1);
      const double lhs = dec::inner_product(dec::exterior_derivative(a), b);
      const double rhs = dec::inner_product(a, dec::codifferential(b));
      CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
    }
  }
}

TEST_CASE("adjointness holds on periodic conformal grids") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  std::vector<double> factor(8 * 8);
  for (auto& f : factor) f = u(rng);
  auto k = test::grid({8, 8}, 0.125, {true, true}, MetricSpec::conformal(factor));
  auto a = test::random_cochain(k, 0, rng);
  auto b = test::random_cochain(k, 1, rng);
  const double lhs = dec::inner_product(dec::exterior_derivative(a), b);
  const double rhs = dec::inner_product(a, dec::codifferential(b));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("pointwise Q") {
  auto k = test::grid({4, 4}, 0.25);
  CHECK(dec::pointwise_Q(Cochain(k, 1)).max_abs() == 0.0);

  Cochain ex(k, 1);
  for (std::size_t i = 0; i < ex.size(); ++i) ex.at(i) = k->cell(1, i).mask == 1u ? 1.0 : 0.0;
  for (auto mode : {dec::QAggregation::AverageComponents, dec::QAggregation::MeanOfSquares}) {
    const auto q = dec::pointwise_Q(ex, mode);
    for (double v : q.values()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  }

  std::mt19937_64 rng(8);
  auto c = test::random_cochain(k, 1, rng, 3);
  const auto q1 = dec::pointwise_Q(c);
  const auto q2 = dec::pointwise_Q(2.0 * c);
  for (std::size_t i = 0; i < q1.size(); ++i) CHECK(q2.at(i) == 4.0 * q1.at(i));
}

TEST_CASE("Campanato seminorm") {
  const int m = 32;
  auto k = test::grid({m, m}, 1.0 / m);
  const Point centre{0.5, 0.5};

  Cochain cst(k, 0);
  for (auto& v : cst.values()) v = 2.5;
  CHECK(dec::campanato_seminorm(cst, centre, 0.3) == 0.0);

  // A mean-zero perturbation of a constant on the ball: the seminorm is
  // exactly the perturbation energy.
  const auto ball = dec::discrete_ball(*k, 0, centre, 0.2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> noise(ball.size());
  double mean = 0.0;
  for (auto& v : noise) mean += (v = u(rng));
  mean /= static_cast<double>(noise.size());
  double energy = 0.0;
  Cochain f = cst;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    noise[i] -= mean;
    f.at(ball[i]) += noise[i];
    energy += k->cell_volume() * noise[i] * noise[i];
  }
  CHECK(dec::campanato_seminorm(f, centre, 0.2) == doctest::Approx(energy).epsilon(1e-12));

  CHECK_THROWS_AS(dec::discrete_ball(*k, 0, centre, 0.6), BallError);
  CHECK(dec::max_ball_radius(*k, centre) == doctest::Approx(0.5));
}

TEST_CASE("Campanato seminorm of a linear field scales like r^{n+2}") {
  const int m = 64;
  const double h = 1.0 / m;
  auto k = test::grid({m, m}, h);
  Cochain f(k, 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = k->vertex_point(k->cell(0, i).base);
    f.at(i) = 0.7 * x[0] - 1.3 * x[1];
  }
  std::vector<double> lx, ly;
  for (double r = 4 * h; r <= 16 * h + 1e-12; r += 2 * h) {
    lx.push_back(std::log(r));
    ly.push_back(std::log(dec::campanato_seminorm(f, {0.5, 0.5}, r)));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= lx.size();
  my /= ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  CHECK(std::abs(sxy / sxx - 4.0) < 0.1);
}
