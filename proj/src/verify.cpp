#include "nlh/verify.hpp"

#include "nlh/dec.hpp"
#include "nlh/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nlh::verify {

namespace {

int binomial(int n, int p) {
  int r = 1;
  for (int i = 1; i <= p; ++i) r = r * (n - p + i) / i;
  return r;
}

Eigen::VectorXd to_vec(const Point& p, int n) {
  Eigen::VectorXd v(n);
  for (int a = 0; a < n; ++a) v[a] = p[a];
  return v;
}

}  // namespace

// ---- mean-value decomposition ----

MetricPoint flat_point(const Eigen::VectorXd& x, int p) {
  const int n = static_cast<int>(x.size());
  const int m = binomial(n, p);
  return {x, Eigen::MatrixXd::Identity(m, m), 1.0};
}

MetricPoint complex_point(const Complex& k, std::size_t vertex, int p) {
  const auto& orients = k.orientations(p);
  const int m = static_cast<int>(orients.size());
  MetricPoint mp{to_vec(k.vertex_point(k.cell(0, vertex).base), k.dim()), Eigen::MatrixXd(m, m),
                 k.sqrt_det(vertex)};
  const MetricMatrix& ginv = k.inverse_metric(vertex);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) mp.ginv(i, j) = minor_det(ginv, orients[i], orients[j]);
  return mp;
}

Eigen::VectorXd flux(const DensityModel& model, const MetricPoint& at, const Eigen::VectorXd& w) {
  const Eigen::VectorXd gw = at.ginv * w;
  return at.sqrt_g * model.rho(std::max(0.0, w.dot(gw))) * gw;
}

Eigen::MatrixXd flux_jacobian(const DensityModel& model, const MetricPoint& at, const Eigen::VectorXd& w) {
  const Eigen::VectorXd gw = at.ginv * w;
  const double q = std::max(0.0, w.dot(gw));
  return at.sqrt_g * (model.rho(q) * at.ginv + 2.0 * model.drho(q) * gw * gw.transpose());
}

MeanValueSample sibner_decomposition(const DensityModel& model, const MetricPoint& xi, const MetricPoint& eta,
                                     const Eigen::VectorXd& mu, const Eigen::VectorXd& tau) {
  const long m = mu.size();
  if (tau.size() != m || xi.ginv.rows() != m || eta.ginv.rows() != m || xi.x.size() != eta.x.size())
    throw InvalidArgument("sibner_decomposition: inconsistent sizes");
  MeanValueSample s;
  const Eigen::VectorXd d = mu - tau;

  // Q along the segment is a convex quadratic in t.
  const double q0 = tau.dot(xi.ginv * tau), q1 = mu.dot(xi.ginv * mu);
  const double dd = d.dot(xi.ginv * d);
  double tmin = dd > 0.0 ? std::clamp(-tau.dot(xi.ginv * d) / dd, 0.0, 1.0) : 0.0;
  const Eigen::VectorXd wmin = tau + tmin * d;
  s.segment_q_min = wmin.dot(xi.ginv * wmin);
  s.segment_q_max = std::max(q0, q1);
  model.check_domain(s.segment_q_max);

  using Quad = boost::math::quadrature::gauss<double, 32>;
  s.alpha = Eigen::MatrixXd::Zero(m, m);
  const auto& nodes = Quad::abscissa();
  const auto& weights = Quad::weights();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (double sign : {-1.0, 1.0}) {
      if (nodes[i] == 0.0 && sign < 0.0) continue;
      const double t = 0.5 * (1.0 + sign * nodes[i]);
      s.alpha += 0.5 * weights[i] * flux_jacobian(model, xi, tau + t * d);
    }
  }

  const Eigen::VectorXd dx = xi.x - eta.x;
  const Eigen::VectorXd dg = flux(model, xi, tau) - flux(model, eta, tau);
  const double dx2 = dx.squaredNorm();
  s.beta = dx2 > 0.0 ? Eigen::MatrixXd(dg * dx.transpose() / dx2) : Eigen::MatrixXd::Zero(m, dx.size());

  const Eigen::VectorXd lhs = flux(model, xi, mu) - flux(model, eta, tau);
  const Eigen::VectorXd rhs = s.alpha * d + s.beta * dx;
  const double scale = std::max({lhs.norm(), (s.alpha * d).norm(), (s.beta * dx).norm(), 1e-300});
  s.identity_residual = (lhs - rhs).norm() / scale;
  const double denom = mu.norm() + tau.norm();
  s.beta_constant = denom > 0.0 ? s.beta.norm() / denom : 0.0;

  const Eigen::MatrixXd sym = 0.5 * (s.alpha + s.alpha.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  s.min_eigenvalue = es.eigenvalues().minCoeff();
  s.max_eigenvalue = es.eigenvalues().maxCoeff();
  s.positive_definite = s.min_eigenvalue > 0.0;
  return s;
}

// ---- divergence-form inequality ----

Eigen::MatrixXd inequality_coefficients(const DensityModel& model, int n, int degree, int components,
                                   const double* field, double q) {
  Eigen::MatrixXd mm = Eigen::MatrixXd::Zero(n, n);
  if (degree == 1) {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int r = 0; r < components; ++r) mm(k, j) += field[k * components + r] * field[j * components + r];
  } else if (degree == 2) {
    // F_km with sign from orientation order (k < m stored).
    std::vector<double> full(static_cast<std::size_t>(n * n * components), 0.0);
    int o = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b, ++o)
        for (int r = 0; r < components; ++r) {
          full[(a * n + b) * components + r] = field[o * components + r];
          full[(b * n + a) * components + r] = -field[o * components + r];
        }
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int m = 0; m < n; ++m)
          for (int r = 0; r < components; ++r)
            mm(k, j) += full[(k * n + m) * components + r] * full[(j * n + m) * components + r];
  } else {
    throw DegreeError("inequality coefficients need a 1- or 2-form");
  }
  // <dx^k ^ F, dx^j ^ F> = Q delta_kj - <i_k F, i_j F>.
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd wedge_gram = q * id - mm;
  const double rho = model.rho(q), drho = model.drho(q);
  return (0.5 * rho + q * drho) * id - drho * wedge_gram;
}

namespace {

// Lexicographic order of 2-axis masks matches (a<b) loops above only when the
// complex enumerates orientations that way; check once.
void check_orientation_order(const Complex& k, int degree) {
  const auto& o = k.orientations(degree);
  std::size_t i = 0;
  if (degree == 1) {
    for (int a = 0; a < k.dim(); ++a, ++i)
      if (o[i] != (1u << a)) throw Error("unexpected orientation order");
  } else {
    for (int a = 0; a < k.dim(); ++a)
      for (int b = a + 1; b < k.dim(); ++b, ++i)
        if (o[i] != ((1u << a) | (1u << b))) throw Error("unexpected orientation order");
  }
}

std::optional<std::size_t> neighbour(const Complex& k, std::size_t t, int axis, int by) {
  const int n = k.dim();
  MultiIndex b = k.cell(n, t).base;
  b[axis] += by;
  return k.find(n, (1u << n) - 1u, b);
}

}  // namespace

EllipticInput elliptic_input_from_flow(const flow::FlowSolution& sol) {
  EllipticInput in;
  in.complex = sol.omega.complex_ptr();
  in.degree = 1;
  in.components = 1;
  in.field = dec::cell_averaged_components(sol.omega);
  in.q = sol.q.values();
  in.connection_weight.assign(in.q.size(), 0.0);
  return in;
}

template <class G>
EllipticInput elliptic_input_from_connection(const gauge::LatticeConnection<G>& conn) {
  const Complex& k = conn.complex();
  const int n = k.dim();
  EllipticInput in;
  in.complex = conn.complex_ptr();
  in.degree = 2;
  in.components = 3;
  in.field = dec::cell_averaged_components(gauge::curvature(conn));
  in.q = gauge::gauge_Q(conn).values();
  const auto a = dec::cell_averaged_components(gauge::algebra_from_connection(conn));
  const std::size_t block = static_cast<std::size_t>(n) * 3;
  in.connection_weight.assign(in.q.size(), 0.0);
  for (std::size_t t = 0; t < in.q.size(); ++t) {
    double a2 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < block; ++i) a2 += a[t * block + i] * a[t * block + i];
    for (int b = 0; b < n; ++b) {
      const auto up = neighbour(k, t, b, 1), dn = neighbour(k, t, b, -1);
      const std::size_t hi = up ? *up : t, lo = dn ? *dn : t;
      if (hi == lo) continue;
      const double span = k.spacing(b) * ((up ? 1 : 0) + (dn ? 1 : 0));
      for (std::size_t i = 0; i < block; ++i) {
        const double d = (a[hi * block + i] - a[lo * block + i]) / span;
        g2 += d * d;
      }
    }
    in.connection_weight[t] = std::sqrt(g2) + a2;
  }
  return in;
}

EllipticReport elliptic_inequality_check(const EllipticInput& in, const DensityModel& model, double kk,
                                         double q_exponent, double c0) {
  if (!in.complex) throw InvalidArgument("elliptic check needs a complex");
  const Complex& k = *in.complex;
  const int n = k.dim();
  const std::size_t ntop = k.num_cells(n);
  const std::size_t block = static_cast<std::size_t>(binomial(n, in.degree)) * in.components;
  if (in.q.size() != ntop || in.field.size() != ntop * block || in.connection_weight.size() != ntop)
    throw InvalidArgument("elliptic check: field sizes do not match the complex");
  check_orientation_order(k, in.degree);

  EllipticReport rep;
  rep.k = kk;
  rep.q_exponent = q_exponent;
  double hmax = 0.0;
  for (int a = 0; a < n; ++a) hmax = std::max(hmax, k.spacing(a));
  rep.tol_h = c0 * hmax;

  std::vector<Eigen::MatrixXd> coef(ntop);
  std::vector<bool> ok(ntop, true);
  for (std::size_t t = 0; t < ntop; ++t) {
    if (!model.in_domain(in.q[t])) {
      ok[t] = false;
      continue;
    }
    coef[t] = inequality_coefficients(model, n, in.degree, in.components, in.field.data() + t * block, in.q[t]);
  }

  auto centred = [&](std::size_t t, int j) {
    return (in.q[*neighbour(k, t, j, 1)] - in.q[*neighbour(k, t, j, -1)]) / (2.0 * k.spacing(j));
  };
  auto flux_up = [&](std::size_t t, int kax) {
    const std::size_t u = *neighbour(k, t, kax, 1);
    double f = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = 0.5 * (coef[t](kax, j) + coef[u](kax, j));
      const double dq = j == kax ? (in.q[u] - in.q[t]) / k.spacing(kax) : 0.5 * (centred(t, j) + centred(u, j));
      f += a * dq;
    }
    return f;
  };

  rep.min_lq = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < ntop; ++t) {
    const auto base = k.cell(n, t).base;
    bool interior = true;
    for (int a = 0; a < n; ++a)
      if (!k.periodic(a) && (base[a] < 2 || base[a] > k.cells_along(a) - 3)) interior = false;
    if (!interior) continue;
    ++rep.cells_checked;
    // The flux stencil reaches the face neighbours and their neighbours.
    bool stencil_ok = ok[t];
    for (int a = 0; a < n && stencil_ok; ++a)
      for (int s : {-1, 1})
        for (int b = 0; b < n; ++b)
          for (int s2 : {-1, 0, 1}) {
            auto nb = neighbour(k, t, a, s);
            if (!nb || !ok[*nb]) stencil_ok = false;
            else if (s2 != 0) {
              auto nb2 = neighbour(k, *nb, b, s2);
              if (!nb2 || !ok[*nb2]) stencil_ok = false;
            }
          }
    if (!ok[t]) {
      rep.indefinite_cells.push_back(t);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (coef[t] + coef[t].transpose()), Eigen::EigenvaluesOnly);
    const double ev = es.eigenvalues().minCoeff();
    rep.min_eigenvalue = std::min(rep.min_eigenvalue, ev);
    if (!(ev > 0.0)) rep.indefinite_cells.push_back(t);
    if (!stencil_ok) continue;

    double lq = 0.0;
    for (int a = 0; a < n; ++a)
      lq += (flux_up(t, a) - flux_up(*neighbour(k, t, a, -1), a)) / k.spacing(a);
    rep.min_lq = std::min(rep.min_lq, lq);
    if (lq >= -rep.tol_h) continue;
    const double weight = std::pow(in.q[t] + kk, q_exponent) * in.connection_weight[t] * in.q[t];
    if (weight > 0.0)
      rep.c_min = std::max(rep.c_min, (-rep.tol_h - lq) / weight);
    else
      rep.c_feasible = false;
  }
  if (rep.cells_checked == 0) throw InvalidArgument("elliptic check: grid too small for interior cells");
  if (!std::isfinite(rep.min_lq)) rep.min_lq = 0.0;
  rep.passed = rep.indefinite_cells.empty() && rep.min_eigenvalue > 0.0 && rep.c_feasible &&
               rep.c_min <= kMaxInequalityConstant;
  return rep;
}

// ---- Campanato ----

namespace {

DecayFit fit_series(int n, std::vector<std::pair<double, double>> series, int exclude) {
  DecayFit fit;
  std::sort(series.begin(), series.end());
  fit.series = series;
  if (exclude < 0) throw InvalidArgument("exclude must be nonnegative");
  std::vector<std::pair<double, double>> use(series.begin() + std::min<std::size_t>(exclude, series.size()),
                                             series.end());
  if (use.size() < 4) throw InvalidArgument("Campanato fit needs at least 4 usable radii");
  if (std::all_of(use.begin(), use.end(), [](const auto& p) { return p.second == 0.0; })) {
    fit.exact_constant = true;
    fit.slope = fit.exponent = std::numeric_limits<double>::infinity();
    return fit;
  }
  std::erase_if(use, [](const auto& p) { return !(p.second > 0.0); });
  if (use.size() < 4) throw InvalidArgument("Campanato fit: fewer than 4 radii with nonzero seminorm");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(use.size());
  for (const auto& [r, s] : use) {
    const double x = std::log(r), y = std::log(s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icpt = (sy - fit.slope * sx) / m;
  fit.constant = std::exp(icpt);
  double rss = 0.0;
  for (const auto& [r, s] : use) {
    const double e = std::log(s) - (icpt + fit.slope * std::log(r));
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / m);
  fit.exponent = (fit.slope - n) / 2.0;
  return fit;
}

}  // namespace

DecayFit campanato_decay_fit(const Cochain& field, const Point& center, std::vector<double> radii, int exclude) {
  std::sort(radii.begin(), radii.end());
  std::vector<std::pair<double, double>> series;
  for (double r : radii) series.emplace_back(r, dec::campanato_seminorm(field, center, r));
  return fit_series(field.complex().dim(), std::move(series), exclude);
}

template <class G>
GaugeCampanatoReport gauge_invariance_campanato(const Cochain& f, const gauge::GaugeTransform<G>& g,
                                                const Point& center, const std::vector<double>& radii_in,
                                                int exclude) {
  const Complex& k = f.complex();
  const int n = k.dim();
  if (f.components() != 3) throw InvalidArgument("gauge Campanato check needs an algebra-valued field");
  if (g.size() != k.num_vertices()) throw InvalidArgument("gauge transform size mismatch");
  const int p = f.degree();

  Cochain ft(f.complex_ptr(), p, 3);
  std::vector<lie::Rot3> ad(k.num_vertices());
  for (std::size_t v = 0; v < ad.size(); ++v) ad[v] = G::ad_matrix(g[v]);
  std::vector<std::size_t> base_vertex(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    base_vertex[i] = k.index(0, 0u, k.cell(p, i).base);
    const lie::Vec3 x = ad[base_vertex[i]] * lie::Vec3(f.at(i, 0), f.at(i, 1), f.at(i, 2));
    for (int r = 0; r < 3; ++r) ft.at(i, r) = x[r];
  }

  MultiIndex sigma{};
  for (int a = 0; a < n; ++a)
    sigma[a] = std::clamp(static_cast<int>(std::lround((center[a] - k.origin(a)) / k.spacing(a))), 0,
                          k.cells_along(a));
  const lie::Rot3 ad_sigma_inv = ad[k.index(0, 0u, sigma)].transpose();

  GaugeCampanatoReport rep;
  rep.radii = radii_in;
  std::sort(rep.radii.begin(), rep.radii.end());
  std::vector<std::pair<double, double>> s0, s1;
  for (double r : rep.radii) {
    const auto cells = dec::discrete_ball(k, p, center, r);
    double mod = 0.0, l2 = 0.0;
    for (std::size_t i : cells) {
      const lie::Rot3 rel = ad[base_vertex[i]] * ad_sigma_inv - lie::Rot3::Identity();
      mod = std::max(mod, Eigen::JacobiSVD<lie::Rot3>(rel).singularValues()[0]);
      for (int q = 0; q < 3; ++q) l2 += f.at(i, q) * f.at(i, q);
    }
    l2 *= k.cell_volume();
    const double a = dec::campanato_seminorm(f, center, r);
    const double b = dec::campanato_seminorm(ft, center, r);
    const double bound = (1.0 + mod) * (1.0 + mod) * a + (mod * mod + mod / (2.0 + mod)) * l2;
    const double excess = b - bound;
    rep.worst_excess = rep.original.empty() ? excess : std::max(rep.worst_excess, excess);
    if (excess > 1e-12 * std::max(b + bound, 1e-300)) rep.bound_holds = false;
    rep.original.push_back(a);
    rep.transformed.push_back(b);
    rep.modulus.push_back(mod);
    rep.field_l2.push_back(l2);
    s0.emplace_back(r, a);
    s1.emplace_back(r, b);
  }
  rep.within_hypothesis = !rep.modulus.empty() && rep.modulus.front() < 0.25;
  rep.fit_original = fit_series(n, s0, exclude);
  rep.fit_transformed = fit_series(n, s1, exclude);
  if (rep.fit_original.exact_constant && rep.fit_transformed.exact_constant)
    rep.exponent_shift = 0.0;
  else
    rep.exponent_shift = std::abs(rep.fit_original.exponent - rep.fit_transformed.exponent);
  return rep;
}

// ---- difference quotients ----

namespace {

int lattice_shift(const Complex& k, int axis, double step) {
  if (axis < 0 || axis >= k.dim()) throw InvalidArgument("difference quotient axis out of range");
  const double s = step / k.spacing(axis);
  const double r = std::round(s);
  if (r == 0.0 || std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s)))
    throw InvalidArgument("difference-quotient step must be a nonzero multiple of h");
  return static_cast<int>(r);
}

std::optional<std::size_t> shifted(const Complex& k, int p, std::size_t i, int axis, int s) {
  auto c = k.cell(p, i);
  c.base[axis] += s;
  return k.find(p, c.mask, c.base);
}

}  // namespace

Cochain difference_quotient(const Cochain& c, int axis, double step) {
  const Complex& k = c.complex();
  const int s = lattice_shift(k, axis, step);
  Cochain out(c.complex_ptr(), c.degree(), c.components());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto j = shifted(k, c.degree(), i, axis, s);
    if (!j) continue;
    for (int q = 0; q < c.components(); ++q) out.at(i, q) = (c.at(*j, q) - c.at(i, q)) / step;
  }
  return out;
}

CommutationResult commutation_check(const Cochain& c, int axis, double step) {
  const Complex& k = c.complex();
  const int s = lattice_shift(k, axis, step);
  const int p = c.degree();
  const int n = k.dim();
  const int nc = c.components();
  CommutationResult res;

  if (p < n) {
    const Cochain a = difference_quotient(dec::exterior_derivative(c), axis, step);
    const Cochain b = dec::exterior_derivative(difference_quotient(c, axis, step));
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!shifted(k, p + 1, i, axis, s)) continue;
      ++res.cells_d;
      for (int q = 0; q < nc; ++q) res.max_diff_d = std::max(res.max_diff_d, std::abs(a.at(i, q) - b.at(i, q)));
    }
  }
  if (p > 0 && k.flat()) {
    const Cochain a = difference_quotient(dec::codifferential(c), axis, step);
    const Cochain b = dec::codifferential(difference_quotient(c, axis, step));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto j = shifted(k, p - 1, i, axis, s);
      if (!j) continue;
      // The coface stencils of the cell and of its shift must correspond.
      const auto ci = k.cell(p - 1, i), cj = k.cell(p - 1, *j);
      bool same = true;
      for (int b2 = 0; b2 < n && same; ++b2) {
        if ((ci.mask >> b2) & 1u) continue;
        for (int off : {0, -1}) {
          MultiIndex bi = ci.base, bj = cj.base;
          bi[b2] += off;
          bj[b2] += off;
          const auto ti = k.find(p, ci.mask | (1u << b2), bi);
          const auto tj = k.find(p, ci.mask | (1u << b2), bj);
          if (ti.has_value() != tj.has_value()) same = false;
          else if (ti && !shifted(k, p, *ti, axis, s)) same = false;
        }
      }
      if (!same) continue;
      ++res.cells_delta;
      for (int q = 0; q < nc; ++q)
        res.max_diff_delta = std::max(res.max_diff_delta, std::abs(a.at(i, q) - b.at(i, q)));
    }
  }
  return res;
}

// ---- Gaffney ----

GaffneyResult gaffney_ratio(const Cochain& a) {
  const Complex& k = a.complex();
  if (a.degree() != 1) throw DegreeError("gaffney_ratio expects a 1-cochain");
  if (!k.flat()) throw InvalidArgument("gaffney_ratio needs a flat complex");
  const int nc = a.components();
  const double vol = k.cell_volume();
  GaffneyResult r;
  for (std::size_t e = 0; e < a.size(); ++e) {
    const auto c = k.cell(1, e);
    for (int b = 0; b < k.dim(); ++b) {
      MultiIndex up = c.base, dn = c.base;
      ++up[b];
      --dn[b];
      const auto eu = k.find(1, c.mask, up);
      const auto ed = k.find(1, c.mask, dn);
      const double h2 = k.spacing(b) * k.spacing(b);
      for (int q = 0; q < nc; ++q) {
        // Forward differences with zero extension past the box.
        const double next = eu ? a.at(*eu, q) : 0.0;
        r.grad_sq += vol * (next - a.at(e, q)) * (next - a.at(e, q)) / h2;
        if (!ed) r.grad_sq += vol * a.at(e, q) * a.at(e, q) / h2;
      }
    }
  }
  r.d_sq = k.dim() > 1 ? dec::norm_squared(dec::exterior_derivative(a)) : 0.0;
  r.delta_sq = dec::norm_squared(dec::codifferential(a));
  r.l2_sq = dec::norm_squared(a);
  const double den = r.d_sq + r.delta_sq + r.l2_sq;
  r.full_ratio = den > 0.0 ? r.grad_sq / den : 0.0;
  if (r.l2_sq == 0.0) {
    r.coulomb_ratio = 0.0;
  } else if (r.d_sq <= 1e-24 * r.l2_sq) {
    r.coulomb_ratio = std::numeric_limits<double>::infinity();
    r.hypothesis_failed = true;
  } else {
    r.coulomb_ratio = r.grad_sq / r.d_sq;
  }
  return r;
}

template EllipticInput elliptic_input_from_connection<lie::SU2>(const gauge::LatticeConnection<lie::SU2>&);
template EllipticInput elliptic_input_from_connection<lie::SO3>(const gauge::LatticeConnection<lie::SO3>&);
template GaugeCampanatoReport gauge_invariance_campanato<lie::SU2>(const Cochain&, const gauge::GaugeTransform<lie::SU2>&,
                                                                   const Point&, const std::vector<double>&, int);
template GaugeCampanatoReport gauge_invariance_campanato<lie::SO3>(const Cochain&, const gauge::GaugeTransform<lie::SO3>&,
                                                                   const Point&, const std::vector<double>&, int);

}  // namespace nlh::verify
