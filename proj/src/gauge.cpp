#include "nlh/gauge.hpp"

#include "nlh/dec.hpp"
#include "nlh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace nlh::gauge {

using lie::Vec3;

namespace {

MultiIndex shift(MultiIndex v, int axis, int by = 1) {
  v[axis] += by;
  return v;
}

void axes_pair(unsigned mask, int& a, int& b) {
  const auto ax = axes_of(mask);
  a = ax[0];
  b = ax[1];
}

Vec3 vec_at(const Cochain& c, std::size_t i) { return {c.at(i, 0), c.at(i, 1), c.at(i, 2)}; }

void add_at(Cochain& c, std::size_t i, const Vec3& x) {
  for (int r = 0; r < 3; ++r) c.at(i, r) += x[r];
}

std::size_t plaquette_index(const Complex& k, int a, int b, const MultiIndex& v) {
  if (a > b) std::swap(a, b);
  const auto i = k.find(2, (1u << a) | (1u << b), v);
  if (!i) throw InvalidArgument("plaquette outside the complex");
  return *i;
}

// Plaquettes of the top cell t, grouped by orientation.
template <class F>
void for_each_cell_plaquette(const Complex& k, std::size_t t, F&& fn) {
  const int n = k.dim();
  const auto top = k.cell(n, t);
  for (unsigned mask : k.orientations(2)) {
    std::vector<int> free_axes;
    for (int a = 0; a < n; ++a)
      if (!((mask >> a) & 1u)) free_axes.push_back(a);
    const unsigned count = 1u << free_axes.size();
    for (unsigned bits = 0; bits < count; ++bits) {
      MultiIndex b = top.base;
      for (std::size_t i = 0; i < free_axes.size(); ++i) b[free_axes[i]] += (bits >> i) & 1u;
      fn(k.index(2, mask, b), count);
    }
  }
}

template <class G>
typename G::Matrix holonomy(const LatticeConnection<G>& c, int a, int b, const MultiIndex& v) {
  return c.link(a, v) * c.link(b, shift(v, a)) * G::inverse(c.link(a, shift(v, b))) *
         G::inverse(c.link(b, v));
}

// kappa_p = sum over top cells containing p of rho(Q_c) / m.
Cochain plaquette_weights(const Complex& k, const Cochain& q, const DensityModel& model) {
  Cochain kappa(q.complex_ptr(), 2, 1);
  for (std::size_t t = 0; t < q.size(); ++t) {
    const double rho = model.rho(q.at(t));
    for_each_cell_plaquette(k, t, [&](std::size_t p, unsigned m) { kappa.at(p) += rho / m; });
  }
  return kappa;
}

template <class G>
Cochain weighted_curvature(const LatticeConnection<G>& conn, const DensityModel& model) {
  Cochain f = curvature(conn);
  const Cochain q = dec::pointwise_Q(f, dec::QAggregation::MeanOfSquares);
  const Cochain kappa = plaquette_weights(conn.complex(), q, model);
  for (std::size_t p = 0; p < f.size(); ++p)
    for (int r = 0; r < 3; ++r) f.at(p, r) *= kappa.at(p);
  return f;
}

template <class G>
double max_q_or_inf(const LatticeConnection<G>& conn) {
  try {
    return gauge_Q(conn).max_abs();
  } catch (const LogBranchError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

// ---- connection ----

template <class G>
LatticeConnection<G>::LatticeConnection(ComplexPtr complex) : complex_(std::move(complex)) {
  if (!complex_) throw InvalidArgument("connection needs a complex");
  if (!complex_->flat()) throw InvalidArgument("lattice connections require the identity metric");
  if (complex_->dim() < 2) throw InvalidArgument("lattice connections need dimension >= 2");
  links_.assign(complex_->num_cells(1), G::identity());
}

template <class G>
std::size_t LatticeConnection<G>::edge_index(int axis, const MultiIndex& v) const {
  const auto i = complex_->find(1, 1u << axis, v);
  if (!i) throw InvalidArgument("edge outside the complex");
  return *i;
}

template <class G>
const typename G::Matrix& LatticeConnection<G>::link(int axis, const MultiIndex& v) const {
  return links_[edge_index(axis, v)];
}

template <class G>
double LatticeConnection<G>::unitarity_defect() const {
  double d = 0.0;
  for (const auto& u : links_) d = std::max(d, G::unitarity_defect(u));
  return d;
}

std::vector<bool> tangential_boundary_links(const Complex& k) {
  std::vector<bool> fixed(k.num_cells(1), false);
  for (std::size_t e = 0; e < fixed.size(); ++e) {
    const auto c = k.cell(1, e);
    const int a = axes_of(c.mask)[0];
    for (int b = 0; b < k.dim(); ++b) {
      if (b == a || k.periodic(b)) continue;
      if (c.base[b] == 0 || c.base[b] == k.cells_along(b)) fixed[e] = true;
    }
  }
  return fixed;
}

template <class G>
LatticeConnection<G> connection_from_algebra(const Cochain& a) {
  if (a.degree() != 1 || a.components() != 3)
    throw InvalidArgument("connection_from_algebra expects a 1-cochain with 3 components");
  LatticeConnection<G> conn(a.complex_ptr());
  const Complex& k = a.complex();
  for (std::size_t e = 0; e < a.size(); ++e) {
    const int ax = axes_of(k.cell(1, e).mask)[0];
    conn.link(e) = G::exp(k.spacing(ax) * vec_at(a, e));
  }
  return conn;
}

template <class G>
Cochain algebra_from_connection(const LatticeConnection<G>& conn) {
  const Complex& k = conn.complex();
  Cochain a(conn.complex_ptr(), 1, 3);
  for (std::size_t e = 0; e < a.size(); ++e) {
    const int ax = axes_of(k.cell(1, e).mask)[0];
    const Vec3 x = G::log(conn.link(e)) / k.spacing(ax);
    for (int r = 0; r < 3; ++r) a.at(e, r) = x[r];
  }
  return a;
}

template <class G>
Cochain curvature(const LatticeConnection<G>& conn) {
  const Complex& k = conn.complex();
  Cochain f(conn.complex_ptr(), 2, 3);
  for (std::size_t p = 0; p < f.size(); ++p) {
    const auto c = k.cell(2, p);
    int a, b;
    axes_pair(c.mask, a, b);
    Vec3 x;
    try {
      x = G::log(holonomy(conn, a, b, c.base));
    } catch (const LogBranchError& err) {
      std::ostringstream ss;
      ss << "plaquette " << p << " (axes " << a << "," << b << "): " << err.what();
      throw LogBranchError(ss.str(), p);
    }
    x /= k.spacing(a) * k.spacing(b);
    for (int r = 0; r < 3; ++r) f.at(p, r) = x[r];
  }
  return f;
}

template <class G>
Cochain gauge_Q(const LatticeConnection<G>& conn) {
  return dec::pointwise_Q(curvature(conn), dec::QAggregation::MeanOfSquares);
}

template <class G>
double gauge_energy(const LatticeConnection<G>& conn, const DensityModel& model) {
  const Cochain q = gauge_Q(conn);
  double e = 0.0;
  for (std::size_t t = 0; t < q.size(); ++t) e += model.stored_energy_integrand(q.at(t));
  return 0.5 * conn.complex().cell_volume() * e;
}

namespace {

// Shared assembly of the link gradient; `plain` (optional) receives the
// contributions with every transport dropped.
template <class G>
void assemble_gradient(const LatticeConnection<G>& conn, const DensityModel& model, Cochain& grad,
                       Cochain* plain) {
  const Complex& k = conn.complex();
  const Cochain gp = weighted_curvature(conn, model);
  const double vol = k.cell_volume();
  for (std::size_t p = 0; p < gp.size(); ++p) {
    const auto c = k.cell(2, p);
    int a, b;
    axes_pair(c.mask, a, b);
    const MultiIndex& v = c.base;
    const double coef = vol / (k.spacing(a) * k.spacing(b));
    const Vec3 g = coef * vec_at(gp, p);
    const std::size_t e1 = conn.edge_index(a, v), e2 = conn.edge_index(b, shift(v, a));
    const std::size_t e3 = conn.edge_index(a, shift(v, b)), e4 = conn.edge_index(b, v);
    add_at(grad, e1, g);
    add_at(grad, e2, G::ad(G::inverse(conn.link(e1)), g));
    add_at(grad, e3, -G::ad(G::inverse(conn.link(e4)), g));
    add_at(grad, e4, -g);
    if (plain) {
      add_at(*plain, e1, g);
      add_at(*plain, e2, g);
      add_at(*plain, e3, -g);
      add_at(*plain, e4, -g);
    }
  }
}

}  // namespace

template <class G>
Cochain energy_gradient(const LatticeConnection<G>& conn, const DensityModel& model) {
  Cochain grad(conn.complex_ptr(), 1, 3);
  assemble_gradient(conn, model, grad, nullptr);
  return grad;
}

template <class G>
LatticeConnection<G> apply_gauge(const LatticeConnection<G>& conn, const GaugeTransform<G>& g) {
  const Complex& k = conn.complex();
  if (g.size() != k.num_vertices()) throw InvalidArgument("gauge transform needs one element per vertex");
  LatticeConnection<G> out(conn.complex_ptr());
  for (std::size_t e = 0; e < conn.num_links(); ++e) {
    const auto c = k.cell(1, e);
    const int a = axes_of(c.mask)[0];
    const std::size_t x = k.index(0, 0u, c.base);
    const std::size_t y = *k.find(0, 0u, shift(c.base, a));
    out.link(e) = g[x] * conn.link(e) * G::inverse(g[y]);
  }
  return out;
}

template <class G>
ElResidual el_residual(const LatticeConnection<G>& conn, const DensityModel& model) {
  const Complex& k = conn.complex();
  ElResidual r{Cochain(conn.complex_ptr(), 1, 3), Cochain(conn.complex_ptr(), 1, 3),
               Cochain(conn.complex_ptr(), 1, 3)};
  assemble_gradient(conn, model, r.total, &r.plain);
  for (std::size_t e = 0; e < r.total.size(); ++e) {
    const int a = axes_of(k.cell(1, e).mask)[0];
    const double s = k.spacing(a) / k.cell_volume();
    for (int c = 0; c < 3; ++c) {
      r.total.at(e, c) *= s;
      r.plain.at(e, c) *= s;
      r.bracket.at(e, c) = r.total.at(e, c) - r.plain.at(e, c);
    }
  }
  return r;
}

template <class G>
BianchiResult bianchi_residual(const LatticeConnection<G>& conn) {
  const Complex& k = conn.complex();
  const int n = k.dim();
  if (n < 3) {
    const auto empty = std::make_shared<Complex>(GridSpec{{1, 1, 1}, {1.0}, {}, {}});
    return {Cochain(empty, 3, 1), Cochain(empty, 3, 1), 0.0, 0.0, Cochain(empty, 3, 3)};
  }
  const Cochain f = curvature(conn);
  BianchiResult res{Cochain(conn.complex_ptr(), 3, 1), Cochain(conn.complex_ptr(), 3, 1), 0.0, 0.0,
                    Cochain(conn.complex_ptr(), 3, 3)};
  using M = typename G::Matrix;
  for (std::size_t t = 0; t < k.num_cells(3); ++t) {
    const auto c = k.cell(3, t);
    const auto ax = axes_of(c.mask);
    const int a = ax[0], b = ax[1], cc = ax[2];
    const MultiIndex& v = c.base;

    const M ua = conn.link(a, v), ub = conn.link(b, v), uc = conn.link(cc, v);
    const M xy0 = holonomy(conn, a, b, v);
    const M xz0 = holonomy(conn, a, cc, v);
    const M yz0 = holonomy(conn, b, cc, v);
    const M xy1 = uc * holonomy(conn, a, b, shift(v, cc)) * G::inverse(uc);
    const M xz1 = ub * holonomy(conn, a, cc, shift(v, b)) * G::inverse(ub);
    const M yz1 = ua * holonomy(conn, b, cc, shift(v, a)) * G::inverse(ua);
    const M prod = xy0 * xz1 * yz0 * G::inverse(xy1) * G::inverse(xz0) * G::inverse(yz1);
    const double defect = (prod - G::identity()).cwiseAbs().maxCoeff();
    res.group_defect.at(t) = defect;
    res.max_group_defect = std::max(res.max_group_defect, defect);

    auto cov = [&](int dir, int p, int q) {
      const Vec3 here = vec_at(f, plaquette_index(k, p, q, v));
      const Vec3 there = vec_at(f, plaquette_index(k, p, q, shift(v, dir)));
      return Vec3((G::ad(conn.link(dir, v), there) - here) / k.spacing(dir));
    };
    const Vec3 r = cov(a, b, cc) - cov(b, a, cc) + cov(cc, a, b);
    for (int i = 0; i < 3; ++i) res.log_residual_vec.at(t, i) = r[i];
    res.log_residual.at(t) = r.norm();
    res.max_log_residual = std::max(res.max_log_residual, r.norm());
  }
  return res;
}

template <class G>
Cochain covariant_d(const LatticeConnection<G>& conn, const Cochain& zeta) {
  const Complex& k = conn.complex();
  if (zeta.degree() != 1 || zeta.components() != 3 || !k.same_shape(zeta.complex()))
    throw InvalidArgument("covariant_d expects an algebra-valued 1-cochain on the connection's complex");
  Cochain out(conn.complex_ptr(), 2, 3);
  for (std::size_t p = 0; p < out.size(); ++p) {
    const auto c = k.cell(2, p);
    int a, b;
    axes_pair(c.mask, a, b);
    const MultiIndex& v = c.base;
    const double ha = k.spacing(a), hb = k.spacing(b);
    const Vec3 d = ha * vec_at(zeta, conn.edge_index(a, v)) +
                   hb * G::ad(conn.link(a, v), vec_at(zeta, conn.edge_index(b, shift(v, a)))) -
                   ha * G::ad(conn.link(b, v), vec_at(zeta, conn.edge_index(a, shift(v, b)))) -
                   hb * vec_at(zeta, conn.edge_index(b, v));
    for (int r = 0; r < 3; ++r) out.at(p, r) = d[r] / (ha * hb);
  }
  return out;
}

template <class G>
WeakResidualResult weak_residual(const LatticeConnection<G>& conn, const DensityModel& model,
                                 int num_tests, std::uint64_t seed, LinkBoundary boundary) {
  if (num_tests < 1) throw InvalidArgument("weak_residual needs at least one test field");
  const Complex& k = conn.complex();
  const double vol = k.cell_volume();
  const Cochain gp = weighted_curvature(conn, model);
  const Cochain strong = el_residual(conn, model).total;
  std::vector<bool> fixed(k.num_cells(1), false);
  if (boundary == LinkBoundary::Fixed) fixed = tangential_boundary_links(k);

  lie::Rng rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  WeakResidualResult res;
  for (int t = 0; t < num_tests; ++t) {
    Cochain zeta(conn.complex_ptr(), 1, 3);
    for (std::size_t e = 0; e < zeta.size(); ++e)
      for (int r = 0; r < 3; ++r) zeta.at(e, r) = fixed[e] ? 0.0 : nd(rng);
    const Cochain dz = covariant_d(conn, zeta);
    double weak = 0.0, pair = 0.0, n0 = 0.0, n1 = 0.0;
    for (std::size_t p = 0; p < dz.size(); ++p) {
      weak += vol * vec_at(dz, p).dot(vec_at(gp, p));
      n1 += vol * vec_at(dz, p).squaredNorm();
    }
    for (std::size_t e = 0; e < zeta.size(); ++e) {
      pair += vol * vec_at(zeta, e).dot(vec_at(strong, e));
      n0 += vol * vec_at(zeta, e).squaredNorm();
    }
    const double norm = std::sqrt(n0 + n1);
    res.weak.push_back(weak);
    res.strong.push_back(pair);
    res.norms.push_back(norm);
    if (norm > 0.0) res.max_ratio = std::max(res.max_ratio, std::abs(weak) / norm);
  }
  return res;
}

template <class G>
LatticeConnection<G> minimize(const LatticeConnection<G>& start, const DensityModel& model,
                              const MinimizeOptions& opt, MinimizeReport& rep) {
  const Complex& k = start.complex();
  double q_limit = opt.q_limit;
  if (q_limit <= 0.0) q_limit = model.q_crit().value_or(model.q_max());
  std::vector<bool> fixed(k.num_cells(1), false);
  if (opt.boundary == LinkBoundary::Fixed) fixed = tangential_boundary_links(k);

  rep = MinimizeReport{};
  LatticeConnection<G> conn = start;
  double energy = gauge_energy(conn, model);
  rep.max_q = gauge_Q(conn).max_abs();

  auto masked_gradient = [&](const LatticeConnection<G>& c) {
    Cochain g = energy_gradient(c, model);
    for (std::size_t e = 0; e < g.size(); ++e)
      if (fixed[e])
        for (int r = 0; r < 3; ++r) g.at(e, r) = 0.0;
    return g;
  };

  Cochain grad = masked_gradient(conn);
  Cochain prev_grad = grad;
  double prev_eta = 0.0;
  double eta = 0.1;
  for (int iter = 0;; ++iter) {
    const double sup = grad.max_abs();
    rep.energy_history.push_back(energy);
    rep.grad_history.push_back(sup);
    rep.iterations = iter;
    if (sup <= opt.tol) {
      rep.converged = true;
      break;
    }
    if (iter >= opt.max_iters) {
      rep.message = "iteration budget exhausted";
      break;
    }
    const double gg = [&] {
      double s = 0.0;
      for (double x : grad.values()) s += x * x;
      return s;
    }();
    if (prev_eta > 0.0) {
      // Barzilai-Borwein: s = -eta g_prev, y = g - g_prev.
      double sy = 0.0, ss = 0.0;
      for (std::size_t i = 0; i < grad.values().size(); ++i) {
        const double s = -prev_eta * prev_grad.values()[i];
        const double y = grad.values()[i] - prev_grad.values()[i];
        sy += s * y;
        ss += s * s;
      }
      eta = sy > 0.0 ? ss / sy : 2.0 * prev_eta;
    }

    // Below this the energy cannot resolve the Armijo decrease; near the
    // minimum the step is then judged by the gradient norm instead.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(energy));
    bool accepted = false;
    std::optional<Cochain> trial_grad;
    for (int tries = 0; tries < 80; ++tries, eta *= 0.5) {
      LatticeConnection<G> trial = conn;
      for (std::size_t e = 0; e < trial.num_links(); ++e)
        if (!fixed[e]) trial.link(e) = G::exp(-eta * vec_at(grad, e)) * conn.link(e);
      const double mq = max_q_or_inf(trial);
      if (!(mq < q_limit) || !model.in_domain(mq)) continue;
      const double e_trial = gauge_energy(trial, model);
      const double decrease = opt.armijo * eta * gg;
      bool ok = decrease > noise && e_trial <= energy - decrease;
      if (decrease <= noise && e_trial <= energy + noise) {
        Cochain g = masked_gradient(trial);
        double tt = 0.0;
        for (double x : g.values()) tt += x * x;
        if (tt < gg) {
          ok = true;
          trial_grad = std::move(g);
        }
      }
      if (ok) {
        conn = std::move(trial);
        energy = e_trial;
        rep.max_q = mq;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      rep.line_search_failed = true;
      rep.message = "line search failed at iteration " + std::to_string(iter);
      break;
    }
    prev_eta = eta;
    prev_grad = grad;
    grad = trial_grad ? std::move(*trial_grad) : masked_gradient(conn);
  }
  rep.energy = energy;
  rep.grad_sup = rep.grad_history.back();
  return conn;
}

// ---- test configurations ----

template <class G>
LatticeConnection<G> random_connection(ComplexPtr k, lie::Rng& rng, double amplitude) {
  LatticeConnection<G> c(std::move(k));
  for (std::size_t e = 0; e < c.num_links(); ++e) c.link(e) = lie::random_near_identity<G>(rng, amplitude);
  return c;
}

template <class G>
LatticeConnection<G> haar_connection(ComplexPtr k, lie::Rng& rng) {
  LatticeConnection<G> c(std::move(k));
  for (std::size_t e = 0; e < c.num_links(); ++e) c.link(e) = G::haar(rng);
  return c;
}

template <class G>
GaugeTransform<G> random_gauge(const Complex& k, lie::Rng& rng) {
  GaugeTransform<G> g(k.num_vertices());
  for (auto& x : g) x = G::haar(rng);
  return g;
}

template <class G>
GaugeTransform<G> smooth_gauge(const Complex& k, lie::Rng& rng, double eps) {
  constexpr int kModes = 3;
  const int n = k.dim();
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979323846);
  std::array<Vec3, kModes> coef;
  std::array<Point, kModes> wave{};
  std::array<double, kModes> ph{};
  for (int m = 0; m < kModes; ++m) {
    coef[m] = lie::random_algebra(rng, 1.0);
    for (int a = 0; a < n; ++a) wave[m][a] = nd(rng);
    ph[m] = phase(rng);
  }
  GaugeTransform<G> g(k.num_vertices());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const Point x = k.vertex_point(k.cell(0, v).base);
    Vec3 s = Vec3::Zero();
    for (int m = 0; m < kModes; ++m) {
      double arg = ph[m];
      for (int a = 0; a < n; ++a) arg += wave[m][a] * x[a];
      s += std::sin(arg) * coef[m];
    }
    g[v] = G::exp(eps * s);
  }
  return g;
}

template <class G>
LatticeConnection<G> abelian_embedding(const Cochain& theta, const Vec3& axis) {
  if (theta.degree() != 1 || theta.components() != 1)
    throw InvalidArgument("abelian_embedding expects a scalar 1-cochain");
  const Complex& k = theta.complex();
  LatticeConnection<G> c(theta.complex_ptr());
  for (std::size_t e = 0; e < c.num_links(); ++e) {
    const int a = axes_of(k.cell(1, e).mask)[0];
    c.link(e) = G::exp(k.spacing(a) * theta.at(e) * axis);
  }
  return c;
}

template <class G>
LatticeConnection<G> constant_field(ComplexPtr kp, double B, int a, int b, const Vec3& axis) {
  const Complex& k = *kp;
  if (a == b || a < 0 || b < 0 || a >= k.dim() || b >= k.dim())
    throw InvalidArgument("constant_field needs two distinct axes");
  LatticeConnection<G> c(kp);
  for (std::size_t e = 0; e < c.num_links(); ++e) {
    const auto cell = k.cell(1, e);
    if (axes_of(cell.mask)[0] != b) continue;
    const double xa = k.vertex_point(cell.base)[a];
    c.link(e) = G::exp(k.spacing(b) * B * xa * axis);
  }
  return c;
}

#define NLH_GAUGE_INSTANTIATE(G)                                                               \
  template class LatticeConnection<G>;                                                         \
  template LatticeConnection<G> connection_from_algebra<G>(const Cochain&);                    \
  template Cochain algebra_from_connection<G>(const LatticeConnection<G>&);                    \
  template Cochain curvature<G>(const LatticeConnection<G>&);                                  \
  template Cochain gauge_Q<G>(const LatticeConnection<G>&);                                    \
  template double gauge_energy<G>(const LatticeConnection<G>&, const DensityModel&);           \
  template Cochain energy_gradient<G>(const LatticeConnection<G>&, const DensityModel&);       \
  template LatticeConnection<G> apply_gauge<G>(const LatticeConnection<G>&,                    \
                                               const GaugeTransform<G>&);                      \
  template ElResidual el_residual<G>(const LatticeConnection<G>&, const DensityModel&);        \
  template BianchiResult bianchi_residual<G>(const LatticeConnection<G>&);                     \
  template Cochain covariant_d<G>(const LatticeConnection<G>&, const Cochain&);                \
  template WeakResidualResult weak_residual<G>(const LatticeConnection<G>&,                    \
                                               const DensityModel&, int, std::uint64_t,        \
                                               LinkBoundary);                                  \
  template LatticeConnection<G> minimize<G>(const LatticeConnection<G>&, const DensityModel&,  \
                                            const MinimizeOptions&, MinimizeReport&);          \
  template LatticeConnection<G> random_connection<G>(ComplexPtr, lie::Rng&, double);          \
  template LatticeConnection<G> haar_connection<G>(ComplexPtr, lie::Rng&);                     \
  template GaugeTransform<G> random_gauge<G>(const Complex&, lie::Rng&);                       \
  template GaugeTransform<G> smooth_gauge<G>(const Complex&, lie::Rng&, double);               \
  template LatticeConnection<G> abelian_embedding<G>(const Cochain&, const Vec3&);             \
  template LatticeConnection<G> constant_field<G>(ComplexPtr, double, int, int, const Vec3&);

NLH_GAUGE_INSTANTIATE(lie::SU2)
NLH_GAUGE_INSTANTIATE(lie::SO3)

}  // namespace nlh::gauge
