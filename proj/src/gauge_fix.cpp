#include "nlh/gauge_fix.hpp"

#include "nlh/dec.hpp"
#include "nlh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace nlh::gauge {

using lie::Vec3;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 vec_at(const Cochain& c, std::size_t i) { return {c.at(i, 0), c.at(i, 1), c.at(i, 2)}; }

MultiIndex shift(MultiIndex v, int axis, int by = 1) {
  v[axis] += by;
  return v;
}

template <class G>
double re_tr_sum(const LatticeConnection<G>& c) {
  double s = 0.0;
  for (std::size_t e = 0; e < c.num_links(); ++e) s += G::re_tr(c.link(e));
  return s;
}

// Left-multiplies the gauge at vertex x by h, updating the incident links.
template <class G>
void rotate_site(LatticeConnection<G>& c, GaugeTransform<G>& g, std::size_t xi, const MultiIndex& x,
                 const typename G::Matrix& h) {
  const Complex& k = c.complex();
  const typename G::Matrix hinv = G::inverse(h);
  for (int a = 0; a < k.dim(); ++a) {
    if (auto e = k.find(1, 1u << a, x)) c.link(*e) = h * c.link(*e);
    if (auto e = k.find(1, 1u << a, shift(x, a, -1))) c.link(*e) = c.link(*e) * hinv;
  }
  g[xi] = h * g[xi];
}

std::vector<std::size_t> interior_vertices(const Complex& k, int parity) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < k.num_vertices(); ++v) {
    const auto x = k.cell(0, v).base;
    if (k.on_boundary(x)) continue;
    int s = 0;
    for (int a = 0; a < k.dim(); ++a) s += x[a];
    if (parity < 0 || s % 2 == parity) out.push_back(v);
  }
  return out;
}

// sum_a (theta_a(x) - theta_a(x - e_a)) / h_a^2, theta = log U.
template <class G>
Vec3 log_divergence(const LatticeConnection<G>& c, const MultiIndex& x) {
  const Complex& k = c.complex();
  Vec3 d = Vec3::Zero();
  for (int a = 0; a < k.dim(); ++a) {
    const double w = 1.0 / (k.spacing(a) * k.spacing(a));
    if (auto e = k.find(1, 1u << a, x)) d += w * G::log(c.link(*e));
    if (auto e = k.find(1, 1u << a, shift(x, a, -1))) d -= w * G::log(c.link(*e));
  }
  return d;
}

template <class G>
double max_divergence(const LatticeConnection<G>& c) {
  const Complex& k = c.complex();
  double m = 0.0;
  for (std::size_t v : interior_vertices(k, -1)) m = std::max(m, log_divergence(c, k.cell(0, v).base).norm());
  return m;
}

}  // namespace

template <class G>
Cochain link_divergence(const LatticeConnection<G>& conn) {
  const Complex& k = conn.complex();
  Cochain out(conn.complex_ptr(), 0, 3);
  for (std::size_t v : interior_vertices(k, -1)) {
    const Vec3 d = -log_divergence(conn, k.cell(0, v).base);
    for (int r = 0; r < 3; ++r) out.at(v, r) = d[r];
  }
  return out;
}

template <class G>
double sobolev_ratio(const LatticeConnection<G>& conn, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("Sobolev exponent must be >= 1");
  const Complex& k = conn.complex();
  const double vol = k.cell_volume();
  const Cochain a = algebra_from_connection(conn);
  const Cochain f = curvature(conn);
  double na = 0.0, nga = 0.0, nf = 0.0;
  for (std::size_t e = 0; e < a.size(); ++e) {
    const Vec3 ae = vec_at(a, e);
    na += vol * std::pow(ae.norm(), p);
    const auto c = k.cell(1, e);
    for (int b = 0; b < k.dim(); ++b)
      if (auto nb = k.find(1, c.mask, shift(c.base, b)))
        nga += vol * std::pow(((vec_at(a, *nb) - ae) / k.spacing(b)).norm(), p);
  }
  for (std::size_t q = 0; q < f.size(); ++q) nf += vol * std::pow(vec_at(f, q).norm(), p);
  const double num = std::pow(na + nga, 1.0 / p);
  if (nf == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / std::pow(nf, 1.0 / p);
}

template <class G>
LatticeConnection<G> coulomb_gauge_fix(const LatticeConnection<G>& conn, const CoulombOptions& opt,
                                       GaugeTransform<G>& g, CoulombReport& rep) {
  const Complex& k = conn.complex();
  rep = CoulombReport{};
  LatticeConnection<G> c = conn;
  g.assign(k.num_vertices(), G::identity());
  const std::array<std::vector<std::size_t>, 2> sites{interior_vertices(k, 0), interior_vertices(k, 1)};

  // Phase 1: maximize sum Re tr U.
  const int budget1 = std::max(1, opt.max_sweeps / 2);
  double func = re_tr_sum(c);
  for (int sweep = 0; sweep < budget1; ++sweep) {
    for (const auto& list : sites)
      for (std::size_t xi : list) {
        const MultiIndex x = k.cell(0, xi).base;
        typename G::Matrix kk = G::Matrix::Zero();
        for (int a = 0; a < k.dim(); ++a) {
          if (auto e = k.find(1, 1u << a, x)) kk += c.link(*e);
          if (auto e = k.find(1, 1u << a, shift(x, a, -1))) kk += G::inverse(c.link(*e));
        }
        typename G::Matrix h = G::maximize_re_tr(kk);
        if (opt.overrelax != 1.0 && G::angle(h) < 0.5 * G::cut_locus / opt.overrelax)
          h = G::exp(opt.overrelax * G::log(h));
        rotate_site(c, g, xi, x, h);
      }
    rep.maximize_sweeps = sweep + 1;
    const double next = re_tr_sum(c);
    const bool flat = std::abs(next - func) <= 1e-13 * std::max(1.0, std::abs(next));
    func = next;
    if (flat) break;
  }

  // Phase 2: relax the divergence of the link logs to zero.
  double inv_h2 = 0.0;
  int longest = 1;
  for (int a = 0; a < k.dim(); ++a) {
    inv_h2 += 1.0 / (k.spacing(a) * k.spacing(a));
    longest = std::max(longest, k.cells_along(a));
  }
  const double omega = opt.sor > 0.0 ? opt.sor : 2.0 / (1.0 + std::sin(kPi / longest));
  const int budget2 = std::max(1, opt.max_sweeps - rep.maximize_sweeps);
  rep.div_sup = max_divergence(c);
  while (rep.div_sup > opt.tol && rep.polish_sweeps < budget2) {
    for (const auto& list : sites)
      for (std::size_t xi : list) {
        const MultiIndex x = k.cell(0, xi).base;
        const Vec3 d = log_divergence(c, x);
        rotate_site(c, g, xi, x, G::exp(-omega * d / (2.0 * inv_h2)));
      }
    ++rep.polish_sweeps;
    rep.div_sup = max_divergence(c);
    if (!std::isfinite(rep.div_sup)) break;
  }
  rep.converged = rep.div_sup <= opt.tol;
  if (!rep.converged)
    rep.message = "gauge fixing stalled: |delta A| = " + std::to_string(rep.div_sup) + " after " +
                  std::to_string(rep.maximize_sweeps + rep.polish_sweeps) + " sweeps";
  rep.functional = re_tr_sum(c);
  const double n2 = std::max(1.0, 0.5 * k.dim());
  rep.ratio_n2 = sobolev_ratio(c, n2);
  rep.ratio_s = sobolev_ratio(c, opt.s);
  return c;
}

namespace {

// Multilinear interpolation of the edge-centred component A_a at a point
// given in vertex-index coordinates (clamped to the staggered grid).
Vec3 interpolate_edge(const Complex& k, const Cochain& a, int axis, const Point& y) {
  const int n = k.dim();
  const unsigned mask = 1u << axis;
  std::array<int, kMaxDim> lo{};
  std::array<double, kMaxDim> t{};
  for (int d = 0; d < n; ++d) {
    const double u = y[d] - (d == axis ? 0.5 : 0.0);
    const int ext = k.extent(mask, d);
    if (ext < 2) {
      lo[d] = 0;
      t[d] = 0.0;
      continue;
    }
    lo[d] = std::clamp(static_cast<int>(std::floor(u)), 0, ext - 2);
    t[d] = std::clamp(u - lo[d], 0.0, 1.0);
  }
  Vec3 out = Vec3::Zero();
  for (unsigned bits = 0; bits < (1u << n); ++bits) {
    double w = 1.0;
    MultiIndex b{};
    for (int d = 0; d < n; ++d) {
      const bool up = (bits >> d) & 1u;
      if (up && t[d] == 0.0) {
        w = 0.0;
        break;
      }
      b[d] = lo[d] + (up ? 1 : 0);
      w *= up ? t[d] : 1.0 - t[d];
    }
    if (w == 0.0) continue;
    out += w * vec_at(a, k.index(1, mask, b));
  }
  return out;
}

}  // namespace

template <class G>
LatticeConnection<G> exponential_gauge_fix(const LatticeConnection<G>& conn, const MultiIndex& origin,
                                           ExponentialMode mode, GaugeTransform<G>& g,
                                           ExponentialReport& rep) {
  const Complex& k = conn.complex();
  const int n = k.dim();
  for (int a = 0; a < n; ++a)
    if (origin[a] < 0 || origin[a] > k.cells_along(a)) throw InvalidArgument("origin outside the grid");
  if (k.on_boundary(origin)) throw InvalidArgument("exponential gauge origin must be an interior vertex");
  rep = ExponentialReport{};
  g.assign(k.num_vertices(), G::identity());

  // Vertices ordered by lattice distance from the origin.
  std::vector<std::size_t> order(k.num_vertices());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto l1 = [&](std::size_t v) {
    const auto x = k.cell(0, v).base;
    int s = 0;
    for (int a = 0; a < n; ++a) s += std::abs(x[a] - origin[a]);
    return s;
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return l1(p) < l1(q); });

  // Axis tree: each vertex hangs off its neighbour one step back along the
  // last axis where it differs from the origin.
  std::vector<std::size_t> tree_edges;
  for (std::size_t v : order) {
    const MultiIndex x = k.cell(0, v).base;
    int c = -1;
    for (int a = n - 1; a >= 0 && c < 0; --a)
      if (x[a] != origin[a]) c = a;
    if (c < 0) continue;
    const int step = x[c] > origin[c] ? 1 : -1;
    const MultiIndex par = shift(x, c, -step);
    const std::size_t pi = k.index(0, 0u, par);
    if (step > 0) {
      const std::size_t e = conn.edge_index(c, par);
      g[v] = g[pi] * conn.link(e);
      tree_edges.push_back(e);
    } else {
      const std::size_t e = conn.edge_index(c, x);
      g[v] = g[pi] * G::inverse(conn.link(e));
      tree_edges.push_back(e);
    }
  }

  if (mode == ExponentialMode::RadialTransport) {
    // The axis gauge is exact on flat connections and smooth on smooth ones;
    // transport along straight segments through its interpolation.
    const Cochain a = algebra_from_connection(apply_gauge(conn, g));
    GaugeTransform<G> radial(k.num_vertices(), G::identity());
    for (std::size_t v : order) {
      const MultiIndex x = k.cell(0, v).base;
      int steps = 0;
      for (int d = 0; d < n; ++d) steps = std::max(steps, 4 * std::abs(x[d] - origin[d]));
      if (steps == 0) continue;
      typename G::Matrix acc = G::identity();
      for (int s = 0; s < steps; ++s) {
        const double t = (s + 0.5) / steps;
        Point y{};
        for (int d = 0; d < n; ++d) y[d] = origin[d] + t * (x[d] - origin[d]);
        Vec3 w = Vec3::Zero();
        for (int d = 0; d < n; ++d) {
          const double dx = (x[d] - origin[d]) * k.spacing(d) / steps;
          if (dx != 0.0) w += dx * interpolate_edge(k, a, d, y);
        }
        acc = acc * G::exp(w);
      }
      radial[v] = acc;
    }
    for (std::size_t v = 0; v < g.size(); ++v) g[v] = radial[v] * g[v];
    tree_edges.clear();
  }

  LatticeConnection<G> fixed = apply_gauge(conn, g);
  const Cochain af = algebra_from_connection(fixed);
  for (std::size_t e : tree_edges) rep.tree_defect = std::max(rep.tree_defect, vec_at(af, e).norm() * k.spacing(axes_of(k.cell(1, e).mask)[0]));
  for (int d = 0; d < n; ++d) {
    if (auto e = k.find(1, 1u << d, origin)) rep.origin_norm = std::max(rep.origin_norm, vec_at(af, *e).norm());
    if (auto e = k.find(1, 1u << d, shift(origin, d, -1)))
      rep.origin_norm = std::max(rep.origin_norm, vec_at(af, *e).norm());
  }

  // Curvature magnitude per top cell, sorted by distance of its centre.
  const Cochain q = gauge_Q(conn);
  const Point o = k.vertex_point(origin);
  auto dist = [&](const Point& p) {
    double s = 0.0;
    for (int d = 0; d < n; ++d) s += (p[d] - o[d]) * (p[d] - o[d]);
    return std::sqrt(s);
  };
  std::vector<std::pair<double, double>> cells;
  for (std::size_t t = 0; t < q.size(); ++t) cells.emplace_back(dist(k.cell_center(n, t)), std::sqrt(q.at(t)));
  std::sort(cells.begin(), cells.end());
  for (std::size_t i = 1; i < cells.size(); ++i) cells[i].second = std::max(cells[i].second, cells[i - 1].second);

  for (std::size_t v = 0; v < k.num_vertices(); ++v) {
    const MultiIndex x = k.cell(0, v).base;
    if (k.on_boundary(x) || x == origin) continue;
    double a2 = 0.0;
    for (int d = 0; d < n; ++d) {
      const auto e1 = k.find(1, 1u << d, x), e0 = k.find(1, 1u << d, shift(x, d, -1));
      a2 += (0.5 * (vec_at(af, *e1) + vec_at(af, *e0))).squaredNorm();
    }
    const double r = dist(k.vertex_point(x));
    auto it = std::upper_bound(cells.begin(), cells.end(), std::make_pair(r + 1e-12, std::numeric_limits<double>::infinity()));
    const double supf = it == cells.begin() ? cells.front().second : std::prev(it)->second;
    const double an = std::sqrt(a2);
    if (supf > 0.0)
      rep.bound_ratio = std::max(rep.bound_ratio, an / (0.5 * r * supf));
    else if (an > 1e-12)
      rep.bound_ratio = std::numeric_limits<double>::infinity();
  }
  return fixed;
}

#define NLH_GAUGE_FIX_INSTANTIATE(G)                                                                   \
  template Cochain link_divergence<G>(const LatticeConnection<G>&);                                    \
  template double sobolev_ratio<G>(const LatticeConnection<G>&, double);                              \
  template LatticeConnection<G> coulomb_gauge_fix<G>(const LatticeConnection<G>&, const CoulombOptions&, \
                                                     GaugeTransform<G>&, CoulombReport&);              \
  template LatticeConnection<G> exponential_gauge_fix<G>(const LatticeConnection<G>&, const MultiIndex&, \
                                                         ExponentialMode, GaugeTransform<G>&,         \
                                                         ExponentialReport&);

NLH_GAUGE_FIX_INSTANTIATE(lie::SU2)
NLH_GAUGE_FIX_INSTANTIATE(lie::SO3)

}  // namespace nlh::gauge
