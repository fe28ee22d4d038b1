#include "nlh/dec.hpp"

#include "nlh/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nlh::dec {
namespace {

unsigned full_mask(const Complex& k) { return (1u << k.dim()) - 1u; }

/// Average inverse metric and sqrt(g) over the vertices of a cell.
void cell_metric(const Complex& k, const Complex::Cell& c, MetricMatrix& ginv, double& sqrtg) {
  const int n = k.dim();
  if (k.flat()) {
    ginv = MetricMatrix::Identity(n, n);
    sqrtg = 1.0;
    return;
  }
  ginv = MetricMatrix::Zero(n, n);
  sqrtg = 0.0;
  const auto axes = axes_of(c.mask);
  const unsigned count = 1u << axes.size();
  for (unsigned bits = 0; bits < count; ++bits) {
    MultiIndex v = c.base;
    for (std::size_t i = 0; i < axes.size(); ++i) v[axes[i]] += (bits >> i) & 1u;
    const std::size_t vi = k.index(0, 0u, v);
    ginv += k.inverse_metric(vi);
    sqrtg += k.sqrt_det(vi);
  }
  ginv /= static_cast<double>(count);
  sqrtg /= static_cast<double>(count);
}

MultiIndex clamp_to(const Complex& k, unsigned mask, MultiIndex v) {
  for (int a = 0; a < k.dim(); ++a) {
    if (k.periodic(a)) continue;
    v[a] = std::clamp(v[a], 0, k.extent(mask, a) - 1);
  }
  return v;
}

}  // namespace

Cochain exterior_derivative(const Cochain& c) {
  const Complex& k = c.complex();
  const int p = c.degree();
  if (p >= k.dim()) throw DegreeError("exterior derivative of a top-degree cochain");
  const int nc = c.components();
  Cochain out(c.complex_ptr(), p + 1, nc);
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto cell = k.cell(p + 1, t);
    const auto axes = axes_of(cell.mask);
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const int s = axes[i];
      const unsigned fmask = cell.mask & ~(1u << s);
      MultiIndex up = cell.base;
      ++up[s];
      const std::size_t fp = k.index(p, fmask, up);
      const std::size_t fm = k.index(p, fmask, cell.base);
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      for (int q = 0; q < nc; ++q)
        out.at(t, q) += sign * (c.at(fp, q) - c.at(fm, q)) / k.spacing(s);
    }
  }
  return out;
}

std::vector<double> cell_weights(const Complex& k, int p) {
  std::vector<double> w(k.num_cells(p));
  MetricMatrix ginv;
  double sqrtg = 1.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (k.flat()) {
      w[i] = k.cell_volume();
      continue;
    }
    const auto cell = k.cell(p, i);
    cell_metric(k, cell, ginv, sqrtg);
    w[i] = k.cell_volume() * sqrtg * minor_det(ginv, cell.mask, cell.mask);
  }
  return w;
}

Cochain codifferential(const Cochain& c) {
  const Complex& k = c.complex();
  const int p = c.degree();
  if (p == 0) throw DegreeError("codifferential of a 0-cochain");
  const int nc = c.components();
  const auto wp = cell_weights(k, p);
  const auto wq = cell_weights(k, p - 1);
  Cochain out(c.complex_ptr(), p - 1, nc);
  for (std::size_t t = 0; t < c.size(); ++t) {
    const auto cell = k.cell(p, t);
    const auto axes = axes_of(cell.mask);
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const int s = axes[i];
      const unsigned fmask = cell.mask & ~(1u << s);
      MultiIndex up = cell.base;
      ++up[s];
      const std::size_t fp = k.index(p - 1, fmask, up);
      const std::size_t fm = k.index(p - 1, fmask, cell.base);
      const double coef = ((i % 2 == 0) ? 1.0 : -1.0) * wp[t] / k.spacing(s);
      for (int q = 0; q < nc; ++q) {
        out.at(fp, q) += coef * c.at(t, q);
        out.at(fm, q) -= coef * c.at(t, q);
      }
    }
  }
  for (std::size_t f = 0; f < out.size(); ++f)
    for (int q = 0; q < nc; ++q) out.at(f, q) /= wq[f];
  return out;
}

Cochain hodge_star(const Cochain& c) {
  const Complex& k = c.complex();
  const int n = k.dim();
  const int p = c.degree();
  const int nc = c.components();
  const unsigned full = full_mask(k);
  Cochain out(c.complex_ptr(), n - p, nc);
  const auto& sources = k.orientations(p);
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto cell = k.cell(n - p, t);
    const unsigned smask = full & ~cell.mask;
    const double sign = shuffle_sign(smask, cell.mask);
    if (k.flat()) {
      const std::size_t src = k.index(p, smask, clamp_to(k, smask, cell.base));
      for (int q = 0; q < nc; ++q) out.at(t, q) = sign * c.at(src, q);
      continue;
    }
    const std::size_t v = k.index(0, 0u, cell.base);
    const MetricMatrix& ginv = k.inverse_metric(v);
    const double w = sign * k.sqrt_det(v);
    for (unsigned other : sources) {
      const double m = minor_det(ginv, smask, other);
      if (m == 0.0) continue;
      const std::size_t src = k.index(p, other, clamp_to(k, other, cell.base));
      for (int q = 0; q < nc; ++q) out.at(t, q) += w * m * c.at(src, q);
    }
  }
  return out;
}

double inner_product(const Cochain& a, const Cochain& b) {
  if (a.degree() != b.degree() || a.components() != b.components())
    throw InvalidArgument("inner product of cochains with different shapes");
  const auto w = cell_weights(a.complex(), a.degree());
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double local = 0.0;
    for (int q = 0; q < a.components(); ++q) local += a.at(i, q) * b.at(i, q);
    s += w[i] * local;
  }
  return s;
}

double norm_squared(const Cochain& a) { return inner_product(a, a); }

std::vector<double> cell_averaged_components(const Cochain& c) {
  const Complex& k = c.complex();
  const int n = k.dim();
  const int p = c.degree();
  const int nc = c.components();
  const auto& orients = k.orientations(p);
  const std::size_t block = orients.size() * nc;
  const std::size_t ntop = k.num_cells(n);
  std::vector<double> out(ntop * block, 0.0);
  for (std::size_t t = 0; t < ntop; ++t) {
    const auto top = k.cell(n, t);
    for (std::size_t o = 0; o < orients.size(); ++o) {
      const unsigned mask = orients[o];
      std::vector<int> free_axes;
      for (int a = 0; a < n; ++a)
        if (!((mask >> a) & 1u)) free_axes.push_back(a);
      const unsigned count = 1u << free_axes.size();
      for (unsigned bits = 0; bits < count; ++bits) {
        MultiIndex b = top.base;
        for (std::size_t i = 0; i < free_axes.size(); ++i) b[free_axes[i]] += (bits >> i) & 1u;
        const std::size_t src = k.index(p, mask, b);
        for (int q = 0; q < nc; ++q) out[t * block + o * nc + q] += c.at(src, q);
      }
      for (int q = 0; q < nc; ++q) out[t * block + o * nc + q] /= count;
    }
  }
  return out;
}

Cochain pointwise_Q(const Cochain& c, QAggregation mode) {
  const Complex& k = c.complex();
  const int n = k.dim();
  const int p = c.degree();
  const int nc = c.components();
  const auto& orients = k.orientations(p);
  Cochain out(c.complex_ptr(), n, 1);

  if (mode == QAggregation::AverageComponents) {
    const auto avg = cell_averaged_components(c);
    const std::size_t block = orients.size() * nc;
    for (std::size_t t = 0; t < out.size(); ++t) {
      const double* w = avg.data() + t * block;
      double q = 0.0;
      if (k.flat()) {
        for (std::size_t i = 0; i < block; ++i) q += w[i] * w[i];
      } else {
        const MetricMatrix ginv = k.cell_inverse_metric(t);
        for (std::size_t a = 0; a < orients.size(); ++a)
          for (std::size_t b = 0; b < orients.size(); ++b) {
            const double m = minor_det(ginv, orients[a], orients[b]);
            if (m == 0.0) continue;
            double dot = 0.0;
            for (int r = 0; r < nc; ++r) dot += w[a * nc + r] * w[b * nc + r];
            q += m * dot;
          }
      }
      out.at(t) = std::max(q, 0.0);
    }
    return out;
  }

  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto top = k.cell(n, t);
    const MetricMatrix ginv = k.flat() ? MetricMatrix::Identity(n, n) : k.cell_inverse_metric(t);
    double q = 0.0;
    for (unsigned mask : orients) {
      std::vector<int> free_axes;
      for (int a = 0; a < n; ++a)
        if (!((mask >> a) & 1u)) free_axes.push_back(a);
      const unsigned count = 1u << free_axes.size();
      double acc = 0.0;
      for (unsigned bits = 0; bits < count; ++bits) {
        MultiIndex b = top.base;
        for (std::size_t i = 0; i < free_axes.size(); ++i) b[free_axes[i]] += (bits >> i) & 1u;
        const std::size_t src = k.index(p, mask, b);
        for (int r = 0; r < nc; ++r) acc += c.at(src, r) * c.at(src, r);
      }
      q += minor_det(ginv, mask, mask) * acc / count;
    }
    out.at(t) = q;
  }
  return out;
}

double max_ball_radius(const Complex& k, const Point& center) {
  double r = std::numeric_limits<double>::infinity();
  for (int a = 0; a < k.dim(); ++a) {
    const double lo = k.origin(a);
    const double hi = lo + k.cells_along(a) * k.spacing(a);
    if (k.periodic(a))
      r = std::min(r, 0.5 * (hi - lo) - k.spacing(a));
    else
      r = std::min(r, std::min(center[a] - lo, hi - center[a]));
  }
  return r;
}

std::vector<std::size_t> discrete_ball(const Complex& k, int p, const Point& center, double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("ball radius must be positive");
  const double rmax = max_ball_radius(k, center);
  if (radius > rmax * (1.0 + 1e-12))
    throw BallError("ball of radius " + std::to_string(radius) +
                        " escapes the domain; max admissible radius " + std::to_string(rmax),
                    std::max(rmax, 0.0));
  const double r2 = radius * radius * (1.0 + 1e-12);
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < k.num_cells(p); ++i) {
    const Point x = k.cell_center(p, i);
    double d2 = 0.0;
    for (int a = 0; a < k.dim(); ++a) d2 += (x[a] - center[a]) * (x[a] - center[a]);
    if (d2 <= r2) cells.push_back(i);
  }
  if (cells.size() < 2)
    throw BallError("ball of radius " + std::to_string(radius) + " contains fewer than 2 cells", rmax);
  return cells;
}

double campanato_seminorm(const Cochain& field, const Point& center, double radius) {
  const Complex& k = field.complex();
  const int p = field.degree();
  const auto cells = discrete_ball(k, p, center, radius);
  const int nc = field.components();
  // Each orientation block is its own component function.
  const std::size_t blocks = k.orientations(p).size();
  std::vector<std::vector<std::size_t>> by_block(blocks);
  for (auto i : cells) by_block[k.cell(p, i).orientation].push_back(i);
  double s = 0.0;
  for (const auto& group : by_block) {
    if (group.empty()) continue;
    // The rounded mean of equal values need not equal them.
    const bool constant = std::all_of(group.begin(), group.end(), [&](std::size_t i) {
      for (int q = 0; q < nc; ++q)
        if (field.at(i, q) != field.at(group.front(), q)) return false;
      return true;
    });
    if (constant) continue;
    std::vector<double> mean(nc, 0.0);
    for (auto i : group)
      for (int q = 0; q < nc; ++q) mean[q] += field.at(i, q);
    for (double& m : mean) m /= static_cast<double>(group.size());
    for (auto i : group)
      for (int q = 0; q < nc; ++q) {
        const double d = field.at(i, q) - mean[q];
        s += d * d;
      }
  }
  return s * k.cell_volume();
}

}  // namespace nlh::dec
