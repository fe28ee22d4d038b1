#include "nlh/complex.hpp"

#include "nlh/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace nlh {

MetricSpec MetricSpec::diagonal(std::vector<double> per_vertex_diag) {
  MetricSpec s;
  s.kind = Kind::Diagonal;
  s.values = std::move(per_vertex_diag);
  return s;
}

MetricSpec MetricSpec::conformal(std::vector<double> u) {
  MetricSpec s;
  s.kind = Kind::Conformal;
  s.values = std::move(u);
  return s;
}

MetricSpec MetricSpec::explicit_matrices(std::vector<MetricMatrix> g) {
  MetricSpec s;
  s.kind = Kind::Explicit;
  s.matrices = std::move(g);
  return s;
}

std::vector<int> axes_of(unsigned mask) {
  std::vector<int> axes;
  for (int a = 0; a < kMaxDim; ++a)
    if ((mask >> a) & 1u) axes.push_back(a);
  return axes;
}

int shuffle_sign(unsigned a, unsigned b) {
  // Count inversions: pairs (i in a, j in b) with i > j.
  int inversions = 0;
  for (int i : axes_of(a))
    for (int j : axes_of(b))
      if (i > j) ++inversions;
  return (inversions % 2) ? -1 : 1;
}

double minor_det(const MetricMatrix& m, unsigned a, unsigned b) {
  const auto ra = axes_of(a);
  const auto cb = axes_of(b);
  if (ra.empty()) return 1.0;
  const int k = static_cast<int>(ra.size());
  MetricMatrix sub(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) sub(i, j) = m(ra[i], cb[j]);
  if (k == 1) return sub(0, 0);
  return sub.determinant();
}

Complex::Complex(const GridSpec& grid, const MetricSpec& metric)
    : n_(static_cast<int>(grid.dims.size())),
      dims_(grid.dims),
      h_(grid.spacing),
      origin_(grid.origin),
      periodic_(grid.periodic) {
  if (n_ < 1 || n_ > kMaxDim)
    throw InvalidArgument("complex dimension must be between 1 and 4, got " + std::to_string(n_));
  if (h_.size() == 1 && n_ > 1) h_.assign(n_, h_[0]);
  if (static_cast<int>(h_.size()) != n_)
    throw InvalidArgument("spacing must have one entry or one per axis");
  if (origin_.empty()) origin_.assign(n_, 0.0);
  if (periodic_.empty()) periodic_.assign(n_, false);
  if (static_cast<int>(origin_.size()) != n_ || static_cast<int>(periodic_.size()) != n_)
    throw InvalidArgument("origin/periodic must have one entry per axis");
  for (int a = 0; a < n_; ++a) {
    if (dims_[a] < 1)
      throw InvalidArgument("dims must be >= 1 on every axis (axis " + std::to_string(a) + ")");
    if (!(h_[a] > 0.0) || !std::isfinite(h_[a]))
      throw InvalidArgument("spacing must be positive (axis " + std::to_string(a) + ")");
    if (periodic_[a] && dims_[a] < 3)
      throw InvalidArgument("periodic axes need at least 3 cells");
    volume_ *= h_[a];
  }
  build_indexing();
  build_metric(metric);
}

bool Complex::any_periodic() const {
  return std::any_of(periodic_.begin(), periodic_.end(), [](bool b) { return b; });
}

void Complex::build_indexing() {
  orient_.assign(n_ + 1, {});
  const unsigned full = (1u << n_);
  for (unsigned m = 0; m < full; ++m) orient_[std::popcount(m)].push_back(m);
  for (auto& list : orient_)
    std::sort(list.begin(), list.end(), [](unsigned a, unsigned b) { return axes_of(a) < axes_of(b); });
  offsets_.assign(n_ + 1, {});
  for (int p = 0; p <= n_; ++p) {
    std::size_t off = 0;
    offsets_[p].push_back(0);
    for (unsigned m : orient_[p]) {
      std::size_t count = 1;
      for (int a = 0; a < n_; ++a) count *= static_cast<std::size_t>(extent(m, a));
      off += count;
      offsets_[p].push_back(off);
    }
  }
}

int Complex::orientation_index(int p, unsigned mask) const {
  const auto& list = orient_[p];
  auto it = std::find(list.begin(), list.end(), mask);
  if (it == list.end()) throw InvalidArgument("orientation mask does not match degree");
  return static_cast<int>(it - list.begin());
}

std::optional<std::size_t> Complex::find(int p, unsigned mask, MultiIndex base) const {
  std::size_t linear = 0, stride = 1;
  for (int a = 0; a < n_; ++a) {
    const int ext = extent(mask, a);
    int x = base[a];
    if (periodic_[a]) {
      x %= dims_[a];
      if (x < 0) x += dims_[a];
    } else if (x < 0 || x >= ext) {
      return std::nullopt;
    }
    linear += static_cast<std::size_t>(x) * stride;
    stride *= static_cast<std::size_t>(ext);
  }
  return offsets_[p][orientation_index(p, mask)] + linear;
}

std::size_t Complex::index(int p, unsigned mask, const MultiIndex& base) const {
  auto idx = find(p, mask, base);
  if (!idx) throw InvalidArgument("cell outside the complex");
  return *idx;
}

Complex::Cell Complex::cell(int p, std::size_t idx) const {
  const auto& offs = offsets_[p];
  auto it = std::upper_bound(offs.begin(), offs.end(), idx);
  if (it == offs.begin() || it == offs.end()) throw InvalidArgument("cell index out of range");
  const int k = static_cast<int>(it - offs.begin()) - 1;
  Cell c;
  c.orientation = k;
  c.mask = orient_[p][k];
  std::size_t rem = idx - offs[k];
  for (int a = 0; a < n_; ++a) {
    const auto ext = static_cast<std::size_t>(extent(c.mask, a));
    c.base[a] = static_cast<int>(rem % ext);
    rem /= ext;
  }
  return c;
}

Point Complex::vertex_point(const MultiIndex& v) const {
  Point x{};
  for (int a = 0; a < n_; ++a) x[a] = origin_[a] + v[a] * h_[a];
  return x;
}

Point Complex::cell_center(int p, std::size_t idx) const {
  const Cell c = cell(p, idx);
  Point x{};
  for (int a = 0; a < n_; ++a)
    x[a] = origin_[a] + (c.base[a] + (((c.mask >> a) & 1u) ? 0.5 : 0.0)) * h_[a];
  return x;
}

bool Complex::on_boundary(const MultiIndex& v) const {
  for (int a = 0; a < n_; ++a)
    if (!periodic_[a] && (v[a] == 0 || v[a] == dims_[a])) return true;
  return false;
}

std::vector<std::size_t> Complex::corners(std::size_t top_cell) const {
  const Cell c = cell(n_, top_cell);
  std::vector<std::size_t> out(std::size_t{1} << n_);
  for (unsigned bits = 0; bits < out.size(); ++bits) {
    MultiIndex v = c.base;
    for (int a = 0; a < n_; ++a) v[a] += (bits >> a) & 1u;
    out[bits] = index(0, 0u, v);
  }
  return out;
}

MetricMatrix Complex::cell_inverse_metric(std::size_t top_cell) const {
  if (flat_) return MetricMatrix::Identity(n_, n_);
  MetricMatrix acc = MetricMatrix::Zero(n_, n_);
  const auto cs = corners(top_cell);
  for (auto v : cs) acc += ginv_[v];
  return acc / static_cast<double>(cs.size());
}

double Complex::cell_sqrt_det(std::size_t top_cell) const {
  if (flat_) return 1.0;
  double acc = 0.0;
  const auto cs = corners(top_cell);
  for (auto v : cs) acc += sqrtg_[v];
  return acc / static_cast<double>(cs.size());
}

bool Complex::same_shape(const Complex& o) const {
  return n_ == o.n_ && dims_ == o.dims_ && periodic_ == o.periodic_;
}

void Complex::build_metric(const MetricSpec& spec) {
  const std::size_t nv = num_vertices();
  g_.assign(nv, MetricMatrix::Identity(n_, n_));
  switch (spec.kind) {
    case MetricSpec::Kind::Identity:
      break;
    case MetricSpec::Kind::Diagonal:
      if (spec.values.size() != nv * static_cast<std::size_t>(n_))
        throw InvalidArgument("diagonal metric needs n values per vertex");
      for (std::size_t v = 0; v < nv; ++v)
        for (int a = 0; a < n_; ++a) g_[v](a, a) = spec.values[v * n_ + a];
      break;
    case MetricSpec::Kind::Conformal:
      if (spec.values.size() != nv) throw InvalidArgument("conformal metric needs one u per vertex");
      for (std::size_t v = 0; v < nv; ++v)
        g_[v] = std::exp(2.0 * spec.values[v]) * MetricMatrix::Identity(n_, n_);
      break;
    case MetricSpec::Kind::Explicit:
      if (spec.matrices.size() != nv) throw InvalidArgument("explicit metric needs one matrix per vertex");
      for (std::size_t v = 0; v < nv; ++v) {
        if (spec.matrices[v].rows() != n_ || spec.matrices[v].cols() != n_)
          throw InvalidArgument("explicit metric matrix has wrong shape");
        g_[v] = spec.matrices[v];
      }
      break;
  }

  flat_ = spec.kind == MetricSpec::Kind::Identity;
  ginv_.resize(nv);
  sqrtg_.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const MetricMatrix& g = g_[v];
    if (!g.allFinite() || (g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + g.cwiseAbs().maxCoeff()))
      throw MetricError("metric is not symmetric at vertex " + std::to_string(v), v);
    Eigen::SelfAdjointEigenSolver<MetricMatrix> eig(g, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0))
      throw MetricError("metric is not positive-definite at vertex " + std::to_string(v), v);
    ginv_[v] = g.inverse();
    sqrtg_[v] = std::sqrt(g.determinant());
  }

  gamma_.assign(nv * n_ * n_ * n_, 0.0);
  if (flat_) return;

  // dg[v][delta](beta, gamma) = d_delta g_{beta gamma}
  std::vector<std::vector<MetricMatrix>> dg(nv, std::vector<MetricMatrix>(n_));
  for (std::size_t v = 0; v < nv; ++v) {
    const MultiIndex x = cell(0, v).base;
    for (int d = 0; d < n_; ++d) {
      MultiIndex xp = x, xm = x;
      ++xp[d];
      --xm[d];
      const auto ip = find(0, 0u, xp);
      const auto im = find(0, 0u, xm);
      if (ip && im)
        dg[v][d] = (g_[*ip] - g_[*im]) / (2.0 * h_[d]);
      else if (ip)
        dg[v][d] = (g_[*ip] - g_[v]) / h_[d];
      else if (im)
        dg[v][d] = (g_[v] - g_[*im]) / h_[d];
      else
        dg[v][d] = MetricMatrix::Zero(n_, n_);
    }
  }
  for (std::size_t v = 0; v < nv; ++v)
    for (int al = 0; al < n_; ++al)
      for (int be = 0; be < n_; ++be)
        for (int ga = 0; ga < n_; ++ga) {
          double s = 0.0;
          for (int de = 0; de < n_; ++de)
            s += ginv_[v](al, de) * (dg[v][be](de, ga) + dg[v][ga](de, be) - dg[v][de](be, ga));
          gamma_[((v * n_ + al) * n_ + be) * n_ + ga] = 0.5 * s;
        }
}

}  // namespace nlh
