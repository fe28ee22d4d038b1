#pragma once

// Structured cubical complexes on n-dimensional coordinate boxes with a
// per-vertex Riemannian metric.
//
// Cells of degree p are identified by an orientation (a sorted set of p axes,
// stored as a bit mask) and a base vertex multi-index.  A p-cell with
// orientation S at base v spans v + [0,1]^S.  Cells are numbered
// orientation-major (orientations in lexicographic order of their axis
// lists), then by base vertex with axis 0 varying fastest.

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace nlh {

inline constexpr int kMaxDim = 4;

using MetricMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                                   kMaxDim, kMaxDim>;
using MultiIndex = std::array<int, kMaxDim>;
using Point = std::array<double, kMaxDim>;

/// How the metric is specified when a complex is built.
struct MetricSpec {
  enum class Kind { Identity, Diagonal, Conformal, Explicit };

  Kind kind = Kind::Identity;
  /// Diagonal: n entries per vertex (vertex-major).  Conformal: u per vertex,
  /// g = exp(2u) I.
  std::vector<double> values;
  /// Explicit: one matrix per vertex.
  std::vector<MetricMatrix> matrices;

  static MetricSpec identity() { return {}; }
  static MetricSpec diagonal(std::vector<double> per_vertex_diag);
  static MetricSpec conformal(std::vector<double> u);
  static MetricSpec explicit_matrices(std::vector<MetricMatrix> g);
};

struct GridSpec {
  std::vector<int> dims;        // cells per axis
  std::vector<double> spacing;  // h per axis
  std::vector<double> origin;   // coordinates of vertex 0 (default zeros)
  std::vector<bool> periodic;   // per axis (default false)
};

class Complex {
public:
  /// Validates the grid and the metric; precomputes sqrt(g), the inverse
  /// metric and Christoffel symbols.
  Complex(const GridSpec& grid, const MetricSpec& metric = MetricSpec::identity());

  int dim() const noexcept { return n_; }
  int cells_along(int axis) const { return dims_[axis]; }
  double spacing(int axis) const { return h_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  bool periodic(int axis) const { return periodic_[axis]; }
  bool any_periodic() const;
  /// Product of spacings (coordinate volume of a top cell).
  double cell_volume() const noexcept { return volume_; }

  /// Number of vertex positions along an axis for cells with the given mask.
  int extent(unsigned mask, int axis) const {
    return ((mask >> axis) & 1u) || periodic_[axis] ? dims_[axis] : dims_[axis] + 1;
  }

  const std::vector<unsigned>& orientations(int p) const { return orient_[p]; }
  int orientation_index(int p, unsigned mask) const;
  std::size_t num_cells(int p) const { return offsets_[p].back(); }
  std::size_t num_vertices() const { return num_cells(0); }
  std::size_t block_offset(int p, int orientation) const { return offsets_[p][orientation]; }
  std::size_t block_size(int p, int orientation) const {
    return offsets_[p][orientation + 1] - offsets_[p][orientation];
  }

  struct Cell {
    unsigned mask = 0;
    int orientation = 0;
    MultiIndex base{};
  };

  /// Cell index for (mask, base); base components are wrapped on periodic
  /// axes.  Returns nullopt when the cell does not exist.
  std::optional<std::size_t> find(int p, unsigned mask, MultiIndex base) const;
  std::size_t index(int p, unsigned mask, const MultiIndex& base) const;
  Cell cell(int p, std::size_t index) const;

  Point vertex_point(const MultiIndex& v) const;
  Point cell_center(int p, std::size_t index) const;

  /// True when the vertex touches the boundary of a non-periodic axis.
  bool on_boundary(const MultiIndex& v) const;

  const MetricMatrix& metric(std::size_t vertex) const { return g_[vertex]; }
  const MetricMatrix& inverse_metric(std::size_t vertex) const { return ginv_[vertex]; }
  double sqrt_det(std::size_t vertex) const { return sqrtg_[vertex]; }
  bool flat() const noexcept { return flat_; }

  /// Gamma^alpha_{beta gamma} at a vertex.
  double christoffel(std::size_t vertex, int alpha, int beta, int gamma) const {
    return gamma_[((vertex * n_ + alpha) * n_ + beta) * n_ + gamma];
  }

  /// Inverse metric averaged over the 2^n corners of a top cell.
  MetricMatrix cell_inverse_metric(std::size_t top_cell) const;
  double cell_sqrt_det(std::size_t top_cell) const;

  /// Vertex indices of the corners of a top cell, corner bit a set meaning
  /// +1 along axis a.
  std::vector<std::size_t> corners(std::size_t top_cell) const;

  bool same_shape(const Complex& other) const;

private:
  void build_indexing();
  void build_metric(const MetricSpec& spec);

  int n_;
  std::vector<int> dims_;
  std::vector<double> h_;
  std::vector<double> origin_;
  std::vector<bool> periodic_;
  double volume_ = 1.0;
  std::vector<std::vector<unsigned>> orient_;
  std::vector<std::vector<std::size_t>> offsets_;
  std::vector<MetricMatrix> g_, ginv_;
  std::vector<double> sqrtg_;
  std::vector<double> gamma_;
  bool flat_ = true;
};

/// Sorted axis list of an orientation mask.
std::vector<int> axes_of(unsigned mask);

/// Sign of the permutation that sorts the concatenation (axes(a), axes(b)).
int shuffle_sign(unsigned a, unsigned b);

/// Determinant of the submatrix m[rows(a), cols(b)]; 1 for empty masks.
double minor_det(const MetricMatrix& m, unsigned a, unsigned b);

}  // namespace nlh
