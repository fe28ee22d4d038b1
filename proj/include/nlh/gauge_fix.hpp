#pragma once

#include "nlh/gauge.hpp"

#include <string>

namespace nlh::gauge {

struct CoulombOptions {
  double tol = 1e-10;
  int max_sweeps = 20000;
  /// Overrelaxation exponent of the site-wise maximization sweeps.
  double overrelax = 1.7;
  /// Relaxation factor of the log-divergence polishing sweeps; <= 0 picks
  /// the optimal SOR factor of the grid Laplacian.
  double sor = 0.0;
  /// Exponent s of the second Sobolev ratio (the first uses n/2).
  double s = 3.0;
};

struct CoulombReport {
  bool converged = false;
  int maximize_sweeps = 0;
  int polish_sweeps = 0;
  /// max over interior vertices of |delta A|.
  double div_sup = 0.0;
  /// sum over links of Re tr U after fixing.
  double functional = 0.0;
  double ratio_n2 = 0.0;
  double ratio_s = 0.0;
  std::string message;
};

/// Maximizes sum Re tr U over gauges equal to the identity on the boundary
/// vertices (checkerboard overrelaxation), then polishes delta A = 0 at the
/// interior vertices by relaxing the link-log divergence.  Returns the fixed
/// connection; `g` receives the transform with fixed = apply_gauge(conn, g).
template <class G>
LatticeConnection<G> coulomb_gauge_fix(const LatticeConnection<G>& conn, const CoulombOptions& options,
                                       GaugeTransform<G>& g, CoulombReport& report);

/// delta A = -sum_a (A_a(x) - A_a(x - e_a)) / h_a at vertices not on a
/// non-periodic boundary (zero elsewhere), A from link logs.
template <class G>
Cochain link_divergence(const LatticeConnection<G>& conn);

/// (||A||_p^p + ||grad A||_p^p)^{1/p} / ||F||_p with forward differences.
template <class G>
double sobolev_ratio(const LatticeConnection<G>& conn, double p);

enum class ExponentialMode {
  /// Links on the axis-major tree from the origin become identity.
  AxisTree,
  /// Axis tree first, then g(x) transports along the straight segment from
  /// the origin through the interpolated axis-gauge connection.  Flat
  /// connections end with identity links.
  RadialTransport,
};

struct ExponentialReport {
  /// max_x |A(x)| / (|x|/2 * sup_{|y| <= |x|} |F(y)|) over interior vertices.
  double bound_ratio = 0.0;
  /// max |A| on the links touching the origin.
  double origin_norm = 0.0;
  /// max |log U| over tree links (AxisTree only).
  double tree_defect = 0.0;
};

template <class G>
LatticeConnection<G> exponential_gauge_fix(const LatticeConnection<G>& conn, const MultiIndex& origin,
                                           ExponentialMode mode, GaugeTransform<G>& g,
                                           ExponentialReport& report);

}  // namespace nlh::gauge
