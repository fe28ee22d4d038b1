#pragma once

// Lattice connections: group elements on the oriented edges of a flat cubical
// complex.  U_a(v) transports from v to v + e_a; the reversed edge carries the
// inverse.  Gauge transformations act by U_a(v) -> g(v) U_a(v) g(v + e_a)^{-1}.
//
// Algebra-valued fields (curvature, gradients, residuals) are Cochains with
// three components in the orthonormal algebra chart of nlh::lie.

#include "nlh/cochain.hpp"
#include "nlh/density.hpp"
#include "nlh/lie.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nlh::gauge {

template <class G>
class LatticeConnection {
public:
  using Matrix = typename G::Matrix;

  /// All links identity.  The complex must carry the identity metric.
  explicit LatticeConnection(ComplexPtr complex);

  const Complex& complex() const { return *complex_; }
  const ComplexPtr& complex_ptr() const { return complex_; }
  std::size_t num_links() const { return links_.size(); }

  const Matrix& link(std::size_t edge) const { return links_[edge]; }
  Matrix& link(std::size_t edge) { return links_[edge]; }
  /// U_a(v); v is wrapped on periodic axes.
  const Matrix& link(int axis, const MultiIndex& v) const;
  std::size_t edge_index(int axis, const MultiIndex& v) const;

  double unitarity_defect() const;

private:
  ComplexPtr complex_;
  std::vector<Matrix> links_;
};

template <class G>
using GaugeTransform = std::vector<typename G::Matrix>;

enum class LinkBoundary {
  /// Links lying in the boundary of the box are held fixed.
  Fixed,
  /// Every link varies; the boundary condition is the natural one.
  Free,
};

/// Edges lying inside a boundary face of a non-periodic axis.
std::vector<bool> tangential_boundary_links(const Complex& k);

/// U_e = exp(h_a A_e) from a 1-cochain with three components.
template <class G>
LatticeConnection<G> connection_from_algebra(const Cochain& a);

/// A_e = log(U_e) / h_a.
template <class G>
Cochain algebra_from_connection(const LatticeConnection<G>& conn);

/// F_p = log(U_a(v) U_b(v+e_a) U_a(v+e_b)^{-1} U_b(v)^{-1}) / (h_a h_b) on every
/// plaquette with axes a < b.  Throws LogBranchError naming the plaquette.
template <class G>
Cochain curvature(const LatticeConnection<G>& conn);

/// Q per top cell: sum over plane orientations of the mean |F_p|^2 over the
/// cell's plaquettes of that orientation.
template <class G>
Cochain gauge_Q(const LatticeConnection<G>& conn);

/// 1/2 sum_cells vol W(Q).
template <class G>
double gauge_energy(const LatticeConnection<G>& conn, const DensityModel& model);

/// Derivative of gauge_energy under U_e -> exp(t X) U_e, per edge.
template <class G>
Cochain energy_gradient(const LatticeConnection<G>& conn, const DensityModel& model);

template <class G>
LatticeConnection<G> apply_gauge(const LatticeConnection<G>& conn, const GaugeTransform<G>& g);

struct ElResidual {
  /// D*(rho F) per edge; equals energy_gradient * h_a / vol.
  Cochain total;
  /// Plain difference part delta(rho F).
  Cochain plain;
  /// Bracket part total - plain.
  Cochain bracket;
};

template <class G>
ElResidual el_residual(const LatticeConnection<G>& conn, const DensityModel& model);

struct BianchiResult {
  /// ||product of the six conjugated face holonomies - I||_max per 3-cell and
  /// axis triple (one component per triple).
  Cochain group_defect;
  /// |D_a F_bc - D_b F_ac + D_c F_ab| per 3-cell and axis triple.
  Cochain log_residual;
  double max_group_defect = 0.0;
  double max_log_residual = 0.0;
  /// Covariant residual components (3 per triple).
  Cochain log_residual_vec;
};

/// Requires n >= 3; for n = 2 the boundary of the single 2-cell telescopes
/// trivially and an empty result is returned.
template <class G>
BianchiResult bianchi_residual(const LatticeConnection<G>& conn);

struct WeakResidualResult {
  double max_ratio = 0.0;
  /// Per test: weak pairing sum vol <D zeta, rho F> and strong pairing
  /// sum vol <zeta, el_residual>, and ||zeta||_{1,2}.
  std::vector<double> weak, strong, norms;
};

/// Covariant lattice derivative of an edge field, one value per plaquette.
template <class G>
Cochain covariant_d(const LatticeConnection<G>& conn, const Cochain& zeta);

template <class G>
WeakResidualResult weak_residual(const LatticeConnection<G>& conn, const DensityModel& model,
                                 int num_tests, std::uint64_t seed,
                                 LinkBoundary boundary = LinkBoundary::Fixed);

struct MinimizeOptions {
  double tol = 1e-8;
  int max_iters = 20000;
  double armijo = 1e-4;
  LinkBoundary boundary = LinkBoundary::Fixed;
  /// Trial steps with max Q >= q_limit are rejected; <= 0 selects Q_crit when
  /// the model has one, else Q_max.
  double q_limit = 0.0;
};

struct MinimizeReport {
  bool converged = false;
  bool line_search_failed = false;
  int iterations = 0;
  double energy = 0.0;
  double grad_sup = 0.0;
  double max_q = 0.0;
  std::vector<double> energy_history;
  std::vector<double> grad_history;
  std::string message;
};

/// Steepest descent on the links, U -> exp(-eta X) U, with a
/// Barzilai-Borwein trial step and Armijo backtracking.
template <class G>
LatticeConnection<G> minimize(const LatticeConnection<G>& start, const DensityModel& model,
                              const MinimizeOptions& options, MinimizeReport& report);

// Test configurations.

template <class G>
LatticeConnection<G> random_connection(ComplexPtr k, lie::Rng& rng, double amplitude);
template <class G>
LatticeConnection<G> haar_connection(ComplexPtr k, lie::Rng& rng);
template <class G>
GaugeTransform<G> random_gauge(const Complex& k, lie::Rng& rng);
/// g(x) = exp(eps * sum_m c_m sin(k_m . x + phi_m)), a few random smooth modes.
template <class G>
GaugeTransform<G> smooth_gauge(const Complex& k, lie::Rng& rng, double eps);
/// Links exp(h_a theta_e L) for a scalar 1-cochain theta and fixed unit axis L.
template <class G>
LatticeConnection<G> abelian_embedding(const Cochain& theta, const lie::Vec3& axis);
/// A = B x^a dx^b L (a != b), x measured from the grid origin.
template <class G>
LatticeConnection<G> constant_field(ComplexPtr k, double B, int a, int b, const lie::Vec3& axis);

}  // namespace nlh::gauge
