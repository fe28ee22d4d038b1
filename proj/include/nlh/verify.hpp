#pragma once

// Numerical diagnostics for the analytic statements behind the solvers:
// the mean-value decomposition of the nonlinear flux, the divergence-form
// inequality satisfied by Q, Campanato decay and its gauge invariance,
// difference-quotient commutation and the Gaffney ratio.

#include "nlh/cochain.hpp"
#include "nlh/density.hpp"
#include "nlh/flow.hpp"
#include "nlh/gauge.hpp"

#include <Eigen/Dense>

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace nlh::verify {

// ---- mean-value decomposition ----

/// Metric data at a point, acting on p-form components.
struct MetricPoint {
  Eigen::VectorXd x;      // coordinates
  Eigen::MatrixXd ginv;   // induced inverse metric on p-form components
  double sqrt_g = 1.0;
};

/// Flat metric on p-forms in n dimensions at x.
MetricPoint flat_point(const Eigen::VectorXd& x, int p);
/// Metric of a complex vertex acting on p-form components.
MetricPoint complex_point(const Complex& k, std::size_t vertex, int p);

/// G(x, w) = sqrt(g) rho(Q(w)) g^{-1} w with Q(w) = w^T g^{-1} w.
Eigen::VectorXd flux(const DensityModel& model, const MetricPoint& at, const Eigen::VectorXd& w);
/// dG/dw.
Eigen::MatrixXd flux_jacobian(const DensityModel& model, const MetricPoint& at, const Eigen::VectorXd& w);

struct MeanValueSample {
  Eigen::MatrixXd alpha;
  Eigen::MatrixXd beta;  // components x n
  double min_eigenvalue = 0.0;
  double max_eigenvalue = 0.0;
  /// |G(xi,mu) - G(eta,tau) - alpha (mu - tau) - beta (xi - eta)| / scale.
  double identity_residual = 0.0;
  /// |beta| / (|mu| + |tau|).
  double beta_constant = 0.0;
  double segment_q_min = 0.0;
  double segment_q_max = 0.0;
  bool positive_definite = false;
};

/// alpha = int_0^1 dG/dw(xi, tau + t (mu - tau)) dt (32-point Gauss);
/// beta = (G(xi,tau) - G(eta,tau)) (xi - eta)^T / |xi - eta|^2 (zero when xi == eta).
MeanValueSample sibner_decomposition(const DensityModel& model, const MetricPoint& xi, const MetricPoint& eta,
                                     const Eigen::VectorXd& mu, const Eigen::VectorXd& tau);

// ---- divergence-form inequality ----

/// Cell-centred data for the inequality check.
struct EllipticInput {
  ComplexPtr complex;
  /// 1 for a velocity form, 2 for a curvature.
  int degree = 1;
  /// Per top cell: C(n,degree) orientation blocks of `components` reals.
  std::vector<double> field;
  int components = 1;
  /// Per top cell.
  std::vector<double> q;
  /// Per top cell |grad A| + |A|^2 (zero for abelian fields).
  std::vector<double> connection_weight;
};

EllipticInput elliptic_input_from_flow(const flow::FlowSolution& sol);
/// A from link logs of the connection as given (fix the gauge beforehand).
template <class G>
EllipticInput elliptic_input_from_connection(const gauge::LatticeConnection<G>& conn);

struct EllipticReport {
  double k = 0.0;
  double q_exponent = 0.0;
  double tol_h = 0.0;
  std::size_t cells_checked = 0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
  /// Top cells whose coefficient matrix is not positive-definite.
  std::vector<std::size_t> indefinite_cells;
  /// Smallest C >= 0 with L(Q) + C (Q+k)^q w Q >= -tol_h on every checked cell.
  double c_min = 0.0;
  bool c_feasible = true;
  double min_lq = 0.0;
  bool passed = false;
};

inline constexpr double kMaxInequalityConstant = 1e6;

/// a_kj = (rho/2 + Q rho') delta_kj - rho' <dx^k ^ F, dx^j ^ F>, which equals
/// rho/2 delta_kj + rho' sum_{m,a} F^a_km F^a_jm, and
/// L(Q) = sum_k d_k (a_kj d_j Q) in flux form, on cells at least two cells
/// from every non-periodic boundary.  tol_h = c0 * max h.
EllipticReport elliptic_inequality_check(const EllipticInput& in, const DensityModel& model, double k,
                                         double q_exponent, double c0);

/// The coefficient matrix of one cell from its averaged components.
Eigen::MatrixXd inequality_coefficients(const DensityModel& model, int n, int degree, int components,
                                   const double* field, double q);

// ---- Campanato decay ----

struct DecayFit {
  /// Slope of log(seminorm) against log(r).
  double slope = 0.0;
  /// (slope - n) / 2.
  double exponent = 0.0;
  double constant = 0.0;
  double residual = 0.0;
  /// Every seminorm vanished: the field is constant on the balls.
  bool exact_constant = false;
  std::vector<std::pair<double, double>> series;
};

/// Fits over radii (ascending after sorting), dropping the `exclude`
/// smallest.  Throws InvalidArgument with fewer than 4 usable radii.
DecayFit campanato_decay_fit(const Cochain& field, const Point& center, std::vector<double> radii,
                             int exclude = 2);

struct GaugeCampanatoReport {
  std::vector<double> radii;
  std::vector<double> original, transformed, modulus, field_l2;
  /// max over radii of transformed - bound.
  double worst_excess = 0.0;
  bool bound_holds = true;
  /// modulus at the smallest radius below 0.25.
  bool within_hypothesis = true;
  double exponent_shift = 0.0;
  DecayFit fit_original, fit_transformed;
};

/// Transforms F_p -> Ad_{g(base p)} F_p and compares seminorms with the
/// bound (1+m)^2 S + (1 + 1/(m(2+m))) m^2 ||F||^2, m the modulus of
/// continuity sup ||Ad(g(x) g(s)^{-1}) - I|| over the ball.
template <class G>
GaugeCampanatoReport gauge_invariance_campanato(const Cochain& f, const gauge::GaugeTransform<G>& g,
                                                const Point& center, const std::vector<double>& radii,
                                                int exclude = 2);

// ---- difference quotients ----

/// (c(cell + s e_axis) - c(cell)) / step with s = step / h; zero where the
/// shifted cell does not exist.  Throws when step is not a nonzero multiple of h.
Cochain difference_quotient(const Cochain& c, int axis, double step);

struct CommutationResult {
  double max_diff_d = 0.0;
  double max_diff_delta = 0.0;
  std::size_t cells_d = 0;
  std::size_t cells_delta = 0;
};

/// Compares Delta(d c) with d(Delta c) and Delta(delta c) with
/// delta(Delta c) on the cells where both are defined.
CommutationResult commutation_check(const Cochain& c, int axis, double step);

// ---- Gaffney ----

struct GaffneyResult {
  double grad_sq = 0.0;
  double d_sq = 0.0;
  double delta_sq = 0.0;
  double l2_sq = 0.0;
  /// |grad A|^2 / (|dA|^2 + |delta A|^2 + |A|^2).
  double full_ratio = 0.0;
  /// |grad A|^2 / |dA|^2; infinite with hypothesis_failed when dA = 0.
  double coulomb_ratio = 0.0;
  bool hypothesis_failed = false;
};

/// Flat complexes only; gradients by forward differences along every axis.
GaffneyResult gaffney_ratio(const Cochain& a);

}  // namespace nlh::verify
