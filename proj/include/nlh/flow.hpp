#pragma once

// Abelian nonlinear Hodge system for 1-forms, delta(rho(Q) w) = 0, dw = 0,
// solved through the potential ansatz w = d(phi) + lambda with a fixed
// closed 1-cochain lambda carrying the circulation.

#include "nlh/cochain.hpp"
#include "nlh/density.hpp"

#include <optional>
#include <vector>

namespace nlh::flow {

enum class FaceKind { Dirichlet, Neumann };

struct FlowProblem {
  ComplexPtr complex;
  DensityModel density = DensityModel::constant();
  /// Per-vertex potential; only read at Dirichlet vertices.
  std::vector<double> boundary_phi;
  /// One entry per boundary face, index 2*axis + side (side 1 = upper face).
  /// Empty means Dirichlet everywhere.  Entries for periodic axes are ignored.
  std::vector<FaceKind> faces;
  /// Closed 1-cochain (d lambda = 0); absent means zero.
  std::optional<Cochain> lambda;
};

/// Throws InvalidArgument when shapes are inconsistent or d(lambda) != 0.
void validate(const FlowProblem& problem);

/// Vertices whose potential is prescribed.  With no Dirichlet face at all,
/// vertex 0 is pinned to fix the additive constant.
std::vector<bool> dirichlet_vertices(const FlowProblem& problem);

/// w = d(phi) + lambda.
Cochain velocity_form(const FlowProblem& problem, const Cochain& phi);

/// E = 1/2 sum_cells W(Q) sqrt(g) vol, Q from cell-averaged components of w.
double flow_energy(const FlowProblem& problem, const Cochain& phi);

/// dE/dphi at every vertex.
std::vector<double> flow_energy_gradient(const FlowProblem& problem, const Cochain& phi);

/// Discrete delta(rho(Q) w) at free vertices: the energy gradient divided by
/// the vertex weight vol * sqrt(g); zero at Dirichlet vertices.
Cochain flow_residual(const FlowProblem& problem, const Cochain& phi);

struct FlowOptions {
  /// Max-norm residual tolerance; <= 0 selects 1e-10 for rho == 1, else 1e-8.
  double tol = 0.0;
  int max_iters = 100;
  /// Q_cap = (1 - eps) Q_crit.
  double q_cap_epsilon = 0.05;
};

struct FlowIterate {
  int iter = 0;
  double energy = 0.0;
  double residual = 0.0;
  double max_q = 0.0;
};

struct FlowSolution {
  Cochain phi;
  Cochain omega;
  Cochain q;  // n-cochain, one value per top cell
  double energy = 0.0;
  double max_q = 0.0;
  /// max Q / Q_crit (0 for models without a sonic point).
  double mach_ratio = 0.0;
  double residual_max = 0.0;
  double q_cap = 0.0;
  int iterations = 0;
  bool used_fallback = false;
  std::vector<FlowIterate> log;
  EllipticityCertificate certificate;
};

/// Damped Newton on the free vertex potentials, started from the rho == 1
/// solution.  Throws SonicLimitError when an iterate would exceed Q_cap and
/// ConvergenceError after max_iters.
FlowSolution solve_flow(const FlowProblem& problem, const FlowOptions& options = {});

/// Covariant derivative d_beta v^alpha + v^gamma Gamma^alpha_{gamma beta} of a
/// vertex vector field (0-cochain with n components).  Returns a 0-cochain
/// with n*n components, index alpha*n + beta.  Centred differences inside,
/// one-sided at non-periodic boundaries.
Cochain parallel_residual(const Cochain& v);

}  // namespace nlh::flow
