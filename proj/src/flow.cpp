#include "nlh/flow.hpp"

#include "nlh/dec.hpp"
#include "nlh/errors.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace nlh::flow {
namespace {

// Per top cell: w_a = sum_j coef[a][j] * phi[corner j] + lambda_bar[a].
struct CellStencil {
  std::vector<std::size_t> corners;
  std::vector<double> lambda_bar;  // n
  MetricMatrix ginv;
  double weight = 0.0;  // sqrt(g) * vol
};

class Assembler {
public:
  explicit Assembler(const FlowProblem& p) : problem_(p), k_(*p.complex), n_(k_.dim()) {
    const std::size_t ntop = k_.num_cells(n_);
    cells_.resize(ntop);
    std::vector<double> lam_avg;
    if (p.lambda) lam_avg = dec::cell_averaged_components(*p.lambda);
    scale_.resize(n_);
    for (int a = 0; a < n_; ++a) scale_[a] = 1.0 / ((1 << (n_ - 1)) * k_.spacing(a));
    for (std::size_t t = 0; t < ntop; ++t) {
      CellStencil& c = cells_[t];
      c.corners = k_.corners(t);
      c.lambda_bar.assign(n_, 0.0);
      if (p.lambda)
        for (int a = 0; a < n_; ++a) c.lambda_bar[a] = lam_avg[t * n_ + a];
      c.ginv = k_.cell_inverse_metric(t);
      c.weight = k_.cell_sqrt_det(t) * k_.cell_volume();
    }
  }

  std::size_t num_cells() const { return cells_.size(); }
  const CellStencil& cell(std::size_t t) const { return cells_[t]; }

  // Coefficient of corner j in w_a.
  double coef(int a, std::size_t j) const { return ((j >> a) & 1u) ? scale_[a] : -scale_[a]; }

  Eigen::VectorXd omega(std::size_t t, const std::vector<double>& phi) const {
    const CellStencil& c = cells_[t];
    Eigen::VectorXd w(n_);
    for (int a = 0; a < n_; ++a) {
      double s = 0.0;
      for (std::size_t j = 0; j < c.corners.size(); ++j) s += coef(a, j) * phi[c.corners[j]];
      w[a] = s + c.lambda_bar[a];
    }
    return w;
  }

  double q_of(std::size_t t, const Eigen::VectorXd& w) const {
    return std::max(0.0, w.dot(cells_[t].ginv * w));
  }

  double max_q(const std::vector<double>& phi, std::size_t* where = nullptr) const {
    double m = 0.0;
    for (std::size_t t = 0; t < cells_.size(); ++t) {
      const double q = q_of(t, omega(t, phi));
      if (q > m || std::isnan(q)) {
        m = q;
        if (where) *where = t;
      }
    }
    return m;
  }

  double energy(const std::vector<double>& phi, const DensityModel& model) const {
    double e = 0.0;
    for (std::size_t t = 0; t < cells_.size(); ++t) {
      const double q = q_of(t, omega(t, phi));
      if (!model.in_domain(q)) {
        std::ostringstream ss;
        ss << "energy undefined: Q = " << q << " at top cell " << t << " leaves the density domain";
        throw DomainError(ss.str(), q, model.q_max());
      }
      e += cells_[t].weight * model.stored_energy_integrand(q);
    }
    return 0.5 * e;
  }

  std::vector<double> gradient(const std::vector<double>& phi, const DensityModel& model) const {
    std::vector<double> g(k_.num_vertices(), 0.0);
    for (std::size_t t = 0; t < cells_.size(); ++t) {
      const CellStencil& c = cells_[t];
      const Eigen::VectorXd w = omega(t, phi);
      const double q = q_of(t, w);
      if (!model.in_domain(q)) {
        std::ostringstream ss;
        ss << "residual undefined: Q = " << q << " at top cell " << t << " leaves the density domain";
        throw DomainError(ss.str(), q, model.q_max());
      }
      const Eigen::VectorXd gw = c.weight * model.rho(q) * (c.ginv * w);
      for (std::size_t j = 0; j < c.corners.size(); ++j) {
        double s = 0.0;
        for (int a = 0; a < n_; ++a) s += gw[a] * coef(a, j);
        g[c.corners[j]] += s;
      }
    }
    return g;
  }

  // Hessian restricted to free vertices; `slot` maps vertex -> unknown index
  // (or -1).  linear == true drops the rho' term and uses rho == 1.
  Eigen::SparseMatrix<double> hessian(const std::vector<double>& phi, const DensityModel& model,
                                      const std::vector<long>& slot, long nfree, bool linear) const {
    std::vector<Eigen::Triplet<double>> trip;
    const std::size_t nc = std::size_t{1} << n_;
    trip.reserve(cells_.size() * nc * nc);
    Eigen::MatrixXd B(n_, nc);
    for (int a = 0; a < n_; ++a)
      for (std::size_t j = 0; j < nc; ++j) B(a, j) = coef(a, j);
    for (std::size_t t = 0; t < cells_.size(); ++t) {
      const CellStencil& c = cells_[t];
      Eigen::MatrixXd M;
      if (linear) {
        M = c.weight * c.ginv;
      } else {
        const Eigen::VectorXd w = omega(t, phi);
        const double q = q_of(t, w);
        const Eigen::VectorXd gw = c.ginv * w;
        M = c.weight * (model.rho(q) * Eigen::MatrixXd(c.ginv) + 2.0 * model.drho(q) * gw * gw.transpose());
      }
      const Eigen::MatrixXd local = B.transpose() * M * B;
      for (std::size_t i = 0; i < nc; ++i) {
        const long si = slot[c.corners[i]];
        if (si < 0) continue;
        for (std::size_t j = 0; j < nc; ++j) {
          const long sj = slot[c.corners[j]];
          if (sj < 0) continue;
          trip.emplace_back(si, sj, local(i, j));
        }
      }
    }
    Eigen::SparseMatrix<double> H(nfree, nfree);
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
  }

private:
  const FlowProblem& problem_;
  const Complex& k_;
  int n_;
  std::vector<CellStencil> cells_;
  std::vector<double> scale_;
};

std::vector<double> vertex_weights(const Complex& k) {
  std::vector<double> w(k.num_vertices());
  for (std::size_t v = 0; v < w.size(); ++v) w[v] = k.cell_volume() * k.sqrt_det(v);
  return w;
}

}  // namespace

void validate(const FlowProblem& p) {
  if (!p.complex) throw InvalidArgument("flow problem has no complex");
  const Complex& k = *p.complex;
  if (p.boundary_phi.size() != k.num_vertices())
    throw InvalidArgument("boundary_phi must have one value per vertex");
  for (double v : p.boundary_phi)
    if (!std::isfinite(v)) throw InvalidArgument("boundary data must be finite");
  if (!p.faces.empty() && p.faces.size() != static_cast<std::size_t>(2 * k.dim()))
    throw InvalidArgument("faces must list 2n boundary conditions");
  if (p.lambda) {
    if (p.lambda->degree() != 1 || p.lambda->components() != 1 || p.lambda->complex_ptr() != p.complex)
      throw InvalidArgument("lambda must be a scalar 1-cochain on the problem's complex");
    if (k.dim() > 1) {
      const Cochain dl = dec::exterior_derivative(*p.lambda);
      if (dl.max_abs() != 0.0)
        throw InvalidArgument("lambda is not closed: max |d lambda| = " + std::to_string(dl.max_abs()));
    }
  }
}

std::vector<bool> dirichlet_vertices(const FlowProblem& p) {
  const Complex& k = *p.complex;
  std::vector<bool> fixed(k.num_vertices(), false);
  bool any = false;
  for (std::size_t v = 0; v < fixed.size(); ++v) {
    const auto x = k.cell(0, v).base;
    for (int a = 0; a < k.dim() && !fixed[v]; ++a) {
      if (k.periodic(a)) continue;
      for (int side = 0; side < 2; ++side) {
        const bool on_face = side == 0 ? x[a] == 0 : x[a] == k.cells_along(a);
        const FaceKind kind = p.faces.empty() ? FaceKind::Dirichlet : p.faces[2 * a + side];
        if (on_face && kind == FaceKind::Dirichlet) fixed[v] = true;
      }
    }
    any = any || fixed[v];
  }
  if (!any) fixed[0] = true;
  return fixed;
}

Cochain velocity_form(const FlowProblem& p, const Cochain& phi) {
  Cochain w = dec::exterior_derivative(phi);
  if (p.lambda) w += *p.lambda;
  return w;
}

double flow_energy(const FlowProblem& p, const Cochain& phi) {
  validate(p);
  return Assembler(p).energy(phi.values(), p.density);
}

std::vector<double> flow_energy_gradient(const FlowProblem& p, const Cochain& phi) {
  validate(p);
  return Assembler(p).gradient(phi.values(), p.density);
}

Cochain flow_residual(const FlowProblem& p, const Cochain& phi) {
  validate(p);
  const auto g = Assembler(p).gradient(phi.values(), p.density);
  const auto fixed = dirichlet_vertices(p);
  const auto w = vertex_weights(*p.complex);
  Cochain r(p.complex, 0, 1);
  for (std::size_t v = 0; v < g.size(); ++v) r.at(v) = fixed[v] ? 0.0 : g[v] / w[v];
  return r;
}

FlowSolution solve_flow(const FlowProblem& p, const FlowOptions& opt) {
  validate(p);
  const Complex& k = *p.complex;
  const DensityModel& model = p.density;
  const bool linear_model = model.kind() == DensityModel::Kind::Constant;
  const double tol = opt.tol > 0.0 ? opt.tol : (linear_model ? 1e-10 : 1e-8);
  if (!(opt.q_cap_epsilon > 0.0 && opt.q_cap_epsilon < 1.0))
    throw InvalidArgument("q_cap_epsilon must lie in (0, 1)");

  double q_cap = std::numeric_limits<double>::infinity();
  if (auto qc = model.q_crit())
    q_cap = (1.0 - opt.q_cap_epsilon) * *qc;
  else if (std::isfinite(model.q_max()))
    q_cap = (1.0 - opt.q_cap_epsilon) * model.q_max();
  const double cert_hi = std::isfinite(q_cap) ? q_cap : 100.0;
  EllipticityCertificate cert = certify_condition2(model, 0.0, cert_hi, 0.0, 0.0);
  if (!cert.passed)
    throw InvalidArgument("ellipticity certificate fails on [0, Q_cap]: " + cert.message);

  const auto fixed = dirichlet_vertices(p);
  std::vector<long> slot(k.num_vertices(), -1);
  long nfree = 0;
  for (std::size_t v = 0; v < fixed.size(); ++v)
    if (!fixed[v]) slot[v] = nfree++;

  Assembler as(p);
  std::vector<double> phi(k.num_vertices(), 0.0);
  for (std::size_t v = 0; v < phi.size(); ++v)
    if (fixed[v]) phi[v] = p.boundary_phi[v];

  const auto free_vector = [&](const std::vector<double>& full) {
    Eigen::VectorXd out(nfree);
    for (std::size_t v = 0; v < full.size(); ++v)
      if (slot[v] >= 0) out[slot[v]] = full[v];
    return out;
  };

  // rho == 1 start: a single exact linear solve.
  if (nfree > 0) {
    const auto H = as.hessian(phi, model, slot, nfree, true);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
    if (ldlt.info() != Eigen::Success) throw ConvergenceError("linear start: factorization failed");
    const Eigen::VectorXd g = free_vector(as.gradient(phi, DensityModel::constant()));
    const Eigen::VectorXd step = ldlt.solve(-g);
    for (std::size_t v = 0; v < phi.size(); ++v)
      if (slot[v] >= 0) phi[v] += step[slot[v]];
  }
  {
    std::size_t where = 0;
    const double mq = as.max_q(phi, &where);
    if (mq > q_cap) {
      std::ostringstream ss;
      ss << "sonic limit: initial iterate has Q = " << mq << " > Q_cap = " << q_cap << " at top cell " << where;
      throw SonicLimitError(ss.str(), where, mq);
    }
  }

  const auto wv = vertex_weights(k);
  const auto residual_max = [&](const std::vector<double>& g) {
    double m = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v)
      if (slot[v] >= 0) m = std::max(m, std::abs(g[v] / wv[v]));
    return m;
  };

  FlowSolution sol{Cochain(p.complex, 0), Cochain(p.complex, 1), Cochain(p.complex, k.dim()), 0.0, 0.0,
                   0.0, 0.0, q_cap, 0, false, {}, cert};
  double energy = as.energy(phi, model);
  Eigen::VectorXd prev_dir, prev_grad;
  bool converged = false;
  int iter = 0;
  for (;; ++iter) {
    const auto gfull = as.gradient(phi, model);
    const double res = residual_max(gfull);
    sol.log.push_back({iter, energy, res, as.max_q(phi)});
    if (res <= tol || nfree == 0) {
      converged = true;
      break;
    }
    if (iter >= opt.max_iters) break;

    const Eigen::VectorXd g = free_vector(gfull);
    Eigen::VectorXd dir;
    bool newton_ok = false;
    {
      const auto H = as.hessian(phi, model, slot, nfree, false);
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
      if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all()) {
        dir = ldlt.solve(-g);
        newton_ok = ldlt.info() == Eigen::Success && dir.allFinite() && dir.dot(g) < 0.0;
      }
    }
    if (!newton_ok) {
      // Polak-Ribiere+ conjugate gradient direction.
      sol.used_fallback = true;
      dir = -g;
      if (prev_dir.size() == g.size()) {
        const double beta = std::max(0.0, g.dot(g - prev_grad) / prev_grad.squaredNorm());
        dir += beta * prev_dir;
        if (dir.dot(g) >= 0.0) dir = -g;
      }
    }
    prev_dir = dir;
    prev_grad = g;

    const double slope = g.dot(dir);
    double alpha = 1.0;
    bool accepted = false;
    bool sonic_blocked = false;
    std::size_t sonic_cell = 0;
    double sonic_q = 0.0;
    std::vector<double> trial(phi.size());
    while (alpha > 1e-12) {
      trial = phi;
      for (std::size_t v = 0; v < phi.size(); ++v)
        if (slot[v] >= 0) trial[v] += alpha * dir[slot[v]];
      std::size_t where = 0;
      const double mq = as.max_q(trial, &where);
      if (!(mq <= q_cap)) {
        sonic_blocked = true;
        sonic_cell = where;
        sonic_q = mq;
        alpha *= 0.5;
        continue;
      }
      const double e_trial = as.energy(trial, model);
      // Near the solution the decrease drops below rounding of E; then the
      // residual decides.
      const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(energy));
      const bool unresolved = -alpha * slope <= noise && e_trial <= energy + noise &&
                              residual_max(as.gradient(trial, model)) < res;
      if (e_trial <= energy + 1e-4 * alpha * slope || unresolved) {
        phi.swap(trial);
        energy = e_trial;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (sonic_blocked) {
        std::ostringstream ss;
        ss << "sonic limit: every damped step exceeds Q_cap = " << q_cap << " (Q = " << sonic_q
           << " at top cell " << sonic_cell << ")";
        throw SonicLimitError(ss.str(), sonic_cell, sonic_q);
      }
      // No decrease is representable: accept the current iterate when its
      // residual is within round-off of the tolerance, else fail.
      if (res <= 100.0 * tol) {
        converged = true;
        break;
      }
      throw ConvergenceError("flow line search failed at iteration " + std::to_string(iter) +
                             " with residual " + std::to_string(res));
    }
  }
  if (!converged)
    throw ConvergenceError("solve_flow did not converge in " + std::to_string(opt.max_iters) +
                           " iterations (residual " + std::to_string(sol.log.back().residual) + ")");

  sol.phi = Cochain(p.complex, 0, 1, phi);
  sol.omega = velocity_form(p, sol.phi);
  sol.q = dec::pointwise_Q(sol.omega);
  sol.energy = energy;
  sol.max_q = sol.q.max_abs();
  if (auto qc = model.q_crit()) sol.mach_ratio = sol.max_q / *qc;
  sol.residual_max = sol.log.back().residual;
  sol.iterations = iter;
  return sol;
}

Cochain parallel_residual(const Cochain& v) {
  const Complex& k = v.complex();
  const int n = k.dim();
  if (v.degree() != 0 || v.components() != n)
    throw InvalidArgument("parallel_residual expects a vertex field with n components");
  Cochain out(v.complex_ptr(), 0, n * n);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto x = k.cell(0, i).base;
    for (int beta = 0; beta < n; ++beta) {
      MultiIndex xp = x, xm = x;
      ++xp[beta];
      --xm[beta];
      const auto ip = k.find(0, 0u, xp);
      const auto im = k.find(0, 0u, xm);
      for (int alpha = 0; alpha < n; ++alpha) {
        double deriv = 0.0;
        if (ip && im)
          deriv = (v.at(*ip, alpha) - v.at(*im, alpha)) / (2.0 * k.spacing(beta));
        else if (ip)
          deriv = (v.at(*ip, alpha) - v.at(i, alpha)) / k.spacing(beta);
        else if (im)
          deriv = (v.at(i, alpha) - v.at(*im, alpha)) / k.spacing(beta);
        double conn = 0.0;
        for (int gamma = 0; gamma < n; ++gamma) conn += v.at(i, gamma) * k.christoffel(i, alpha, gamma, beta);
        out.at(i, alpha * n + beta) = deriv + conn;
      }
    }
  }
  return out;
}

}  // namespace nlh::flow
