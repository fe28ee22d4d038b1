#include "run_detail.hpp"

#include "nlh/dec.hpp"
#include "nlh/errors.hpp"
#include "nlh/gauge_fix.hpp"
#include "nlh/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <sstream>

namespace nlh::run {

namespace {

using report::CheckEntry;
using report::make_check;
using report::Sense;
using report::Series;
using detail::Context;

const std::vector<std::string> kChecks{"bianchi",        "campanato", "commutation", "ellipticity", "gaffney",
                                       "gauge-campanato", "sibner",    "sonic",       "weak-residual"};
const std::vector<std::string> kGaugeOnly{"bianchi", "gaffney", "gauge-campanato", "weak-residual"};

// The Gaffney constant is reported; the check only asks for a finite value.
constexpr double kGaffneyBound = 1e6;

struct Outcome {
  std::vector<CheckEntry> entries;
  nlohmann::json details = nlohmann::json::object();
};
using Task = std::function<Outcome()>;

/// The field every check looks at.
struct Field {
  ComplexPtr complex;
  DensityModel model = DensityModel::constant();
  /// Velocity 1-form or curvature 2-form.
  std::optional<Cochain> form;
  std::optional<Cochain> q;
  /// Gauge potential from the Coulomb-fixed links.
  std::optional<Cochain> potential;
  verify::EllipticInput elliptic;
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

Point grid_center(const Complex& k) {
  Point c{};
  for (int a = 0; a < k.dim(); ++a) c[a] = k.origin(a) + 0.5 * k.cells_along(a) * k.spacing(a);
  return c;
}

std::vector<double> default_radii(const Complex& k, const Point& center) {
  const double r_max = dec::max_ball_radius(k, center);
  double h = 0.0;
  for (int a = 0; a < k.dim(); ++a) h = std::max(h, k.spacing(a));
  const double r_min = std::min(1.5 * h, 0.5 * r_max);
  std::vector<double> r;
  const int m = 8;
  for (int i = 0; i < m; ++i) r.push_back(r_min * std::pow(r_max / r_min, static_cast<double>(i) / (m - 1)));
  return r;
}

std::uint64_t check_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
  return seed ^ h;
}

Field uniform_flow_field(const config::RunConfig& cfg) {
  Field f;
  f.complex = config::build_complex(cfg.grid);
  f.model = config::build_density(cfg.density);
  const Complex& k = *f.complex;
  Cochain phi(f.complex, 0);
  for (std::size_t v = 0; v < k.num_vertices(); ++v) {
    const Point x = k.vertex_point(k.cell(0, v).base);
    for (int a = 0; a < k.dim() && a < static_cast<int>(cfg.flow.velocity.size()); ++a)
      phi.at(v) += cfg.flow.velocity[a] * (x[a] - k.origin(a));
  }
  f.form = dec::exterior_derivative(phi);
  f.q = dec::pointwise_Q(*f.form);
  auto& in = f.elliptic;
  in.complex = f.complex;
  in.degree = 1;
  in.components = 1;
  in.field = dec::cell_averaged_components(*f.form);
  in.q = f.q->values();
  in.connection_weight.assign(in.q.size(), 0.0);
  return f;
}

Field solved_flow_field(const config::RunConfig& cfg) {
  const auto problem = detail::flow_problem(cfg);
  const auto sol = flow::solve_flow(problem, detail::flow_options(cfg));
  Field f;
  f.complex = problem.complex;
  f.model = problem.density;
  f.form = sol.omega;
  f.q = sol.q;
  f.elliptic = verify::elliptic_input_from_flow(sol);
  return f;
}

// ---- individual checks ----

Outcome check_sonic(const Field& f, const std::string& digest) {
  Outcome out;
  const Complex& k = *f.complex;
  const auto& q = f.q->values();
  const auto worst = std::max_element(q.begin(), q.end());
  const double q_max = worst == q.end() ? 0.0 : *worst;
  const auto q_crit = f.model.q_crit();
  out.details["max_q"] = q_max;
  if (!q_crit) {
    out.entries.push_back(make_check("sonic.mach_ratio", "max Q over the sonic value", digest, 0.0, 1.0,
                                     Sense::AtMost, {}, "density has no sonic point"));
    return out;
  }
  const auto cert = certify_condition2(f.model, 0.0, std::min(q_max, f.model.q_max() * (1.0 - 1e-9)), 0.0, 0.0);
  std::string note = cert.message;
  std::size_t supersonic = 0;
  std::optional<std::size_t> first;
  for (std::size_t t = 0; t < q.size(); ++t)
    if (q[t] >= *q_crit) {
      ++supersonic;
      if (!first) first = t;
    }
  out.details["q_crit"] = *q_crit;
  out.details["supersonic_cells"] = supersonic;
  if (first) {
    note = std::to_string(supersonic) + " supersonic cells, first at " + detail::describe_location(k, *first) +
           "; worst at " + detail::describe_location(k, static_cast<std::size_t>(worst - q.begin()));
    out.details["first_supersonic_cell"] = *first;
  }
  out.details["condition2"] = detail::certificate_json(cert);
  out.entries.push_back(make_check("sonic.mach_ratio", "max Q over the sonic value", digest, q_max / *q_crit, 1.0,
                                   Sense::AtMost, {}, note));
  return out;
}

Outcome check_ellipticity(const Field& f, const config::RunConfig& cfg, const std::string& digest) {
  Outcome out;
  const auto r = verify::elliptic_inequality_check(f.elliptic, f.model, cfg.verify.k, cfg.verify.q_exponent,
                                                   cfg.verify.c0);
  out.details = {{"cells_checked", r.cells_checked}, {"min_eigenvalue", report::finite(r.min_eigenvalue)},
                 {"c_min", report::finite(r.c_min)},  {"c_feasible", r.c_feasible},
                 {"min_lq", report::finite(r.min_lq)}, {"tol_h", r.tol_h}};
  std::string note;
  if (!r.indefinite_cells.empty())
    note = "first indefinite cell: " + detail::describe_location(*f.complex, r.indefinite_cells.front());
  out.entries.push_back(make_check("ellipticity.indefinite_cells", "coefficient matrix positive-definite", digest,
                                   static_cast<double>(r.indefinite_cells.size()), 0.0, Sense::AtMost, {}, note));
  const double c = r.c_feasible ? r.c_min : std::numeric_limits<double>::infinity();
  out.entries.push_back(make_check("ellipticity.inequality_constant",
                                   "smallest C in the divergence-form inequality for Q", digest, c,
                                   verify::kMaxInequalityConstant, Sense::AtMost));
  return out;
}

Outcome check_sibner(const Field& f, const config::RunConfig& cfg, const std::string& digest) {
  Outcome out;
  const Complex& k = *f.complex;
  const int n = k.dim();
  std::mt19937_64 rng(check_seed(cfg.seed, "sibner"));
  std::uniform_int_distribution<std::size_t> pick(0, k.num_vertices() - 1);
  std::normal_distribution<double> normal;
  const auto q_crit = f.model.q_crit();
  double q_top = 4.0;
  if (q_crit) q_top = std::min(2.0 * *q_crit, 0.95 * f.model.q_max());
  std::uniform_real_distribution<double> uq(0.0, q_top);

  auto sample_w = [&](const verify::MetricPoint& at) {
    Eigen::VectorXd w(n);
    for (int a = 0; a < n; ++a) w[a] = normal(rng);
    const double q0 = w.dot(at.ginv * w);
    return Eigen::VectorXd(w * std::sqrt(uq(rng) / q0));
  };
  double worst = 0.0;
  std::size_t mismatches = 0, definite = 0, indefinite = 0;
  for (int s = 0; s < cfg.verify.samples; ++s) {
    const auto xi = verify::complex_point(k, pick(rng), 1);
    const auto eta = verify::complex_point(k, pick(rng), 1);
    const Eigen::VectorXd mu = sample_w(xi), tau = sample_w(xi);
    const auto m = verify::sibner_decomposition(f.model, xi, eta, mu, tau);
    worst = std::max(worst, m.identity_residual);
    if (!q_crit) {
      if (!m.positive_definite) ++mismatches;
      continue;
    }
    if (m.segment_q_max <= 0.99 * *q_crit) {
      ++definite;
      if (!m.positive_definite) ++mismatches;
    } else if (m.segment_q_min >= 1.01 * *q_crit) {
      ++indefinite;
      if (m.positive_definite) ++mismatches;
    }
  }
  out.details = {{"samples", cfg.verify.samples}, {"subsonic_segments", definite}, {"supersonic_segments", indefinite}};
  out.entries.push_back(make_check("sibner.identity_residual", "mean-value decomposition of the flux", digest, worst,
                                   1e-8, Sense::AtMost));
  out.entries.push_back(make_check("sibner.definiteness", "alpha definite below and indefinite above sonic", digest,
                                   static_cast<double>(mismatches), 0.0, Sense::AtMost));
  return out;
}

Outcome check_campanato(const Field& f, const config::RunConfig& cfg, const std::string& digest) {
  Outcome out;
  const Complex& k = *f.complex;
  const Point c = grid_center(k);
  const auto radii = cfg.verify.radii.empty() ? default_radii(k, c) : cfg.verify.radii;
  const auto fit = verify::campanato_decay_fit(*f.form, c, radii);
  out.details = {{"slope", report::finite(fit.slope)}, {"exponent", report::finite(fit.exponent)},
                 {"exact_constant", fit.exact_constant}, {"residual", fit.residual}};
  out.entries.push_back(make_check("campanato.slope", "log-log decay of the Campanato seminorm", digest, fit.slope,
                                   k.dim() + 0.5, Sense::AtLeast, fit.series,
                                   fit.exact_constant ? "field constant on every ball" : ""));
  return out;
}

Outcome check_commutation(const Field& f, const std::string& digest) {
  Outcome out;
  const Complex& k = *f.complex;
  const double h = k.spacing(0);
  const auto r = verify::commutation_check(*f.form, 0, h);
  const Cochain dq = verify::difference_quotient(*f.form, 0, h);
  const double scale = std::max({dq.max_abs(), dec::exterior_derivative(dq).max_abs(), 1e-300});
  out.details = {{"cells_d", r.cells_d}, {"cells_delta", r.cells_delta}, {"scale", scale}};
  out.entries.push_back(make_check("commutation.d", "difference quotient commutes with d", digest,
                                   r.max_diff_d / scale, 1e-12, Sense::AtMost));
  if (k.flat())
    out.entries.push_back(make_check("commutation.delta", "difference quotient commutes with delta (flat metric)",
                                     digest, r.max_diff_delta / scale, 1e-12, Sense::AtMost));
  else
    out.details["delta_relative"] = r.max_diff_delta / scale;
  return out;
}

Outcome check_gaffney(const Field& f, const std::string& digest) {
  Outcome out;
  const auto r = verify::gaffney_ratio(*f.potential);
  out.details = {{"grad_sq", r.grad_sq}, {"d_sq", r.d_sq}, {"delta_sq", r.delta_sq}, {"l2_sq", r.l2_sq},
                 {"full_ratio", r.full_ratio}, {"hypothesis_failed", r.hypothesis_failed}};
  out.entries.push_back(make_check("gaffney.coulomb_ratio", "|grad A|^2 over |dA|^2 in the Coulomb gauge", digest,
                                   r.coulomb_ratio, kGaffneyBound, Sense::AtMost, {},
                                   r.hypothesis_failed ? "dA vanishes: ratio unbounded" : ""));
  return out;
}

template <class G>
struct GaugeState {
  std::optional<gauge::LatticeConnection<G>> conn;
};

template <class G>
Field gauge_field(const config::RunConfig& cfg, GaugeState<G>& st, nlohmann::json& sec) {
  Field f;
  f.complex = config::build_complex(cfg.grid);
  f.model = config::build_density(cfg.density);
  lie::Rng rng(cfg.seed);
  auto conn = detail::initial_connection<G>(cfg, f.complex, rng);
  if (cfg.gauge.max_iters > 0) {
    gauge::MinimizeReport mr;
    conn = gauge::minimize(conn, f.model, detail::minimize_options(cfg), mr);
    sec["minimize_iterations"] = mr.iterations;
    sec["minimize_grad_sup"] = mr.grad_sup;
  }
  gauge::GaugeTransform<G> g;
  gauge::CoulombReport cr;
  gauge::CoulombOptions co;
  co.tol = cfg.fix.tol;
  co.max_sweeps = cfg.fix.max_sweeps;
  conn = gauge::coulomb_gauge_fix(conn, co, g, cr);
  sec["coulomb_div_sup"] = cr.div_sup;
  f.form = gauge::curvature(conn);
  f.q = gauge::gauge_Q(conn);
  f.potential = gauge::algebra_from_connection(conn);
  f.elliptic = verify::elliptic_input_from_connection(conn);
  st.conn = std::move(conn);
  return f;
}

template <class G>
Outcome check_gauge_campanato(const Field& f, const gauge::LatticeConnection<G>& conn, const config::RunConfig& cfg,
                              const std::string& digest) {
  Outcome out;
  const Complex& k = *f.complex;
  lie::Rng rng(check_seed(cfg.seed, "gauge-campanato"));
  const auto g = gauge::smooth_gauge<G>(k, rng, 0.1);
  const Point c = grid_center(k);
  const auto radii = cfg.verify.radii.empty() ? default_radii(k, c) : cfg.verify.radii;
  const auto r = verify::gauge_invariance_campanato<G>(*f.form, g, c, radii);
  (void)conn;
  out.details = {{"worst_excess", r.worst_excess}, {"within_hypothesis", r.within_hypothesis},
                 {"exponent_shift", report::finite(r.exponent_shift)}};
  out.entries.push_back(make_check("gauge_campanato.exponent_shift", "Campanato exponent under a Lipschitz gauge",
                                   digest, r.exponent_shift, 0.1, Sense::AtMost));
  out.entries.push_back(make_check("gauge_campanato.bound", "transformed seminorm against the continuity bound",
                                   digest, r.worst_excess, 0.0, Sense::AtMost, {},
                                   r.within_hypothesis ? "" : "gauge modulus above the hypothesis"));
  return out;
}

template <class G>
Outcome check_bianchi(const gauge::LatticeConnection<G>& conn, const std::string& digest) {
  Outcome out;
  if (conn.complex().dim() < 3) {
    out.entries.push_back(make_check("bianchi.group_defect", "conjugated cube-face holonomy product", digest, 0.0,
                                     1e-12, Sense::AtMost, {}, "no 3-cells in two dimensions"));
    return out;
  }
  const auto b = gauge::bianchi_residual(conn);
  out.details = {{"max_log_residual", b.max_log_residual}};
  out.entries.push_back(make_check("bianchi.group_defect", "conjugated cube-face holonomy product", digest,
                                   b.max_group_defect, 1e-12, Sense::AtMost));
  return out;
}

template <class G>
Outcome check_weak(const gauge::LatticeConnection<G>& conn, const Field& f, const config::RunConfig& cfg,
                   const std::string& digest) {
  Outcome out;
  const auto opts = detail::minimize_options(cfg);
  const auto w = gauge::weak_residual(conn, f.model, cfg.gauge.weak_tests, check_seed(cfg.seed, "weak-residual"),
                                      opts.boundary);
  out.entries.push_back(make_check("weak_residual.max_ratio", "weak Euler-Lagrange pairing against test 1-forms",
                                   digest, w.max_ratio, 1e-6, Sense::AtMost));
  return out;
}

std::vector<std::string> selected_checks(const config::RunConfig& cfg) {
  const bool gauge_field = cfg.verify.field == "gauge";
  std::vector<std::string> out;
  if (cfg.verify.checks.empty()) {
    for (const auto& c : kChecks)
      if (gauge_field || !contains(kGaugeOnly, c)) out.push_back(c);
    return out;
  }
  for (const auto& c : cfg.verify.checks) {
    if (!contains(kChecks, c)) throw InvalidArgument("unknown check '" + c + "'");
    if (!gauge_field && contains(kGaugeOnly, c)) throw InvalidArgument("check '" + c + "' needs verify.field = gauge");
    if (!contains(out, c)) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Outcome> run_tasks(const std::vector<Task>& tasks, int threads) {
  std::vector<Outcome> results(tasks.size());
  const std::size_t width = static_cast<std::size_t>(std::max(1, threads));
  for (std::size_t start = 0; start < tasks.size(); start += width) {
    std::vector<std::future<Outcome>> batch;
    const std::size_t stop = std::min(tasks.size(), start + width);
    for (std::size_t i = start; i < stop; ++i)
      batch.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, tasks[i]));
    for (std::size_t i = start; i < stop; ++i) results[i] = batch[i - start].get();
  }
  return results;
}

template <class G>
void verify_with(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto names = selected_checks(cfg);
  auto& rep = ctx.result.report;
  auto& sec = rep.section("verify");
  sec["field"] = cfg.verify.field;
  sec["checks_run"] = names;

  GaugeState<G> st;
  Field f;
  if (cfg.verify.field == "gauge")
    f = gauge_field<G>(cfg, st, sec);
  else if (cfg.verify.field == "uniform-flow")
    f = uniform_flow_field(cfg);
  else
    f = solved_flow_field(cfg);
  sec["max_q"] = f.q->max_abs();
  detail::save_cochain(ctx, "q", *f.q);
  detail::write_heatmap(ctx, "q.ppm", *f.q);

  const std::string& digest = ctx.inputs_digest;
  std::vector<Task> tasks;
  for (const auto& name : names) {
    if (name == "sonic") tasks.push_back([&] { return check_sonic(f, digest); });
    if (name == "ellipticity") tasks.push_back([&] { return check_ellipticity(f, cfg, digest); });
    if (name == "sibner") tasks.push_back([&] { return check_sibner(f, cfg, digest); });
    if (name == "campanato") tasks.push_back([&] { return check_campanato(f, cfg, digest); });
    if (name == "commutation") tasks.push_back([&] { return check_commutation(f, digest); });
    if (name == "gaffney") tasks.push_back([&] { return check_gaffney(f, digest); });
    if (name == "gauge-campanato")
      tasks.push_back([&] { return check_gauge_campanato<G>(f, *st.conn, cfg, digest); });
    if (name == "bianchi") tasks.push_back([&] { return check_bianchi<G>(*st.conn, digest); });
    if (name == "weak-residual") tasks.push_back([&] { return check_weak<G>(*st.conn, f, cfg, digest); });
  }
  const auto results = run_tasks(tasks, ctx.threads);
  for (std::size_t i = 0; i < results.size(); ++i) {
    sec["details"][names[i]] = results[i].details;
    if (results[i].details.contains("condition2")) rep.section("condition2") = results[i].details["condition2"];
    for (const auto& e : results[i].entries) rep.add(e);
  }
}

}  // namespace

const std::vector<std::string>& available_checks() { return kChecks; }

namespace detail {

void run_verify(Context& ctx) {
  if (ctx.cfg.gauge.group == "SO3")
    verify_with<lie::SO3>(ctx);
  else
    verify_with<lie::SU2>(ctx);
}

}  // namespace detail

}  // namespace nlh::run
