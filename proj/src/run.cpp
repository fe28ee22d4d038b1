#include "run_detail.hpp"

#include "nlh/cochain_io.hpp"
#include "nlh/dec.hpp"
#include "nlh/errors.hpp"
#include "nlh/flow.hpp"
#include "nlh/gauge_fix.hpp"
#include "nlh/gauge_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace nlh::run {

namespace fs = std::filesystem;
using report::make_check;
using report::Sense;
using report::Series;

namespace detail {

void note_output(Context& ctx, const std::string& name) {
  ctx.result.outputs.emplace_back(name, report::sha256_file(ctx.dir / name));
}

void save_cochain(Context& ctx, const std::string& name, const Cochain& c) {
  io::save_cochain_csv(ctx.dir / (name + ".csv"), c);
  io::save_cochain_binary(ctx.dir / (name + ".bin"), c);
  note_output(ctx, name + ".csv");
  note_output(ctx, name + ".bin");
}

nlohmann::json series_json(const Series& s) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& [x, y] : s) a.push_back({report::finite(x), report::finite(y)});
  return a;
}

void add_series(report::Report& rep, const std::string& name, const Series& s) {
  rep.section("series")[name] = series_json(s);
}

gauge::MinimizeOptions minimize_options(const config::RunConfig& cfg) {
  gauge::MinimizeOptions o;
  o.tol = cfg.gauge.tol;
  o.max_iters = cfg.gauge.max_iters;
  o.boundary = cfg.gauge.boundary == "free" ? gauge::LinkBoundary::Free : gauge::LinkBoundary::Fixed;
  return o;
}

template <class G>
gauge::LatticeConnection<G> initial_connection(const config::RunConfig& cfg, ComplexPtr k, lie::Rng& rng) {
  const auto& g = cfg.gauge;
  if (g.init == "identity") return gauge::LatticeConnection<G>(k);
  if (g.init == "random") return gauge::random_connection<G>(k, rng, g.amplitude);
  if (g.init == "haar") return gauge::haar_connection<G>(k, rng);
  if (g.init == "constant-field")
    return gauge::constant_field<G>(k, g.field_strength, g.plane[0], g.plane[1], lie::Vec3(0.0, 0.0, 1.0));
  auto conn = io::load_connection<G>(g.input, k);
  return conn;
}

template gauge::LatticeConnection<lie::SU2> initial_connection<lie::SU2>(const config::RunConfig&, ComplexPtr,
                                                                          lie::Rng&);
template gauge::LatticeConnection<lie::SO3> initial_connection<lie::SO3>(const config::RunConfig&, ComplexPtr,
                                                                          lie::Rng&);

flow::FlowProblem flow_problem(const config::RunConfig& cfg) {
  flow::FlowProblem p;
  p.complex = config::build_complex(cfg.grid);
  p.density = config::build_density(cfg.density);
  const Complex& k = *p.complex;
  const int n = k.dim();
  p.boundary_phi.assign(k.num_vertices(), 0.0);
  const double len0 = k.cells_along(0) * k.spacing(0);
  for (std::size_t v = 0; v < k.num_vertices(); ++v) {
    const Point x = k.vertex_point(k.cell(0, v).base);
    double phi = 0.0;
    for (int a = 0; a < n && a < static_cast<int>(cfg.flow.velocity.size()); ++a)
      phi += cfg.flow.velocity[a] * (x[a] - k.origin(a));
    if (cfg.flow.bump != 0.0) phi += cfg.flow.bump * std::sin(std::numbers::pi * (x[0] - k.origin(0)) / len0);
    p.boundary_phi[v] = phi;
  }
  for (const auto& f : cfg.flow.faces)
    p.faces.push_back(f == "neumann" ? flow::FaceKind::Neumann : flow::FaceKind::Dirichlet);
  if (cfg.flow.circulation != 0.0) {
    Cochain lambda(p.complex, 1);
    const unsigned mask = 1u << cfg.flow.circulation_axis;
    for (std::size_t e = 0; e < k.num_cells(1); ++e)
      if (k.cell(1, e).mask == mask) lambda.at(e) = cfg.flow.circulation * k.spacing(cfg.flow.circulation_axis);
    p.lambda = std::move(lambda);
  }
  return p;
}

nlohmann::json certificate_json(const EllipticityCertificate& c) {
  nlohmann::json j{{"q_lo", c.q_lo},           {"q_hi", c.q_hi},   {"k", c.k},
                   {"q_exponent", c.q_exponent}, {"samples", c.samples}, {"K", report::finite(c.K)},
                   {"min_margin", c.min_margin}, {"max_margin", c.max_margin}, {"passed", c.passed},
                   {"message", c.message}};
  if (c.failure_q) j["failure_q"] = *c.failure_q;
  return j;
}

flow::FlowOptions flow_options(const config::RunConfig& cfg) {
  flow::FlowOptions o;
  o.tol = cfg.flow.tol;
  o.max_iters = cfg.flow.max_iters;
  o.q_cap_epsilon = cfg.flow.q_cap_epsilon;
  return o;
}

std::string describe_location(const Complex& k, std::size_t top_cell) {
  const Point c = k.cell_center(k.dim(), top_cell);
  std::ostringstream os;
  os << "top cell " << top_cell << " at (";
  for (int a = 0; a < k.dim(); ++a) os << (a ? ", " : "") << c[a];
  os << ")";
  return os.str();
}

void write_heatmap(Context& ctx, const std::string& name, const Cochain& top) {
  if (top.complex().dim() < 2) return;
  const auto img = report::top_cell_image(top);
  report::write_ppm(ctx.dir / name, img.values, img.width, img.height);
  note_output(ctx, name);
}

}  // namespace detail

using detail::Context;

namespace {

Series history(const std::vector<double>& v) {
  Series s;
  for (std::size_t i = 0; i < v.size(); ++i) s.emplace_back(static_cast<double>(i), v[i]);
  return s;
}

// ---- solve-flow ----

void run_solve_flow(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto problem = detail::flow_problem(cfg);
  const auto opts = detail::flow_options(cfg);
  const auto sol = flow::solve_flow(problem, opts);
  auto& rep = ctx.result.report;

  detail::save_cochain(ctx, "phi", sol.phi);
  detail::save_cochain(ctx, "omega", sol.omega);
  detail::save_cochain(ctx, "q", sol.q);
  detail::write_heatmap(ctx, "q.ppm", sol.q);

  Series residual, energy;
  nlohmann::json log = nlohmann::json::array();
  for (const auto& it : sol.log) {
    residual.emplace_back(it.iter, it.residual);
    energy.emplace_back(it.iter, it.energy);
    log.push_back({it.iter, it.energy, it.residual, it.max_q});
  }
  detail::add_series(rep, "flow_residual", residual);
  detail::add_series(rep, "flow_energy", energy);

  auto& sec = rep.section("flow");
  sec["energy"] = sol.energy;
  sec["max_q"] = sol.max_q;
  sec["mach_ratio"] = sol.mach_ratio;
  sec["q_cap"] = sol.q_cap;
  sec["iterations"] = sol.iterations;
  sec["used_fallback"] = sol.used_fallback;
  sec["phi_sha256"] = report::digest_cochain(sol.phi);
  sec["log"] = log;
  rep.section("condition2") = detail::certificate_json(sol.certificate);

  const double tol = opts.tol > 0.0 ? opts.tol
                                    : (problem.density.kind() == DensityModel::Kind::Constant ? 1e-10 : 1e-8);
  rep.add(make_check("flow.residual", "discrete Euler-Lagrange residual of the flow energy", ctx.inputs_digest,
                     sol.residual_max, tol, Sense::AtMost, residual));
  if (problem.density.q_crit())
    rep.add(make_check("flow.subsonic", "max Q below the sonic value", ctx.inputs_digest, sol.mach_ratio,
                       1.0 - cfg.flow.q_cap_epsilon, Sense::AtMost));
  rep.add(make_check("flow.ellipticity", "rho + 2 Q rho' positive on the attained Q range", ctx.inputs_digest,
                     sol.certificate.min_margin, 0.0, Sense::AtLeast, {}, sol.certificate.message));
}

// ---- solve-gauge ----

template <class G>
void record_connection_outputs(Context& ctx, const gauge::LatticeConnection<G>& conn, const std::string& name) {
  io::save_connection(ctx.dir / (name + ".nlhconn"), conn);
  detail::note_output(ctx, name + ".nlhconn");
}

template <class G>
void run_solve_gauge(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto k = config::build_complex(cfg.grid);
  const auto model = config::build_density(cfg.density);
  lie::Rng rng(cfg.seed);
  const auto start = detail::initial_connection<G>(cfg, k, rng);
  auto& rep = ctx.result.report;

  gauge::MinimizeReport mr;
  const auto opts = detail::minimize_options(cfg);
  const auto conn = gauge::minimize(start, model, opts, mr);

  record_connection_outputs(ctx, conn, "connection");
  const Cochain q = gauge::gauge_Q(conn);
  detail::save_cochain(ctx, "q", q);
  detail::write_heatmap(ctx, "q.ppm", q);

  const Series energy = history(mr.energy_history), grad = history(mr.grad_history);
  detail::add_series(rep, "gauge_energy", energy);
  detail::add_series(rep, "gauge_grad_sup", grad);

  auto& sec = rep.section("gauge");
  sec["group"] = G::name;
  sec["energy"] = mr.energy;
  sec["grad_sup"] = mr.grad_sup;
  sec["max_q"] = mr.max_q;
  sec["iterations"] = mr.iterations;
  sec["converged"] = mr.converged;
  sec["message"] = mr.message;

  rep.add(make_check("gauge.gradient", "sup-norm of the energy gradient at the minimizer", ctx.inputs_digest,
                     mr.grad_sup, cfg.gauge.tol, Sense::AtMost, grad, mr.message));
  double worst_rise = 0.0;
  for (std::size_t i = 1; i < mr.energy_history.size(); ++i)
    worst_rise = std::max(worst_rise, mr.energy_history[i] - mr.energy_history[i - 1]);
  const double e0 = mr.energy_history.empty() ? 1.0 : std::abs(mr.energy_history.front());
  rep.add(make_check("gauge.energy_monotone", "largest energy increase between iterates", ctx.inputs_digest,
                     worst_rise, 1e-13 * std::max(1.0, e0), Sense::AtMost, energy));
  const auto weak = gauge::weak_residual(conn, model, cfg.gauge.weak_tests, cfg.seed + 1, opts.boundary);
  rep.add(make_check("gauge.weak_residual", "weak Euler-Lagrange pairing against test 1-forms", ctx.inputs_digest,
                     weak.max_ratio, 1e-6, Sense::AtMost));
  if (k->dim() >= 3) {
    const auto b = gauge::bianchi_residual(conn);
    rep.add(make_check("gauge.bianchi", "conjugated cube-face holonomy product", ctx.inputs_digest,
                       b.max_group_defect, 1e-12, Sense::AtMost));
  }
}

// ---- gauge-fix ----

template <class G>
void save_transform(Context& ctx, const gauge::GaugeTransform<G>& g, ComplexPtr k) {
  Cochain c(k, 0, G::stored_reals);
  for (std::size_t v = 0; v < g.size(); ++v) G::to_reals(g[v], &c.at(v, 0));
  detail::save_cochain(ctx, "gauge_transform", c);
}

template <class G>
void run_gauge_fix(Context& ctx) {
  const auto& cfg = ctx.cfg;
  auto k = config::build_complex(cfg.grid);
  lie::Rng rng(cfg.seed);
  const auto conn = detail::initial_connection<G>(cfg, k, rng);
  auto& rep = ctx.result.report;
  gauge::GaugeTransform<G> g;
  std::optional<gauge::LatticeConnection<G>> fixed;
  auto& sec = rep.section("gauge_fix");
  sec["group"] = G::name;
  sec["mode"] = cfg.fix.mode;

  if (cfg.fix.mode == "coulomb") {
    gauge::CoulombOptions opts;
    opts.tol = cfg.fix.tol;
    opts.max_sweeps = cfg.fix.max_sweeps;
    gauge::CoulombReport cr;
    fixed = gauge::coulomb_gauge_fix(conn, opts, g, cr);
    sec["maximize_sweeps"] = cr.maximize_sweeps;
    sec["polish_sweeps"] = cr.polish_sweeps;
    sec["functional"] = cr.functional;
    sec["sobolev_ratio_n2"] = report::finite(cr.ratio_n2);
    sec["sobolev_ratio_s"] = report::finite(cr.ratio_s);
    rep.add(make_check("gauge_fix.divergence", "sup of the link-log divergence at interior vertices",
                       ctx.inputs_digest, cr.div_sup, cfg.fix.tol, Sense::AtMost, {}, cr.message));
  } else {
    MultiIndex origin{};
    for (int a = 0; a < k->dim(); ++a)
      origin[a] = cfg.fix.origin.empty() ? k->cells_along(a) / 2 : cfg.fix.origin[a];
    const auto mode = cfg.fix.exponential == "tree" ? gauge::ExponentialMode::AxisTree
                                                    : gauge::ExponentialMode::RadialTransport;
    gauge::ExponentialReport er;
    fixed = gauge::exponential_gauge_fix(conn, origin, mode, g, er);
    sec["exponential"] = cfg.fix.exponential;
    sec["bound_ratio"] = report::finite(er.bound_ratio);
    sec["origin_norm"] = er.origin_norm;
    if (mode == gauge::ExponentialMode::AxisTree)
      rep.add(make_check("gauge_fix.tree_links", "max |log U| over the spanning-tree links", ctx.inputs_digest,
                         er.tree_defect, 1e-12, Sense::AtMost));
    else
      rep.add(make_check("gauge_fix.radial_bound", "|A(x)| against |x|/2 sup |F|", ctx.inputs_digest,
                         er.bound_ratio, 1.1, Sense::AtMost));
  }

  const Cochain q0 = gauge::gauge_Q(conn), q1 = gauge::gauge_Q(*fixed);
  double diff = 0.0;
  for (std::size_t i = 0; i < q0.values().size(); ++i) diff = std::max(diff, std::abs(q0.values()[i] - q1.values()[i]));
  rep.add(make_check("gauge_fix.q_invariance", "pointwise Q unchanged by the gauge transformation",
                     ctx.inputs_digest, diff / std::max(q0.max_abs(), 1e-300), 1e-10, Sense::AtMost));

  record_connection_outputs(ctx, *fixed, "fixed");
  save_transform<G>(ctx, g, k);
  detail::save_cochain(ctx, "q", q1);
  detail::write_heatmap(ctx, "q.ppm", q1);
}

// ---- artifacts ----

void render_series(const fs::path& dir, const nlohmann::json& rep, std::vector<std::string>& written) {
  fs::create_directories(dir / "series");
  auto write = [&](const std::string& name, const nlohmann::json& arr) {
    Series s;
    for (const auto& p : arr) s.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    const std::string file = "series/" + name + ".csv";
    report::write_series_csv(dir / file, s, "x", "y");
    written.push_back(file);
  };
  if (rep.contains("series"))
    for (const auto& [name, arr] : rep["series"].items()) write(name, arr);
  for (const auto& c : rep.at("checks"))
    if (c.contains("series")) write("check_" + c.at("check").get<std::string>(), c["series"]);
  if (rep.contains("flow") && rep["flow"].contains("log")) {
    std::ostringstream os;
    os << "iter,energy,residual,max_q\n";
    char buf[128];
    for (const auto& row : rep["flow"]["log"]) {
      std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.at(0).get<int>(), row.at(1).get<double>(),
                    row.at(2).get<double>(), row.at(3).get<double>());
      os << buf;
    }
    report::write_text(dir / "convergence.csv", os.str());
    written.push_back("convergence.csv");
  }
}

nlohmann::json manifest_config(const config::RunConfig& cfg) {
  auto j = config::echo(cfg);
  j["run"].erase("output");
  return j;
}

std::string error_type(const std::exception& e, nlohmann::json& details) {
  if (auto* x = dynamic_cast<const ConfigError*>(&e)) {
    details["line"] = x->line();
    return "ConfigError";
  }
  if (auto* x = dynamic_cast<const SonicLimitError*>(&e)) {
    details["cell"] = x->cell();
    details["q"] = x->q();
    return "SonicLimitError";
  }
  if (auto* x = dynamic_cast<const DomainError*>(&e)) {
    details["q"] = report::finite(x->q());
    details["q_max"] = report::finite(x->q_max());
    return "DomainError";
  }
  if (auto* x = dynamic_cast<const LogBranchError*>(&e)) {
    details["plaquette"] = x->plaquette();
    return "LogBranchError";
  }
  if (auto* x = dynamic_cast<const MetricError*>(&e)) {
    details["vertex"] = x->vertex();
    return "MetricError";
  }
  if (auto* x = dynamic_cast<const BallError*>(&e)) {
    details["max_radius"] = x->max_radius();
    return "BallError";
  }
  if (dynamic_cast<const ConvergenceError*>(&e)) return "ConvergenceError";
  if (dynamic_cast<const DegreeError*>(&e)) return "DegreeError";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "InternalError";
}

template <template <class> class Fn>
void by_group(const std::string& group, Context& ctx) {
  if (group == "SO3")
    Fn<lie::SO3>{}(ctx);
  else
    Fn<lie::SU2>{}(ctx);
}

template <class G>
struct SolveGauge {
  void operator()(Context& c) const { run_solve_gauge<G>(c); }
};
template <class G>
struct GaugeFix {
  void operator()(Context& c) const { run_gauge_fix<G>(c); }
};

config::GridConfig grid_from_json(const nlohmann::json& j) {
  config::GridConfig g;
  g.dims = j.at("dims").get<std::vector<int>>();
  g.spacing = j.at("spacing").get<std::vector<double>>();
  g.origin = j.at("origin").get<std::vector<double>>();
  for (int b : j.at("periodic").get<std::vector<int>>()) g.periodic.push_back(b != 0);
  g.metric = j.at("metric").get<std::string>();
  g.conformal_amplitude = j.at("conformal_amplitude").get<double>();
  return g;
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("NLH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 256) return static_cast<int>(v);
  }
  return 1;
}

RunResult run(const config::RunConfig& cfg, std::ostream& log) {
  RunResult result;
  const auto t0 = std::chrono::steady_clock::now();
  result.output_dir = cfg.output.empty() ? fs::path("runs") / cfg.name : fs::path(cfg.output);
  fs::create_directories(result.output_dir);
  const nlohmann::json mcfg = manifest_config(cfg);
  Context ctx{cfg, result.output_dir, report::sha256_hex(mcfg.dump()), log, result, resolve_threads(cfg.threads)};
  log << "run " << cfg.name << ": " << cfg.module << " -> " << result.output_dir.string() << "\n";

  bool failed_with_error = false;
  try {
    if (cfg.module == "solve-flow")
      run_solve_flow(ctx);
    else if (cfg.module == "solve-gauge")
      by_group<SolveGauge>(cfg.gauge.group, ctx);
    else if (cfg.module == "gauge-fix")
      by_group<GaugeFix>(cfg.gauge.group, ctx);
    else if (cfg.module == "verify")
      detail::run_verify(ctx);
    else
      throw InvalidArgument("module '" + cfg.module + "' cannot be run from a config; use the report subcommand");
  } catch (const std::exception& e) {
    failed_with_error = true;
    nlohmann::json details = nlohmann::json::object();
    const std::string type = error_type(e, details);
    nlohmann::json err{{"type", type}, {"message", e.what()}, {"details", details}};
    report::write_text(result.output_dir / "error.json", err.dump(2) + "\n");
    detail::note_output(ctx, "error.json");
    result.report.section("error") = err;
    result.error = type + ": " + e.what();
    log << "error: " << result.error << "\n";
  }

  const nlohmann::json rj = result.report.to_json();
  report::write_text(result.output_dir / "report.json", rj.dump(2) + "\n");
  detail::note_output(ctx, "report.json");
  std::vector<std::string> series;
  render_series(result.output_dir, rj, series);
  for (const auto& f : series) detail::note_output(ctx, f);

  std::sort(result.outputs.begin(), result.outputs.end());
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& [f, d] : result.outputs) outputs.push_back({{"file", f}, {"sha256", d}});
  nlohmann::json manifest{{"toolkit_version", kToolkitVersion},
                          {"name", cfg.name},
                          {"module", cfg.module},
                          {"seed", cfg.seed},
                          {"config_digest", ctx.inputs_digest},
                          {"config", mcfg},
                          {"outputs", outputs},
                          {"all_passed", !failed_with_error && result.report.all_passed()}};
  report::write_text(result.output_dir / "manifest.json", manifest.dump(2) + "\n");

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::json timing{{"wall_seconds", wall}, {"threads", ctx.threads}};
  report::write_text(result.output_dir / "timing.json", timing.dump(2) + "\n");

  for (const auto& c : result.report.checks())
    log << (c.pass ? "PASS " : "FAIL ") << c.check << "  measured " << c.measured << "  threshold " << c.threshold
        << "\n";
  result.exit_code = failed_with_error ? 2 : (result.report.all_passed() ? 0 : 1);
  return result;
}

RunResult rerender(const fs::path& dir, std::ostream& log) {
  RunResult result;
  result.output_dir = dir;
  const auto read_json = [&](const std::string& name) {
    std::ifstream is(dir / name);
    if (!is) throw InvalidArgument("run directory lacks " + name + ": " + dir.string());
    return nlohmann::json::parse(is);
  };
  const nlohmann::json manifest = read_json("manifest.json");
  const nlohmann::json rep = read_json("report.json");
  std::vector<std::string> written;
  render_series(dir, rep, written);
  if (fs::exists(dir / "q.bin")) {
    const auto grid = grid_from_json(manifest.at("config").at("grid"));
    const auto k = config::build_complex(grid);
    const Cochain q = io::load_cochain_binary(dir / "q.bin", k);
    if (k->dim() >= 2) {
      const auto img = report::top_cell_image(q);
      report::write_ppm(dir / "q.ppm", img.values, img.width, img.height);
      written.push_back("q.ppm");
    }
  }
  for (const auto& f : written) log << "wrote " << (dir / f).string() << "\n";
  for (const auto& c : rep.at("checks")) result.report.add(report::check_from_json(c));
  result.exit_code = result.report.all_passed() && !rep.contains("error") ? 0 : 1;
  return result;
}

}  // namespace nlh::run
