#include "nlh/config.hpp"

#include "nlh/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace nlh::config {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

double to_double(const std::string& s, const std::string& key, int line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(key + ": expected a number, got '" + s + "'", line);
  return v;
}

long long to_int(const std::string& s, const std::string& key, int line) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError(key + ": expected an integer, got '" + s + "'", line);
  return v;
}

bool to_bool(const std::string& s, const std::string& key, int line) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'", line);
}

void one_of(const std::string& v, std::initializer_list<const char*> allowed, const std::string& key, int line) {
  for (const char* a : allowed)
    if (v == a) return;
  std::string msg = key + ": '" + v + "' is not one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg, line);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto dbl = [](auto proj) {
      return [proj](RunConfig& c, const std::string& k, const std::string& v, int l) { proj(c) = to_double(v, k, l); };
    };
    auto integer = [](auto proj, long long lo, long long hi) {
      return [proj, lo, hi](RunConfig& c, const std::string& k, const std::string& v, int l) {
        const long long x = to_int(v, k, l);
        if (x < lo || x > hi)
          throw ConfigError(k + ": " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]", l);
        proj(c) = static_cast<std::remove_reference_t<decltype(proj(c))>>(x);
      };
    };
    auto text = [](auto proj) {
      return [proj](RunConfig& c, const std::string&, const std::string& v, int) { proj(c) = v; };
    };
    auto dlist = [](auto proj) {
      return [proj](RunConfig& c, const std::string& k, const std::string& v, int l) {
        proj(c).clear();
        for (const auto& s : split_list(v)) proj(c).push_back(to_double(s, k, l));
      };
    };
    auto ilist = [](auto proj) {
      return [proj](RunConfig& c, const std::string& k, const std::string& v, int l) {
        proj(c).clear();
        for (const auto& s : split_list(v)) proj(c).push_back(static_cast<int>(to_int(s, k, l)));
      };
    };
    auto slist = [](auto proj) {
      return [proj](RunConfig& c, const std::string&, const std::string& v, int) { proj(c) = split_list(v); };
    };

    t["run.name"] = text([](RunConfig& c) -> auto& { return c.name; });
    t["run.module"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      if (std::find(kModules.begin(), kModules.end(), v) == kModules.end())
        throw ConfigError(k + ": unknown module '" + v + "'", l);
      c.module = v;
    };
    t["run.seed"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      const long long x = to_int(v, k, l);
      if (x < 0) throw ConfigError(k + ": seed must be nonnegative", l);
      c.seed = static_cast<std::uint64_t>(x);
    };
    t["run.output"] = text([](RunConfig& c) -> auto& { return c.output; });
    t["run.threads"] = integer([](RunConfig& c) -> auto& { return c.threads; }, 1, 256);

    t["grid.dims"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.grid.dims.clear();
      for (const auto& s : split_list(v)) {
        const long long x = to_int(s, k, l);
        if (x < 1 || x > 4096) throw ConfigError(k + ": cell counts must lie in [1, 4096]", l);
        c.grid.dims.push_back(static_cast<int>(x));
      }
      if (c.grid.dims.size() < 1 || c.grid.dims.size() > kMaxDim)
        throw ConfigError(k + ": dimension must be 1.." + std::to_string(kMaxDim), l);
    };
    t["grid.spacing"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.grid.spacing.clear();
      for (const auto& s : split_list(v)) {
        const double h = to_double(s, k, l);
        if (!(h > 0.0)) throw ConfigError(k + ": spacing must be positive", l);
        c.grid.spacing.push_back(h);
      }
    };
    t["grid.origin"] = dlist([](RunConfig& c) -> auto& { return c.grid.origin; });
    t["grid.periodic"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.grid.periodic.clear();
      for (const auto& s : split_list(v)) c.grid.periodic.push_back(to_bool(s, k, l));
    };
    t["grid.metric"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      one_of(v, {"identity", "conformal"}, k, l);
      c.grid.metric = v;
    };
    t["grid.conformal_amplitude"] = dbl([](RunConfig& c) -> auto& { return c.grid.conformal_amplitude; });

    t["density.kind"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      one_of(v, {"constant", "polytropic", "minimal-surface", "tabulated"}, k, l);
      c.density.kind = v;
    };
    t["density.gamma"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      const double g = to_double(v, k, l);
      if (!(g > 1.0)) throw ConfigError(k + ": polytropic gamma must be > 1, got " + v, l);
      c.density.gamma = g;
    };
    t["density.table_path"] = text([](RunConfig& c) -> auto& { return c.density.table_path; });

    t["flow.velocity"] = dlist([](RunConfig& c) -> auto& { return c.flow.velocity; });
    t["flow.bump"] = dbl([](RunConfig& c) -> auto& { return c.flow.bump; });
    t["flow.faces"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      c.flow.faces = split_list(v);
      for (const auto& f : c.flow.faces) one_of(f, {"dirichlet", "neumann"}, k, l);
    };
    t["flow.circulation"] = dbl([](RunConfig& c) -> auto& { return c.flow.circulation; });
    t["flow.circulation_axis"] = integer([](RunConfig& c) -> auto& { return c.flow.circulation_axis; }, 0, kMaxDim - 1);
    t["flow.tol"] = dbl([](RunConfig& c) -> auto& { return c.flow.tol; });
    t["flow.max_iters"] = integer([](RunConfig& c) -> auto& { return c.flow.max_iters; }, 1, 100000);
    t["flow.q_cap_epsilon"] = dbl([](RunConfig& c) -> auto& { return c.flow.q_cap_epsilon; });

    t["gauge.group"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      one_of(v, {"SU2", "SO3"}, k, l);
      c.gauge.group = v;
    };
    t["gauge.init"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      one_of(v, {"identity", "random", "haar", "constant-field", "file"}, k, l);
      c.gauge.init = v;
    };
    t["gauge.amplitude"] = dbl([](RunConfig& c) -> auto& { return c.gauge.amplitude; });
    t["gauge.field_strength"] = dbl([](RunConfig& c) -> auto& { return c.gauge.field_strength; });
    t["gauge.plane"] = ilist([](RunConfig& c) -> auto& { return c.gauge.plane; });
    t["gauge.input"] = text([](RunConfig& c) -> auto& { return c.gauge.input; });
    t["gauge.boundary"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      one_of(v, {"fixed", "free"}, k, l);
      c.gauge.boundary = v;
    };
    t["gauge.tol"] = dbl([](RunConfig& c) -> auto& { return c.gauge.tol; });
    t["gauge.max_iters"] = integer([](RunConfig& c) -> auto& { return c.gauge.max_iters; }, 0, 10000000);
    t["gauge.weak_tests"] = integer([](RunConfig& c) -> auto& { return c.gauge.weak_tests; }, 1, 100000);

    t["fix.mode"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      one_of(v, {"coulomb", "exponential"}, k, l);
      c.fix.mode = v;
    };
    t["fix.exponential"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      one_of(v, {"tree", "radial"}, k, l);
      c.fix.exponential = v;
    };
    t["fix.origin"] = ilist([](RunConfig& c) -> auto& { return c.fix.origin; });
    t["fix.tol"] = dbl([](RunConfig& c) -> auto& { return c.fix.tol; });
    t["fix.max_sweeps"] = integer([](RunConfig& c) -> auto& { return c.fix.max_sweeps; }, 1, 10000000);

    t["verify.checks"] = slist([](RunConfig& c) -> auto& { return c.verify.checks; });
    t["verify.field"] = [](RunConfig& c, const std::string& k, const std::string& v, int l) {
      one_of(v, {"flow", "uniform-flow", "gauge"}, k, l);
      c.verify.field = v;
    };
    t["verify.c0"] = dbl([](RunConfig& c) -> auto& { return c.verify.c0; });
    t["verify.k"] = dbl([](RunConfig& c) -> auto& { return c.verify.k; });
    t["verify.q_exponent"] = dbl([](RunConfig& c) -> auto& { return c.verify.q_exponent; });
    t["verify.radii"] = dlist([](RunConfig& c) -> auto& { return c.verify.radii; });
    t["verify.samples"] = integer([](RunConfig& c) -> auto& { return c.verify.samples; }, 1, 100000000);
    return t;
  }();
  return table;
}

void load_table(DensityConfig& d, const std::filesystem::path& base_dir, int line) {
  std::filesystem::path path(d.table_path);
  if (path.is_relative()) path = base_dir / path;
  std::ifstream is(path);
  if (!is) throw ConfigError("density.table_path: cannot open " + path.string(), line);
  std::string row;
  int row_no = 0;
  while (std::getline(is, row)) {
    ++row_no;
    const auto hash = row.find('#');
    if (hash != std::string::npos) row = row.substr(0, hash);
    const auto cols = split_list(trim(row));
    if (cols.empty()) continue;
    const std::string where = "density table row " + std::to_string(row_no);
    if (cols.size() != 2) throw ConfigError(where + ": expected Q,rho", line);
    double q = 0.0, rho = 0.0;
    try {
      q = to_double(cols[0], where, line);
      rho = to_double(cols[1], where, line);
    } catch (const ConfigError&) {
      if (d.table_q.empty() && row_no == 1) continue;  // header
      throw;
    }
    d.table_q.push_back(q);
    d.table_rho.push_back(rho);
  }
  if (d.table_q.size() < 2) throw ConfigError("density table needs at least two rows", line);
}

void validate(const RunConfig& c, const std::map<std::string, Entry>& seen) {
  auto line_of = [&](const std::string& key) {
    auto it = seen.find(key);
    return it == seen.end() ? 0 : it->second.line;
  };
  if (c.name.empty()) throw ConfigError("missing required key run.name", 0);
  if (c.grid.dims.empty()) throw ConfigError("missing required key grid.dims", 0);
  const std::size_t n = c.grid.dims.size();
  if (c.grid.spacing.size() != 1 && c.grid.spacing.size() != n)
    throw ConfigError("grid.spacing: give one value or one per axis", line_of("grid.spacing"));
  if (!c.grid.origin.empty() && c.grid.origin.size() != n)
    throw ConfigError("grid.origin: needs one value per axis", line_of("grid.origin"));
  if (!c.grid.periodic.empty() && c.grid.periodic.size() != n)
    throw ConfigError("grid.periodic: needs one value per axis", line_of("grid.periodic"));
  if (c.density.kind == "tabulated" && c.density.table_path.empty())
    throw ConfigError("density.kind = tabulated needs density.table_path", line_of("density.kind"));
  if (!c.flow.velocity.empty() && c.flow.velocity.size() != n)
    throw ConfigError("flow.velocity: needs one value per axis", line_of("flow.velocity"));
  if (!c.flow.faces.empty() && c.flow.faces.size() != 2 * n)
    throw ConfigError("flow.faces: needs 2n entries", line_of("flow.faces"));
  if (c.flow.circulation_axis >= static_cast<int>(n))
    throw ConfigError("flow.circulation_axis: outside the grid", line_of("flow.circulation_axis"));
  if (!(c.flow.q_cap_epsilon > 0.0 && c.flow.q_cap_epsilon < 1.0))
    throw ConfigError("flow.q_cap_epsilon must lie in (0, 1)", line_of("flow.q_cap_epsilon"));
  if (c.gauge.plane.size() != 2 || c.gauge.plane[0] == c.gauge.plane[1] || c.gauge.plane[0] < 0 ||
      c.gauge.plane[1] < 0 || c.gauge.plane[0] >= static_cast<int>(n) || c.gauge.plane[1] >= static_cast<int>(n))
    throw ConfigError("gauge.plane: two distinct axes of the grid", line_of("gauge.plane"));
  if (c.gauge.init == "file" && c.gauge.input.empty())
    throw ConfigError("gauge.init = file needs gauge.input", line_of("gauge.init"));
  if (!c.fix.origin.empty() && c.fix.origin.size() != n)
    throw ConfigError("fix.origin: needs one index per axis", line_of("fix.origin"));
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::map<std::string, Entry> seen;
  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("malformed section header '" + s + "'", line);
      section = trim(s.substr(1, s.size() - 2));
      static const std::vector<std::string> known{"run", "grid", "density", "flow", "gauge", "fix", "verify"};
      if (std::find(known.begin(), known.end(), section) == known.end())
        throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", line);
    if (section.empty()) throw ConfigError("key outside any section", line);
    const std::string key = section + "." + trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key " + key, line);
    if (auto prev = seen.find(key); prev != seen.end())
      throw ConfigError("duplicate key " + key + " (first on line " + std::to_string(prev->second.line) + ")", line);
    seen[key] = {value, line};
    it->second(cfg, key, value, line);
  }
  validate(cfg, seen);
  if (cfg.density.kind == "tabulated") {
    load_table(cfg.density, base_dir, seen.at("density.table_path").line);
    try {
      (void)build_density(cfg.density);
    } catch (const Error& e) {
      throw ConfigError(std::string("density table: ") + e.what(), seen.at("density.table_path").line);
    }
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string(), 0);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path.parent_path());
}

nlohmann::json echo(const RunConfig& c) {
  nlohmann::json j;
  j["run"] = {{"name", c.name}, {"module", c.module}, {"seed", c.seed}, {"output", c.output}};
  std::vector<int> periodic;
  for (bool b : c.grid.periodic) periodic.push_back(b ? 1 : 0);
  j["grid"] = {{"dims", c.grid.dims}, {"spacing", c.grid.spacing}, {"origin", c.grid.origin},
               {"periodic", periodic}, {"metric", c.grid.metric}, {"conformal_amplitude", c.grid.conformal_amplitude}};
  j["density"] = {{"kind", c.density.kind}, {"gamma", c.density.gamma}, {"table_path", c.density.table_path},
                  {"table_q", c.density.table_q}, {"table_rho", c.density.table_rho}};
  j["flow"] = {{"velocity", c.flow.velocity}, {"bump", c.flow.bump}, {"faces", c.flow.faces},
               {"circulation", c.flow.circulation}, {"circulation_axis", c.flow.circulation_axis},
               {"tol", c.flow.tol}, {"max_iters", c.flow.max_iters}, {"q_cap_epsilon", c.flow.q_cap_epsilon}};
  j["gauge"] = {{"group", c.gauge.group}, {"init", c.gauge.init}, {"amplitude", c.gauge.amplitude},
                {"field_strength", c.gauge.field_strength}, {"plane", c.gauge.plane}, {"input", c.gauge.input},
                {"boundary", c.gauge.boundary}, {"tol", c.gauge.tol}, {"max_iters", c.gauge.max_iters},
                {"weak_tests", c.gauge.weak_tests}};
  j["fix"] = {{"mode", c.fix.mode}, {"exponential", c.fix.exponential}, {"origin", c.fix.origin},
              {"tol", c.fix.tol}, {"max_sweeps", c.fix.max_sweeps}};
  j["verify"] = {{"checks", c.verify.checks}, {"field", c.verify.field}, {"c0", c.verify.c0}, {"k", c.verify.k},
                 {"q_exponent", c.verify.q_exponent}, {"radii", c.verify.radii}, {"samples", c.verify.samples}};
  return j;
}

ComplexPtr build_complex(const GridConfig& g) {
  GridSpec spec{g.dims, g.spacing, g.origin, g.periodic};
  if (spec.spacing.size() == 1) spec.spacing.assign(g.dims.size(), g.spacing[0]);
  if (g.metric == "identity") return std::make_shared<Complex>(spec);
  // Conformal factor vanishing on the box boundary.
  const Complex probe(spec);
  std::vector<double> u(probe.num_vertices());
  for (std::size_t v = 0; v < u.size(); ++v) {
    const Point x = probe.vertex_point(probe.cell(0, v).base);
    double s = g.conformal_amplitude;
    for (int a = 0; a < probe.dim(); ++a) {
      const double len = probe.cells_along(a) * probe.spacing(a);
      s *= std::sin(3.14159265358979323846 * (x[a] - probe.origin(a)) / len);
    }
    u[v] = s;
  }
  return std::make_shared<Complex>(spec, MetricSpec::conformal(std::move(u)));
}

DensityModel build_density(const DensityConfig& d) {
  if (d.kind == "constant") return DensityModel::constant();
  if (d.kind == "polytropic") return DensityModel::polytropic(d.gamma);
  if (d.kind == "minimal-surface") return DensityModel::minimal_surface();
  return DensityModel::tabulated(d.table_q, d.table_rho);
}

}  // namespace nlh::config
