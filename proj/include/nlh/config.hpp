#pragma once

// Strict INI-style run configuration.  Every key must be known, appear once,
// and parse as its declared type; errors carry the offending line.

#include "nlh/cochain.hpp"
#include "nlh/density.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace nlh::config {

struct GridConfig {
  std::vector<int> dims;
  std::vector<double> spacing{1.0};
  std::vector<double> origin;
  std::vector<bool> periodic;
  /// identity | conformal (u = amplitude * prod_a sin(pi x_a / L_a)).
  std::string metric = "identity";
  double conformal_amplitude = 0.0;
};

struct DensityConfig {
  /// constant | polytropic | minimal-surface | tabulated
  std::string kind = "constant";
  double gamma = 1.4;
  /// CSV of "Q,rho" rows for the tabulated kind, relative to the config file.
  std::string table_path;
  /// Loaded from table_path while parsing.
  std::vector<double> table_q, table_rho;
};

struct FlowConfig {
  /// Potential on Dirichlet vertices: velocity . x + bump * sin(pi x_0 / L_0).
  std::vector<double> velocity;
  double bump = 0.0;
  /// 2n entries of dirichlet | neumann.
  std::vector<std::string> faces;
  /// Constant closed 1-form circulation * dx^axis added to d(phi).
  double circulation = 0.0;
  int circulation_axis = 0;
  double tol = 0.0;
  int max_iters = 100;
  double q_cap_epsilon = 0.05;
};

struct GaugeConfig {
  std::string group = "SU2";
  /// identity | random | haar | constant-field | file
  std::string init = "random";
  double amplitude = 0.1;
  double field_strength = 1.0;
  std::vector<int> plane{0, 1};
  std::string input;
  /// fixed | free
  std::string boundary = "fixed";
  double tol = 1e-8;
  int max_iters = 20000;
  int weak_tests = 10;
};

struct FixConfig {
  /// coulomb | exponential
  std::string mode = "coulomb";
  /// tree | radial
  std::string exponential = "radial";
  std::vector<int> origin;
  double tol = 1e-10;
  int max_sweeps = 20000;
};

struct VerifyConfig {
  std::vector<std::string> checks;
  /// flow | uniform-flow | gauge
  std::string field = "flow";
  double c0 = 1.0;
  double k = 1.0;
  double q_exponent = 0.0;
  std::vector<double> radii;
  int samples = 1000;
};

struct RunConfig {
  std::string name;
  std::string module;
  std::uint64_t seed = 0;
  std::string output;
  int threads = 1;
  GridConfig grid;
  DensityConfig density;
  FlowConfig flow;
  GaugeConfig gauge;
  FixConfig fix;
  VerifyConfig verify;
};

inline const std::vector<std::string> kModules{"solve-flow", "solve-gauge", "gauge-fix", "verify", "report"};

RunConfig parse_config(const std::filesystem::path& path);
/// Relative paths (density.table_path) resolve against base_dir.
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = {});

/// Every field, defaults included, for the manifest.
nlohmann::json echo(const RunConfig& c);

ComplexPtr build_complex(const GridConfig& g);
DensityModel build_density(const DensityConfig& d);

}  // namespace nlh::config
