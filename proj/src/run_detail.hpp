#pragma once

#include "nlh/config.hpp"
#include "nlh/flow.hpp"
#include "nlh/gauge.hpp"
#include "nlh/report.hpp"
#include "nlh/run.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace nlh::run::detail {

struct Context {
  const config::RunConfig& cfg;
  std::filesystem::path dir;
  std::string inputs_digest;
  std::ostream& log;
  RunResult& result;
  int threads = 1;
};

/// Writes <name>.csv and <name>.bin.
void save_cochain(Context& ctx, const std::string& name, const Cochain& c);
/// Records a file written into the run directory.
void note_output(Context& ctx, const std::string& name);

nlohmann::json series_json(const report::Series& s);
/// Adds a named plot series to the report ("series" section).
void add_series(report::Report& rep, const std::string& name, const report::Series& s);

template <class G>
gauge::LatticeConnection<G> initial_connection(const config::RunConfig& cfg, ComplexPtr k, lie::Rng& rng);

gauge::MinimizeOptions minimize_options(const config::RunConfig& cfg);

flow::FlowProblem flow_problem(const config::RunConfig& cfg);
flow::FlowOptions flow_options(const config::RunConfig& cfg);

void write_heatmap(Context& ctx, const std::string& name, const Cochain& top);
std::string describe_location(const Complex& k, std::size_t top_cell);

nlohmann::json certificate_json(const EllipticityCertificate& c);

void run_verify(Context& ctx);

}  // namespace nlh::run::detail
