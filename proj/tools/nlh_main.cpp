#include "nlh/config.hpp"
#include "nlh/errors.hpp"
#include "nlh/run.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Globals {
  std::string config;
  std::string out;
  long long seed = -1;
  int threads = 0;
};

void add_globals(CLI::App* app, Globals& g, bool config_required) {
  auto* opt = app->add_option("--config", g.config, "Run configuration (INI)")->check(CLI::ExistingFile);
  if (config_required) opt->required();
  app->add_option("--out", g.out, "Output directory (overrides run.output)");
  app->add_option("--seed", g.seed, "Random seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
  app->add_option("--threads", g.threads, "Worker threads (fallback: NLH_THREADS)")->check(CLI::Range(1, 256));
}

int execute(const std::string& module, const Globals& g, const std::vector<std::string>& checks,
            const std::string& fix_mode) {
  try {
    auto cfg = nlh::config::parse_config(g.config);
    cfg.module = module;
    if (!g.out.empty()) cfg.output = g.out;
    if (g.seed >= 0) cfg.seed = static_cast<std::uint64_t>(g.seed);
    if (!checks.empty()) cfg.verify.checks = checks;
    if (!fix_mode.empty()) cfg.fix.mode = fix_mode;
    // --threads beats run.threads beats NLH_THREADS.
    cfg.threads = g.threads > 0 ? g.threads : (cfg.threads > 1 ? cfg.threads : nlh::run::resolve_threads(0));
    const auto result = nlh::run::run(cfg, std::cout);
    if (!result.error.empty()) std::cerr << result.error << "\n";
    return result.exit_code;
  } catch (const nlh::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Hodge and gauge field toolkit"};
  app.require_subcommand(1);
  Globals g;
  std::vector<std::string> checks;
  std::string fix_mode, report_dir;

  auto* flow = app.add_subcommand("solve-flow", "Solve the abelian nonlinear Hodge system");
  add_globals(flow, g, true);
  auto* gauge = app.add_subcommand("solve-gauge", "Minimize the nonlinear gauge energy");
  add_globals(gauge, g, true);
  auto* fix = app.add_subcommand("gauge-fix", "Coulomb or exponential gauge fixing");
  add_globals(fix, g, true);
  fix->add_option("--mode", fix_mode, "coulomb | exponential")->check(CLI::IsMember({"coulomb", "exponential"}));
  auto* verify = app.add_subcommand("verify", "Run analysis checks");
  add_globals(verify, g, true);
  verify->add_option("--checks", checks, "Checks to run (default: all that apply)")
      ->delimiter(',')
      ->check(CLI::IsMember(nlh::run::available_checks()));
  auto* rep = app.add_subcommand("report", "Re-render heatmaps and series of a run directory");
  rep->add_option("--out,dir", report_dir, "Run directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);

  if (*rep) {
    try {
      return nlh::run::rerender(report_dir, std::cout).exit_code;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  for (auto* sub : {flow, gauge, fix, verify})
    if (*sub) return execute(sub->get_name(), g, checks, fix_mode);
  return 2;
}
