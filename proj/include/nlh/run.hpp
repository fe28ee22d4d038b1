#pragma once

// Orchestration of one experiment: dispatch, artifacts, manifest, report.

#include "nlh/config.hpp"
#include "nlh/report.hpp"

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace nlh::run {

inline constexpr const char* kToolkitVersion = "1.0.0";

struct RunResult {
  int exit_code = 0;
  std::filesystem::path output_dir;
  report::Report report;
  /// Output file name -> SHA-256, deterministic content only.
  std::vector<std::pair<std::string, std::string>> outputs;
  std::string error;
};

/// Names accepted in verify.checks.
const std::vector<std::string>& available_checks();

/// Runs cfg.module into cfg.output (created if needed).  Module errors give
/// exit code 2 and an error.json; failed checks give exit code 1.
RunResult run(const config::RunConfig& cfg, std::ostream& log);

/// Re-renders PPM heatmaps and CSV series of an existing run directory from
/// its saved artifacts without recomputation.
RunResult rerender(const std::filesystem::path& dir, std::ostream& log);

/// Thread count: explicit value if positive, else NLH_THREADS, else 1.
int resolve_threads(int requested);

}  // namespace nlh::run
