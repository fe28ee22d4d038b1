#include "nlh/config.hpp"
#include "nlh/errors.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

using namespace nlh;
using namespace nlh::config;

namespace {

const std::string kMinimal = R"(# minimal flow run
[run]
name = minimal

[grid]
dims = 8, 4

[density]
kind = polytropic

[flow]
velocity = 0.2, 0
)";

int error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config fills documented defaults") {
  const auto c = parse_config_text(kMinimal);
  CHECK(c.name == "minimal");
  CHECK(c.seed == 0);
  CHECK(c.threads == 1);
  CHECK(c.grid.dims == std::vector<int>{8, 4});
  CHECK(c.grid.metric == "identity");
  CHECK(c.density.kind == "polytropic");
  CHECK(c.density.gamma == 1.4);
  CHECK(c.flow.max_iters == 100);
  CHECK(c.flow.q_cap_epsilon == 0.05);
  CHECK(c.gauge.group == "SU2");
  CHECK(c.fix.mode == "coulomb");
  CHECK(c.verify.field == "flow");

  const auto k = build_complex(c.grid);
  CHECK(k->dim() == 2);
  CHECK(k->spacing(1) == 1.0);
  CHECK(build_density(c.density).q_crit().has_value());

  const auto e = echo(c);
  CHECK(e["density"]["gamma"] == 1.4);
  CHECK(e["flow"]["max_iters"] == 100);
  CHECK(e["grid"]["dims"] == nlohmann::json::array({8, 4}));
}

TEST_CASE("gamma must exceed one") {
  std::string bad = kMinimal;
  bad.replace(bad.find("kind = polytropic"), 17, "kind = polytropic\ngamma = 0.9");
  CHECK(error_line(bad) == 10);
  CHECK(error_text(bad).find("gamma") != std::string::npos);
}

TEST_CASE("duplicate keys report both lines") {
  std::string dup = kMinimal + "max_iters = 5\nmax_iters = 6\n";
  CHECK(error_line(dup) == 14);
  CHECK(error_text(dup).find("line 13") != std::string::npos);
  CHECK(error_text(dup).find("line 14") != std::string::npos);
}

TEST_CASE("strict parsing rejects unknown and malformed input with line numbers") {
  CHECK(error_line(kMinimal + "colour = red\n") == 13);
  CHECK(error_line(kMinimal + "[bogus]\n") == 13);
  CHECK(error_line(kMinimal + "tol = fast\n") == 13);
  CHECK(error_line(kMinimal + "max_iters = 2.5\n") == 13);
  CHECK(error_line(kMinimal + "no equals sign\n") == 13);
  CHECK(error_line("name = x\n") == 1);
  // Missing required keys have no line of their own.
  CHECK(error_text("[run]\nname = x\n").find("grid.dims") != std::string::npos);
  CHECK(error_text("[grid]\ndims = 4\n").find("run.name") != std::string::npos);
  // Cross-key validation points at the offending key.
  CHECK(error_line(kMinimal + "faces = dirichlet, neumann\n") == 13);
}

TEST_CASE("spacing takes one value or one per axis") {
  std::string text = kMinimal;
  text.replace(text.find("dims = 8, 4"), 11, "dims = 8, 4\nspacing = 0.1, 0.2, 0.3");
  CHECK(error_line(text) == 7);
}

TEST_CASE("tabulated densities load relative to the config") {
  const auto dir = std::filesystem::temp_directory_path() / "nlh_config_table";
  std::filesystem::create_directories(dir);
  {
    std::ofstream t(dir / "rho.csv");
    t << "Q,rho\n0,1\n0.5,0.9\n1,0.85\n";
  }
  std::string text = kMinimal;
  text.replace(text.find("kind = polytropic"), 17, "kind = tabulated\ntable_path = rho.csv");
  const auto c = parse_config_text(text, dir);
  CHECK(c.density.table_q == std::vector<double>{0, 0.5, 1});
  CHECK(build_density(c.density).rho(0.5) == doctest::Approx(0.9));
  CHECK_THROWS_AS(parse_config_text(text, dir / "missing"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("conformal metrics and periodic axes") {
  std::string text = kMinimal;
  text.replace(text.find("dims = 8, 4"), 11, "dims = 8, 4\nspacing = 0.125, 0.25\nperiodic = true, false\n"
                                              "metric = conformal\nconformal_amplitude = 0.2");
  const auto c = parse_config_text(text);
  const auto k = build_complex(c.grid);
  CHECK_FALSE(k->flat());
  CHECK(k->periodic(0));
  CHECK(k->spacing(1) == 0.25);
}

TEST_CASE("shipped example configs parse") {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(NLH_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(parse_config(entry.path()));
    ++count;
  }
  CHECK(count >= 5);
}
