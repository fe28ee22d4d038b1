#include "helpers.hpp"
#include "laplace_oracle.hpp"

#include "nlh/cochain_io.hpp"
#include "nlh/config.hpp"
#include "nlh/errors.hpp"
#include "nlh/gauge_io.hpp"
#include "nlh/report.hpp"
#include "nlh/run.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace nlh;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("nlh_test_run_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

int cli(const std::string& args) {
  const std::string cmd = std::string(NLH_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_path(const std::string& name) { return std::string(NLH_CONFIG_DIR) + "/" + name; }

const json* find_check(const json& report, const std::string& name) {
  for (const auto& c : report["checks"])
    if (c["check"] == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("cochains round-trip through CSV and binary exactly") {
  auto k = test::grid({5, 4, 3}, 0.1);
  std::mt19937_64 rng(1);
  const auto dir = scratch("cochain");
  for (int p = 0; p <= 3; ++p) {
    auto c = test::random_cochain(k, p, rng, p == 1 ? 3 : 1);
    c.at(0) = 1e-300;
    io::save_cochain_csv(dir / "c.csv", c);
    io::save_cochain_binary(dir / "c.bin", c);
    CHECK(io::load_cochain_csv(dir / "c.csv", k).values() == c.values());
    CHECK(io::load_cochain_binary(dir / "c.bin", k).values() == c.values());
  }
  auto other = test::grid({5, 4, 4}, 0.1);
  io::save_cochain_binary(dir / "c.bin", Cochain(k, 1));
  CHECK_THROWS_AS(io::load_cochain_binary(dir / "c.bin", other), Error);
  fs::remove_all(dir);
}

TEST_CASE_TEMPLATE("connections round-trip through the binary format", G, lie::SU2, lie::SO3) {
  auto k = test::grid({3, 4, 2}, 0.25);
  lie::Rng rng(2);
  const auto conn = gauge::haar_connection<G>(k, rng);
  const auto dir = scratch("conn");
  io::save_connection(dir / "c.nlhconn", conn);
  CHECK(io::peek_connection_group(dir / "c.nlhconn") == G::id);
  const auto back = io::load_connection<G>(dir / "c.nlhconn");
  REQUIRE(back.num_links() == conn.num_links());
  for (std::size_t e = 0; e < conn.num_links(); ++e) CHECK((back.link(e) - conn.link(e)).norm() == 0.0);
  using Other = std::conditional_t<std::is_same_v<G, lie::SU2>, lie::SO3, lie::SU2>;
  CHECK_THROWS_AS(io::load_connection<Other>(dir / "c.nlhconn"), Error);
  fs::remove_all(dir);
}

TEST_CASE("report entries stay finite and sorted") {
  using report::Sense;
  const auto ok = report::make_check("b.ok", "anchor", "d", 0.5, 1.0, Sense::AtMost);
  CHECK(ok.pass);
  CHECK(ok.margin == 0.5);
  const auto lo = report::make_check("c.lo", "anchor", "d", 3.0, 1.0, Sense::AtLeast);
  CHECK(lo.pass);
  CHECK(lo.margin == 2.0);
  const auto nan = report::make_check("a.nan", "anchor", "d", std::nan(""), 1.0, Sense::AtMost);
  CHECK_FALSE(nan.pass);
  CHECK(std::isfinite(nan.margin));
  const auto inf = report::make_check("a.inf", "anchor", "d", INFINITY, 1.0, Sense::AtLeast);
  CHECK(inf.pass);
  CHECK(std::isfinite(inf.margin));

  report::Report r;
  for (const auto& e : {ok, lo, nan, inf}) r.add(e);
  CHECK_FALSE(r.all_passed());
  const auto j = r.to_json();
  std::vector<std::string> names;
  for (const auto& c : j["checks"]) {
    names.push_back(c["check"]);
    CHECK(c["margin"].is_number());
    CHECK(std::isfinite(c["margin"].get<double>()));
    CHECK(std::isfinite(c["measured"].get<double>()));
  }
  CHECK(names == std::vector<std::string>{"a.inf", "a.nan", "b.ok", "c.lo"});
  const auto back = report::check_from_json(j["checks"][2]);
  CHECK(back.check == "b.ok");
  CHECK(back.measured == 0.5);
}

TEST_CASE("SHA-256 and PPM output") {
  CHECK(report::sha256_hex(std::string("abc")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const auto dir = scratch("ppm");
  report::write_ppm(dir / "x.ppm", {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, 3, 2);
  const auto bytes = slurp(dir / "x.ppm");
  const std::string header = "P6\n3 2\n255\n";
  CHECK(bytes.substr(0, header.size()) == header);
  CHECK(bytes.size() == header.size() + 3 * 2 * 3);
  fs::remove_all(dir);
}

TEST_CASE("in-process Laplace run matches the sparse oracle") {
  auto cfg = config::parse_config(config_path("laplace.ini"));
  cfg.module = "solve-flow";
  const auto dir = scratch("laplace");
  cfg.output = dir.string();
  std::ostringstream log;
  const auto res = run::run(cfg, log);
  CHECK(res.exit_code == 0);
  const auto k = config::build_complex(cfg.grid);
  const auto phi = io::load_cochain_csv(dir / "phi.csv", k);
  const auto oracle = test::laplace_oracle(*k, phi.values());
  double err = 0.0;
  for (std::size_t v = 0; v < oracle.size(); ++v) err = std::max(err, std::abs(oracle[v] - phi.at(v)));
  CHECK(err <= 1e-12);
  // The binary copy and the digest in the manifest agree with the CSV.
  CHECK(io::load_cochain_binary(dir / "phi.bin", k).values() == phi.values());
  const auto manifest = read_json(dir / "manifest.json");
  CHECK(manifest["all_passed"] == true);
  bool listed = false;
  for (const auto& o : manifest["outputs"])
    if (o["file"] == "phi.csv") {
      listed = true;
      CHECK(o["sha256"] == report::sha256_file(dir / "phi.csv"));
    }
  CHECK(listed);
  CHECK_FALSE(manifest["config"]["run"].contains("output"));
  CHECK(fs::exists(dir / "timing.json"));
  CHECK(fs::exists(dir / "convergence.csv"));
  fs::remove_all(dir);
}

TEST_CASE("CLI: supersonic verify fails and locates the sonic cells") {
  const auto dir = scratch("supersonic");
  CHECK(cli("verify --config " + config_path("supersonic.ini") + " --out " + dir.string()) == 1);
  const auto rep = read_json(dir / "report.json");
  const auto* sonic = find_check(rep, "sonic.mach_ratio");
  REQUIRE(sonic != nullptr);
  CHECK((*sonic)["pass"] == false);
  CHECK((*sonic)["measured"].get<double>() > 1.0);
  CHECK((*sonic)["note"].get<std::string>().find("supersonic cells, first at") != std::string::npos);
  CHECK(read_json(dir / "manifest.json")["all_passed"] == false);
  fs::remove_all(dir);
}

TEST_CASE("CLI: report re-renders without recomputing") {
  const auto dir = scratch("rerender");
  REQUIRE(cli("solve-flow --config " + config_path("subsonic.ini") + " --out " + dir.string()) == 0);
  const auto ppm = slurp(dir / "q.ppm");
  const auto phi_mtime = fs::last_write_time(dir / "phi.csv");
  const auto manifest = slurp(dir / "manifest.json");
  fs::remove(dir / "q.ppm");
  fs::remove_all(dir / "series");
  CHECK(cli("report " + dir.string()) == 0);
  CHECK(slurp(dir / "q.ppm") == ppm);
  CHECK(fs::exists(dir / "series"));
  CHECK(fs::last_write_time(dir / "phi.csv") == phi_mtime);
  CHECK(slurp(dir / "manifest.json") == manifest);
  fs::remove_all(dir);
}

TEST_CASE("CLI: manifests are reproducible across directories and thread counts") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  const std::string cfg = config_path("subsonic.ini");
  REQUIRE(cli("verify --config " + cfg + " --threads 1 --out " + a.string()) == 0);
  REQUIRE(cli("verify --config " + cfg + " --threads 4 --out " + b.string()) == 0);
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
  // A different seed changes the seeded checks but the run stays valid.
  const auto c = scratch("det_c");
  CHECK(cli("verify --config " + cfg + " --seed 99 --out " + c.string()) == 0);
  CHECK(read_json(c / "manifest.json")["seed"] == 99);
  for (const auto& d : {a, b, c}) fs::remove_all(d);
}

TEST_CASE("CLI: module errors are structured") {
  const auto dir = scratch("error");
  {
    std::ofstream os(dir / "fast.ini");
    os << "[run]\nname = fast\n[grid]\ndims = 8, 8\nspacing = 0.125\n[density]\nkind = polytropic\n"
          "[flow]\nvelocity = 2.0, 0\n";
  }
  CHECK(cli("solve-flow --config " + (dir / "fast.ini").string() + " --out " + (dir / "out").string()) == 2);
  const auto err = read_json(dir / "out" / "error.json");
  CHECK(err["type"] == "SonicLimitError");
  CHECK(err["message"].get<std::string>().find("sonic") != std::string::npos);
  {
    std::ofstream os(dir / "bad.ini");
    os << "[run]\nname = bad\n[grid]\ndims = 4\n[density]\ngamma = 0.9\n";
  }
  CHECK(cli("solve-flow --config " + (dir / "bad.ini").string()) == 2);
  CHECK(cli("verify --config " + config_path("subsonic.ini") + " --checks nonsense") != 0);
  CHECK(cli("solve-flow") != 0);
  fs::remove_all(dir);
}

TEST_CASE("CLI: gauge pipeline") {
  const auto dir = scratch("gauge");
  {
    std::ofstream os(dir / "ym.ini");
    os << "[run]\nname = ym\nseed = 5\n[grid]\ndims = 4, 4, 4\nspacing = 0.25\n[gauge]\ninit = random\n"
          "amplitude = 0.02\ntol = 1e-9\n";
  }
  const auto ini = (dir / "ym.ini").string();
  REQUIRE(cli("solve-gauge --config " + ini + " --out " + (dir / "solve").string()) == 0);
  CHECK(fs::exists(dir / "solve" / "connection.nlhconn"));
  const auto conn = io::load_connection<lie::SU2>(dir / "solve" / "connection.nlhconn");
  CHECK(conn.num_links() == 3 * 4 * 5 * 5);

  {
    std::ofstream os(dir / "fix.ini");
    os << "[run]\nname = fix\n[grid]\ndims = 4, 4, 4\nspacing = 0.25\n[gauge]\ninit = file\ninput = "
       << (dir / "solve" / "connection.nlhconn").string() << "\n[fix]\nmode = coulomb\n";
  }
  CHECK(cli("gauge-fix --config " + (dir / "fix.ini").string() + " --out " + (dir / "fix").string()) == 0);
  CHECK(fs::exists(dir / "fix" / "fixed.nlhconn"));
  const auto rep = read_json(dir / "fix" / "report.json");
  CHECK(find_check(rep, "gauge_fix.q_invariance") != nullptr);
  CHECK(cli("gauge-fix --mode exponential --config " + (dir / "fix.ini").string() + " --out " +
            (dir / "exp").string()) == 0);
  fs::remove_all(dir);
}
