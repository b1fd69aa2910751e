#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "modelscale/harness/config.hpp"
#include "modelscale/harness/csv.hpp"
#include "modelscale/harness/experiments.hpp"
#include "modelscale/harness/plot.hpp"

namespace fs = std::filesystem;
using namespace modelscale::harness;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "modelscale_harness_tests" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(MODELSCALE_CLI) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("config parsing and typed access") {
  const auto cfg = Config::parse("# comment\n experiment = markov \n\nn=50\ngamma = 0.9\nlist = 1, 2.5 ,3\nflag = true\n");
  CHECK(cfg.get_string("experiment", "") == "markov");
  CHECK(cfg.get_int("n", 0) == 50);
  CHECK(cfg.get_double("gamma", 0.0) == 0.9);
  CHECK(cfg.get_doubles("list", {}) == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(cfg.get_bool("flag", false));
  CHECK(cfg.get_double("missing", 4.0) == 4.0);
  CHECK_THROWS_AS(cfg.get_int("gamma", 0), ConfigError);
  CHECK_THROWS_AS(cfg.get_bool("n", false), ConfigError);
  CHECK_THROWS_AS(cfg.require_seed(), ConfigError);
  CHECK_THROWS_AS(cfg.check_keys({"experiment", "n"}), ConfigError);
}

TEST_CASE("config rejects malformed input") {
  CHECK_THROWS_AS(Config::parse("no equals sign"), ConfigError);
  CHECK_THROWS_AS(Config::parse("Bad-Key = 1"), ConfigError);
  CHECK_THROWS_AS(Config::parse("a = 1\na = 2"), ConfigError);
  CHECK_THROWS_AS(Config::parse("x = 1.5abc").get_double("x", 0.0), ConfigError);
  CHECK_THROWS_AS(Config::parse("seed = -3").require_seed(), ConfigError);
  CHECK_THROWS_AS(Config::load("/nonexistent/file.conf"), ConfigError);
}

TEST_CASE("command-line overrides win over file values") {
  auto cfg = Config::parse("n = 10");
  cfg.set("n", "50");
  CHECK(cfg.get_int("n", 0) == 50);
}

TEST_CASE("csv numbers round-trip at 17 significant digits") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.5}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(0.1) == "0.10000000000000001");
  CsvTable t({"a", "b"});
  t.add_row({1, 0.25});
  CHECK_THROWS(t.add_row({1}));
  CHECK(t.to_string() == "a,b\n1,0.25\n");

  const auto dir = scratch("csv");
  write_csv(dir / "t.csv", t);
  const auto back = read_csv(dir / "t.csv");
  CHECK(back.header() == t.header());
  CHECK(back.number(0, 1) == 0.25);
}

TEST_CASE("sha256 of known inputs") {
  const auto dir = scratch("sha");
  std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
  std::ofstream(dir / "empty.txt", std::ios::binary);
  CHECK(sha256_file(dir / "abc.txt") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_file(dir / "empty.txt") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("svg plot structure") {
  CsvTable t({"x", "y1", "y2", "g"});
  for (int i = 0; i < 5; ++i) t.add_row({i, 1.0 * i * i, 2.0 - i, i % 2});
  PlotSpec spec;
  spec.title = "t & <u>";
  spec.x_column = "x";
  spec.y_columns = {"y1", "y2"};
  spec.step = true;
  spec.markers = {{2.0, 4.0, "mark"}};
  const std::string svg = render_plot(t, spec);
  CHECK(svg.find("version=\"1.1\"") != std::string::npos);
  CHECK(svg.find("t &amp; &lt;u&gt;") != std::string::npos);
  CHECK(svg.find(" H") != std::string::npos);  // step segments
  CHECK(svg.find(">y1<") != std::string::npos);
  CHECK(svg.find(">mark<") != std::string::npos);
  CHECK(svg.find("<script") == std::string::npos);
  CHECK(render_plot(t, spec) == svg);

  spec.y_columns = {"y1"};
  spec.group_column = "g";
  CHECK(render_plot(t, spec).find(">g 1<") != std::string::npos);
}

TEST_CASE("plot errors") {
  CsvTable t({"x", "y"});
  PlotSpec spec;
  spec.x_column = "x";
  spec.y_columns = {"y"};
  CHECK_THROWS_AS(render_plot(t, spec), PlotError);  // no rows
  t.add_row({1, 2});
  spec.y_columns = {"z"};
  CHECK_THROWS_AS(render_plot(t, spec), PlotError);
  spec.y_columns = {"y"};
  spec.x_column = "w";
  CHECK_THROWS_AS(render_plot(t, spec), PlotError);

  const auto dir = scratch("plot");
  std::ofstream(dir / "empty.csv") << "";
  spec.x_column = "x";
  CHECK_THROWS_AS(emit_plot(dir / "empty.csv", spec, dir / "o.svg"), PlotError);
  CHECK_THROWS_AS(emit_plot(dir / "missing.csv", spec, dir / "o.svg"), PlotError);
}

TEST_CASE("identical config and seed give identical checksums") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  auto cfg = Config::parse("horizons = 64, 256\nreplicates = 4\nseed = 5");
  const auto ra = run_with_manifest("psgd", cfg, a);
  const auto rb = run_with_manifest("psgd", cfg, b);
  REQUIRE(ra.exit_status == 0);
  REQUIRE(rb.exit_status == 0);
  CHECK(ra.manifest["outputs"] == rb.manifest["outputs"]);
  CHECK(slurp(a / "psgd_runs.csv") == slurp(b / "psgd_runs.csv"));
  CHECK(ra.manifest["outputs"].size() == 3);

  cfg.set("seed", "6");
  const auto rc = run_with_manifest("psgd", cfg, scratch("det_c"));
  CHECK(rc.manifest["outputs"][0]["sha256"] != ra.manifest["outputs"][0]["sha256"]);
}

TEST_CASE("manifest records config, version, checksums and runtime") {
  const auto dir = scratch("manifest");
  const auto r = run_with_manifest("participation", Config::parse("alpha_points = 5"), dir);
  REQUIRE(r.exit_status == 0);
  const auto& m = r.manifest;
  CHECK(m["config"]["alpha_points"] == "5");
  CHECK(m["artifact_version"] == artifact_version());
  CHECK(m["runtime_seconds"].get<double>() >= 0.0);
  CHECK(m["status"] == "ok");
  for (const auto& o : m["outputs"]) {
    CHECK(sha256_file(dir / o["file"].get<std::string>()) == o["sha256"]);
  }
  CHECK(fs::exists(dir / "manifest.json"));
  CHECK(fs::exists(dir / "participation.svg"));
}

TEST_CASE("exit statuses: invalid config is 2, failed certification is 3") {
  CHECK(run_with_manifest("psgd", Config::parse("replicates = 2"), scratch("s1")).exit_status == kExitConfig);
  CHECK(run_with_manifest("select", Config::parse("runs = 1"), scratch("s2")).exit_status == kExitConfig);
  CHECK(run_with_manifest("markov", Config::parse("bogus = 1"), scratch("s3")).exit_status == kExitConfig);
  CHECK(run_with_manifest("markov", Config::parse("gamma = 1.5"), scratch("s4")).exit_status == kExitConfig);
  CHECK(run_with_manifest("markov", Config::parse("experiment = psgd"), scratch("s5")).exit_status ==
        kExitConfig);
  CHECK(run_with_manifest("scaling-curve", Config::parse("regimes = sideways"), scratch("s6")).exit_status ==
        kExitConfig);

  const auto z = run_with_manifest("restrict", Config::parse("instance = zero_sum\nseed = 1"), scratch("s7"));
  CHECK(z.exit_status == kExitFailure);
  CHECK(z.manifest["error"]["kind"] == "certification");
  CHECK(z.manifest["error"]["detail"]["hypothesis_not_satisfied"] == true);
}

TEST_CASE("regression defaults report the equilibrium rows") {
  const auto dir = scratch("reg");
  REQUIRE(run_with_manifest("regression", Config{}, dir).exit_status == 0);
  const auto eq = read_csv(dir / "regression_equilibria.csv");
  REQUIRE(eq.size() == 2);
  CHECK(std::abs(eq.number(0, eq.column("loss_over_beta_sq")) - 0.5) < 1e-12);
  const double large = eq.number(1, eq.column("loss_over_beta_sq"));
  CHECK(large > 0.76);
  CHECK(large < 0.80);
  const auto curve = read_csv(dir / "regression.csv");
  CHECK(curve.header() == std::vector<std::string>{"k", "small_loss", "large_loss", "env_obj_small", "env_obj_large"});
}

TEST_CASE("markov sweep csv schema and step plot") {
  const auto dir = scratch("markov");
  REQUIRE(run_with_manifest("markov", Config::parse("n = 10\ngrid_points = 30"), dir).exit_status == 0);
  const auto t = read_csv(dir / "markov.csv");
  CHECK(t.header() == std::vector<std::string>{"p_bar", "learner_value", "env_value", "absorbing_state", "gamma"});
  CHECK(t.size() == 30);
  CHECK(slurp(dir / "markov.svg").find(" H") != std::string::npos);
  // Rollouts need a seed.
  CHECK(run_with_manifest("markov", Config::parse("n = 10\nrollout_points = 0.6"), scratch("m2")).exit_status ==
        kExitConfig);
}

TEST_CASE("select csv schema") {
  const auto dir = scratch("select");
  REQUIRE(run_with_manifest("select", Config::parse("seed = 3"), dir).exit_status == 0);
  const auto t = read_csv(dir / "select.csv");
  CHECK(t.header() == std::vector<std::string>{"epoch", "T", "arm", "estimate", "radius", "active"});
  CHECK(t.size() >= 4);
}

TEST_CASE("command-line tool exit statuses") {
  const auto dir = scratch("cli");
  const std::string out = " --out-dir " + dir.string();
  CHECK(cli("run psgd --horizons 32 --replicates 2 --seed 1" + out + "/a") == 0);
  CHECK(cli("run psgd --horizons 32 --replicates 2" + out + "/b") == 2);  // missing seed
  CHECK(cli("run nonsense" + out + "/c") == 2);
  CHECK(cli("run markov --n 50 --gamma 0.9 --grid_points 20 --plot false" + out + "/d") == 0);
  CHECK(cli("run restrict --instance zero_sum --seed 1" + out + "/e") == 3);
  CHECK(cli("run markov --config /nonexistent.conf" + out + "/f") == 2);
  CHECK(cli("plot --csv " + (dir / "a" / "psgd.csv").string() + " --x horizon --y nope --out " +
            (dir / "x.svg").string()) == 2);
  CHECK(cli("plot --csv " + (dir / "a" / "psgd.csv").string() + " --x horizon --y mean_abs_gap --out " +
            (dir / "x.svg").string()) == 0);
  CHECK(fs::exists(dir / "x.svg"));
  CHECK(cli("run psgd --horizons 32 --replicates 2 --seed 1" + out + "/a2") == 0);
  CHECK(slurp(dir / "a" / "psgd.csv") == slurp(dir / "a2" / "psgd.csv"));
}
