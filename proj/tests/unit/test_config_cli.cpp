#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "catch_amalgamated.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "experiments.hpp"

using namespace levycouple;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("levycouple_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config text parsing and overrides", "[config_cli]") {
  const ExperimentConfig c = parse_config_text(
      "# comment\n"
      "model = cpp-atoms(4)\n"
      "ks = 64, 16\n"
      "endpoint-samples = 500\n"
      "seed = 17\n"
      "\n"
      "deltas = 0.1,0.05\n");
  REQUIRE(c.model == "cpp-atoms(4)");
  REQUIRE(c.ks == std::vector<std::size_t>{64, 16});
  REQUIRE(c.endpoint_samples == 500);
  REQUIRE(c.seed == 17u);
  REQUIRE(c.deltas == std::vector<double>{0.1, 0.05});
  REQUIRE(effective_ks(c) == std::vector<std::size_t>{64, 16});

  ExperimentConfig d = c;
  apply_setting(d, "seed", "3");
  apply_setting(d, "eps1", "0.2");
  apply_setting(d, "eps2", "0.05");
  REQUIRE(d.seed == 3u);
  REQUIRE(effective_model(d) == "exp-stable(0.2,0.05)");
  REQUIRE(effective_ks(ExperimentConfig{}) == std::vector<std::size_t>{128});
  validate(d);
}

TEST_CASE("config errors", "[config_cli]") {
  ExperimentConfig c;
  REQUIRE_THROWS_AS(validate(c), ConfigError);  // no seed
  c.seed = 1;
  validate(c);
  ExperimentConfig bad = c;
  bad.model = "nonsense";
  REQUIRE_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.ks = {128, 64};
  REQUIRE_THROWS_AS(validate(bad), ConfigError);
  bad = c;
  bad.eps1 = 0.1;
  REQUIRE_THROWS_AS(validate(bad), ConfigError);
  REQUIRE_THROWS_AS(apply_setting(c, "colour", "red"), ConfigError);
  REQUIRE_THROWS_AS(apply_setting(c, "k", "many"), ConfigError);
  REQUIRE_THROWS_AS(parse_config_text("just words\n"), ConfigError);
  REQUIRE_THROWS_AS(load_config_file("/nonexistent/dir/cfg.txt"), IoError);
}

TEST_CASE("config echo lists every effective setting", "[config_cli]") {
  ExperimentConfig c;
  c.seed = 5;
  c.ks = {64, 16};
  const std::string e = config_echo(c);
  REQUIRE(e.find("model=exp-stable(0.1,0.03)") != std::string::npos);
  REQUIRE(e.find("ks=64,16") != std::string::npos);
  REQUIRE(e.find("seed=5") != std::string::npos);
  REQUIRE(parse_config_text("seed = 5\nks = 64,16\n").seed == c.seed);
}

TEST_CASE("config file round trip", "[config_cli]") {
  const fs::path dir = scratch("cfg");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "run.cfg");
    f << "seed = 9\nreps = 12\nq = 6\n";
  }
  const ExperimentConfig c = load_config_file((dir / "run.cfg").string());
  REQUIRE(c.seed == 9u);
  REQUIRE(c.reps == 12);
  REQUIRE(c.q == 6);
  fs::remove_all(dir);
}

TEST_CASE("experiments write identical files for identical seeds", "[config_cli]") {
  ExperimentConfig c;
  c.seed = 21;
  c.q = 8;
  c.k = 16;
  c.reps = 50;
  c.endpoint_samples = 500;
  const fs::path a = scratch("a"), b = scratch("b");
  c.out = a.string();
  const ExperimentOutput oa = run_experiment("msmd", c);
  c.out = b.string();
  const ExperimentOutput ob = run_experiment("msmd", c);
  REQUIRE_FALSE(oa.files.empty());
  REQUIRE(oa.files.size() == ob.files.size());
  for (std::size_t i = 0; i < oa.files.size(); ++i) {
    const std::string ta = slurp(oa.files[i]);
    REQUIRE(ta.rfind("# config: ", 0) == 0);
    REQUIRE(ta == slurp(ob.files[i]));
  }
  c.seed = 22;
  c.out = b.string();
  const ExperimentOutput oc = run_experiment("msmd", c);
  REQUIRE(slurp(oa.files[0]) != slurp(oc.files[0]));
  REQUIRE_THROWS_AS(run_experiment("no-such-experiment", c), ConfigError);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("unwritable output is an IO error", "[config_cli]") {
  const fs::path dir = scratch("ro");
  fs::create_directories(dir);
  { std::ofstream(dir / "file") << "x"; }
  REQUIRE_THROWS_AS(ensure_directory((dir / "file" / "sub").string()), IoError);
  REQUIRE_THROWS_AS(CsvWriter((dir / "file" / "x.csv").string(), "echo", {"a"}), IoError);
  fs::remove_all(dir);
}

TEST_CASE("csv cells use the shortest round-trip form", "[config_cli]") {
  REQUIRE(cell(0.1) == "0.1");
  REQUIRE(cell(std::size_t{42}) == "42");
  REQUIRE(cell(-3) == "-3");
  REQUIRE(std::stod(cell(1.0 / 3.0)) == 1.0 / 3.0);
}
