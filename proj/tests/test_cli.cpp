#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "puncvol/commands.hpp"
#include "puncvol/errors.hpp"

using namespace puncvol;
using namespace puncvol::cli;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

Options opts(const std::string& command) {
  Options o;
  o.command = command;
  return o;
}

}  // namespace

TEST_CASE("volume hopf n = 1") {
  const auto r = invoke({"volume", "--field", "hopf", "--n", "1"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["schema"] == kSchemaVersion);
  CHECK(j["results"]["normalized"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(j["results"]["reference_normalized"] == 2.0);
  CHECK(j["config"]["field"] == "hopf");
  CHECK(j["grids"].size() == 1);
}

TEST_CASE("exit codes") {
  CHECK(invoke({"volume", "--wat"}).code == kConfigError);
  CHECK(invoke({}).code == kConfigError);
  CHECK(invoke({"--help"}).code == kOk);
  CHECK(invoke({"volume", "--field", "vortex"}).code == kConfigError);
  CHECK(invoke({"volume", "--n", "x"}).code == kConfigError);
  CHECK(invoke({"volume", "--grid", "{broken"}).code == kConfigError);
  const auto mc = invoke({"volume", "--field", "radial", "--grid", R"({"kind":"monte-carlo","count":100})"});
  CHECK(mc.code == kConfigError);
  CHECK(mc.err.find("monte-carlo refused") != std::string::npos);
  CHECK(invoke({"index", "--field", "radial", "--radius", "2"}).code == kConfigError);
  CHECK(invoke({"verify-lemma", "--n", "5"}).code == kConfigError);
  // a grid far too coarse for a degree-3 singularity fails the rounding residual
  const auto coarse = invoke({"index", "--field", "power", "--d", "3", "--grid", R"({"kind":"product","axes":[2,3]})"});
  CHECK(coarse.code == kNumericFailure);
}

TEST_CASE("verify-lemma payload") {
  const auto r = invoke({"verify-lemma", "--n", "2"});
  REQUIRE(r.code == 0);
  const auto res = json::parse(r.out)["results"];
  CHECK(res["status"] == "verified");
  CHECK(res["n"] == 2);
  CHECK(res["basis_tuples"] == 5);
  CHECK(res["self_test"]["localized"] == true);
  CHECK(res["self_test"]["reported_tuples"].size() == 1);
}

TEST_CASE("csv renderings") {
  auto r = invoke({"chain-table", "--n", "1,2", "--format", "csv"});
  CHECK(r.out.rfind("n,volM,radial,pedersen,hopf,bcn_a\n", 0) == 0);
  CHECK(r.out.find("\n2,1,2.6666666666666665,3.5449077018110318,4,2.6666666666666665\n") != std::string::npos);
  r = invoke({"euler-scan", "--field", "radial", "--thetas", "-1,0,1", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("theta,flux\n", 0) == 0);
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
  r = invoke({"bounds", "--n", "1", "--indices", "1,-1", "--format", "csv"});
  CHECK(r.out.rfind("name,value,normalized,satisfied\n", 0) == 0);
}

TEST_CASE("round trips") {
  auto o = opts("volume");
  o.field = "power";
  o.d = 2;
  o.pole = Vec{0, 0, 0, 1};
  o.grid = json::parse(R"({"kind":"sliced","slices":8,"parallel":[6,12]})");
  o.thetas = std::vector<double>{0.1, -0.2};
  o.indices = {1, -1};
  o.seed = 42;
  CHECK(Options::from_json(json::parse(o.to_json().dump())) == o);
  const auto rec = execute(o);
  const auto back = RunRecord::from_json(json::parse(rec.to_json().dump(2)));
  CHECK(back == rec);
  CHECK_THROWS_AS(RunRecord::from_json(json{{"schema", 99}}), ConfigError);
}

TEST_CASE("re-running a recorded config reproduces the payload") {
  auto o = opts("volume");
  o.field = "perturbed-hopf";
  o.grid = json::parse(R"({"kind":"product","axes":[8,8,16]})");
  const auto a = execute(o);
  const auto b = execute(Options::from_json(a.config));
  CHECK(a.results == b.results);

  // an absent seed is drawn and recorded
  auto mc = opts("volume");
  mc.field = "hopf";
  mc.grid = json::parse(R"({"kind":"monte-carlo","count":2000})");
  const auto first = execute(mc);
  REQUIRE(first.seeds.size() == 1);
  CHECK(first.config["seed"] == first.seeds[0]);
  const auto replay = execute(Options::from_json(first.config));
  CHECK(replay.results == first.results);

  auto probe = opts("probe-lemma");
  probe.trials = 2000;
  const auto p1 = execute(probe);
  REQUIRE(p1.seeds.size() == 1);
  CHECK(execute(Options::from_json(p1.config)).results == p1.results);
}

TEST_CASE("probe-lemma report") {
  const auto r = invoke({"probe-lemma", "--n", "1", "--trials", "20000", "--seed", "7"});
  REQUIRE(r.code == 0);
  const auto res = json::parse(r.out)["results"];
  CHECK(res["abs_form"]["violations"].get<int>() > 0);
  CHECK(res["angle_form"]["violations"] == 0);
  CHECK(res["regression_case"]["rhs_abs"] == 3.0);
  CHECK(res["seed"] == 7);
}

TEST_CASE("convergence emits monotone refinements") {
  const auto r = invoke({"convergence", "--field", "hopf", "--levels", "3", "--grid", R"({"kind":"product","axes":[16,16,32]})"});
  REQUIRE(r.code == 0);
  const auto levels = json::parse(r.out)["results"]["levels"];
  REQUIRE(levels.size() == 3);
  for (std::size_t i = 1; i < levels.size(); ++i)
    CHECK(levels[i]["nodes"].get<std::size_t>() > levels[i - 1]["nodes"].get<std::size_t>());
  CHECK(levels[2]["value"].get<double>() == doctest::Approx(39.47841760435743).epsilon(1e-12));
}

TEST_CASE("atomic output file") {
  const auto dir = std::filesystem::temp_directory_path() / "puncvol_cli_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "chain.json").string();
  {
    std::ofstream stale(path);
    stale << "stale";
  }
  const auto r = invoke({"chain-table", "--n", "2", "--out", path});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const auto rec = RunRecord::from_json(json::parse(in));
  CHECK(rec.results["rows"][0]["hopf"] == 4.0);
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(write_atomic("/nonexistent-dir/x.json", "{}"), ConfigError);
}
