#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "bcropt/harness.hpp"
#include "bcropt/instance_io.hpp"

using namespace bcropt;
namespace fs = std::filesystem;

namespace {

std::string bin() {
  const char* b = std::getenv("BCROPT_BIN");
  REQUIRE(b != nullptr);
  return b;
}

std::string configs() {
  const char* c = std::getenv("BCROPT_CONFIGS");
  REQUIRE(c != nullptr);
  return c;
}

struct RunOut {
  int status;
  std::string err;
};

RunOut run(const std::string& args) {
  const auto errfile = fs::temp_directory_path() / "bcropt_cli_stderr.txt";
  const std::string cmd = bin() + " " + args + " >/dev/null 2>" + errfile.string();
  const int rc = std::system(cmd.c_str());
  std::ifstream in(errfile);
  return RunOut{WEXITSTATUS(rc),
                std::string(std::istreambuf_iterator<char>(in), {})};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("generate produces a valid, reproducible instance") {
  const auto dir = fresh_dir("bcropt_cli_gen");
  const auto out1 = dir / "a.json";
  const auto out2 = dir / "b.json";
  const std::string cfg = configs() + "/tiny.json";
  CHECK(run("generate --config " + cfg + " --seed 7 --out " + out1.string()).status == 0);
  CHECK(run("generate --config " + cfg + " --seed 7 --out " + out2.string()).status == 0);
  const Instance inst = load_instance(out1);  // validates
  CHECK(inst.seed == 7);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(fs::exists(out1.string() + ".manifest.json"));
}

TEST_CASE("malformed config exits with status two and names the key") {
  const auto dir = fresh_dir("bcropt_cli_badcfg");
  const auto cfg = dir / "bad.json";
  std::ofstream(cfg) << R"({"num_youth": 4, "horizonn": 8})";
  const auto out = run("generate --config " + cfg.string() + " --seed 1 --out " +
                       (dir / "x.json").string());
  CHECK(out.status == 2);
  CHECK(out.err.find("horizonn") != std::string::npos);
}

TEST_CASE("solve emits results consistent with the library path") {
  const auto dir = fresh_dir("bcropt_cli_solve");
  const auto inst_path = dir / "inst.json";
  const std::string cfg = configs() + "/tiny.json";
  REQUIRE(run("generate --config " + cfg + " --seed 3 --out " + inst_path.string()).status == 0);
  REQUIRE(run("solve " + inst_path.string() +
              " --objective ratio --lambda 1 --gap 0 --out " + (dir / "run").string())
              .status == 0);
  CHECK(fs::exists(dir / "run" / "results.csv"));
  CHECK(fs::exists(dir / "run" / "manifest.json"));
  // the CLI's number agrees with an in-process run of the same scenario
  const Instance inst = load_instance(inst_path);
  ScenarioSpec spec;
  spec.id = "check";
  spec.lambda = {1};
  spec.gap_target = 0.0;
  const auto res = run_scenario(inst, spec);
  const std::string csv = slurp(dir / "run" / "results.csv");
  char expect[64];
  std::snprintf(expect, sizeof expect, "%.10g", res.metrics.bcr);
  CHECK(csv.find(expect) != std::string::npos);
}

TEST_CASE("ratio mode with zero lambda is refused with an explanation") {
  const auto dir = fresh_dir("bcropt_cli_guard");
  const auto inst_path = dir / "inst.json";
  const std::string cfg = configs() + "/tiny.json";
  REQUIRE(run("generate --config " + cfg + " --seed 4 --out " + inst_path.string()).status == 0);
  const auto out = run("solve " + inst_path.string() +
                       " --objective ratio --lambda 0 --out " + (dir / "run").string());
  CHECK(out.status == 2);
  CHECK(out.err.find("action constraint") != std::string::npos);
}

TEST_CASE("cost mode never exceeds ratio mode cost on the same instance") {
  const auto dir = fresh_dir("bcropt_cli_ordering");
  const auto inst_path = dir / "inst.json";
  const std::string cfg = configs() + "/tiny.json";
  REQUIRE(run("generate --config " + cfg + " --seed 5 --out " + inst_path.string()).status == 0);
  REQUIRE(run("solve " + inst_path.string() + " --objective cost --lambda 1 --gap 0 --out " +
              (dir / "cost").string()).status == 0);
  REQUIRE(run("solve " + inst_path.string() + " --objective ratio --lambda 1 --gap 0 --out " +
              (dir / "ratio").string()).status == 0);
  const Instance inst = load_instance(inst_path);
  ScenarioSpec c, r;
  c.id = "c"; c.lambda = {1}; c.gap_target = 0; c.mode = ObjectiveMode::cost_min;
  r.id = "r"; r.lambda = {1}; r.gap_target = 0; r.mode = ObjectiveMode::ratio_max;
  CHECK(run_scenario(inst, c).metrics.total_cost <=
        run_scenario(inst, r).metrics.total_cost + 1e-9);
}

TEST_CASE("replay reproduces deterministic outputs byte for byte") {
  const auto dir = fresh_dir("bcropt_cli_replay");
  const auto inst_path = dir / "inst.json";
  const std::string cfg = configs() + "/tiny.json";
  REQUIRE(run("generate --config " + cfg + " --seed 9 --out " + inst_path.string()).status == 0);
  const auto first = dir / "first";
  REQUIRE(run("solve " + inst_path.string() +
              " --objective ratio --lambda 1 --gap 0 --workers 1 --out " + first.string())
              .status == 0);
  const auto second = dir / "second";
  REQUIRE(run("replay " + (first / "manifest.json").string() + " --out " + second.string())
              .status == 0);
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(first)) {
    const auto name = entry.path().filename().string();
    if (name == "manifest.json" || name == "timings.csv") continue;  // volatile by design
    INFO(name);
    CHECK(slurp(entry.path()) == slurp(second / name));
    ++compared;
  }
  CHECK(compared >= 2);
  // and a sweep replays the same way
  const auto sweep1 = dir / "sweep1";
  REQUIRE(run("sweep " + inst_path.string() +
              " --vary lambda --range 1:2 --objective ratio --gap 0 --out " + sweep1.string())
              .status == 0);
  const auto sweep2 = dir / "sweep2";
  REQUIRE(run("replay " + (sweep1 / "manifest.json").string() + " --out " + sweep2.string())
              .status == 0);
  for (const auto& entry : fs::directory_iterator(sweep1)) {
    const auto name = entry.path().filename().string();
    if (name == "manifest.json" || name == "timings.csv") continue;
    INFO(name);
    CHECK(slurp(entry.path()) == slurp(sweep2 / name));
  }
}

TEST_CASE("unknown subcommand exits with usage status") {
  CHECK(run("frobnicate").status == 2);
}
