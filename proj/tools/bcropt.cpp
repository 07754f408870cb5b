// Command-line front end: generate synthetic instances, solve single
// scenarios, run parameter sweeps, and replay a recorded run. Every command
// writes a manifest next to its outputs; replaying a manifest in
// single-worker mode reproduces all deterministic outputs byte for byte.
//
// Exit codes: 0 success, 1 solver failure or a violated hard assertion,
// 2 usage or configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bcropt/harness.hpp"
#include "bcropt/instance_gen.hpp"
#include "bcropt/instance_io.hpp"
#include "bcropt/manifest.hpp"
#include "bcropt/version.hpp"

namespace fs = std::filesystem;
using namespace bcropt;

namespace {

std::vector<int> parse_lambda(const std::string& text) {
  std::vector<int> out;
  std::string token;
  std::istringstream stream(text);
  while (std::getline(stream, token, ',')) out.push_back(std::stoi(token));
  if (out.empty()) throw ConfigInvalid("empty lambda specification");
  for (int v : out)
    if (v < 0) throw ConfigInvalid("lambda entries must be >= 0");
  return out;
}

// "a:b", "a:b:step" or a comma list.
std::vector<double> parse_range(const std::string& text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    double a = 0, b = 0, step = 1;
    std::string token;
    std::istringstream stream(text);
    std::getline(stream, token, ':');
    a = std::stod(token);
    std::getline(stream, token, ':');
    b = std::stod(token);
    if (std::getline(stream, token, ':')) step = std::stod(token);
    if (step <= 0) throw ConfigInvalid("range step must be positive");
    for (double v = a; v <= b + 1e-9; v += step) out.push_back(v);
  } else {
    std::string token;
    std::istringstream stream(text);
    while (std::getline(stream, token, ',')) out.push_back(std::stod(token));
  }
  if (out.empty()) throw ConfigInvalid("empty range specification");
  return out;
}

int run_command(const std::vector<std::string>& args);

int cmd_generate(const std::vector<std::string>& args) {
  CLI::App app{"generate a synthetic instance"};
  std::string config_path, out_path, name;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "generator config JSON")->required();
  app.add_option("--seed", seed, "generator seed")->required();
  app.add_option("--out", out_path, "output instance file")->required();
  app.add_option("--name", name, "override the instance name");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  RunManifest manifest;
  manifest.command = args;
  manifest.config_path = config_path;
  manifest.seed = seed;
  manifest.out_dir = fs::path(out_path).parent_path().string();
  manifest.started_at = utc_timestamp();

  GeneratorConfig cfg = load_generator_config(config_path);
  if (!name.empty()) cfg.name = name;
  Instance inst = generate_instance(cfg, seed);
  if (const auto dir = fs::path(out_path).parent_path(); !dir.empty())
    fs::create_directories(dir);
  save_instance(inst, out_path);
  manifest.finished_at = utc_timestamp();
  save_manifest(manifest, out_path + ".manifest.json");
  std::cout << "wrote " << out_path << " (" << inst.youth.size() << " youth, "
            << inst.shelters.size() << " shelters, horizon " << inst.horizon << ")\n";
  return 0;
}

int cmd_solve(const std::vector<std::string>& args) {
  CLI::App app{"solve one scenario"};
  std::string instance_path, objective = "ratio", lambda_text = "1", out_dir;
  double rho = -1.0, delta = -1.0, gap = 0.05, epsilon = -1.0;
  bool status_quo = false;
  int workers = 1;
  app.add_option("instance", instance_path, "instance file")->required();
  app.add_option("--objective", objective, "benefit|cost|profit|ratio")
      ->check(CLI::IsMember({"benefit", "cost", "profit", "ratio"}));
  app.add_option("--lambda", lambda_text, "minimum openings, single value or per-borough list");
  app.add_option("--rho", rho, "partial-returns multiplier override");
  app.add_option("--delta", delta, "free-capacity fraction override");
  app.add_option("--gap", gap, "MIP gap target (default 0.05)");
  app.add_option("--epsilon", epsilon, "ratio convergence tolerance (<0 = auto)");
  app.add_flag("--status-quo", status_quo, "fix openings and expansions to zero");
  app.add_option("--workers", workers, "node-processing workers (1 = reproducible)");
  app.add_option("--out", out_dir, "output directory")->required();
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  RunManifest manifest;
  manifest.command = args;
  manifest.config_path = instance_path;
  manifest.out_dir = out_dir;
  manifest.started_at = utc_timestamp();

  const Instance inst = load_instance(instance_path);
  manifest.seed = inst.seed;

  ScenarioSpec spec;
  spec.id = fs::path(instance_path).stem().string() + "_" + objective;
  spec.mode = objective_mode_from(objective);
  spec.lambda = parse_lambda(lambda_text);
  spec.rho = rho;
  spec.delta = delta;
  spec.gap_target = gap;
  spec.epsilon = epsilon;
  spec.status_quo_only = status_quo;
  spec.workers = workers;

  const ScenarioResult result = run_scenario(inst, spec, manifest.tol);
  fs::create_directories(out_dir);
  emit_report({result}, out_dir);
  manifest.finished_at = utc_timestamp();
  save_manifest(manifest, fs::path(out_dir) / "manifest.json");
  std::printf("%s: objective=%.6g bcr=%.6g cost=%.6g utilization=%.3f referrals=%ld opened=%d\n",
              spec.id.c_str(), result.objective_value, result.metrics.bcr,
              result.metrics.total_cost, result.metrics.utilization, result.metrics.referrals,
              result.metrics.shelters_opened);
  return 0;
}

int cmd_sweep(const std::vector<std::string>& args) {
  CLI::App app{"run a parameter sweep"};
  std::string instance_path, vary, range_text, objective = "ratio", lambda_text = "1", out_dir;
  std::string config_path;
  double gap = 0.05;
  int workers = 1, variations = 3;
  std::uint64_t seed = 1;
  app.add_option("instance", instance_path, "instance file (unused for --vary scale)");
  app.add_option("--vary", vary, "lambda|rho|cost-multiplier|scale")->required()
      ->check(CLI::IsMember({"lambda", "rho", "cost-multiplier", "scale"}));
  app.add_option("--range", range_text, "sweep values, a:b[:step] or comma list");
  app.add_option("--objective", objective, "benefit|cost|profit|ratio")
      ->check(CLI::IsMember({"benefit", "cost", "profit", "ratio"}));
  app.add_option("--lambda", lambda_text, "base lambda for non-lambda sweeps");
  app.add_option("--gap", gap, "MIP gap target");
  app.add_option("--workers", workers, "scenario workers (1 = reproducible)");
  app.add_option("--variations", variations, "borough re-assignments for cost-multiplier");
  app.add_option("--config", config_path, "generator config (required for scale)");
  app.add_option("--seed", seed, "generator seed for the scale sweep");
  app.add_option("--out", out_dir, "output directory")->required();
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  RunManifest manifest;
  manifest.command = args;
  manifest.config_path = vary == "scale" ? config_path : instance_path;
  manifest.seed = seed;
  manifest.out_dir = out_dir;
  manifest.started_at = utc_timestamp();

  ScenarioSpec base;
  base.mode = objective_mode_from(objective);
  base.lambda = parse_lambda(lambda_text);
  base.gap_target = gap;
  base.workers = workers;

  SweepOutcome outcome;
  if (vary == "scale") {
    if (config_path.empty()) throw ConfigInvalid("--vary scale needs --config");
    if (range_text.empty()) throw ConfigInvalid("--vary scale needs --range of youth counts");
    GeneratorConfig cfg = load_generator_config(config_path);
    std::vector<int> counts;
    for (double v : parse_range(range_text)) counts.push_back(static_cast<int>(v));
    base.id = cfg.name;
    outcome = sweep_scale(cfg, counts, seed, base.mode, base, manifest.tol);
  } else {
    if (instance_path.empty()) throw ConfigInvalid("sweep needs an instance file");
    const Instance inst = load_instance(instance_path);
    manifest.seed = inst.seed;
    base.id = fs::path(instance_path).stem().string();
    if (vary == "lambda") {
      if (range_text.empty()) range_text = "1:4";
      std::vector<int> values;
      for (double v : parse_range(range_text)) values.push_back(static_cast<int>(v));
      outcome = sweep_lambda(inst, base.mode, values, base, manifest.tol);
    } else if (vary == "rho") {
      if (range_text.empty()) range_text = "0.5:6:0.5";
      outcome = sweep_rho(inst, base.mode, parse_range(range_text), base, manifest.tol);
    } else {
      outcome = sweep_cost_multiplier(inst, base.mode, variations, base, manifest.tol);
    }
  }

  fs::create_directories(out_dir);
  emit_report(outcome.results, out_dir);
  manifest.finished_at = utc_timestamp();
  save_manifest(manifest, fs::path(out_dir) / "manifest.json");

  for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& v : outcome.violations) std::cerr << "violation: " << v << "\n";
  std::cout << "wrote " << outcome.results.size() << " scenario results to " << out_dir << "\n";
  return outcome.violations.empty() ? 0 : 1;
}

int cmd_replay(const std::vector<std::string>& args) {
  CLI::App app{"replay a recorded run into a new directory"};
  std::string manifest_path, out_dir;
  app.add_option("manifest", manifest_path, "manifest.json of the original run")->required();
  app.add_option("--out", out_dir, "new output directory")->required();
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }
  const RunManifest m = load_manifest(manifest_path);
  std::vector<std::string> cmd = m.command;
  // redirect --out to the replay directory
  bool redirected = false;
  for (std::size_t i = 0; i + 1 < cmd.size(); ++i) {
    if (cmd[i] == "--out") {
      // generate writes a file; keep its filename inside the new directory
      if (cmd[0] == "generate")
        cmd[i + 1] = (fs::path(out_dir) / fs::path(cmd[i + 1]).filename()).string();
      else
        cmd[i + 1] = out_dir;
      redirected = true;
    }
  }
  if (!redirected) throw ConfigInvalid("manifest command has no --out to redirect");
  fs::create_directories(out_dir);
  return run_command(cmd);
}

int run_command(const std::vector<std::string>& args) {
  if (args.empty()) return 2;
  const std::string& sub = args[0];
  if (sub == "generate") return cmd_generate(args);
  if (sub == "solve") return cmd_solve(args);
  if (sub == "sweep") return cmd_sweep(args);
  if (sub == "replay") return cmd_replay(args);
  std::cerr << "unknown subcommand '" << sub << "'\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    std::cout << "bcropt " << kVersion
              << " - benefit-to-cost-ratio optimization for shelter capacity expansion\n"
                 "usage: bcropt <generate|solve|sweep|replay> [options]\n"
                 "  generate --config cfg.json --seed N --out inst.json\n"
                 "  solve inst.json --objective ratio --lambda 1 --gap 0.05 --out dir\n"
                 "  sweep inst.json --vary lambda --range 1:4 --objective ratio --out dir\n"
                 "  replay dir/manifest.json --out newdir\n"
                 "run a subcommand with --help for its full option list\n";
    return args.empty() ? 2 : 0;
  }
  if (args[0] == "--version") {
    std::cout << kVersion << "\n";
    return 0;
  }
  try {
    return run_command(args);
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SchemaVersionMismatch& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidScenario& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const InfeasibleLambda& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
