#pragma once

// Scenario runner and experiment sweeps: the status-quo baseline, the
// four-objective comparison, and the lambda / rho / cost / scale studies,
// with metrics always recomputed from the decoded plan rather than trusted
// from solver objective values. Reports are deterministic; wall-clock times
// go to a separate volatile sidecar so replayed runs stay byte-identical.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcropt/errors.hpp"
#include "bcropt/fractional.hpp"
#include "bcropt/instance.hpp"
#include "bcropt/instance_gen.hpp"
#include "bcropt/instance_io.hpp"
#include "bcropt/mip.hpp"
#include "bcropt/rhy_model.hpp"

namespace bcropt {

struct Metrics {
  double bcr = 0.0;
  double total_benefit = 0.0;
  double total_cost = 0.0;
  long referrals = 0;        // provisions delivered by referral organizations
  long in_house = 0;         // provisions delivered inside the shelter system
  long total_fulfilled = 0;
  double utilization = 1.0;  // in_house / total_fulfilled
  int shelters_opened = 0;
  long expansion_units = 0;
};

inline Metrics compute_metrics(const AssignmentPlan& plan, const BuiltModel& built) {
  Metrics m;
  const auto x = encode(built, plan);
  m.total_benefit = built.fractional.benefit.value(x);
  m.total_cost = built.fractional.cost.value(x);
  m.bcr = m.total_cost > 0.0 ? m.total_benefit / m.total_cost : 0.0;
  for (const auto& a : plan.assignments) {
    if (built.instance.shelters[a.shelter].kind == ShelterKind::referral)
      ++m.referrals;
    else
      ++m.in_house;
  }
  m.total_fulfilled = m.referrals + m.in_house;
  m.utilization = m.total_fulfilled > 0
                      ? static_cast<double>(m.in_house) / static_cast<double>(m.total_fulfilled)
                      : 1.0;
  m.shelters_opened = static_cast<int>(plan.opened_shelters.size());
  for (const auto& e : plan.expansions) m.expansion_units += e.units;
  return m;
}

struct ScenarioSpec {
  std::string id;
  ObjectiveMode mode = ObjectiveMode::ratio_max;
  std::vector<int> lambda;  // one entry per borough; a single entry is broadcast
  double rho = -1.0;        // < 0 keeps the instance value
  double delta = -1.0;      // < 0 keeps the instance value
  bool status_quo_only = false;
  double gap_target = 0.05;
  double epsilon = -1.0;    // < 0 lets the ratio solver scale it
  int max_ratio_iterations = 50;
  int workers = 1;
  std::string sweep_param;  // set by sweeps, e.g. "lambda"
  double sweep_value = 0.0;
};

struct SolveStats {
  int ratio_iterations = 0;
  long nodes = 0;
  double gap = 0.0;
  double wall_seconds = 0.0;  // volatile, excluded from deterministic outputs
  std::string status;
};

struct ScenarioResult {
  ScenarioSpec spec;
  int num_youth = 0;
  Metrics metrics;
  SolveStats stats;
  double objective_value = 0.0;
  double best_ratio_seen = 0.0;
  std::vector<double> q_sequence;
  std::vector<int> opened_shelters;
  std::map<int, int> youth_per_shelter;  // distinct youth with any assignment
  std::vector<std::string> warnings;
};

namespace harness_detail {

inline std::vector<int> broadcast_lambda(const std::vector<int>& lambda, int boroughs) {
  if (static_cast<int>(lambda.size()) == boroughs) return lambda;
  if (lambda.size() == 1) return std::vector<int>(boroughs, lambda[0]);
  throw InvalidScenario("lambda must have one entry or one per borough");
}

inline double mode_objective_from_plan(ObjectiveMode mode, const Metrics& m) {
  switch (mode) {
    case ObjectiveMode::benefit_max: return m.total_benefit;
    case ObjectiveMode::cost_min: return -m.total_cost;
    case ObjectiveMode::profit_max: return m.total_benefit - m.total_cost;
    case ObjectiveMode::ratio_max: return m.bcr;
  }
  return 0.0;
}

}  // namespace harness_detail

inline ScenarioResult run_scenario(const Instance& inst, const ScenarioSpec& spec_in,
                                   const ToleranceConfig& tol = {}) {
  ScenarioSpec spec = spec_in;
  spec.lambda =
      harness_detail::broadcast_lambda(spec.lambda, static_cast<int>(inst.boroughs.size()));
  const int max_lambda = *std::max_element(spec.lambda.begin(), spec.lambda.end());
  if (max_lambda > inst.num_candidates())
    throw InfeasibleLambda("scenario '" + spec.id + "': lambda " + std::to_string(max_lambda) +
                           " exceeds the " + std::to_string(inst.num_candidates()) +
                           " available candidates");
  // Zero required action under the ratio objective is the "do nothing"
  // regime where the marginal denominator degenerates; refuse it unless the
  // caller explicitly asked for the status-quo baseline.
  if (spec.mode == ObjectiveMode::ratio_max && !spec.status_quo_only && max_lambda == 0)
    throw InvalidScenario("scenario '" + spec.id +
                          "': ratio objective needs an action constraint (lambda >= 1); "
                          "use the status-quo baseline for the do-nothing case");

  ModelOptions options;
  options.lambda = spec.lambda;
  options.status_quo_only = spec.status_quo_only;
  options.rho_override = spec.rho;
  options.delta_override = spec.delta;

  const auto t0 = std::chrono::steady_clock::now();
  ScenarioResult res;
  res.spec = spec;
  res.num_youth = static_cast<int>(inst.youth.size());

  try {
    BuiltModel built = build_model(inst, spec.mode, options);

    MipConfig mip_cfg;
    mip_cfg.gap_target = spec.gap_target;
    mip_cfg.workers = spec.workers;
    mip_cfg.tol = tol;

    // Seed the search with a rounded relaxation (referral cells as the
    // always-feasible fallback) so branch and bound starts with a strong
    // incumbent instead of diving for one. The ratio mode's first subproblem
    // maximizes the benefit form, so its relaxation guides that seed.
    std::vector<double> seed_x;
    {
      LinearProgram relax = built.fractional.constraints.base;
      if (spec.mode == ObjectiveMode::ratio_max) {
        relax.objective = built.fractional.benefit.coef;
        relax.objective_offset = built.fractional.benefit.constant;
      }
      AssignmentPlan seed_plan;
      try {
        const LpSolution rel = solve_lp(relax, tol);
        seed_plan = rel.status == LpStatus::optimal ? greedy_plan(built, rel.primal)
                                                    : fallback_plan(built);
        improve_plan(built, seed_plan, relax.objective);
      } catch (const Error&) {
        seed_plan = fallback_plan(built);
      }
      seed_x = encode(built, seed_plan);
    }

    std::vector<double> x;
    if (spec.mode == ObjectiveMode::ratio_max) {
      RatioSolution rs = maximize_ratio(built.fractional, spec.epsilon, mip_cfg,
                                        spec.max_ratio_iterations, seed_x);
      if (rs.status == RatioStatus::iteration_limit)
        throw ScenarioFailure("ratio solve hit the iteration limit");
      x = rs.x_star;
      res.objective_value = rs.q_star;
      res.best_ratio_seen = rs.best_ratio_seen;
      res.stats.ratio_iterations = static_cast<int>(rs.iterations.size());
      for (const auto& it : rs.iterations) {
        res.q_sequence.push_back(it.q);
        res.stats.nodes += it.nodes;
        res.stats.gap = it.sub_gap;
      }
      res.stats.status = "converged";
      if (!rs.warning.empty()) res.warnings.push_back(rs.warning);
    } else {
      MipSolution sol = solve_mip(built.fractional.constraints, mip_cfg, seed_x);
      if (sol.status == MipStatus::infeasible)
        throw ScenarioFailure("model is infeasible");
      if (sol.status == MipStatus::feasible || sol.status == MipStatus::time_limit)
        throw ScenarioFailure("solver stopped on a limit before reaching the gap target");
      x = sol.incumbent;
      res.objective_value = sol.objective_value;
      res.stats.nodes = sol.nodes_explored;
      res.stats.gap = sol.gap;
      res.stats.status = sol.status == MipStatus::optimal ? "optimal" : "gap_limit";
    }

    const auto check = check_solution(built, x);
    if (!check.ok(tol))
      throw ScenarioFailure("solution failed the feasibility recheck (violation " +
                            std::to_string(check.row_violation) + ")");

    const AssignmentPlan plan = decode(built, x);
    res.metrics = compute_metrics(plan, built);
    res.opened_shelters = plan.opened_shelters;
    {
      std::map<int, std::vector<int>> youth_at;
      for (const auto& a : plan.assignments) youth_at[a.shelter].push_back(a.youth);
      for (auto& [s, ys] : youth_at) {
        std::sort(ys.begin(), ys.end());
        res.youth_per_shelter[s] =
            static_cast<int>(std::unique(ys.begin(), ys.end()) - ys.begin());
      }
    }

    // The plan's own value must agree with what the solver reported.
    const double recomputed = harness_detail::mode_objective_from_plan(spec.mode, res.metrics);
    if (std::abs(recomputed - res.objective_value) >
        tol.duality_gap * (1.0 + std::abs(res.objective_value)) + 1e-9)
      throw ScenarioFailure("plan metrics disagree with the solver objective (" +
                            std::to_string(recomputed) + " vs " +
                            std::to_string(res.objective_value) + ")");
  } catch (const ScenarioFailure&) {
    throw;
  } catch (const Error& e) {
    throw ScenarioFailure("scenario '" + spec.id + "' [" + to_string(spec.mode) +
                          "] failed: " + e.what());
  }

  res.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepOutcome {
  std::vector<ScenarioResult> results;
  std::vector<std::string> violations;  // hard failures under exact solves
  std::vector<std::string> warnings;
};

/// Vary the minimum-openings requirement. Under exact solves a shrinking
/// feasible set makes the optimal BCR nonincreasing, asserted here; under a
/// positive gap the same check only warns.
inline SweepOutcome sweep_lambda(const Instance& inst, ObjectiveMode mode,
                                 const std::vector<int>& lambda_values,
                                 const ScenarioSpec& base, const ToleranceConfig& tol = {}) {
  SweepOutcome out;
  for (int v : lambda_values) {
    ScenarioSpec spec = base;
    spec.mode = mode;
    spec.lambda = {v};
    spec.id = base.id + "_lambda" + std::to_string(v);
    spec.sweep_param = "lambda";
    spec.sweep_value = v;
    out.results.push_back(run_scenario(inst, spec, tol));
  }
  if (mode == ObjectiveMode::ratio_max) {
    for (std::size_t i = 1; i < out.results.size(); ++i) {
      const double prev = out.results[i - 1].metrics.bcr;
      const double cur = out.results[i].metrics.bcr;
      if (cur > prev + 1e-9 * (1.0 + std::abs(prev))) {
        const std::string msg = "BCR increased from " + std::to_string(prev) + " to " +
                                std::to_string(cur) + " at lambda " +
                                std::to_string(lambda_values[i]);
        if (base.gap_target == 0.0)
          out.violations.push_back(msg);
        else
          out.warnings.push_back(msg + " (inexact solves, downgraded to a warning)");
      }
    }
  }
  return out;
}

/// Vary the partial-returns multiplier rho.
inline SweepOutcome sweep_rho(const Instance& inst, ObjectiveMode mode,
                              const std::vector<double>& rho_values, const ScenarioSpec& base,
                              const ToleranceConfig& tol = {}) {
  SweepOutcome out;
  for (double rho : rho_values) {
    ScenarioSpec spec = base;
    spec.mode = mode;
    spec.rho = rho;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", rho);
    spec.id = base.id + "_rho" + buf;
    spec.sweep_param = "rho";
    spec.sweep_value = rho;
    out.results.push_back(run_scenario(inst, spec, tol));
  }
  return out;
}

/// Re-draw candidate borough assignments (cost variations) and re-solve.
inline SweepOutcome sweep_cost_multiplier(const Instance& inst, ObjectiveMode mode,
                                          int variations, const ScenarioSpec& base,
                                          const ToleranceConfig& tol = {}) {
  SweepOutcome out;
  for (int v = 0; v < variations; ++v) {
    Instance variant = inst;
    if (v > 0) {
      for (std::size_t s = 0; s < variant.shelters.size(); ++s) {
        if (variant.shelters[s].kind != ShelterKind::new_candidate) continue;
        variant.shelters[s].borough = static_cast<int>(
            hash_combine(hash_combine(inst.seed, static_cast<std::uint64_t>(v)), s) %
            variant.boroughs.size());
      }
    }
    ScenarioSpec spec = base;
    spec.mode = mode;
    spec.id = base.id + "_costvar" + std::to_string(v);
    spec.sweep_param = "cost_variation";
    spec.sweep_value = v;
    out.results.push_back(run_scenario(variant, spec, tol));
  }
  for (std::size_t i = 1; i < out.results.size(); ++i)
    if (out.results[i].opened_shelters != out.results[0].opened_shelters)
      out.warnings.push_back("cost variation " + std::to_string(i) +
                             " opened a different shelter set");
  return out;
}

/// Regenerate instances at different youth counts and re-solve.
inline SweepOutcome sweep_scale(const GeneratorConfig& cfg, const std::vector<int>& youth_counts,
                                std::uint64_t seed, ObjectiveMode mode, const ScenarioSpec& base,
                                const ToleranceConfig& tol = {}) {
  SweepOutcome out;
  for (int n : youth_counts) {
    GeneratorConfig scaled = cfg;
    scaled.num_youth = n;
    const Instance inst = generate_instance(scaled, seed);
    ScenarioSpec spec = base;
    spec.mode = mode;
    spec.id = base.id + "_scale" + std::to_string(n);
    spec.sweep_param = "num_youth";
    spec.sweep_value = n;
    out.results.push_back(run_scenario(inst, spec, tol));
  }
  return out;
}

// ---------------------------------------------------------------------------
// objective comparison

struct ObjectiveComparison {
  std::vector<ScenarioResult> rows;  // benefit, cost, profit, ratio order
  bool cost_ordering = false;        // cost_min <= ratio <= profit on total cost
  bool utilization_ordering = false; // cost_min <= ratio <= profit on utilization
  bool ratio_is_max = false;         // ratio mode attains the best BCR
  bool profit_opens_all = false;
};

inline ObjectiveComparison compare_objectives(const Instance& inst,
                                              const std::vector<int>& lambda,
                                              const ScenarioSpec& base,
                                              const ToleranceConfig& tol = {}) {
  ObjectiveComparison cmp;
  for (ObjectiveMode mode : {ObjectiveMode::benefit_max, ObjectiveMode::cost_min,
                             ObjectiveMode::profit_max, ObjectiveMode::ratio_max}) {
    ScenarioSpec spec = base;
    spec.mode = mode;
    spec.lambda = lambda;
    spec.id = base.id + "_" + to_string(mode);
    cmp.rows.push_back(run_scenario(inst, spec, tol));
  }
  const Metrics& cost_m = cmp.rows[1].metrics;
  const Metrics& profit_m = cmp.rows[2].metrics;
  const Metrics& ratio_m = cmp.rows[3].metrics;
  const double tolc = 1e-9;
  cmp.cost_ordering = cost_m.total_cost <= ratio_m.total_cost * (1 + tolc) + tolc &&
                      ratio_m.total_cost <= profit_m.total_cost * (1 + tolc) + tolc;
  cmp.utilization_ordering = cost_m.utilization <= ratio_m.utilization + 1e-9 &&
                             ratio_m.utilization <= profit_m.utilization + 1e-9;
  double best_other = 0.0;
  for (int i = 0; i < 3; ++i) best_other = std::max(best_other, cmp.rows[i].metrics.bcr);
  cmp.ratio_is_max = ratio_m.bcr >= best_other - 1e-9 * (1.0 + best_other);
  cmp.profit_opens_all = profit_m.shelters_opened == inst.num_candidates();
  return cmp;
}

// ---------------------------------------------------------------------------
// reporting

namespace harness_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string lambda_text(const std::vector<int>& lambda) {
  std::string s;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    s += (i ? "|" : "") + std::to_string(lambda[i]);
  return s;
}

}  // namespace harness_detail

inline ordered_json to_json(const ScenarioResult& r) {
  ordered_json j;
  j["scenario_id"] = r.spec.id;
  j["objective"] = to_string(r.spec.mode);
  j["lambda"] = r.spec.lambda;
  j["rho"] = r.spec.rho;
  j["delta"] = r.spec.delta;
  j["status_quo_only"] = r.spec.status_quo_only;
  j["gap_target"] = r.spec.gap_target;
  j["num_youth"] = r.num_youth;
  j["metrics"] = {{"bcr", r.metrics.bcr},
                  {"total_benefit", r.metrics.total_benefit},
                  {"total_cost", r.metrics.total_cost},
                  {"referrals", r.metrics.referrals},
                  {"in_house", r.metrics.in_house},
                  {"total_fulfilled", r.metrics.total_fulfilled},
                  {"utilization", r.metrics.utilization},
                  {"shelters_opened", r.metrics.shelters_opened},
                  {"expansion_units", r.metrics.expansion_units}};
  j["objective_value"] = r.objective_value;
  j["best_ratio_seen"] = r.best_ratio_seen;
  j["q_sequence"] = r.q_sequence;
  j["solver"] = {{"status", r.stats.status},
                 {"ratio_iterations", r.stats.ratio_iterations},
                 {"nodes", r.stats.nodes},
                 {"gap", r.stats.gap}};
  j["opened_shelters"] = r.opened_shelters;
  ordered_json counts = ordered_json::object();
  for (const auto& [s, n] : r.youth_per_shelter) counts[std::to_string(s)] = n;
  j["youth_per_shelter"] = counts;
  j["warnings"] = r.warnings;
  return j;
}

/// Writes the aggregate CSV, one JSON document per scenario, per-sweep series
/// files, and the volatile timing sidecar. Rerunning with the same results
/// reproduces every file byte for byte except timings.csv.
inline void emit_report(const std::vector<ScenarioResult>& results,
                        const std::filesystem::path& out_dir) {
  if (results.empty()) throw IoError("refusing to write a report with no results");
  std::filesystem::create_directories(out_dir);
  std::vector<const ScenarioResult*> sorted;
  for (const auto& r : results) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const ScenarioResult* a, const ScenarioResult* b) {
              return a->spec.id < b->spec.id;
            });

  {
    std::ofstream csv(out_dir / "results.csv");
    if (!csv) throw IoError("cannot write " + (out_dir / "results.csv").string());
    csv << "scenario_id,objective,lambda,rho,delta,num_youth,bcr,total_benefit,total_cost,"
           "referrals,utilization,shelters_opened,expansion_units,iterations,nodes,gap\n";
    for (const auto* r : sorted) {
      using harness_detail::fmt;
      csv << r->spec.id << ',' << to_string(r->spec.mode) << ','
          << harness_detail::lambda_text(r->spec.lambda) << ',' << fmt(r->spec.rho) << ','
          << fmt(r->spec.delta) << ',' << r->num_youth << ',' << fmt(r->metrics.bcr) << ','
          << fmt(r->metrics.total_benefit) << ',' << fmt(r->metrics.total_cost) << ','
          << r->metrics.referrals << ',' << fmt(r->metrics.utilization) << ','
          << r->metrics.shelters_opened << ',' << r->metrics.expansion_units << ','
          << r->stats.ratio_iterations << ',' << r->stats.nodes << ',' << fmt(r->stats.gap)
          << '\n';
    }
  }
  {
    std::ofstream timing(out_dir / "timings.csv");
    timing << "scenario_id,wall_seconds\n";
    for (const auto* r : sorted)
      timing << r->spec.id << ',' << harness_detail::fmt(r->stats.wall_seconds) << '\n';
  }
  for (const auto* r : sorted) {
    std::ofstream doc(out_dir / (r->spec.id + ".json"));
    if (!doc) throw IoError("cannot write scenario document for " + r->spec.id);
    doc << to_json(*r).dump(2) << "\n";
  }
  // series files per sweep parameter
  std::map<std::string, std::vector<const ScenarioResult*>> by_param;
  for (const auto* r : sorted)
    if (!r->spec.sweep_param.empty()) by_param[r->spec.sweep_param].push_back(r);
  for (auto& [param, rows] : by_param) {
    std::sort(rows.begin(), rows.end(), [](const ScenarioResult* a, const ScenarioResult* b) {
      return a->spec.sweep_value < b->spec.sweep_value;
    });
    std::ofstream series(out_dir / ("series_" + param + ".csv"));
    series << param << ",bcr,total_cost,utilization,referrals\n";
    for (const auto* r : rows) {
      using harness_detail::fmt;
      series << fmt(r->spec.sweep_value) << ',' << fmt(r->metrics.bcr) << ','
             << fmt(r->metrics.total_cost) << ',' << fmt(r->metrics.utilization) << ','
             << r->metrics.referrals << '\n';
    }
  }
}

}  // namespace bcropt
