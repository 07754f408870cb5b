#pragma once

// Assembles the shelter capacity-expansion model: assignment variables X over
// pruned time windows, opening decisions nu, ever-assigned indicators pi,
// time shares U, expansion units E, the action constraints that force
// movement beyond the status quo, and the operational constraint system.
// The benefit and cost forms are always populated so any objective mode can
// report the same metrics.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "bcropt/errors.hpp"
#include "bcropt/fractional.hpp"
#include "bcropt/instance.hpp"
#include "bcropt/mip.hpp"

namespace bcropt {

enum class ObjectiveMode { benefit_max, cost_min, profit_max, ratio_max };

inline const char* to_string(ObjectiveMode m) {
  switch (m) {
    case ObjectiveMode::benefit_max: return "benefit";
    case ObjectiveMode::cost_min: return "cost";
    case ObjectiveMode::profit_max: return "profit";
    case ObjectiveMode::ratio_max: return "ratio";
  }
  return "?";
}

inline ObjectiveMode objective_mode_from(const std::string& s) {
  if (s == "benefit" || s == "benefit_max") return ObjectiveMode::benefit_max;
  if (s == "cost" || s == "cost_min") return ObjectiveMode::cost_min;
  if (s == "profit" || s == "profit_max") return ObjectiveMode::profit_max;
  if (s == "ratio" || s == "ratio_max") return ObjectiveMode::ratio_max;
  throw ConfigInvalid("unknown objective mode '" + s + "'");
}

enum class RhyVar { assignment, open, ever_assigned, time_share, expansion };

struct VarKey {
  RhyVar kind;
  int youth = -1;
  int shelter = -1;
  int service = -1;
  int time = -1;
};

struct ModelOptions {
  std::vector<int> lambda;  // one minimum-openings entry per borough
  bool status_quo_only = false;
  double rho_override = -1.0;    // < 0 keeps the instance's returns multiplier
  double delta_override = -1.0;  // < 0 keeps the instance's delta
  std::optional<int> critical_mass_override;
};

struct BuildDiagnostics {
  long x_unpruned_bound = 0;  // |Y| |S| |I| |T|
  long x_created = 0;
  long clipped_slot_terms = 0;  // A10/A11 guard terms dropped at the window edges
  std::map<std::string, long> rows_per_family;
  std::vector<std::string> notes;
};

struct BuiltModel {
  Instance instance;  // immutable snapshot the model was built from
  ObjectiveMode mode = ObjectiveMode::ratio_max;
  ModelOptions options;
  FractionalModel fractional;
  std::vector<VarKey> columns;
  int num_vars = 0;
  int num_binaries = 0;
  int num_constraints = 0;
  BuildDiagnostics diag;

  // column lookups
  std::vector<int> nu_col;                          // per candidate order
  std::vector<int> candidate_shelters;              // shelter index per candidate order
  std::vector<int> pi_col;                          // y * |S| + s
  std::vector<std::vector<std::vector<int>>> u_col; // [y][req][s]
  std::vector<std::vector<std::vector<int>>> x_col; // [y][req][s], first column of the window
  std::vector<std::vector<std::vector<int>>> x_times;  // [y][req], active times ascending
  std::map<std::tuple<int, int, int>, int> e_col;   // (s, i, t) -> column

  int x_column(int y, int req, int s, int t) const {
    const auto& times = x_times[y][req];
    const auto it = std::lower_bound(times.begin(), times.end(), t);
    if (it == times.end() || *it != t) return -1;
    const int base = x_col[y][req][s];
    return base < 0 ? -1 : base + static_cast<int>(it - times.begin());
  }
};

namespace rhy_detail {

struct Window {
  int t0, t1;  // inclusive active range of X, clipped to the horizon
  int a, b;    // start window
};

inline Window request_window(const Instance& inst, const YouthProfile& y,
                             const ServiceRequest& r) {
  const int last = inst.horizon - 1;
  Window w;
  w.a = std::max(y.arrival, r.earliest_start);
  w.b = std::min(r.latest_start, last);
  w.t0 = w.a;
  w.t1 = std::min(r.latest_start + r.duration, last);
  if (w.t0 > w.t1 || w.a > w.b)
    throw InfeasibleWindow("youth " + std::to_string(y.id) + " service " +
                           std::to_string(r.service) +
                           " has an empty window after horizon clipping");
  return w;
}

/// Provision slot centers for a periodic request, anchored at its earliest
/// start: slot t covers a + (t-1)*omega +/- k.
inline std::vector<int> slot_centers(const ServiceRequest& r) {
  std::vector<int> centers;
  for (int t = 0; t < r.frequency; ++t) centers.push_back(r.earliest_start + t * r.period_gap);
  return centers;
}

/// Times an assignment variable may exist at. Non-periodic requests span the
/// whole clipped window; periodic ones live only inside the union of slot
/// windows, since the published constraints say nothing about the gaps in
/// between and a provision there would be meaningless.
inline std::vector<int> active_times(const Instance& inst, const YouthProfile& y,
                                     const ServiceRequest& r, long* clipped = nullptr) {
  const Window w = request_window(inst, y, r);
  std::vector<int> times;
  if (!inst.services[r.service].periodic) {
    for (int t = w.t0; t <= w.t1; ++t) times.push_back(t);
    return times;
  }
  const int k_i = inst.services[r.service].flexibility;
  std::set<int> unique_times;
  for (int center : slot_centers(r)) {
    bool alive = false;
    for (int k = -k_i; k <= k_i; ++k) {
      const int t = center + k;
      if (t < w.t0 || t > w.t1) {
        if (clipped != nullptr) ++*clipped;
        continue;
      }
      alive = true;
      unique_times.insert(t);
    }
    if (!alive)
      throw InfeasibleWindow("youth " + std::to_string(y.id) + " service " +
                             std::to_string(r.service) + " has a provision slot at t=" +
                             std::to_string(center) + " entirely outside its window");
  }
  times.assign(unique_times.begin(), unique_times.end());
  return times;
}

}  // namespace rhy_detail

inline BuiltModel build_model(const Instance& inst, ObjectiveMode mode,
                              const ModelOptions& options) {
  inst.validate();
  if (static_cast<int>(options.lambda.size()) != static_cast<int>(inst.boroughs.size()))
    throw MissingParameter("lambda must list one entry per borough (got " +
                           std::to_string(options.lambda.size()) + ", need " +
                           std::to_string(inst.boroughs.size()) + ")");

  BuiltModel built;
  built.instance = inst;
  built.mode = mode;
  built.options = options;

  const int S = static_cast<int>(inst.shelters.size());
  const int Y = static_cast<int>(inst.youth.size());
  const int I = static_cast<int>(inst.services.size());
  const int T = inst.horizon;
  const double rho = options.rho_override >= 0.0 ? options.rho_override
                                                 : inst.benefit.returns_multiplier;
  const double delta = options.delta_override;
  const double m_eff = inst.benefit.medicaid_savings * inst.benefit.inflation_multiplier;

  MixedIntegerProgram& mip = built.fractional.constraints;
  LinearProgram& lp = mip.base;
  lp.sense = Sense::maximize;
  std::vector<double>& bcoef = built.fractional.benefit.coef;
  std::vector<double>& ccoef = built.fractional.cost.coef;

  auto cap = [&](int s, int i, int t) { return inst.capacity(s, i, t, delta); };

  auto new_col = [&](VarKey key, double lb, double ub, VarKind kind, double benefit,
                     double cost) {
    const int col = lp.add_var(lb, ub, 0.0);
    mip.kind.push_back(kind);
    built.columns.push_back(key);
    bcoef.push_back(benefit);
    ccoef.push_back(cost);
    if (kind == VarKind::binary) ++built.num_binaries;
    return col;
  };

  // --- opening decisions ---
  for (int s = 0; s < S; ++s) {
    if (inst.shelters[s].kind != ShelterKind::new_candidate) continue;
    const double open_cost = opening_cost(inst, s);
    const double open_return = partial_return(open_cost, rho);
    const double ub = options.status_quo_only ? 0.0 : 1.0;
    const int col = new_col(VarKey{RhyVar::open, -1, s, -1, -1}, 0.0, ub, VarKind::binary,
                            open_return, open_cost);
    built.nu_col.push_back(col);
    built.candidate_shelters.push_back(s);
  }

  // --- expansion units, only where the shelter offers the service and the
  // ceiling leaves room (the no-service pruning rule) ---
  for (int s = 0; s < S; ++s) {
    const ShelterProfile& sh = inst.shelters[s];
    if (sh.kind == ShelterKind::referral) continue;
    for (int i = 0; i < I; ++i) {
      if (!sh.attributes[i]) continue;
      for (int t = 0; t < T; ++t) {
        const int room = inst.max_capacity(s, i) - cap(s, i, t);
        if (room < 1) continue;
        const double ub = options.status_quo_only ? 0.0 : static_cast<double>(room);
        const int col = new_col(VarKey{RhyVar::expansion, -1, s, i, t}, 0.0, ub,
                                VarKind::integer, 0.0, inst.cost.expansion_unit_cost[i]);
        built.e_col[{s, i, t}] = col;
      }
    }
  }
  built.diag.rows_per_family["A3_expansion_ceiling_bounds"] =
      static_cast<long>(built.e_col.size());

  // --- ever-assigned indicators ---
  built.pi_col.assign(static_cast<std::size_t>(Y) * S, -1);
  for (int y = 0; y < Y; ++y)
    for (int s = 0; s < S; ++s)
      built.pi_col[static_cast<std::size_t>(y) * S + s] =
          new_col(VarKey{RhyVar::ever_assigned, y, s, -1, -1}, 0.0, 1.0, VarKind::binary,
                  0.0, 0.0);

  // --- time shares and assignments over pruned windows ---
  built.u_col.resize(Y);
  built.x_col.resize(Y);
  built.x_times.resize(Y);
  built.diag.x_unpruned_bound = static_cast<long>(Y) * S * I * T;
  for (int y = 0; y < Y; ++y) {
    const YouthProfile& yp = inst.youth[y];
    const int R = static_cast<int>(yp.requests.size());
    built.u_col[y].assign(R, std::vector<int>(S, -1));
    built.x_col[y].assign(R, std::vector<int>(S, -1));
    built.x_times[y].resize(R);
    for (int req = 0; req < R; ++req) {
      const ServiceRequest& r = yp.requests[req];
      const auto times = rhy_detail::active_times(inst, yp, r, &built.diag.clipped_slot_terms);
      built.x_times[y][req] = times;
      if (!inst.services[r.service].periodic &&
          r.frequency > static_cast<int>(times.size()))
        throw InfeasibleWindow("youth " + std::to_string(yp.id) + " service " +
                               std::to_string(r.service) + " needs " +
                               std::to_string(r.frequency) + " provisions in a window of " +
                               std::to_string(times.size()));
      for (int s = 0; s < S; ++s)
        built.u_col[y][req][s] = new_col(VarKey{RhyVar::time_share, y, s, r.service, -1},
                                         0.0, 1.0, VarKind::continuous, 0.0, 0.0);
      for (int s = 0; s < S; ++s) {
        const bool referral = inst.shelters[s].kind == ShelterKind::referral;
        int first = -1;
        for (int t : times) {
          const double f_benefit =
              referral ? 0.0
                       : (m_eff + inst.benefit.labor_productivity) /
                             ((1.0 + t - r.earliest_start) * r.frequency);
          const int col = new_col(VarKey{RhyVar::assignment, y, s, r.service, t}, 0.0, 1.0,
                                  VarKind::binary, f_benefit, inst.assignment_cost(s));
          if (first < 0) first = col;
        }
        built.x_col[y][req][s] = first;
        built.diag.x_created += static_cast<long>(times.size());
      }
    }
  }

  built.fractional.benefit.constant = 0.0;
  built.fractional.cost.constant = 0.0;

  // --- objective per mode; the ratio mode leaves it to the Newton loop ---
  switch (mode) {
    case ObjectiveMode::benefit_max:
      lp.objective = bcoef;
      break;
    case ObjectiveMode::cost_min:
      for (int j = 0; j < lp.num_vars; ++j) lp.objective[j] = -ccoef[j];
      break;
    case ObjectiveMode::profit_max:
      for (int j = 0; j < lp.num_vars; ++j) lp.objective[j] = bcoef[j] - ccoef[j];
      break;
    case ObjectiveMode::ratio_max:
      break;
  }

  auto add_row = [&](std::vector<std::pair<int, double>> terms, Relation rel, double rhs,
                     const char* family) {
    if (terms.empty()) return;
    lp.add_row(std::move(terms), rel, rhs, family);
    ++built.diag.rows_per_family[family];
  };

  const int num_candidates = static_cast<int>(built.nu_col.size());

  // (12a) at least lambda_l new openings; the row sums every candidate, per
  // the published formulation, so entries act through their maximum.
  for (int l = 0; l < static_cast<int>(inst.boroughs.size()); ++l) {
    if (options.lambda[l] <= 0) continue;
    std::vector<std::pair<int, double>> terms;
    for (int c = 0; c < num_candidates; ++c) terms.emplace_back(built.nu_col[c], 1.0);
    if (terms.empty() && options.lambda[l] > 0)
      throw InfeasibleLambda("lambda requires openings but the instance has no candidates");
    add_row(std::move(terms), Relation::greater_equal,
            static_cast<double>(options.lambda[l]), "12a_min_openings");
  }

  // (12b) critical mass of distinct youth per opened candidate
  for (int c = 0; c < num_candidates; ++c) {
    const int s = built.candidate_shelters[c];
    const int k_s = options.critical_mass_override.value_or(inst.shelters[s].critical_mass);
    std::vector<std::pair<int, double>> terms;
    for (int y = 0; y < Y; ++y)
      terms.emplace_back(built.pi_col[static_cast<std::size_t>(y) * S + s], 1.0);
    terms.emplace_back(built.nu_col[c], -static_cast<double>(k_s));
    add_row(std::move(terms), Relation::greater_equal, 0.0, "12b_critical_mass");
  }

  // (12c) time shares only at opened candidates
  for (int c = 0; c < num_candidates; ++c) {
    const int s = built.candidate_shelters[c];
    std::vector<std::pair<int, double>> terms;
    for (int y = 0; y < Y; ++y)
      for (std::size_t req = 0; req < built.u_col[y].size(); ++req)
        terms.emplace_back(built.u_col[y][req][s], 1.0);
    terms.emplace_back(built.nu_col[c], -static_cast<double>(I) * Y);
    add_row(std::move(terms), Relation::less_equal, 0.0, "12c_open_linkage");
  }

  // (12d) time shares only where the youth is ever assigned
  for (int y = 0; y < Y; ++y) {
    if (built.u_col[y].empty()) continue;
    for (int s = 0; s < S; ++s) {
      std::vector<std::pair<int, double>> terms;
      for (std::size_t req = 0; req < built.u_col[y].size(); ++req)
        terms.emplace_back(built.u_col[y][req][s], 1.0);
      terms.emplace_back(built.pi_col[static_cast<std::size_t>(y) * S + s],
                         -static_cast<double>(I));
      add_row(std::move(terms), Relation::less_equal, 0.0, "12d_assignment_linkage");
    }
  }

  const long action_rows = built.diag.rows_per_family["12a_min_openings"] +
                           built.diag.rows_per_family["12b_critical_mass"] +
                           built.diag.rows_per_family["12c_open_linkage"] +
                           built.diag.rows_per_family["12d_assignment_linkage"];
  const long action_bound = 2L * num_candidates + static_cast<long>(inst.boroughs.size()) +
                            static_cast<long>(Y) * S;
  if (action_rows > action_bound)
    throw Error("internal: action constraint count exceeds the published bound");

  // (A2) youth served within expanded capacity, per (shelter, service, time)
  for (int s = 0; s < S; ++s) {
    for (int i = 0; i < I; ++i) {
      for (int t = 0; t < T; ++t) {
        std::vector<std::pair<int, double>> terms;
        for (int y = 0; y < Y; ++y) {
          const YouthProfile& yp = inst.youth[y];
          for (std::size_t req = 0; req < yp.requests.size(); ++req) {
            if (yp.requests[req].service != i) continue;
            const int col = built.x_column(y, static_cast<int>(req), s, t);
            if (col >= 0) terms.emplace_back(col, 1.0);
          }
        }
        if (terms.empty()) continue;
        if (auto it = built.e_col.find({s, i, t}); it != built.e_col.end())
          terms.emplace_back(it->second, -1.0);
        add_row(std::move(terms), Relation::less_equal, static_cast<double>(cap(s, i, t)),
                "A2_capacity");
      }
    }
  }

  // (A4) each need, at most one shelter's worth of time share
  for (int y = 0; y < Y; ++y) {
    for (std::size_t req = 0; req < built.u_col[y].size(); ++req) {
      std::vector<std::pair<int, double>> terms;
      for (int s = 0; s < S; ++s) terms.emplace_back(built.u_col[y][req][s], 1.0);
      add_row(std::move(terms), Relation::less_equal, 1.0, "A4_single_placement");
    }
  }

  // (A5) assignments consume time share
  for (int y = 0; y < Y; ++y) {
    const YouthProfile& yp = inst.youth[y];
    for (std::size_t req = 0; req < yp.requests.size(); ++req) {
      const int width = static_cast<int>(built.x_times[y][req].size());
      for (int s = 0; s < S; ++s) {
        std::vector<std::pair<int, double>> terms;
        const int base = built.x_col[y][req][s];
        for (int k = 0; k < width; ++k) terms.emplace_back(base + k, 1.0);
        terms.emplace_back(built.u_col[y][req][s], -static_cast<double>(T));
        add_row(std::move(terms), Relation::less_equal, 0.0, "A5_duration_share");
      }
    }
  }

  // (A6) demographic exclusion: any required attribute the shelter lacks
  // zeroes every assignment of that youth there
  for (int y = 0; y < Y; ++y) {
    const YouthProfile& yp = inst.youth[y];
    if (yp.requests.empty()) continue;
    for (int s = 0; s < S; ++s) {
      if (!inst.incompatible(yp, inst.shelters[s])) continue;
      std::vector<std::pair<int, double>> terms;
      for (std::size_t req = 0; req < yp.requests.size(); ++req) {
        const int width = static_cast<int>(built.x_times[y][req].size());
        const int base = built.x_col[y][req][s];
        for (int k = 0; k < width; ++k) terms.emplace_back(base + k, 1.0);
      }
      add_row(std::move(terms), Relation::equal, 0.0, "A6_demographic_exclusion");
    }
  }
  built.diag.notes.push_back(
      "A7 handled structurally: assignment columns exist only inside each request's window");

  // (A8) start within [earliest, latest]
  for (int y = 0; y < Y; ++y) {
    const YouthProfile& yp = inst.youth[y];
    for (std::size_t req = 0; req < yp.requests.size(); ++req) {
      const ServiceRequest& r = yp.requests[req];
      const auto w = rhy_detail::request_window(inst, yp, r);
      std::vector<std::pair<int, double>> terms;
      for (int s = 0; s < S; ++s) {
        const int base = built.x_col[y][req][s];
        const auto& times = built.x_times[y][req];
        for (int k = 0; k < static_cast<int>(times.size()); ++k)
          if (times[k] >= w.a && times[k] <= w.b) terms.emplace_back(base + k, 1.0);
      }
      if (terms.empty())
        throw InfeasibleWindow("youth " + std::to_string(yp.id) + " service " +
                               std::to_string(r.service) +
                               " cannot start inside [earliest, latest]");
      add_row(std::move(terms), Relation::greater_equal, 1.0, "A8_timely_start");
    }
  }

  // (A9) non-periodic needs deliver exactly their frequency inside the window
  for (int y = 0; y < Y; ++y) {
    const YouthProfile& yp = inst.youth[y];
    for (std::size_t req = 0; req < yp.requests.size(); ++req) {
      const ServiceRequest& r = yp.requests[req];
      if (inst.services[r.service].periodic) continue;
      const int width = static_cast<int>(built.x_times[y][req].size());
      std::vector<std::pair<int, double>> terms;
      for (int s = 0; s < S; ++s) {
        const int base = built.x_col[y][req][s];
        for (int k = 0; k < width; ++k) terms.emplace_back(base + k, 1.0);
      }
      add_row(std::move(terms), Relation::equal, static_cast<double>(r.frequency),
              "A9_nonperiodic_frequency");
    }
  }

  // (A10)/(A11) periodic needs: one provision per slot window, slot terms
  // falling outside the horizon or the request window are dropped
  for (int y = 0; y < Y; ++y) {
    const YouthProfile& yp = inst.youth[y];
    for (std::size_t req = 0; req < yp.requests.size(); ++req) {
      const ServiceRequest& r = yp.requests[req];
      if (!inst.services[r.service].periodic) continue;
      const int k_i = inst.services[r.service].flexibility;
      std::map<int, double> acc;  // column -> accumulated coefficient
      for (int center : rhy_detail::slot_centers(r)) {
        for (int s = 0; s < S; ++s) {
          std::vector<std::pair<int, double>> a11;
          for (int k = -k_i; k <= k_i; ++k) {
            const int col = built.x_column(y, static_cast<int>(req), s, center + k);
            if (col < 0) continue;  // clipped at the window edge
            acc[col] += 1.0;
            a11.emplace_back(col, 1.0);
          }
          if (a11.size() >= 2)
            add_row(std::move(a11), Relation::less_equal, 1.0, "A11_once_per_slot");
        }
      }
      std::vector<std::pair<int, double>> terms(acc.begin(), acc.end());
      add_row(std::move(terms), Relation::equal, static_cast<double>(r.frequency),
              "A10_periodic_frequency");
    }
  }
  if (built.diag.clipped_slot_terms > 0)
    built.diag.notes.push_back("clipped " + std::to_string(built.diag.clipped_slot_terms) +
                               " slot guard terms at window edges");

  built.num_vars = lp.num_vars;
  built.num_constraints = static_cast<int>(lp.rows.size());

  const long var_bound = static_cast<long>(S) * (static_cast<long>(I) * (static_cast<long>(T) * Y + Y + T) + Y) +
                         num_candidates;
  const long bin_bound =
      static_cast<long>(Y) * S * (static_cast<long>(I) * T + 1) + num_candidates;
  if (built.num_vars > var_bound || built.num_binaries > bin_bound)
    throw Error("internal: variable counts exceed the published bounds");

  mip.validate();
  return built;
}

// ---------------------------------------------------------------------------

struct Assignment {
  int youth, shelter, service, time;
  auto operator<=>(const Assignment&) const = default;
};

struct Expansion {
  int shelter, service, time;
  long units;
};

struct TimeShare {
  int youth, shelter, service;
  double value;
};

struct AssignmentPlan {
  std::vector<Assignment> assignments;
  std::vector<int> opened_shelters;
  std::vector<Expansion> expansions;
  std::vector<std::pair<int, int>> ever_assigned;  // (youth, shelter)
  std::vector<TimeShare> time_shares;
};

inline AssignmentPlan decode(const BuiltModel& built, std::span<const double> x) {
  if (static_cast<int>(x.size()) != built.num_vars)
    throw DimensionMismatch("solution size does not match the model");
  AssignmentPlan plan;
  for (int col = 0; col < built.num_vars; ++col) {
    const VarKey& key = built.columns[col];
    switch (key.kind) {
      case RhyVar::assignment:
        if (x[col] > 0.5)
          plan.assignments.push_back(Assignment{key.youth, key.shelter, key.service, key.time});
        break;
      case RhyVar::open:
        if (x[col] > 0.5) plan.opened_shelters.push_back(key.shelter);
        break;
      case RhyVar::ever_assigned:
        if (x[col] > 0.5) plan.ever_assigned.emplace_back(key.youth, key.shelter);
        break;
      case RhyVar::expansion:
        if (std::llround(x[col]) > 0)
          plan.expansions.push_back(
              Expansion{key.shelter, key.service, key.time, std::llround(x[col])});
        break;
      case RhyVar::time_share:
        if (x[col] > 1e-12)
          plan.time_shares.push_back(TimeShare{key.youth, key.shelter, key.service, x[col]});
        break;
    }
  }
  return plan;
}

inline std::vector<double> encode(const BuiltModel& built, const AssignmentPlan& plan) {
  std::vector<double> x(built.num_vars, 0.0);
  const int S = static_cast<int>(built.instance.shelters.size());
  auto req_index = [&](int y, int service) {
    const auto& reqs = built.instance.youth[y].requests;
    for (std::size_t i = 0; i < reqs.size(); ++i)
      if (reqs[i].service == service) return static_cast<int>(i);
    throw DimensionMismatch("plan references a service the youth does not request");
  };
  for (const auto& a : plan.assignments) {
    const int col = built.x_column(a.youth, req_index(a.youth, a.service), a.shelter, a.time);
    if (col < 0) throw DimensionMismatch("plan assignment falls outside the model's window");
    x[col] = 1.0;
  }
  for (int s : plan.opened_shelters) {
    bool found = false;
    for (std::size_t c = 0; c < built.candidate_shelters.size(); ++c)
      if (built.candidate_shelters[c] == s) {
        x[built.nu_col[c]] = 1.0;
        found = true;
      }
    if (!found) throw DimensionMismatch("plan opens a non-candidate shelter");
  }
  for (const auto& e : plan.expansions) {
    auto it = built.e_col.find({e.shelter, e.service, e.time});
    if (it == built.e_col.end())
      throw DimensionMismatch("plan expands a service the model has no room for");
    x[it->second] = static_cast<double>(e.units);
  }
  for (const auto& [y, s] : plan.ever_assigned)
    x[built.pi_col[static_cast<std::size_t>(y) * S + s]] = 1.0;
  for (const auto& u : plan.time_shares)
    x[built.u_col[u.youth][req_index(u.youth, u.service)][u.shelter]] = u.value;
  return x;
}

/// Always-feasible reference plan: every provision goes to the first referral
/// organization at the earliest admissible times, the cheapest candidates
/// cover the opening requirement, nothing is expanded. Used to seed the
/// branch-and-bound with an incumbent.
inline AssignmentPlan fallback_plan(const BuiltModel& built) {
  const Instance& inst = built.instance;
  AssignmentPlan plan;
  int referral = -1;
  for (std::size_t s = 0; s < inst.shelters.size(); ++s)
    if (inst.shelters[s].kind == ShelterKind::referral) {
      referral = static_cast<int>(s);
      break;
    }
  if (referral < 0) return plan;

  int need = 0;
  for (int l : built.options.lambda) need = std::max(need, l);
  if (!built.options.status_quo_only && need > 0) {
    std::vector<std::pair<double, int>> by_cost;
    for (int s : built.candidate_shelters) by_cost.emplace_back(opening_cost(inst, s), s);
    std::sort(by_cost.begin(), by_cost.end());
    for (int k = 0; k < need && k < static_cast<int>(by_cost.size()); ++k)
      plan.opened_shelters.push_back(by_cost[k].second);
    std::sort(plan.opened_shelters.begin(), plan.opened_shelters.end());
  }

  for (std::size_t y = 0; y < inst.youth.size(); ++y) {
    const YouthProfile& yp = inst.youth[y];
    for (std::size_t req = 0; req < yp.requests.size(); ++req) {
      const ServiceRequest& r = yp.requests[req];
      const auto& times = built.x_times[y][req];
      std::vector<int> chosen;
      if (inst.services[r.service].periodic) {
        const int k_i = inst.services[r.service].flexibility;
        for (int center : rhy_detail::slot_centers(r)) {
          if (static_cast<int>(chosen.size()) == r.frequency) break;
          for (int k = -k_i; k <= k_i; ++k) {
            const int t = center + k;
            if (built.x_column(static_cast<int>(y), static_cast<int>(req), referral, t) >= 0) {
              chosen.push_back(t);
              break;
            }
          }
        }
      } else {
        for (int t : times) {
          if (static_cast<int>(chosen.size()) == r.frequency) break;
          chosen.push_back(t);
        }
      }
      for (int t : chosen)
        plan.assignments.push_back(
            Assignment{static_cast<int>(y), referral, r.service, t});
      plan.time_shares.push_back(TimeShare{
          static_cast<int>(y), referral, r.service,
          static_cast<double>(r.frequency) / static_cast<double>(inst.horizon)});
    }
    for (std::size_t s = 0; s < inst.shelters.size(); ++s)
      plan.ever_assigned.emplace_back(static_cast<int>(y), static_cast<int>(s));
  }
  return plan;
}

/// Rounds a relaxation into a feasible plan: openings follow the largest
/// relaxed opening values (at least the forced minimum), every provision goes
/// to the admissible cell with the highest relaxed assignment value that
/// still has capacity, and referral cells act as the always-available
/// fallback. Expansion units are the minimal ones the chosen usage needs.
inline AssignmentPlan greedy_plan(const BuiltModel& built, std::span<const double> relax) {
  const Instance& inst = built.instance;
  const int S = static_cast<int>(inst.shelters.size());
  const int I = static_cast<int>(inst.services.size());
  const int T = inst.horizon;
  AssignmentPlan plan;

  int need = 0;
  for (int l : built.options.lambda) need = std::max(need, l);
  std::vector<char> open(S, 0);
  if (!built.options.status_quo_only) {
    std::vector<std::pair<double, int>> ranked;  // (-value, shelter)
    for (std::size_t c = 0; c < built.candidate_shelters.size(); ++c)
      ranked.emplace_back(-relax[built.nu_col[c]], built.candidate_shelters[c]);
    std::sort(ranked.begin(), ranked.end());
    int opened = 0;
    for (const auto& [neg, s] : ranked) {
      if (-neg >= 0.5 || opened < need) {
        open[s] = 1;
        plan.opened_shelters.push_back(s);
        ++opened;
      }
    }
    std::sort(plan.opened_shelters.begin(), plan.opened_shelters.end());
  }

  std::vector<long> usage(static_cast<std::size_t>(S) * I * T, 0);
  auto idx = [&](int s, int i, int t) { return (static_cast<std::size_t>(s) * I + i) * T + t; };
  auto has_room = [&](int s, int i, int t) {
    if (inst.shelters[s].kind == ShelterKind::referral) return true;
    const long cap = built.options.status_quo_only
                         ? inst.capacity(s, i, t, built.options.delta_override)
                         : inst.max_capacity(s, i);
    return usage[idx(s, i, t)] < cap;
  };
  auto usable = [&](int y, int s) {
    const ShelterProfile& sh = inst.shelters[s];
    if (sh.kind == ShelterKind::new_candidate && !open[s]) return false;
    return !inst.incompatible(inst.youth[y], sh);
  };

  // Serve the most valuable, least flexible requests first: low frequency
  // means full per-provision value, narrow windows mean fewer alternatives.
  std::vector<std::pair<int, int>> order;  // (youth, request)
  for (std::size_t yi = 0; yi < inst.youth.size(); ++yi)
    for (std::size_t req = 0; req < inst.youth[yi].requests.size(); ++req)
      order.emplace_back(static_cast<int>(yi), static_cast<int>(req));
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    const ServiceRequest& ra = inst.youth[a.first].requests[a.second];
    const ServiceRequest& rb = inst.youth[b.first].requests[b.second];
    if (ra.frequency != rb.frequency) return ra.frequency < rb.frequency;
    const int wa = static_cast<int>(built.x_times[a.first][a.second].size());
    const int wb = static_cast<int>(built.x_times[b.first][b.second].size());
    if (wa != wb) return wa < wb;
    return a < b;
  });

  for (const auto& [y, req_i] : order) {
      const std::size_t yi = static_cast<std::size_t>(y);
      const std::size_t req = static_cast<std::size_t>(req_i);
      const YouthProfile& yp = inst.youth[yi];
      const ServiceRequest& r = yp.requests[req];
      const int i = r.service;
      const auto& times = built.x_times[yi][req];
      const int b_end = std::min(r.latest_start, times.empty() ? 0 : times.back());
      std::vector<int> chosen_cols;
      auto cell_score = [&](int s, int t) {
        const int col = built.x_column(y, static_cast<int>(req), s, t);
        return col < 0 ? -1.0 : relax[col];
      };
      auto pick = [&](auto&& admissible) {
        int best_s = -1, best_t = -1;
        double best = -1.0;
        for (int s = 0; s < S; ++s) {
          if (!usable(y, s)) continue;
          for (int t : times) {
            if (!admissible(t)) continue;
            if (!has_room(s, i, t)) continue;
            const int col = built.x_column(y, static_cast<int>(req), s, t);
            bool dup = false;
            for (int c : chosen_cols) dup |= (c == col);
            if (dup) continue;  // cells are binary, no repeats
            const double score =
                cell_score(s, t) +
                (inst.shelters[s].kind == ShelterKind::referral ? 0.0 : 1e-9);
            if (score > best) {
              best = score;
              best_s = s;
              best_t = t;
            }
          }
        }
        if (best_s < 0) return false;
        ++usage[idx(best_s, i, best_t)];
        plan.assignments.push_back(Assignment{y, best_s, i, best_t});
        chosen_cols.push_back(built.x_column(y, static_cast<int>(req), best_s, best_t));
        return true;
      };

      if (inst.services[i].periodic) {
        const int k_i = inst.services[i].flexibility;
        int made = 0;
        for (int center : rhy_detail::slot_centers(r)) {
          if (made == r.frequency) break;
          const bool first_slot = made == 0;
          const bool ok = pick([&](int t) {
            if (t < center - k_i || t > center + k_i) return false;
            // keep the first provision inside the start window when possible
            return !first_slot || t <= r.latest_start;
          }) || pick([&](int t) { return t >= center - k_i && t <= center + k_i; });
          if (ok) ++made;
        }
      } else {
        // first provision must start inside [earliest, latest]
        int made = pick([&](int t) { return t <= b_end; }) ? 1 : 0;
        while (made < r.frequency) {
          if (!pick([&](int) { return true; })) break;
          ++made;
        }
      }

      // time shares per shelter actually used
      std::map<int, int> per_shelter;
      for (int c : chosen_cols) ++per_shelter[built.columns[c].shelter];
      for (const auto& [s, count] : per_shelter)
        plan.time_shares.push_back(
            TimeShare{y, s, i, static_cast<double>(count) / static_cast<double>(T)});
  }
  for (std::size_t y = 0; y < inst.youth.size(); ++y)
    for (int s = 0; s < S; ++s) plan.ever_assigned.emplace_back(static_cast<int>(y), s);

  // minimal expansion the usage profile needs
  for (int s = 0; s < S; ++s) {
    if (inst.shelters[s].kind == ShelterKind::referral) continue;
    for (int i = 0; i < I; ++i)
      for (int t = 0; t < T; ++t) {
        const long extra =
            usage[idx(s, i, t)] - inst.capacity(s, i, t, built.options.delta_override);
        if (extra > 0) plan.expansions.push_back(Expansion{s, i, t, extra});
      }
  }
  return plan;
}

/// One-opt improvement: move single provisions to a different admissible cell
/// whenever the move raises the given maximization objective, accounting for
/// the expansion units the usage change adds or frees. Periodic provisions
/// stay inside their slot window; a move never removes the last timely start.
inline void improve_plan(const BuiltModel& built, AssignmentPlan& plan,
                         std::span<const double> objective) {
  const Instance& inst = built.instance;
  const int S = static_cast<int>(inst.shelters.size());
  const int I = static_cast<int>(inst.services.size());
  const int T = inst.horizon;
  std::vector<char> open(S, 0);
  for (int s : plan.opened_shelters) open[s] = 1;

  std::vector<long> usage(static_cast<std::size_t>(S) * I * T, 0);
  auto idx = [&](int s, int i, int t) { return (static_cast<std::size_t>(s) * I + i) * T + t; };
  for (const auto& a : plan.assignments) ++usage[idx(a.shelter, a.service, a.time)];

  auto cap_free = [&](int s, int i, int t) {
    return inst.shelters[s].kind == ShelterKind::referral
               ? static_cast<long>(inst.youth.size())
               : static_cast<long>(inst.capacity(s, i, t, built.options.delta_override));
  };
  auto cap_max = [&](int s, int i, int t) {
    if (inst.shelters[s].kind == ShelterKind::referral)
      return static_cast<long>(inst.youth.size());
    if (built.options.status_quo_only) return cap_free(s, i, t);
    return static_cast<long>(inst.max_capacity(s, i));
  };
  auto expansion_cost_delta = [&](int s, int i, int t, int dir) {
    // objective change from the expansion unit a usage step adds or frees
    if (inst.shelters[s].kind == ShelterKind::referral) return 0.0;
    auto it = built.e_col.find({s, i, t});
    const double coef = it == built.e_col.end() ? 0.0 : objective[it->second];
    const long before = usage[idx(s, i, t)];
    const long after = before + dir;
    const long free_cap = cap_free(s, i, t);
    const long e_before = std::max(0L, before - free_cap);
    const long e_after = std::max(0L, after - free_cap);
    return coef * static_cast<double>(e_after - e_before);
  };

  auto req_index = [&](int y, int service) {
    const auto& reqs = inst.youth[y].requests;
    for (std::size_t k = 0; k < reqs.size(); ++k)
      if (reqs[k].service == service) return static_cast<int>(k);
    return -1;
  };

  for (int pass = 0; pass < 3; ++pass) {
    bool changed = false;
    for (auto& a : plan.assignments) {
      const int req = req_index(a.youth, a.service);
      const ServiceRequest& r = inst.youth[a.youth].requests[req];
      const bool periodic = inst.services[a.service].periodic;
      const int k_i = inst.services[a.service].flexibility;
      int lo = 0, hi = T - 1;
      if (periodic) {
        // the slot this provision sits in
        for (int center : rhy_detail::slot_centers(r))
          if (a.time >= center - k_i && a.time <= center + k_i) {
            lo = center - k_i;
            hi = center + k_i;
            break;
          }
      }
      // does another chosen provision of this request start on time?
      bool other_timely = false;
      for (const auto& other : plan.assignments)
        if (&other != &a && other.youth == a.youth && other.service == a.service &&
            other.time <= r.latest_start)
          other_timely = true;

      const int old_col = built.x_column(a.youth, req, a.shelter, a.time);
      double best_gain = 1e-9;
      int best_s = -1, best_t = -1;
      for (int s = 0; s < S; ++s) {
        if (inst.shelters[s].kind == ShelterKind::new_candidate && !open[s]) continue;
        if (inst.incompatible(inst.youth[a.youth], inst.shelters[s])) continue;
        for (int t : built.x_times[a.youth][req]) {
          if (t < lo || t > hi) continue;
          if (s == a.shelter && t == a.time) continue;
          if (!periodic && !other_timely && a.time <= r.latest_start && t > r.latest_start)
            continue;  // would strand the start-window requirement
          const int col = built.x_column(a.youth, req, s, t);
          if (col < 0) continue;
          if (usage[idx(s, a.service, t)] + 1 > cap_max(s, a.service, t)) continue;
          bool dup = false;
          for (const auto& other : plan.assignments)
            dup |= (&other != &a && other.youth == a.youth && other.service == a.service &&
                    other.shelter == s && other.time == t);
          if (dup) continue;
          const double gain = objective[col] - objective[old_col] +
                              expansion_cost_delta(s, a.service, t, +1) +
                              expansion_cost_delta(a.shelter, a.service, a.time, -1);
          if (gain > best_gain) {
            best_gain = gain;
            best_s = s;
            best_t = t;
          }
        }
      }
      if (best_s >= 0) {
        --usage[idx(a.shelter, a.service, a.time)];
        ++usage[idx(best_s, a.service, best_t)];
        a.shelter = best_s;
        a.time = best_t;
        changed = true;
      }
    }
    if (!changed) break;
  }

  // rebuild derived pieces from the moved assignments
  plan.expansions.clear();
  for (int s = 0; s < S; ++s) {
    if (inst.shelters[s].kind == ShelterKind::referral) continue;
    for (int i = 0; i < I; ++i)
      for (int t = 0; t < T; ++t) {
        const long extra = usage[idx(s, i, t)] - cap_free(s, i, t);
        if (extra > 0) plan.expansions.push_back(Expansion{s, i, t, extra});
      }
  }
  plan.time_shares.clear();
  std::map<std::tuple<int, int, int>, int> counts;  // (y, s, i) -> provisions
  for (const auto& a : plan.assignments) ++counts[{a.youth, a.shelter, a.service}];
  for (const auto& [key, count] : counts) {
    const auto [y, s, i] = key;
    plan.time_shares.push_back(
        TimeShare{y, s, i, static_cast<double>(count) / static_cast<double>(T)});
  }
}

struct SolutionCheck {
  double row_violation = 0.0;      // relative, over rows and bounds
  double integrality_violation = 0.0;

  bool ok(const ToleranceConfig& tol) const {
    return row_violation <= tol.feasibility && integrality_violation <= tol.integrality;
  }
};

inline SolutionCheck check_solution(const BuiltModel& built, std::span<const double> x) {
  SolutionCheck c;
  c.row_violation = detail::relative_violation(built.fractional.constraints.base, x);
  c.integrality_violation = detail::integrality_violation(built.fractional.constraints, x);
  return c;
}

}  // namespace bcropt
