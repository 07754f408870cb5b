#pragma once

// Exhaustive plan enumeration for tiny shelter instances, written directly
// against the Instance data rather than the model builder, so the two
// implementations check each other. Enumerates every opening subset and every
// per-request activation pattern, tracks capacity usage, derives the minimal
// expansion units a plan needs, and reports the best value of each objective.
//
// Completion argument for the variables the enumeration does not carry:
// every ever-assigned indicator can be 1 (they are free and costless), and
// each time share can be exactly (activations / horizon), which satisfies the
// share, single-placement and linkage rows whenever the activations respect
// capacity and opening decisions. Expansion units are taken at their minimum
// usage-driven values, which no objective ever prefers to exceed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "bcropt/errors.hpp"
#include "bcropt/instance.hpp"

namespace bcropt::testing {

struct PlanObjectives {
  long feasible_plans = 0;
  double best_ratio = -std::numeric_limits<double>::infinity();
  double max_benefit = -std::numeric_limits<double>::infinity();
  double min_cost = std::numeric_limits<double>::infinity();
  double max_profit = -std::numeric_limits<double>::infinity();
  double min_cost_over_plans = std::numeric_limits<double>::infinity();  // positivity witness
};

namespace oracle_detail {

struct Cell {
  int t, s;
};

// All activation patterns of one request: sets of (time, shelter) cells.
inline std::vector<std::vector<Cell>> request_patterns(const Instance& inst,
                                                       const YouthProfile& y,
                                                       const ServiceRequest& r,
                                                       const std::vector<int>& usable_shelters,
                                                       std::uint64_t cap) {
  const int last = inst.horizon - 1;
  const int a = std::max(y.arrival, r.earliest_start);
  const int end = std::min(r.latest_start + r.duration, last);
  const int b = std::min(r.latest_start, end);
  std::vector<int> shelters;
  for (int s : usable_shelters)
    if (!inst.incompatible(y, inst.shelters[s])) shelters.push_back(s);

  std::vector<std::vector<Cell>> out;
  const bool periodic = inst.services[r.service].periodic;
  if (!periodic) {
    std::vector<Cell> cells;
    for (int t = a; t <= end; ++t)
      for (int s : shelters) cells.push_back({t, s});
    // all frequency-sized subsets with at least one timely start
    std::vector<int> pick(r.frequency);
    const int n = static_cast<int>(cells.size());
    if (n < r.frequency) return out;
    for (int i = 0; i < r.frequency; ++i) pick[i] = i;
    while (true) {
      bool timely = false;
      std::vector<Cell> set;
      for (int i : pick) {
        set.push_back(cells[i]);
        if (cells[i].t >= a && cells[i].t <= b) timely = true;
      }
      if (timely) out.push_back(set);
      if (out.size() > cap) throw EnumerationTooLarge("too many activation patterns");
      int i = r.frequency - 1;
      while (i >= 0 && pick[i] == n - r.frequency + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int k = i + 1; k < r.frequency; ++k) pick[k] = pick[k - 1] + 1;
    }
    return out;
  }

  // periodic: per slot, either skip it or provide at up to one cell per
  // shelter; total provisions across slots must equal the frequency
  const int k_i = inst.services[r.service].flexibility;
  if (r.frequency > 1 && r.period_gap <= 2 * k_i)
    throw EnumerationTooLarge("oracle requires disjoint provision slots (omega > 2k)");
  std::vector<std::vector<Cell>> slot_cells(r.frequency);
  for (int slot = 0; slot < r.frequency; ++slot) {
    const int center = a + slot * r.period_gap;
    for (int k = -k_i; k <= k_i; ++k) {
      const int t = center + k;
      if (t < a || t > end) continue;
      for (int s : shelters) slot_cells[slot].push_back({t, s});
    }
    if (slot_cells[slot].empty()) return out;  // dead slot, no feasible pattern
  }
  // per slot: subsets of cells with pairwise-distinct shelters (counts 0..)
  auto slot_options = [&](int slot) {
    std::vector<std::vector<Cell>> opts;
    const auto& cells = slot_cells[slot];
    const int n = static_cast<int>(cells.size());
    if (n > 20) throw EnumerationTooLarge("slot too wide for the oracle");
    std::vector<char> used(static_cast<std::size_t>(*std::max_element(
                               usable_shelters.begin(), usable_shelters.end())) + 1);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      std::vector<Cell> set;
      std::fill(used.begin(), used.end(), 0);
      bool ok = true;
      for (int i = 0; i < n && ok; ++i) {
        if (!(mask & (1u << i))) continue;
        if (used[cells[i].s]) ok = false;  // one per shelter per slot
        used[cells[i].s] = 1;
        set.push_back(cells[i]);
      }
      if (ok) opts.push_back(std::move(set));
      if (opts.size() > cap) throw EnumerationTooLarge("too many slot options");
    }
    return opts;
  };
  std::vector<std::vector<std::vector<Cell>>> options;
  for (int slot = 0; slot < r.frequency; ++slot) options.push_back(slot_options(slot));

  std::vector<Cell> current;
  auto rec = [&](auto&& self, int slot, int total) -> void {
    if (slot == r.frequency) {
      if (total != r.frequency) return;
      bool timely = false;
      for (const Cell& c : current)
        if (c.t >= a && c.t <= b) timely = true;
      if (timely) out.push_back(current);
      if (out.size() > cap) throw EnumerationTooLarge("too many activation patterns");
      return;
    }
    for (const auto& opt : options[slot]) {
      if (total + static_cast<int>(opt.size()) > r.frequency) continue;
      const std::size_t mark = current.size();
      current.insert(current.end(), opt.begin(), opt.end());
      self(self, slot + 1, total + static_cast<int>(opt.size()));
      current.resize(mark);
    }
  };
  rec(rec, 0, 0);
  return out;
}

}  // namespace oracle_detail

/// Enumerate every feasible plan and return the best value per objective.
inline PlanObjectives enumerate_rhy_plans(const Instance& inst, const std::vector<int>& lambda,
                                          bool status_quo_only = false,
                                          double rho_override = -1.0,
                                          std::uint64_t cap = 50'000'000) {
  inst.validate();
  const int S = static_cast<int>(inst.shelters.size());
  const int T = inst.horizon;
  const int I = static_cast<int>(inst.services.size());
  const double rho = rho_override >= 0.0 ? rho_override : inst.benefit.returns_multiplier;
  const double m_eff = inst.benefit.medicaid_savings * inst.benefit.inflation_multiplier;
  const double person_benefit = m_eff + inst.benefit.labor_productivity;

  std::vector<int> candidates;
  for (int s = 0; s < S; ++s)
    if (inst.shelters[s].kind == ShelterKind::new_candidate) candidates.push_back(s);
  int lambda_needed = 0;
  for (int l : lambda) lambda_needed = std::max(lambda_needed, l);

  PlanObjectives agg;

  const int nc = static_cast<int>(candidates.size());
  for (std::uint32_t mask = 0; mask < (1u << nc); ++mask) {
    if (status_quo_only && mask != 0) continue;
    std::vector<int> open;
    for (int c = 0; c < nc; ++c)
      if (mask & (1u << c)) open.push_back(candidates[c]);
    if (static_cast<int>(open.size()) < lambda_needed) continue;
    bool critical_ok = true;
    double open_cost = 0.0, open_return = 0.0;
    for (int s : open) {
      if (inst.shelters[s].critical_mass > static_cast<int>(inst.youth.size()))
        critical_ok = false;
      const double c = opening_cost(inst, s);
      open_cost += c;
      open_return += rho * c;
    }
    if (!critical_ok) continue;

    std::vector<int> usable;
    for (int s = 0; s < S; ++s) {
      const auto kind = inst.shelters[s].kind;
      if (kind == ShelterKind::new_candidate &&
          std::find(open.begin(), open.end(), s) == open.end())
        continue;
      usable.push_back(s);
    }

    // per-request activation patterns
    struct Req {
      const YouthProfile* y;
      const ServiceRequest* r;
      std::vector<std::vector<oracle_detail::Cell>> patterns;
    };
    std::vector<Req> reqs;
    bool dead_request = false;
    double pattern_space = 1.0;
    for (const auto& y : inst.youth) {
      for (const auto& r : y.requests) {
        Req rq{&y, &r, oracle_detail::request_patterns(inst, y, r, usable, cap)};
        if (rq.patterns.empty()) {
          dead_request = true;
          break;
        }
        pattern_space *= static_cast<double>(rq.patterns.size());
        if (pattern_space > static_cast<double>(cap))
          throw EnumerationTooLarge("plan space exceeds the oracle cap");
        reqs.push_back(std::move(rq));
      }
      if (dead_request) break;
    }
    if (dead_request) continue;

    // usage[s][i][t]
    std::vector<long> usage(static_cast<std::size_t>(S) * I * T, 0);
    auto idx = [&](int s, int i, int t) { return (static_cast<std::size_t>(s) * I + i) * T + t; };

    auto capacity_limit = [&](int s, int i, int t) -> long {
      if (inst.shelters[s].kind == ShelterKind::referral) return static_cast<long>(inst.youth.size());
      if (status_quo_only) return inst.capacity(s, i, t);
      return inst.max_capacity(s, i);
    };

    double assign_cost = 0.0, assign_benefit = 0.0;

    auto leaf = [&]() {
      // minimal expansion units this usage profile needs
      double expansion_cost = 0.0;
      for (int s = 0; s < S; ++s) {
        if (inst.shelters[s].kind == ShelterKind::referral) continue;
        for (int i = 0; i < I; ++i)
          for (int t = 0; t < T; ++t) {
            const long extra = usage[idx(s, i, t)] - inst.capacity(s, i, t);
            if (extra > 0) expansion_cost += inst.cost.expansion_unit_cost[i] * extra;
          }
      }
      const double benefit = assign_benefit + open_return;
      const double cost = open_cost + expansion_cost + assign_cost;
      ++agg.feasible_plans;
      agg.max_benefit = std::max(agg.max_benefit, benefit);
      agg.min_cost = std::min(agg.min_cost, cost);
      agg.max_profit = std::max(agg.max_profit, benefit - cost);
      agg.min_cost_over_plans = std::min(agg.min_cost_over_plans, cost);
      if (cost > 0.0) agg.best_ratio = std::max(agg.best_ratio, benefit / cost);
    };

    auto rec = [&](auto&& self, std::size_t k) -> void {
      if (k == reqs.size()) {
        leaf();
        return;
      }
      const Req& rq = reqs[k];
      for (const auto& pattern : rq.patterns) {
        bool ok = true;
        std::size_t applied = 0;
        for (const auto& cell : pattern) {
          const int i = rq.r->service;
          if (usage[idx(cell.s, i, cell.t)] + 1 > capacity_limit(cell.s, i, cell.t)) {
            ok = false;
            break;
          }
          ++usage[idx(cell.s, i, cell.t)];
          ++applied;
        }
        if (ok) {
          double db = 0.0, dc = 0.0;
          for (const auto& cell : pattern) {
            dc += inst.assignment_cost(cell.s);
            if (inst.shelters[cell.s].kind != ShelterKind::referral)
              db += person_benefit / ((1.0 + cell.t - rq.r->earliest_start) * rq.r->frequency);
          }
          assign_benefit += db;
          assign_cost += dc;
          self(self, k + 1);
          assign_benefit -= db;
          assign_cost -= dc;
        }
        for (std::size_t u = 0; u < applied; ++u)
          --usage[idx(pattern[u].s, rq.r->service, pattern[u].t)];
      }
    };
    rec(rec, 0);
  }
  return agg;
}

}  // namespace bcropt::testing
