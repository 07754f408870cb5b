#pragma once

// Shared instance fixtures: a hand-built toy that exercises every constraint
// family, and a generator for the tiny random instances used by the
// enumeration-equivalence suites.

#include "bcropt/instance.hpp"
#include "bcropt/instance_gen.hpp"
#include "bcropt/rng.hpp"

namespace bcropt::testing {

/// Two youths, one status-quo shelter, one candidate, one referral, four
/// periods, two services (one periodic with slack, one not), one demographic
/// flag. Youth 0 cannot use the candidate (missing service), youth 1 cannot
/// use the status-quo shelter (demographic mismatch), so both exclusion rows
/// exist; the candidate opening is forced by lambda = 1.
inline Instance make_toy_instance() {
  Instance inst;
  inst.name = "toy";
  inst.seed = 7;
  inst.horizon = 4;
  inst.delta = 0.2;
  inst.capacity_jitter = 0;
  inst.num_extra_attributes = 1;
  inst.services = {
      ServiceSpec{"beds", false, 0},
      ServiceSpec{"counseling", true, 1},
  };
  inst.boroughs = {{"Queens", 1.0}};
  inst.cost.expansion_unit_cost = {350.0, 180.0};

  ShelterProfile sq;
  sq.id = 0;
  sq.name = "sq_0";
  sq.kind = ShelterKind::status_quo;
  sq.borough = 0;
  sq.attributes = {1, 1, 0};       // offers both services, rejects the flag
  sq.base_capacity = {5, 5};       // delta 0.2 -> one free unit per period
  sq.max_capacity = {2, 2};        // one expansion unit of headroom
  sq.bed_capacity = 5;
  inst.shelters.push_back(sq);

  ShelterProfile cand;
  cand.id = 1;
  cand.name = "new_0";
  cand.kind = ShelterKind::new_candidate;
  cand.borough = 0;
  cand.attributes = {1, 0, 1};     // beds only, accepts the flag
  cand.base_capacity = {2, 0};
  cand.max_capacity = {3, 0};
  cand.bed_capacity = 8;
  cand.critical_mass = 1;
  inst.shelters.push_back(cand);

  ShelterProfile ref;
  ref.id = 2;
  ref.name = "referral_0";
  ref.kind = ShelterKind::referral;
  ref.borough = 0;
  ref.attributes = {1, 1, 1};
  ref.base_capacity = {0, 0};
  ref.max_capacity = {0, 0};
  inst.shelters.push_back(ref);

  YouthProfile y0;
  y0.id = 0;
  y0.arrival = 0;
  y0.attributes = {1, 1, 0};
  y0.requests.push_back(ServiceRequest{0, 0, 1, 1, 2, 0});  // beds: window [0,2], two stays
  y0.requests.push_back(ServiceRequest{1, 1, 2, 1, 1, 0});  // counseling: slot at 1 +/- 1
  inst.youth.push_back(y0);

  YouthProfile y1;
  y1.id = 1;
  y1.arrival = 1;
  y1.attributes = {1, 0, 1};
  y1.requests.push_back(ServiceRequest{0, 1, 2, 1, 1, 0});  // beds: window [1,3]
  inst.youth.push_back(y1);

  inst.validate();
  return inst;
}

/// Tiny random instances for oracle equivalence: bounded so the exhaustive
/// plan enumeration stays cheap while every constraint family can appear.
inline Instance make_tiny_instance(std::uint64_t seed) {
  Rng rng(hash_mix(seed));
  Instance inst;
  inst.name = "tiny_" + std::to_string(seed);
  inst.seed = seed;
  inst.horizon = static_cast<int>(rng.uniform_int(4, 6));
  inst.delta = 0.25;
  inst.capacity_jitter = 0;
  inst.num_extra_attributes = 1;
  inst.services = {
      ServiceSpec{"beds", false, 0},
      ServiceSpec{"counseling", true, static_cast<int>(rng.uniform_int(0, 1))},
  };
  inst.boroughs = nyc_boroughs();
  inst.cost.expansion_unit_cost = {350.0, 180.0};
  const int last = inst.horizon - 1;

  const int num_candidates = static_cast<int>(rng.uniform_int(1, 2));
  int id = 0;
  {
    ShelterProfile sq;
    sq.id = id++;
    sq.name = "sq_0";
    sq.kind = ShelterKind::status_quo;
    sq.borough = static_cast<int>(rng.uniform_int(0, 4));
    sq.attributes = {1, static_cast<std::uint8_t>(rng.chance(3, 4)),
                     static_cast<std::uint8_t>(rng.chance(1, 2))};
    const int base = static_cast<int>(rng.uniform_int(4, 8));
    sq.base_capacity = {base, sq.attributes[1] ? base : 0};
    const int free0 = static_cast<int>(inst.delta * sq.base_capacity[0]);
    const int free1 = static_cast<int>(inst.delta * sq.base_capacity[1]);
    sq.max_capacity = {free0 + static_cast<int>(rng.uniform_int(0, 1)),
                       free1 + static_cast<int>(rng.uniform_int(0, 1))};
    sq.bed_capacity = base;
    inst.shelters.push_back(std::move(sq));
  }
  for (int c = 0; c < num_candidates; ++c) {
    ShelterProfile s;
    s.id = id++;
    s.name = "new_" + std::to_string(c);
    s.kind = ShelterKind::new_candidate;
    s.borough = static_cast<int>(rng.uniform_int(0, 4));
    s.attributes = {1, static_cast<std::uint8_t>(rng.chance(1, 2)),
                    static_cast<std::uint8_t>(rng.chance(3, 4))};
    const int beds = static_cast<int>(rng.uniform_int(1, 2));
    s.base_capacity = {beds, s.attributes[1] ? 1 : 0};
    s.max_capacity = {beds + static_cast<int>(rng.uniform_int(0, 1)),
                      s.base_capacity[1]};
    s.bed_capacity = static_cast<int>(rng.uniform_int(4, 12));
    s.critical_mass = static_cast<int>(rng.uniform_int(0, 1));
    inst.shelters.push_back(std::move(s));
  }
  {
    ShelterProfile ref;
    ref.id = id++;
    ref.name = "referral_0";
    ref.kind = ShelterKind::referral;
    ref.borough = 2;
    ref.attributes = {1, 1, 1};
    ref.base_capacity = {0, 0};
    ref.max_capacity = {0, 0};
    inst.shelters.push_back(std::move(ref));
  }

  const int num_youth = static_cast<int>(rng.uniform_int(2, 3));
  for (int k = 0; k < num_youth; ++k) {
    YouthProfile y;
    y.id = k;
    y.arrival = static_cast<int>(rng.uniform_int(0, 1));
    y.attributes = {0, 0, static_cast<std::uint8_t>(rng.chance(1, 3))};
    // beds request, always present so every youth loads the capacity rows
    {
      ServiceRequest r;
      r.service = 0;
      y.attributes[0] = 1;
      r.earliest_start = y.arrival + static_cast<int>(rng.uniform_int(0, 1));
      r.latest_start = std::min(last, r.earliest_start + static_cast<int>(rng.uniform_int(0, 1)));
      r.duration = static_cast<int>(rng.uniform_int(0, std::min(1, inst.horizon - r.latest_start)));
      const int cells = std::min(last, r.latest_start + r.duration) - r.earliest_start + 1;
      r.frequency = static_cast<int>(rng.uniform_int(1, std::min(2, cells)));
      y.requests.push_back(r);
    }
    if (rng.chance(1, 2)) {
      ServiceRequest r;
      r.service = 1;
      y.attributes[1] = 1;
      const int k_i = inst.services[1].flexibility;
      r.period_gap = static_cast<int>(rng.uniform_int(2 * k_i + 1, 2 * k_i + 2));
      r.earliest_start = y.arrival;
      const int span = last - k_i - r.earliest_start;
      const int f_max = span >= 0 ? span / r.period_gap + 1 : 0;
      r.frequency = f_max >= 2 && rng.chance(1, 2) ? 2 : 1;
      r.latest_start = std::min(last, r.earliest_start + k_i);
      const int need = r.earliest_start + (r.frequency - 1) * r.period_gap + k_i - r.latest_start;
      r.duration = std::min(std::max(0, need), inst.horizon - r.latest_start);
      y.requests.push_back(r);
    }
    inst.youth.push_back(std::move(y));
  }

  inst.validate();
  return inst;
}

}  // namespace bcropt::testing
