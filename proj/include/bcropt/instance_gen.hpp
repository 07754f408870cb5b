#pragma once

// Seeded synthetic instance generation. Candidate shelters come from eight
// organization archetypes with observed average bed counts; each candidate is
// assigned uniformly to one of the five boroughs. Status-quo shelters run
// near capacity, so only the delta fraction of their space is free. All
// sampling is integer-based so a fixed seed reproduces byte-identical
// instances on any platform.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "bcropt/errors.hpp"
#include "bcropt/instance.hpp"
#include "bcropt/rng.hpp"

namespace bcropt {

/// Average beds per shelter for the eight organization archetypes.
inline const std::vector<int>& archetype_average_beds() {
  static const std::vector<int> beds = {6, 8, 8, 20, 9, 12, 20, 12};
  return beds;
}

struct CatalogService {
  const char* name;
  bool periodic;
  int flexibility;
  double expansion_cost;  // per unit-week, rough public-data estimate
};

/// Service catalog. The paper's list names fourteen services under a heading
/// of thirteen; all fourteen stay available and configs choose how many to use.
inline const std::vector<CatalogService>& service_catalog() {
  static const std::vector<CatalogService> catalog = {
      {"beds", false, 0, 350.0},
      {"mental_health", true, 1, 180.0},
      {"physical_health", false, 0, 200.0},
      {"substance_abuse", true, 1, 190.0},
      {"crisis_response", false, 0, 240.0},
      {"long_term_housing", false, 0, 400.0},
      {"legal_assistance", false, 0, 150.0},
      {"service_coordination", true, 0, 90.0},
      {"practical_assistance", false, 0, 60.0},
      {"financial_assistance", false, 0, 80.0},
      {"life_skills", true, 1, 70.0},
      {"employment_assistance", false, 0, 110.0},
      {"education_assistance", false, 0, 100.0},
      {"childcare_parenting", false, 0, 130.0},
  };
  return catalog;
}

inline std::vector<Borough> nyc_boroughs() {
  return {{"Manhattan", 1.85}, {"Brooklyn", 1.38}, {"Queens", 1.0},
          {"Staten Island", 0.830}, {"Bronx", 0.789}};
}

struct GeneratorConfig {
  std::string name = "synthetic";
  int num_youth = 20;
  int horizon = 26;
  int num_services = 13;  // leading entries of the 14-service catalog
  int num_extra_attributes = 3;
  int num_status_quo = 5;
  int num_referral = 1;
  int base_candidates = 10;
  // The candidate pool grows by 1.5x above 500 youth and 2x above 750,
  // mirroring how the reference experiments scaled their shelter options.
  bool scale_candidates_with_youth = true;
  int min_requests = 2;
  int max_requests = 4;
  double delta = 0.1;
  int capacity_jitter = 1;
  int max_headroom = 4;    // expansion units available beyond free capacity
  int critical_mass = 2;   // uniform K for every candidate
  int status_quo_capacity_min = 4;
  int status_quo_capacity_max = 0;  // 0 means max(6, num_youth / 3)
  int candidate_capacity_min = 2;
  int candidate_capacity_max = 6;
  int offer_chance_pct = 70;        // shelter offers a given service
  int accept_chance_pct = 85;       // shelter accepts a given demographic
  int demographic_chance_pct = 30;  // youth carries a given demographic flag
  BenefitParams benefit{};
  CostParams cost{};  // expansion costs filled from the catalog when empty

  void validate() const {
    if (num_youth < 1) throw ConfigInvalid("num_youth must be >= 1");
    if (horizon < 4) throw ConfigInvalid("horizon must be >= 4");
    if (num_services < 1 ||
        num_services > static_cast<int>(service_catalog().size()))
      throw ConfigInvalid("num_services must lie in [1, " +
                          std::to_string(service_catalog().size()) + "]");
    if (num_extra_attributes < 0) throw ConfigInvalid("num_extra_attributes must be >= 0");
    if (num_status_quo < 0 || num_referral < 1)
      throw ConfigInvalid("need num_status_quo >= 0 and num_referral >= 1");
    if (base_candidates < 0) throw ConfigInvalid("base_candidates must be >= 0");
    if (min_requests < 1 || max_requests < min_requests)
      throw ConfigInvalid("request counts must satisfy 1 <= min <= max");
    if (max_requests > num_services)
      throw ConfigInvalid("max_requests cannot exceed num_services");
    if (!(delta > 0.0 && delta <= 1.0)) throw ConfigInvalid("delta must lie in (0, 1]");
    if (max_headroom < 0) throw ConfigInvalid("max_headroom must be >= 0");
    if (critical_mass < 0) throw ConfigInvalid("critical_mass must be >= 0");
    if (critical_mass > num_youth)
      throw ConfigInvalid("critical_mass cannot exceed num_youth");
  }

  int scaled_candidates() const {
    if (!scale_candidates_with_youth || num_youth <= 500) return base_candidates;
    const double factor = num_youth <= 750 ? 1.5 : 2.0;
    return static_cast<int>(std::lround(base_candidates * factor));
  }
};

namespace detail {

inline int draw_archetype_beds(Rng& rng, int archetype) {
  const int avg = archetype_average_beds()[archetype];
  const int h = avg / 2;
  return static_cast<int>(rng.uniform_int(avg - h, avg + h));
}

inline std::vector<std::uint8_t> shelter_attributes(Rng& rng, const GeneratorConfig& cfg,
                                                    ShelterKind kind,
                                                    std::vector<int>& offered_out) {
  const int ns = cfg.num_services;
  std::vector<std::uint8_t> attr(ns + cfg.num_extra_attributes, 0);
  offered_out.clear();
  for (int i = 0; i < ns; ++i) {
    bool offers;
    if (kind == ShelterKind::referral)
      offers = true;
    else if (i == 0)
      offers = true;  // every shelter has beds
    else
      offers = rng.chance(cfg.offer_chance_pct, 100);
    attr[i] = offers ? 1 : 0;
    if (offers) offered_out.push_back(i);
  }
  for (int n = 0; n < cfg.num_extra_attributes; ++n)
    attr[ns + n] =
        (kind == ShelterKind::referral || rng.chance(cfg.accept_chance_pct, 100)) ? 1 : 0;
  return attr;
}

}  // namespace detail

inline Instance generate_instance(const GeneratorConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(hash_mix(seed));

  Instance inst;
  inst.name = cfg.name;
  inst.seed = seed;
  inst.horizon = cfg.horizon;
  inst.delta = cfg.delta;
  inst.capacity_jitter = cfg.capacity_jitter;
  inst.num_extra_attributes = cfg.num_extra_attributes;
  inst.boroughs = nyc_boroughs();
  inst.benefit = cfg.benefit;
  inst.cost = cfg.cost;

  const auto& catalog = service_catalog();
  for (int i = 0; i < cfg.num_services; ++i)
    inst.services.push_back(
        ServiceSpec{catalog[i].name, catalog[i].periodic, catalog[i].flexibility});
  if (inst.cost.expansion_unit_cost.empty())
    for (int i = 0; i < cfg.num_services; ++i)
      inst.cost.expansion_unit_cost.push_back(catalog[i].expansion_cost);

  const int ns = cfg.num_services;
  const int sq_cap_max =
      cfg.status_quo_capacity_max > 0 ? cfg.status_quo_capacity_max
                                      : std::max(6, cfg.num_youth / 3);

  int next_id = 0;
  // Status-quo shelters: most capacity is occupied; delta scaling applies.
  for (int k = 0; k < cfg.num_status_quo; ++k) {
    ShelterProfile s;
    s.id = next_id++;
    s.name = "sq_" + std::to_string(k);
    s.kind = ShelterKind::status_quo;
    s.borough = static_cast<int>(rng.uniform_int(0, static_cast<long>(inst.boroughs.size()) - 1));
    std::vector<int> offered;
    s.attributes = detail::shelter_attributes(rng, cfg, s.kind, offered);
    s.base_capacity.assign(ns, 0);
    s.max_capacity.assign(ns, 0);
    for (int i : offered) {
      const int base =
          static_cast<int>(rng.uniform_int(cfg.status_quo_capacity_min, sq_cap_max));
      s.base_capacity[i] = base;
      const int free_peak = static_cast<int>(cfg.delta * base) + cfg.capacity_jitter;
      s.max_capacity[i] = free_peak + static_cast<int>(rng.uniform_int(0, cfg.max_headroom));
    }
    s.bed_capacity = s.base_capacity[0];
    inst.shelters.push_back(std::move(s));
  }
  // Candidate shelters from the organization archetypes.
  const int candidates = cfg.scaled_candidates();
  for (int k = 0; k < candidates; ++k) {
    ShelterProfile s;
    s.id = next_id++;
    const int archetype = static_cast<int>(rng.uniform_int(0, 7));
    s.name = "new_" + std::to_string(k) + "_org" + std::to_string(archetype + 1);
    s.kind = ShelterKind::new_candidate;
    s.borough = static_cast<int>(rng.uniform_int(0, static_cast<long>(inst.boroughs.size()) - 1));
    std::vector<int> offered;
    s.attributes = detail::shelter_attributes(rng, cfg, s.kind, offered);
    s.base_capacity.assign(ns, 0);
    s.max_capacity.assign(ns, 0);
    s.bed_capacity = detail::draw_archetype_beds(rng, archetype);
    for (int i : offered) {
      const int base = i == 0 ? std::max(1, s.bed_capacity / 4)
                              : static_cast<int>(rng.uniform_int(cfg.candidate_capacity_min,
                                                                 cfg.candidate_capacity_max));
      s.base_capacity[i] = base;
      s.max_capacity[i] = base + static_cast<int>(rng.uniform_int(0, cfg.max_headroom));
    }
    s.critical_mass = cfg.critical_mass;
    inst.shelters.push_back(std::move(s));
  }
  // Referral organizations: compatible with everyone, effectively uncapacitated.
  for (int k = 0; k < cfg.num_referral; ++k) {
    ShelterProfile s;
    s.id = next_id++;
    s.name = "referral_" + std::to_string(k);
    s.kind = ShelterKind::referral;
    s.borough = 2;  // Queens, the multiplier-1 reference borough; unused for referrals
    std::vector<int> offered;
    s.attributes = detail::shelter_attributes(rng, cfg, s.kind, offered);
    s.base_capacity.assign(ns, 0);
    s.max_capacity.assign(ns, 0);
    inst.shelters.push_back(std::move(s));
  }

  for (int k = 0; k < cfg.num_youth; ++k) {
    YouthProfile y;
    y.id = k;
    y.arrival = static_cast<int>(rng.uniform_int(0, std::max(0, cfg.horizon / 3 - 1)));
    y.attributes.assign(ns + cfg.num_extra_attributes, 0);
    for (int n = 0; n < cfg.num_extra_attributes; ++n)
      y.attributes[ns + n] = rng.chance(cfg.demographic_chance_pct, 100) ? 1 : 0;
    const int want = static_cast<int>(rng.uniform_int(cfg.min_requests, cfg.max_requests));
    for (int svc : rng.sample_without_replacement(ns, want)) {
      ServiceRequest r;
      r.service = svc;
      y.attributes[svc] = 1;
      const ServiceSpec& spec = inst.services[svc];
      const int last = cfg.horizon - 1;
      if (spec.periodic) {
        const int k_i = spec.flexibility;
        const int omega =
            static_cast<int>(rng.uniform_int(std::max(2, 2 * k_i + 1), 2 * k_i + 4));
        r.period_gap = omega;
        r.earliest_start =
            y.arrival + static_cast<int>(rng.uniform_int(0, std::max(0, (last - y.arrival) / 4)));
        const int span = last - k_i - r.earliest_start;
        const int f_max = span >= 0 ? span / omega + 1 : 0;
        if (f_max < 1) {
          // Window too tight for a periodic pattern; deliver once instead.
          r.frequency = 1;
          r.earliest_start = std::min(r.earliest_start, last);
        } else {
          r.frequency = static_cast<int>(rng.uniform_int(1, std::min(4, f_max)));
        }
        r.latest_start =
            std::min(last, r.earliest_start + static_cast<int>(rng.uniform_int(0, omega - 1)));
        // The last provision slot must stay inside [earliest, latest + duration].
        const int last_center = r.earliest_start + (r.frequency - 1) * omega;
        const int need = last_center + k_i - r.latest_start;
        r.duration = std::max(0, need) + static_cast<int>(rng.uniform_int(0, 2));
        r.duration = std::min(r.duration, cfg.horizon - r.latest_start);
      } else {
        r.earliest_start =
            y.arrival + static_cast<int>(rng.uniform_int(0, std::max(0, (last - y.arrival) / 3)));
        const int window = static_cast<int>(rng.uniform_int(1, 4));
        r.latest_start = std::min(last, r.earliest_start + window);
        r.duration = static_cast<int>(
            rng.uniform_int(0, std::max(0, std::min(3, cfg.horizon - r.latest_start))));
        const int cells = std::min(last, r.latest_start + r.duration) - r.earliest_start + 1;
        r.frequency = static_cast<int>(rng.uniform_int(1, std::max(1L, std::min(3L, (long)cells))));
      }
      y.requests.push_back(r);
    }
    inst.youth.push_back(std::move(y));
  }

  inst.validate();
  return inst;
}

}  // namespace bcropt
