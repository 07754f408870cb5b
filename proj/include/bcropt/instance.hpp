#pragma once

// Problem data for the shelter capacity-expansion model: youth service
// requests, shelters (status quo, candidate, referral), services, the time
// grid, and the cost/benefit parameters. Time is a grid of weekly periods
// t = 0 .. horizon-1.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "bcropt/errors.hpp"
#include "bcropt/rng.hpp"

namespace bcropt {

enum class ShelterKind { status_quo, new_candidate, referral };

inline const char* to_string(ShelterKind k) {
  switch (k) {
    case ShelterKind::status_quo: return "status_quo";
    case ShelterKind::new_candidate: return "new_candidate";
    case ShelterKind::referral: return "referral";
  }
  return "?";
}

struct ServiceSpec {
  std::string name;
  bool periodic = false;  // delivered every omega periods vs. freely in a window
  int flexibility = 0;    // k_i, per-slot slack in periods (periodic services)
};

/// One service need of one youth.
struct ServiceRequest {
  int service = -1;
  int earliest_start = 0;  // a
  int latest_start = 0;    // b
  int duration = 0;        // d
  int frequency = 1;       // f, number of provisions
  int period_gap = 0;      // omega, gap between provisions (periodic services)
};

struct YouthProfile {
  int id = 0;
  int arrival = 0;  // l_y
  std::vector<std::uint8_t> attributes;
  std::vector<ServiceRequest> requests;

  const ServiceRequest* request_for(int service) const {
    for (const auto& r : requests)
      if (r.service == service) return &r;
    return nullptr;
  }
};

struct ShelterProfile {
  int id = 0;
  std::string name;
  ShelterKind kind = ShelterKind::status_quo;
  int borough = 0;
  std::vector<std::uint8_t> attributes;  // services offered / demographics accepted
  std::vector<int> base_capacity;        // per service, before occupancy scaling
  std::vector<int> max_capacity;         // mu, hard per-service ceiling
  int bed_capacity = 0;                  // used for the opening cost
  int critical_mass = 0;                 // minimum distinct youth when opened
};

struct Borough {
  std::string name;
  double cost_multiplier = 1.0;  // L_b, relative real-estate pricing
};

struct BenefitParams {
  double medicaid_savings = 4763.0;      // annual health-care savings per placement
  double inflation_multiplier = 1.0;     // applied to medicaid_savings
  double labor_productivity = 194732.0;  // productivity gained per placement
  double returns_multiplier = 4.0;       // rho, system return per opening-cost dollar
};

struct CostParams {
  double annual_bed_cost = 10000.0;  // C_bed
  double assignment_cost_in_house = 1.0;
  double assignment_cost_referral = 20.0;
  std::vector<double> expansion_unit_cost;  // gamma per service unit-week
};

struct Instance {
  int schema_version = 1;
  std::string name;
  std::uint64_t seed = 0;
  int horizon = 26;
  double delta = 0.1;       // fraction of status-quo capacity that is free
  int capacity_jitter = 0;  // amplitude of deterministic week-to-week variation
  std::vector<ServiceSpec> services;
  int num_extra_attributes = 0;  // demographic flags appended after the services
  std::vector<Borough> boroughs;
  std::vector<YouthProfile> youth;
  std::vector<ShelterProfile> shelters;
  BenefitParams benefit;
  CostParams cost;

  int num_attributes() const {
    return static_cast<int>(services.size()) + num_extra_attributes;
  }

  int num_candidates() const {
    int n = 0;
    for (const auto& s : shelters) n += (s.kind == ShelterKind::new_candidate);
    return n;
  }

  /// Free capacity c_{s,i,t}. Status-quo shelters run near occupancy, so only
  /// the delta fraction of their base capacity is available, with a small
  /// deterministic weekly variation; candidates contribute their full base
  /// capacity once opened; referral organizations absorb any demand.
  int capacity(int shelter, int service, int t, double delta_override = -1.0) const {
    const ShelterProfile& s = shelters[shelter];
    if (s.kind == ShelterKind::referral) return static_cast<int>(youth.size());
    const int base = s.base_capacity[service];
    int c;
    if (s.kind == ShelterKind::new_candidate) {
      c = base;
    } else {
      const double d = delta_override > 0.0 ? delta_override : delta;
      c = static_cast<int>(d * base);
      if (capacity_jitter > 0 && base > 0) {
        const std::uint64_t h = hash_combine(
            seed, (static_cast<std::uint64_t>(shelter) << 40) ^
                      (static_cast<std::uint64_t>(service) << 20) ^
                      static_cast<std::uint64_t>(t));
        c += static_cast<int>(h % static_cast<std::uint64_t>(capacity_jitter + 1));
      }
    }
    return std::min(c, s.max_capacity[service]);
  }

  int max_capacity(int shelter, int service) const {
    const ShelterProfile& s = shelters[shelter];
    if (s.kind == ShelterKind::referral) return static_cast<int>(youth.size());
    return s.max_capacity[service];
  }

  double assignment_cost(int shelter) const {
    return shelters[shelter].kind == ShelterKind::referral ? cost.assignment_cost_referral
                                                           : cost.assignment_cost_in_house;
  }

  /// True when some attribute the youth requires is not offered by the shelter.
  bool incompatible(const YouthProfile& y, const ShelterProfile& s) const {
    for (int n = 0; n < num_attributes(); ++n)
      if (y.attributes[n] && !s.attributes[n]) return true;
    return false;
  }

  void validate() const;
};

/// Opening cost of a candidate shelter: annual bed cost times bed capacity
/// times the borough real-estate multiplier.
inline double opening_cost(const ShelterProfile& shelter, const CostParams& params,
                           double borough_multiplier) {
  if (shelter.kind != ShelterKind::new_candidate)
    throw NotACandidate("opening cost is defined for candidate shelters only (shelter " +
                        std::to_string(shelter.id) + ")");
  return params.annual_bed_cost * shelter.bed_capacity * borough_multiplier;
}

inline double opening_cost(const Instance& inst, int shelter) {
  const ShelterProfile& s = inst.shelters[shelter];
  return opening_cost(s, inst.cost, inst.boroughs[s.borough].cost_multiplier);
}

/// System-level return credited when a shelter opens: rho times its cost.
inline double partial_return(double opening_cost_value, double rho) {
  return rho * opening_cost_value;
}

inline double partial_return(const Instance& inst, int shelter, double rho_override = -1.0) {
  const double rho = rho_override >= 0.0 ? rho_override : inst.benefit.returns_multiplier;
  return partial_return(opening_cost(inst, shelter), rho);
}

inline void Instance::validate() const {
  if (schema_version != 1)
    throw SchemaVersionMismatch("unsupported schema version " + std::to_string(schema_version));
  if (horizon < 1) throw ValidationError("horizon must be at least 1");
  if (!(delta > 0.0 && delta <= 1.0)) throw ValidationError("delta must lie in (0, 1]");
  if (benefit.returns_multiplier < 0.0) throw ValidationError("returns multiplier must be >= 0");
  if (capacity_jitter < 0) throw ValidationError("capacity jitter must be >= 0");
  if (services.empty()) throw ValidationError("at least one service is required");
  if (boroughs.empty()) throw ValidationError("at least one borough is required");
  for (const auto& b : boroughs)
    if (!(b.cost_multiplier > 0.0))
      throw ValidationError("borough " + b.name + " must have a positive cost multiplier");
  if (static_cast<int>(cost.expansion_unit_cost.size()) != static_cast<int>(services.size()))
    throw ValidationError("expansion_unit_cost must list one entry per service");
  for (double g : cost.expansion_unit_cost)
    if (g < 0.0) throw ValidationError("expansion unit costs must be >= 0");
  if (cost.assignment_cost_in_house <= 0.0 || cost.assignment_cost_referral <= 0.0)
    throw ValidationError("assignment costs must be positive");

  const int ns = static_cast<int>(services.size());
  const int na = num_attributes();
  for (const auto& s : shelters) {
    if (static_cast<int>(s.attributes.size()) != na)
      throw ValidationError("shelter " + std::to_string(s.id) +
                            " attribute vector has wrong length");
    if (static_cast<int>(s.base_capacity.size()) != ns ||
        static_cast<int>(s.max_capacity.size()) != ns)
      throw ValidationError("shelter " + std::to_string(s.id) +
                            " capacity vectors must list one entry per service");
    if (s.borough < 0 || s.borough >= static_cast<int>(boroughs.size()))
      throw ValidationError("shelter " + std::to_string(s.id) + " references unknown borough");
    if (s.kind != ShelterKind::referral) {
      for (int i = 0; i < ns; ++i) {
        if (s.base_capacity[i] < 0 || s.max_capacity[i] < 0)
          throw ValidationError("shelter " + std::to_string(s.id) + " has negative capacity");
        // Status-quo shelters store physical capacity; only the delta-scaled
        // free part must fit under mu. Candidates contribute base directly.
        const int free_part = s.kind == ShelterKind::status_quo
                                  ? static_cast<int>(delta * s.base_capacity[i])
                                  : s.base_capacity[i];
        if (free_part > s.max_capacity[i])
          throw ValidationError("shelter " + std::to_string(s.id) + " service " +
                                std::to_string(i) + " has free capacity above its maximum");
      }
    }
    if (s.kind == ShelterKind::new_candidate) {
      if (s.bed_capacity <= 0)
        throw ValidationError("candidate shelter " + std::to_string(s.id) +
                              " must have positive bed capacity");
      if (s.critical_mass < 0)
        throw ValidationError("candidate shelter " + std::to_string(s.id) +
                              " has negative critical mass");
    }
  }

  for (const auto& y : youth) {
    if (static_cast<int>(y.attributes.size()) != na)
      throw ValidationError("youth " + std::to_string(y.id) +
                            " attribute vector has wrong length");
    if (y.arrival < 0 || y.arrival >= horizon)
      throw ValidationError("youth " + std::to_string(y.id) + " arrives outside the horizon");
    std::vector<bool> seen(ns, false);
    for (const auto& r : y.requests) {
      if (r.service < 0 || r.service >= ns)
        throw ValidationError("youth " + std::to_string(y.id) + " references unknown service " +
                              std::to_string(r.service));
      if (seen[r.service])
        throw ValidationError("youth " + std::to_string(y.id) + " requests service " +
                              std::to_string(r.service) + " twice");
      seen[r.service] = true;
      if (!(y.arrival <= r.earliest_start && r.earliest_start <= r.latest_start))
        throw ValidationError("youth " + std::to_string(y.id) + " service " +
                              std::to_string(r.service) +
                              " violates arrival <= earliest <= latest");
      if (r.duration < 0 || r.latest_start + r.duration > horizon)
        throw ValidationError("youth " + std::to_string(y.id) + " service " +
                              std::to_string(r.service) + " window ends beyond the horizon");
      if (r.frequency < 1)
        throw ValidationError("youth " + std::to_string(y.id) + " service " +
                              std::to_string(r.service) + " must have frequency >= 1");
      if (services[r.service].periodic && r.frequency > 1 && r.period_gap < 1)
        throw ValidationError("youth " + std::to_string(y.id) + " periodic service " +
                              std::to_string(r.service) + " needs a positive period gap");
    }
  }
}

/// Per-provision youth benefit: (medicaid savings + labor productivity)
/// discounted by the delay past the earliest start and split over the
/// request's frequency. Defined for starts within [earliest, latest].
inline double youth_benefit(const Instance& inst, int youth_id, int t, int service) {
  const YouthProfile* y = nullptr;
  for (const auto& cand : inst.youth)
    if (cand.id == youth_id) {
      y = &cand;
      break;
    }
  if (y == nullptr) throw MissingParameter("unknown youth " + std::to_string(youth_id));
  const ServiceRequest* r = y->request_for(service);
  if (r == nullptr)
    throw MissingParameter("youth " + std::to_string(youth_id) + " does not request service " +
                           std::to_string(service));
  if (t < r->earliest_start || t > r->latest_start)
    throw OutOfWindow("t is outside [earliest, latest] for youth " + std::to_string(youth_id));
  const double m = inst.benefit.medicaid_savings * inst.benefit.inflation_multiplier;
  const double p = inst.benefit.labor_productivity;
  return (m + p) / ((1.0 + t - r->earliest_start) * r->frequency);
}

}  // namespace bcropt
