#pragma once

// Versioned JSON schema for instances and a few shared (de)serialization
// helpers. Key order is fixed by construction so saved files diff cleanly
// and round-trip byte-identically. The schema is documented in docs/schema.md.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "bcropt/errors.hpp"
#include "bcropt/instance.hpp"
#include "bcropt/instance_gen.hpp"

namespace bcropt {

using ordered_json = nlohmann::ordered_json;

inline ordered_json to_json(const Instance& inst) {
  ordered_json j;
  j["schema_version"] = inst.schema_version;
  j["name"] = inst.name;
  j["seed"] = inst.seed;
  j["horizon"] = inst.horizon;
  j["delta"] = inst.delta;
  j["capacity_jitter"] = inst.capacity_jitter;
  j["num_extra_attributes"] = inst.num_extra_attributes;
  j["benefit_params"] = {
      {"medicaid_savings", inst.benefit.medicaid_savings},
      {"inflation_multiplier", inst.benefit.inflation_multiplier},
      {"labor_productivity", inst.benefit.labor_productivity},
      {"returns_multiplier", inst.benefit.returns_multiplier},
  };
  j["cost_params"] = {
      {"annual_bed_cost", inst.cost.annual_bed_cost},
      {"assignment_cost_in_house", inst.cost.assignment_cost_in_house},
      {"assignment_cost_referral", inst.cost.assignment_cost_referral},
      {"expansion_unit_cost", inst.cost.expansion_unit_cost},
  };
  j["services"] = ordered_json::array();
  for (const auto& s : inst.services)
    j["services"].push_back(
        {{"name", s.name}, {"periodic", s.periodic}, {"flexibility", s.flexibility}});
  j["boroughs"] = ordered_json::array();
  for (const auto& b : inst.boroughs)
    j["boroughs"].push_back({{"name", b.name}, {"cost_multiplier", b.cost_multiplier}});
  j["shelters"] = ordered_json::array();
  for (const auto& s : inst.shelters) {
    ordered_json js;
    js["id"] = s.id;
    js["name"] = s.name;
    js["kind"] = to_string(s.kind);
    js["borough"] = s.borough;
    js["attributes"] = s.attributes;
    js["base_capacity"] = s.base_capacity;
    js["max_capacity"] = s.max_capacity;
    js["bed_capacity"] = s.bed_capacity;
    js["critical_mass"] = s.critical_mass;
    j["shelters"].push_back(std::move(js));
  }
  j["youth"] = ordered_json::array();
  for (const auto& y : inst.youth) {
    ordered_json jy;
    jy["id"] = y.id;
    jy["arrival"] = y.arrival;
    jy["attributes"] = y.attributes;
    jy["requests"] = ordered_json::array();
    for (const auto& r : y.requests)
      jy["requests"].push_back({{"service", r.service},
                                {"earliest_start", r.earliest_start},
                                {"latest_start", r.latest_start},
                                {"duration", r.duration},
                                {"frequency", r.frequency},
                                {"period_gap", r.period_gap}});
    j["youth"].push_back(std::move(jy));
  }
  return j;
}

inline Instance instance_from_json(const ordered_json& j) {
  Instance inst;
  try {
    inst.schema_version = j.at("schema_version").get<int>();
    if (inst.schema_version != 1)
      throw SchemaVersionMismatch("instance schema version " +
                                  std::to_string(inst.schema_version) + " is not supported");
    inst.name = j.at("name").get<std::string>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.horizon = j.at("horizon").get<int>();
    inst.delta = j.at("delta").get<double>();
    inst.capacity_jitter = j.at("capacity_jitter").get<int>();
    inst.num_extra_attributes = j.at("num_extra_attributes").get<int>();
    const auto& bp = j.at("benefit_params");
    inst.benefit.medicaid_savings = bp.at("medicaid_savings").get<double>();
    inst.benefit.inflation_multiplier = bp.at("inflation_multiplier").get<double>();
    inst.benefit.labor_productivity = bp.at("labor_productivity").get<double>();
    inst.benefit.returns_multiplier = bp.at("returns_multiplier").get<double>();
    const auto& cp = j.at("cost_params");
    inst.cost.annual_bed_cost = cp.at("annual_bed_cost").get<double>();
    inst.cost.assignment_cost_in_house = cp.at("assignment_cost_in_house").get<double>();
    inst.cost.assignment_cost_referral = cp.at("assignment_cost_referral").get<double>();
    inst.cost.expansion_unit_cost = cp.at("expansion_unit_cost").get<std::vector<double>>();
    for (const auto& js : j.at("services"))
      inst.services.push_back(ServiceSpec{js.at("name").get<std::string>(),
                                          js.at("periodic").get<bool>(),
                                          js.at("flexibility").get<int>()});
    for (const auto& jb : j.at("boroughs"))
      inst.boroughs.push_back(
          Borough{jb.at("name").get<std::string>(), jb.at("cost_multiplier").get<double>()});
    for (const auto& js : j.at("shelters")) {
      ShelterProfile s;
      s.id = js.at("id").get<int>();
      s.name = js.at("name").get<std::string>();
      const std::string kind = js.at("kind").get<std::string>();
      if (kind == "status_quo")
        s.kind = ShelterKind::status_quo;
      else if (kind == "new_candidate")
        s.kind = ShelterKind::new_candidate;
      else if (kind == "referral")
        s.kind = ShelterKind::referral;
      else
        throw ValidationError("shelter " + std::to_string(s.id) + " has unknown kind " + kind);
      s.borough = js.at("borough").get<int>();
      s.attributes = js.at("attributes").get<std::vector<std::uint8_t>>();
      s.base_capacity = js.at("base_capacity").get<std::vector<int>>();
      s.max_capacity = js.at("max_capacity").get<std::vector<int>>();
      s.bed_capacity = js.at("bed_capacity").get<int>();
      s.critical_mass = js.at("critical_mass").get<int>();
      inst.shelters.push_back(std::move(s));
    }
    for (const auto& jy : j.at("youth")) {
      YouthProfile y;
      y.id = jy.at("id").get<int>();
      y.arrival = jy.at("arrival").get<int>();
      y.attributes = jy.at("attributes").get<std::vector<std::uint8_t>>();
      for (const auto& jr : jy.at("requests")) {
        ServiceRequest r;
        r.service = jr.at("service").get<int>();
        r.earliest_start = jr.at("earliest_start").get<int>();
        r.latest_start = jr.at("latest_start").get<int>();
        r.duration = jr.at("duration").get<int>();
        r.frequency = jr.at("frequency").get<int>();
        r.period_gap = jr.at("period_gap").get<int>();
        y.requests.push_back(r);
      }
      inst.youth.push_back(std::move(y));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed instance document: ") + e.what());
  }
  inst.validate();
  return inst;
}

inline void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << to_json(inst).dump(2) << "\n";
  if (!out) throw IoError("failed while writing " + path.string());
}

inline Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("cannot parse ") + path.string() + ": " + e.what());
  }
  return instance_from_json(j);
}

/// Generator configuration document. Unknown keys are rejected by name so a
/// typo cannot silently fall back to a default.
inline GeneratorConfig generator_config_from_json(const ordered_json& j) {
  GeneratorConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "name") cfg.name = value.get<std::string>();
      else if (key == "num_youth") cfg.num_youth = value.get<int>();
      else if (key == "horizon") cfg.horizon = value.get<int>();
      else if (key == "num_services") cfg.num_services = value.get<int>();
      else if (key == "num_extra_attributes") cfg.num_extra_attributes = value.get<int>();
      else if (key == "num_status_quo") cfg.num_status_quo = value.get<int>();
      else if (key == "num_referral") cfg.num_referral = value.get<int>();
      else if (key == "base_candidates") cfg.base_candidates = value.get<int>();
      else if (key == "scale_candidates_with_youth")
        cfg.scale_candidates_with_youth = value.get<bool>();
      else if (key == "min_requests") cfg.min_requests = value.get<int>();
      else if (key == "max_requests") cfg.max_requests = value.get<int>();
      else if (key == "delta") cfg.delta = value.get<double>();
      else if (key == "capacity_jitter") cfg.capacity_jitter = value.get<int>();
      else if (key == "max_headroom") cfg.max_headroom = value.get<int>();
      else if (key == "critical_mass") cfg.critical_mass = value.get<int>();
      else if (key == "status_quo_capacity_min") cfg.status_quo_capacity_min = value.get<int>();
      else if (key == "status_quo_capacity_max") cfg.status_quo_capacity_max = value.get<int>();
      else if (key == "candidate_capacity_min") cfg.candidate_capacity_min = value.get<int>();
      else if (key == "candidate_capacity_max") cfg.candidate_capacity_max = value.get<int>();
      else if (key == "offer_chance_pct") cfg.offer_chance_pct = value.get<int>();
      else if (key == "accept_chance_pct") cfg.accept_chance_pct = value.get<int>();
      else if (key == "demographic_chance_pct") cfg.demographic_chance_pct = value.get<int>();
      else if (key == "medicaid_savings") cfg.benefit.medicaid_savings = value.get<double>();
      else if (key == "inflation_multiplier")
        cfg.benefit.inflation_multiplier = value.get<double>();
      else if (key == "labor_productivity") cfg.benefit.labor_productivity = value.get<double>();
      else if (key == "returns_multiplier") cfg.benefit.returns_multiplier = value.get<double>();
      else if (key == "annual_bed_cost") cfg.cost.annual_bed_cost = value.get<double>();
      else if (key == "assignment_cost_in_house")
        cfg.cost.assignment_cost_in_house = value.get<double>();
      else if (key == "assignment_cost_referral")
        cfg.cost.assignment_cost_referral = value.get<double>();
      else if (key == "expansion_unit_cost")
        cfg.cost.expansion_unit_cost = value.get<std::vector<double>>();
      else
        throw ConfigInvalid("unknown generator config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigInvalid("bad value for generator config key '" + key + "': " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

inline GeneratorConfig load_generator_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigInvalid(std::string("cannot parse ") + path.string() + ": " + e.what());
  }
  return generator_config_from_json(j);
}

}  // namespace bcropt
