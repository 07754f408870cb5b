#pragma once

// Run manifests: every CLI invocation records what it ran with, so a run can
// be replayed exactly. Timestamps make the manifest itself volatile; every
// other output of a single-worker run is byte-reproducible from it.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcropt/errors.hpp"
#include "bcropt/tolerances.hpp"
#include "bcropt/version.hpp"

namespace bcropt {

struct RunManifest {
  std::string tool_version = kVersion;
  std::vector<std::string> command;  // argv of the subcommand, including its name
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  ToleranceConfig tol{};
  std::string started_at;
  std::string finished_at;
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void save_manifest(const RunManifest& m, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["seed"] = m.seed;
  j["out_dir"] = m.out_dir;
  j["tolerances"] = {{"feasibility", m.tol.feasibility},
                     {"duality_gap", m.tol.duality_gap},
                     {"integrality", m.tol.integrality},
                     {"reduced_cost", m.tol.reduced_cost},
                     {"pivot_min", m.tol.pivot_min},
                     {"bland_after", m.tol.bland_after},
                     {"refactor_interval", m.tol.refactor_interval},
                     {"enumeration_cap", m.tol.enumeration_cap}};
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << j.dump(2) << "\n";
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest " + path.string());
  nlohmann::ordered_json j;
  try {
    in >> j;
    RunManifest m;
    m.tool_version = j.at("tool_version").get<std::string>();
    m.command = j.at("command").get<std::vector<std::string>>();
    m.config_path = j.at("config_path").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.out_dir = j.at("out_dir").get<std::string>();
    const auto& t = j.at("tolerances");
    m.tol.feasibility = t.at("feasibility").get<double>();
    m.tol.duality_gap = t.at("duality_gap").get<double>();
    m.tol.integrality = t.at("integrality").get<double>();
    m.tol.reduced_cost = t.at("reduced_cost").get<double>();
    m.tol.pivot_min = t.at("pivot_min").get<double>();
    m.tol.bland_after = t.at("bland_after").get<int>();
    m.tol.refactor_interval = t.at("refactor_interval").get<int>();
    m.tol.enumeration_cap = t.at("enumeration_cap").get<std::uint64_t>();
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace bcropt
