#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace dqm {

using ordered_json = nlohmann::ordered_json;

struct CheckRecord {
  std::string id;
  std::string detail;   // what identity/quantity the residual measures
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::string suite;
  ordered_json meta;  // family/deformation echo, parameters, notes
  std::vector<CheckRecord> checks;
  uint64_t seed = 0;
  double wall_ms = 0.0;

  void add(const std::string& id, const std::string& detail, double residual, double tolerance) {
    checks.push_back({id, detail, residual, tolerance, residual <= tolerance});
  }
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  ordered_json to_json() const {
    ordered_json j;
    j["schema_version"] = 1;
    j["suite"] = suite;
    j["meta"] = meta.is_null() ? ordered_json::object() : meta;
    j["seed"] = seed;
    j["wall_time_ms"] = wall_ms;
    j["all_pass"] = all_pass();
    j["checks"] = ordered_json::array();
    for (const auto& c : checks) {
      ordered_json jc;
      jc["check_id"] = c.id;
      jc["detail"] = c.detail;
      jc["residual"] = c.residual;
      jc["tolerance"] = c.tolerance;
      jc["pass"] = c.pass;
      j["checks"].push_back(jc);
    }
    return j;
  }
};

// atomic write: temp file in the same directory, then rename
inline void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << content;
  }
  std::rename(tmp.c_str(), path.c_str());
}

struct WallTimer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
};

}  // namespace dqm
