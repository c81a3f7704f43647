#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "dqm/family.hpp"

namespace dqm {

// Plain-text key-value configuration:
//   family=qR          one of H L J MP W AW M R qR
//   param.<name>=1.5   named real parameter (e.g. param.b, param.c, param.d)
//   N=8                lattice size for finite families
//   q=0.6              base of the q-families
// '#' starts a comment; blank lines are ignored.
struct FamilyConfig {
  FamilyId id = FamilyId::M;
  ParameterVector params;
};

inline FamilyConfig parse_family_config_text(const std::string& text) {
  FamilyConfig cfg;
  bool have_family = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw parameter_error("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string val = line.substr(eq + 1);
    auto trim = [](std::string s) {
      auto a = s.find_first_not_of(" \t");
      auto b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    key = trim(key);
    val = trim(val);
    if (key == "family") {
      auto id = family_from_name(val);
      if (!id) throw parameter_error("config line " + std::to_string(lineno) + ": unknown family '" + val + "'");
      cfg.id = *id;
      have_family = true;
    } else if (key == "N") {
      cfg.params.N = std::stoi(val);
    } else if (key == "q") {
      cfg.params.q_base = std::stod(val);
    } else if (key.rfind("param.", 0) == 0) {
      cfg.params.values[key.substr(6)] = std::stod(val);
    } else {
      throw parameter_error("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!have_family) throw parameter_error("config: missing 'family='");
  return cfg;
}

inline FamilyConfig parse_family_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parameter_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_family_config_text(ss.str());
}

}  // namespace dqm
