#pragma once

#include <stdexcept>
#include <string>

namespace dqm {

struct parameter_error : std::runtime_error {
  explicit parameter_error(const std::string& msg) : std::runtime_error("parameter error: " + msg) {}
};

struct domain_error : std::runtime_error {
  explicit domain_error(const std::string& msg) : std::runtime_error("domain error: " + msg) {}
};

struct index_error : std::runtime_error {
  explicit index_error(const std::string& msg) : std::runtime_error("index error: " + msg) {}
};

struct convergence_error : std::runtime_error {
  explicit convergence_error(const std::string& msg) : std::runtime_error("convergence error: " + msg) {}
};

struct validity_error : std::runtime_error {
  explicit validity_error(const std::string& msg) : std::runtime_error("validity error: " + msg) {}
};

struct singularity_error : std::runtime_error {
  explicit singularity_error(const std::string& msg) : std::runtime_error("singularity error: " + msg) {}
};

struct degeneracy_error : std::runtime_error {
  explicit degeneracy_error(const std::string& msg) : std::runtime_error("degeneracy error: " + msg) {}
};

struct solver_error : std::runtime_error {
  explicit solver_error(const std::string& msg) : std::runtime_error("solver error: " + msg) {}
};

}  // namespace dqm
