#pragma once

#include <stdexcept>
#include <string>

namespace tmacap {

// Scenario file could not be parsed or violates a structural invariant.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

// Pairwise spacing solver failed to converge or was handed an infeasible
// configuration; the message identifies the offending combination.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tmacap
