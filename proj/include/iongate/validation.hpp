#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iongate/io.hpp"

namespace iongate {

// One stated invariant of a module.
struct Invariant {
  std::string id;
  std::string module;
  std::string statement;
};

// Every invariant the suite covers, in execution order.
const std::vector<Invariant>& invariant_manifest();

struct InvariantCheck {
  std::string id;
  std::string module;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<InvariantCheck> checks;

  bool all_passed() const;
  Table to_table() const;
  // Manifest entries with the number of executed checks and their status.
  Json coverage_manifest() const;
};

// Analytic-vs-oracle and property suite.  Deterministic for a given seed.
ValidationReport run_validation(std::uint64_t seed = 1, unsigned jobs = 1);

}  // namespace iongate
