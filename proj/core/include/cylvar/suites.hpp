#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cylvar {

// One defect measurement: pass iff value <= budget (and value is finite).
struct SuiteRow {
  std::string suite;
  std::string check;
  double value = 0.0;
  double budget = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::vector<SuiteRow> rows;

  bool all_pass() const;
  // Header "suite,check,value,budget,pass"; floats at full precision,
  // pass rendered as 1/0.
  std::string to_csv() const;
};

struct SuiteOptions {
  // Grid sizes: the scalar half-plane gets (resolution-1) x (2*resolution-1)
  // nodes, the cube resolution^3, boxes fixed at 12. Budgets of
  // discretization-bound checks are calibrated at resolution 33 and scaled
  // by the mesh ratio; statistical checks budget by their own standard error.
  int resolution = 33;
  std::uint64_t seed = 2026;
  // Fault injection for exercising the report pipeline: negates every curl
  // the identities suite computes, which must turn the report red.
  bool mutate_curl_sign = false;
};

std::vector<std::string> suite_names();

// "identities", "conformal", "symmetry" or "nonlinearity"; throws
// std::invalid_argument for anything else or for resolution < 9.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opt);

}  // namespace cylvar
