#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cylvar/functionals.hpp"
#include "cylvar/solvers.hpp"

namespace cylvar {

// Defects of the scalar<->vector correspondence evaluated on the final state.
struct IdentityTable {
  double j_vs_e_rel = 0.0;           // |J(u) - E(lift u)| / max(|J|, eps)
  double max_div_lift = 0.0;         // max interior |div lift(u)|
  double nehari_residual = 0.0;      // |<J'(u), u>| / ||u||_X^2
  double lift_roundtrip_max_err = 0.0;  // max |restrict(lift u) - u|
};

// Everything a run leaves behind. Serialized with a fixed key order and
// 17-significant-digit floats so identical runs give identical bytes.
struct RunManifest {
  std::vector<std::pair<std::string, std::string>> config_echo;

  int nr = 0, nz = 0;
  double rmax = 0.0, zmax = 0.0;
  int n3 = 0;
  double L3 = 0.0;

  std::string nl_kind;
  double p = 0.0;
  double eps_weight = 0.0;

  EnergyBreakdown j;  // scalar side
  EnergyBreakdown e;  // lifted side

  double dual_residual = 0.0;
  std::optional<double> rayleigh;
  std::optional<double> mountain_pass_level;

  IdentityTable identities;

  bool converged = false;
  int iterations = 0;
  std::vector<TracePoint> trace;

  double wall_time_seconds = 0.0;
  std::uint64_t seed = 0;
  int format_version = 1;
};

std::string manifest_json(const RunManifest& m);
void write_manifest(const std::filesystem::path& path, const RunManifest& m);

}  // namespace cylvar
