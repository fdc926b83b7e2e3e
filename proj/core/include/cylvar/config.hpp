#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cylvar/grid.hpp"
#include "cylvar/nonlinearity.hpp"
#include "cylvar/solvers.hpp"

namespace cylvar {

// Parse or validation failure; the message always carries file:line when a
// specific line is to blame.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RunMode { subcritical, critical, mountain_pass };

const char* to_string(RunMode m);

// Flat "section.key = value" configuration with '#' comments. Every key has
// a default, so an empty file is a valid run description.
struct Config {
  double a = 1.0;
  RunMode mode = RunMode::subcritical;

  std::string nl_kind = "power";
  double p = 4.0;
  double eps_weight = 0.0;

  int nr = 64;
  int nz = 129;
  double rmax = 12.0;
  double zmax = 12.0;
  int n3 = 65;
  double L3 = 12.0;

  SolverConfig solver;

  std::string out_dir = "out";

  Grid2 grid2() const { return Grid2(nr, nz, rmax, zmax); }
  Grid3 grid3() const { return Grid3(n3, L3); }
  Nonlinearity nonlinearity() const;

  // Canonical key/value echo in fixed order; feeding the rendered lines back
  // through the parser reproduces this config exactly (floats at 17 digits).
  std::vector<std::pair<std::string, std::string>> echo() const;
  std::string render() const;
};

// `name` labels the source in error messages (a path or a pseudo-name).
Config parse_config_text(const std::string& text, const std::string& name);
Config parse_config_file(const std::string& path);

}  // namespace cylvar
