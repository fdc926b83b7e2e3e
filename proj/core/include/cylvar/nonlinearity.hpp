#pragma once

#include <array>
#include <optional>
#include <string>

namespace cylvar {

// Right-hand-side family f(z, u) = Gamma(z) * f0(u) with the 1-periodic
// weight Gamma(z) = 1 + eps * sin^2(pi z), eps in [0, 1/2].
//
//  power        f0 = |u|^(p-2) u,              2 < p < 6
//  critical     f0 = |u|^4 u                   (Sobolev-critical exponent)
//  log_modified f0 = |u|^(p-2) u ln(1+|u|)     for |u| >= 1,
//               f0 = ln(2) |u|^4 u / (1-ln|u|) for 0 < |u| < 1,   2 <= p < 6
//  zero         f0 = 0
//
// log_modified trades a plain power for one whose ratio f0/|u|^5 decays at
// BOTH ends, at the price of a non-elementary antiderivative (tabulated).
// one_sided truncates f to u >= 0, which keeps the superquadratic lower
// bound but destroys coercivity of the potential at -infinity.
struct Nonlinearity {
  enum class Kind { power, critical, log_modified, zero };

  Kind kind = Kind::zero;
  double p = 0.0;
  double eps_weight = 0.0;
  bool one_sided = false;

  static Nonlinearity power(double p, double eps_weight = 0.0);
  static Nonlinearity critical();
  static Nonlinearity log_modified(double p, double eps_weight = 0.0);
  static Nonlinearity zero();

  Nonlinearity with_one_sided() const;

  std::string kind_name() const;
};

// Gamma(z); independent of r by construction (several superquadratic
// estimates require a weight constant on horizontal planes).
double weight_gamma(const Nonlinearity& nl, double z);

// f(z, u) and its u-antiderivative F(z, u) = int_0^u f(z, t) dt.
// For log_modified, F is served from a dense Hermite table (exact f as the
// nodal derivative) on |u| <= 10 plus a series tail, absolute error <= 1e-12.
double eval_f(const Nonlinearity& nl, double z, double u);
double eval_F(const Nonlinearity& nl, double z, double u);

// Radial vector extension h(x, U) = f(x3, |U|) U / |U| (zero at U = 0).
std::array<double, 3> eval_h(const Nonlinearity& nl, double x3,
                             const std::array<double, 3>& U);

// ---------------------------------------------------------------------------
// Growth-assumption battery
// ---------------------------------------------------------------------------

// Sampled verdicts for the standing assumptions on f:
//  F1  measurable structure: weight 1-periodic in z (checked on samples)
//  F2  subcritical decay: f/|u|^5 -> 0 along the ladder u = 10^k (the decay
//      of the same ratio at u -> 0 is recorded separately in f2_zero_decays;
//      it is informational and not part of the verdict)
//  F3  superquadratic potential: F/u^2 -> infinity along the ladder
//  F4  f(z,u)/|u| nondecreasing on each half-line
//  F5  f(z,u) u >= gamma F(z,u) for some gamma > 2 (ladder minimum plus a
//      trend extrapolation of the large-u ratio), and ess-inf_z F(z, u0) > 0
//      at some u0
struct AssumptionReport {
  enum class Status { holds_on_samples, violated, not_applicable };

  struct Check {
    Status status = Status::not_applicable;
    std::string detail;
  };

  Check f1, f2, f3, f4, f5;
  bool f2_zero_decays = false;
  double gamma_used = 0.0;

  bool all_hold() const;
  std::string to_string() const;
};

std::string to_string(AssumptionReport::Status s);

// Evaluates the battery. If gamma is given it is used verbatim in F5;
// otherwise p is used for the power kinds and the observed ladder minimum
// for log_modified.
AssumptionReport check_assumptions(const Nonlinearity& nl,
                                   std::optional<double> gamma = std::nullopt);

}  // namespace cylvar
