#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cylvar/functionals.hpp"
#include "cylvar/grid.hpp"
#include "cylvar/nonlinearity.hpp"

namespace cylvar {

struct SolverConfig {
  int max_iter = 500;
  double tol = 1e-8;       // on the dual norm of the Euler-Lagrange residual
  double step0 = 1.0;      // initial Armijo step, halved on rejection
  std::uint64_t seed = 1;  // perturbs the starting profile
  bool positivity = false; // clamp iterates to |u| each step
  int k_nodes = 0;         // 0 = ground state, 1 = one nodal line at z = 0
  double cg_tol = 1e-10;   // inner Riesz solve, relative
};

struct TracePoint {
  double j = 0.0;         // energy (or its Rayleigh equivalent) at this step
  double residual = 0.0;  // dual residual at this step
};

struct SolveResult {
  ScalarField u;
  EnergyBreakdown energy;
  double dual_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<double> rayleigh;  // constrained minimum, critical mode only
  std::vector<TracePoint> trace;
};

// Constrained energy descent on the Nehari set {g(1) = 0}: Riesz-gradient
// steps with Armijo backtracking, each trial re-projected along its fiber.
// Accepts the superquadratic subcritical kinds; refuses `zero` (no fiber
// maximum exists) and `critical` (use solve_critical). Iterates that collapse
// to zero norm raise std::runtime_error; hitting max_iter just reports
// converged = false.
SolveResult solve_ground_state(const Grid2& g, double a, const Nonlinearity& nl,
                               const SolverConfig& cfg);

// Minimizes the quotient ||u||_X^2 / |u|_6^2 on the unit-|.|_6 sphere; the
// reported state is the fiber-scaled critical point of the free energy, its
// rayleigh field carries the constrained minimum S, and the trace logs the
// equivalent level S^{3/2}/3.
SolveResult solve_critical(const Grid2& g, double a, const SolverConfig& cfg);

// k_nodes = 1 variant of either solver (picked by nl.kind): every iterate is
// antisymmetrized through z = 0, so the state keeps an exact nodal line.
SolveResult excited_symmetric_state(const Grid2& g, double a,
                                    const Nonlinearity& nl,
                                    const SolverConfig& cfg);

struct MountainPassResult {
  double level = 0.0;        // optimized max of J along the path (upper bound)
  double ring_radius = 0.0;  // plateau radius of the starting ring
  double A = 0.0;            // lambda-invariant part of the ring energy
  double B = 0.0;            // lambda^-2 part, negative once the ring works
  double lambda = 0.0;       // radial dilation used for the endpoint
  double endpoint_energy = 0.0;  // J(e) < 0, verified on the grid
  int sweeps = 0;
  ScalarField peak;                  // state at the optimized path maximum
  std::vector<double> sweep_levels;  // path level after each sweep
  std::vector<double> knot_energies; // J at the final knots
};

// Upper bound for the mountain-pass level: builds the plateau ring, certifies
// a negative-energy endpoint through the radial-dilation split J = A/2 +
// B/lambda^2, then relaxes a piecewise-linear path from 0 to the endpoint by
// knot-wise Riesz descent with equal-arclength reparametrization. The level
// is the smallest dense-sampling path maximum seen over the sweeps.
MountainPassResult mountain_pass_level_bound(const Grid2& g, double a,
                                             const Nonlinearity& nl,
                                             const SolverConfig& cfg,
                                             double u0 = 1.0, int knots = 32);

}  // namespace cylvar
