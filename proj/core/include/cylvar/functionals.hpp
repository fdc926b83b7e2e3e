#pragma once

#include <optional>
#include <vector>

#include "cylvar/grid.hpp"
#include "cylvar/nonlinearity.hpp"
#include "cylvar/operators.hpp"

namespace cylvar {

struct EnergyBreakdown {
  double quadratic = 0.0;   // (1/2) ||u||_X^2  resp.  (1/2) int |curl U|^2
  double nonlinear = 0.0;   // int F(z, u)      resp.  int F(x3, |U|)
  double total = 0.0;       // quadratic - nonlinear
};

EnergyBreakdown energy_scalar(const ScalarField& u, double a,
                              const Nonlinearity& nl);
EnergyBreakdown energy_vector(const VectorField3& U, const Nonlinearity& nl);

// Weighted L2 pairing  sum_ij w_ij a_ij b_ij  (the node inner product the
// energy operator A is self-adjoint against).
double dot_w(const ScalarField& x, const ScalarField& y);

struct GradientResult {
  ScalarField raw;      // nodal A u - f(z, u); zero on the Dirichlet ring
  ScalarField riesz;    // psi solving A psi = raw (the X-gradient)
  double dual_norm = 0.0;  // sqrt(<raw, psi>_w) = dual norm of the residual
  int cg_iterations = 0;
};

// Riesz representative of J'(u) obtained by conjugate gradients on A in the
// weighted node metric. Relative tolerance is on the w-norm of the CG
// residual against the right-hand side; throws if CG stalls. `warm_start`
// (same grid) seeds the iteration, which matters inside descent loops where
// successive right-hand sides differ little.
GradientResult gradient_scalar(const ScalarField& u, double a,
                               const Nonlinearity& nl, double cg_tol = 1e-10,
                               const ScalarField* warm_start = nullptr);

// Solve A psi = rhs by the same CG; exposed for reuse by the Rayleigh solver.
ScalarField solve_A(const ScalarField& rhs, double a, double cg_tol,
                    const ScalarField* warm_start, int* iterations);

// Derivative of the fiber map  g(t) = d/dt J(t u) * t
//                                   = t^2 ||u||_X^2 - int f(z, t u) t u.
double fiber_derivative(const ScalarField& u, double a, const Nonlinearity& nl,
                        double t);

struct FiberProfile {
  std::vector<double> ts;          // sample abscissae (log-spaced scan)
  std::vector<double> js;          // J(t u) at the samples
  std::optional<double> root;      // positive zero of g (projection scale t*)
  std::optional<double> g_at_root; // bisection residual at the root
};

// Scans g over (0, t_max] and bisects the single sign change to relative
// tolerance 1e-10. g > 0 on the whole range (no fiber maximum below t_max)
// is reported as an absent root, not an error. More than one sign change
// means f(z,u)/|u| is not monotone and raises std::runtime_error.
FiberProfile fiber_profile(const ScalarField& u, double a,
                           const Nonlinearity& nl, double t_max = 100.0,
                           int samples = 48);

// ---------------------------------------------------------------------------
// Mountain-pass scaffolding
// ---------------------------------------------------------------------------

// Plateau profile: 0 on [0,1], rises linearly to u0 on [1,2], u0 on [2,R],
// falls linearly to 0 on [R,R+1], 0 beyond.
double ring_profile(double t, double u0, double R);

struct RingFunction {
  ScalarField w;           // w(r,z) = phi(r) phi(|z|)
  double radius = 0.0;     // plateau outer radius R
  double f_mass = 0.0;     // int F(z, w)
  double z_gradient = 0.0; // (1/2) int |dw/dz|^2
};

// Builds the ring for a given R; requires R >= 3 and R + 1 inside the grid.
RingFunction mountain_pass_ring(const Grid2& g, const Nonlinearity& nl,
                                double u0, double R);

// Smallest integer R >= 3 with f_mass > z_gradient, i.e. with the vertical
// modulation energy beaten by the potential mass. Empty if no admissible R
// fits the grid.
std::optional<RingFunction> find_ring_radius(const Grid2& g,
                                             const Nonlinearity& nl,
                                             double u0);

struct ScalingPath {
  double A = 0.0;  // int |dw/dr|^2 + (a/r^2) w^2   (lambda-invariant part)
  double B = 0.0;  // (1/2) int |dw/dz|^2 - int F   (scales by lambda^-2)
  std::vector<double> lambdas;
  std::vector<double> values;  // (1/2) A + B / lambda^2
  double negative_threshold = 0.0;  // values < 0 for all 0 < lambda < this
};

// Energy of the radial dilations w_lambda(r,z) = w(lambda r, z) in closed
// form: J(w_lambda) = (1/2) A + B / lambda^2 with A, B evaluated by the same
// discrete forms as energy_scalar, so lambda = 1 reproduces J(w) up to
// floating-point reassociation. `lambdas` must be strictly decreasing and
// positive (the path is walked from lambda = 1 toward 0).
ScalingPath scaling_path(const ScalarField& w, double a, const Nonlinearity& nl,
                         const std::vector<double>& lambdas);

}  // namespace cylvar
