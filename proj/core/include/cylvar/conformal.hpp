#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cylvar/grid.hpp"

namespace cylvar {

// Pair of rotation angles: alpha1 turns the (xi1, xi2) plane of S^3 (seen in
// R^3 as the rotation about the x3 axis), alpha2 turns the (xi3, xi4) plane
// (seen as a conformal Moebius motion along the x3 direction).
struct GroupElement {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

// Stereographic chart from the north pole (0,0,0,1): S^3 minus the pole to
// R^3, xi -> (xi1, xi2, xi3) / (1 - xi4), and its inverse
// x -> (2x, |x|^2 - 1) / (|x|^2 + 1).
std::array<double, 3> stereo(const std::array<double, 4>& xi);
std::array<double, 4> stereo_inv(const std::array<double, 3>& x);

// sqrt(2 / (1 + |x|^2)), the conformal weight of the chart.
double conformal_factor(double x, double y, double z);

// Conformal transport of U along the sphere rotation g:
//   (T_g U)(x) = [phi(x) / phi(y)] R1^T U(y),
// where y is x carried through the chart by g and R1 is the spatial rotation
// about e3 by alpha1. Values needed outside the box are treated as zero.
// alpha2 = 0 reduces to the Euclidean conjugation R1^T U(R1 x).
VectorField3 group_act(const VectorField3& U, const GroupElement& g);

// max over the sampled elements of the L^6 norm of T_g U - U over the ball
// |x| <= 0.75 L. The interior ball keeps the measurement away from the
// zero-extension artifacts at the box wall.
double symmetry_defect(const VectorField3& U,
                       const std::vector<GroupElement>& gs);

// The m1 x m2 product-angle average of T_g U; approximately idempotent, and
// its output's symmetry_defect drops to the interpolation floor.
VectorField3 symmetrize(const VectorField3& U, int m1, int m2);

// Default angle sample for defect measurements: m1 x m2 grid minus the
// identity element.
std::vector<GroupElement> sample_group_elements(int m1, int m2);

struct IsometryCheck {
  double l6_grid = 0.0;    // int |U|^6 over the box quadrature
  double l6_sphere = 0.0;  // int |V|^6 over S^3, V = U(pi(xi)) / phi(pi(xi))
  double std_error = 0.0;  // Monte Carlo standard error of l6_sphere
  int samples = 0;
};

// Change-of-variables check: the sixth-power mass of U on R^3 equals that of
// its sphere transport V on S^3. The sphere side is uniform Monte Carlo with
// a counter-based stream, so the result is reproducible for a given seed.
IsometryCheck l6_isometry_check(const VectorField3& U, int n_samples,
                                std::uint64_t seed = 2026);

struct VolumeCheck {
  double value = 0.0;      // Monte Carlo estimate of int phi^6 dx
  double std_error = 0.0;
  double expected = 0.0;   // 2 pi^2, the volume of S^3
  int samples = 0;
};

// int phi^6 dx = vol(S^3) by the same change of variables; estimated by
// importance sampling with a half-Cauchy radial proposal (bounded weights).
VolumeCheck phi6_volume_mc(int n_samples, std::uint64_t seed = 2026);

// phi(x)^3 (-x2, x1, 0): an azimuthal field that the transport fixes exactly
// in the continuum, so its measured defect is pure interpolation noise --
// the calibrator for symmetry budgets.
VectorField3 reference_symmetric_field(const Grid3& g);

}  // namespace cylvar
