#pragma once

#include <array>
#include <utility>

#include "cylvar/grid.hpp"

namespace cylvar {

// ---------------------------------------------------------------------------
// 2D difference calculus on the weighted half-plane
// ---------------------------------------------------------------------------

// Central differences inside, one-sided second-order stencils on the edges.
// Returns raw derivative samples (d/dr, d/dz); no boundary forcing.
std::pair<ScalarField, ScalarField> grad2(const ScalarField& u);

// Energy inner product <u,v> = int grad u . grad v + (a/r^2) u v over the
// cylindrical measure, assembled from face differences (midpoint flux form),
// so it is exactly the bilinear form of apply_A. Requires a > 0: the axis
// potential must stay coercive for the cell-centered r discretization.
double x_inner(const ScalarField& u, const ScalarField& v, double a);
double x_norm_sq(const ScalarField& u, double a);

// The three summands of x_inner, exposed separately because radial scaling
// u(r,z) -> u(lambda r, z) rescales them differently:
//   int du/dr dv/dr,  int du/dz dv/dz,  int (a/r^2) u v   (same measure).
double energy_form_r(const ScalarField& u, const ScalarField& v);
double energy_form_z(const ScalarField& u, const ScalarField& v);
double energy_form_mass(const ScalarField& u, const ScalarField& v, double a);

// Self-adjoint operator of x_inner w.r.t. the node weights: integrate2 of
// apply_A(u)*v equals x_inner(u,v) to rounding. Homogeneous values on the
// outer ring; the ring rows/column of u are treated as zero.
ScalarField apply_A(const ScalarField& u, double a);

// ---------------------------------------------------------------------------
// Smooth 2D sampling (lift source)
// ---------------------------------------------------------------------------

// Interpolating tensor-product cubic B-spline for the ratio q = u/r on the
// cell-centered grid, evenly mirrored through the axis and decaying to zero
// within two cells outside the domain. C^2 smoothness keeps difference
// stencils applied to lifted fields at their nominal second order; a merely
// C^0 interpolant would leak O(dr) kink terms into divergence and curl-curl
// defects and visibly degrade their refinement decay.
class RatioSpline {
 public:
  RatioSpline() = default;
  explicit RatioSpline(const ScalarField& u);

  // q(rho, z) = u(rho, z)/rho extended smoothly; zero far outside the domain.
  double ratio(double rho, double z) const;

  // u(rho, z) = rho * q(rho, z).
  double value(double rho, double z) const { return rho * ratio(rho, z); }

  const Grid2& grid() const { return grid_; }

 private:
  Grid2 grid_;
  std::vector<double> coef_;  // nr x nz spline coefficients, row-major

  double coef(int m, int l) const;
};

// ---------------------------------------------------------------------------
// Scalar <-> vector transport
// ---------------------------------------------------------------------------

// Azimuthal vector extension U(x) = u(rho, x3)/rho * (-x2, x1, 0) sampled on
// the cube, with the outer shell forced to zero.
VectorField3 lift(const ScalarField& u, const Grid3& g3);

// Inverse transport: samples the azimuthal component on the half-plane.
// Rejects fields that are not purely azimuthal: if the radial+vertical share
// of the L2 mass exceeds purity_tol, throws std::invalid_argument reporting
// the offending fractions.
ScalarField restrict_azimuthal(const VectorField3& U, const Grid2& g2,
                               double purity_tol = 1e-8);

// L2-mass fractions of the radial / azimuthal / vertical parts (sums to 1
// for a nonzero field).
struct AzimuthalFractions {
  double rho = 0.0;
  double tau = 0.0;
  double zeta = 0.0;
};
AzimuthalFractions azimuthal_energy_fractions(const VectorField3& U);

// Cylindrical component profiles of an axially equivariant field, sampled on
// the meridian half-plane (y = 0, x >= 0).
struct CylVectorField {
  Grid2 grid;
  std::vector<double> comp_r;
  std::vector<double> comp_theta;
  std::vector<double> comp_z;
};
CylVectorField cylinder_components(const VectorField3& U, const Grid2& g2);

// ---------------------------------------------------------------------------
// 3D difference calculus
// ---------------------------------------------------------------------------

// Central-difference curl on interior nodes, zero on the boundary shell.
VectorField3 curl3(const VectorField3& U);

// Central-difference divergence on interior nodes, zero on the shell.
Scalar3 div3(const VectorField3& U);

// max over interior nodes of | curl(curl U) + componentwise Laplacian(U) |_inf,
// the discrete form of the identity curl curl = grad div - Laplacian on
// divergence-free fields.
double curlcurl_minus_laplacian_defect(const VectorField3& U);

// Pointwise squared Frobenius norm of the Jacobian, sum_{c,d} (d_d U_c)^2,
// central differences on interior nodes, zero on the shell.
Scalar3 grad3_frobenius_sq(const VectorField3& U);

// Trilinear sample of U at an arbitrary point; zero outside the cube.
std::array<double, 3> trilinear(const VectorField3& U, double x, double y,
                                double z);

// ---------------------------------------------------------------------------
// Horizontal-rotation structure
// ---------------------------------------------------------------------------

// Pointwise radial/azimuthal/vertical split. On the axis (x1 = x2 = 0) the
// horizontal parts are zero and the vertical part carries (0, 0, U3); the
// parts sum to U exactly at every off-axis node, and at axis nodes whenever
// the field's horizontal components vanish there (true for the equivariant
// class this transport targets).
struct Decomposition {
  VectorField3 rho;
  VectorField3 tau;
  VectorField3 zeta;
};
Decomposition decompose(const VectorField3& U);

// Group average (1/m) sum_k g_k^T V(g_k x) over horizontal rotations by
// 2 pi k / m; trilinear resampling, zero outside the cube.
VectorField3 haar_average(const VectorField3& V, int m);

// max over the m sampled angles and over nodes whose rotated images stay
// inside the sampling cube of | g U(x) - U(g x) |_inf.
double equivariance_defect(const VectorField3& U, int m);

}  // namespace cylvar
