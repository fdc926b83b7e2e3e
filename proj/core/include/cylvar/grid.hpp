#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace cylvar {

inline constexpr double kPi = 3.14159265358979323846;

// Uniform tensor grid on the half-plane [0, rmax] x [-zmax, zmax].
// r is cell-centered (r_i = (i + 1/2) dr, no node sits on the axis, so the
// 1/r^2 potential is always finite); z is node-centered and symmetric about
// z = 0, which makes reflection z -> -z an exact grid symmetry.
struct Grid2 {
  int nr = 0;
  int nz = 0;
  double rmax = 0.0;
  double zmax = 0.0;

  Grid2() = default;
  Grid2(int nr_, int nz_, double rmax_, double zmax_);

  double dr() const { return rmax / nr; }
  double dz() const { return 2.0 * zmax / (nz - 1); }
  double r(int i) const { return (i + 0.5) * dr(); }
  double z(int j) const { return -zmax + j * dz(); }

  // Quadrature weight of node (i, j): the cylindrical measure 2*pi*r dr dz
  // with trapezoid half-weights on the two z-edge rows.
  double weight(int i, int j) const;

  std::size_t size() const { return static_cast<std::size_t>(nr) * nz; }
  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(i) * nz + j;
  }

  bool operator==(const Grid2&) const = default;
};

// Scalar profile u(r, z) stored row-major (i outer, j inner). States produced
// by sampling or solving carry homogeneous values on the outer ring
// (j = 0, j = nz-1, i = nr-1); derivative/diagnostic fields reuse the type
// without that constraint.
struct ScalarField {
  Grid2 grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid2& g) : grid(g), v(g.size(), 0.0) {}

  double& at(int i, int j) { return v[grid.idx(i, j)]; }
  double at(int i, int j) const { return v[grid.idx(i, j)]; }
};

// Uniform cube [-L, L]^3, n nodes per axis, x_k = -L + k h.
struct Grid3 {
  int n = 0;
  double L = 0.0;

  Grid3() = default;
  Grid3(int n_, double L_);

  double h() const { return 2.0 * L / (n - 1); }
  double coord(int k) const { return -L + k * h(); }

  std::size_t size() const {
    return static_cast<std::size_t>(n) * n * n;
  }
  std::size_t idx(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n + j) * n + k;
  }
  bool boundary(int i, int j, int k) const {
    return i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 ||
           k == n - 1;
  }

  bool operator==(const Grid3&) const = default;
};

// Scalar samples on a Grid3 (integrands, divergences, ...).
struct Scalar3 {
  Grid3 grid;
  std::vector<double> v;

  Scalar3() = default;
  explicit Scalar3(const Grid3& g) : grid(g), v(g.size(), 0.0) {}

  double& at(int i, int j, int k) { return v[grid.idx(i, j, k)]; }
  double at(int i, int j, int k) const { return v[grid.idx(i, j, k)]; }
};

// Vector samples on a Grid3, components interleaved. Fields produced by
// sampling/lifting carry a zero outermost node shell.
struct VectorField3 {
  Grid3 grid;
  std::vector<double> v;

  VectorField3() = default;
  explicit VectorField3(const Grid3& g) : grid(g), v(3 * g.size(), 0.0) {}

  std::size_t idx(int i, int j, int k, int c) const {
    return 3 * grid.idx(i, j, k) + c;
  }
  double& at(int i, int j, int k, int c) { return v[idx(i, j, k, c)]; }
  double at(int i, int j, int k, int c) const { return v[idx(i, j, k, c)]; }

  std::array<double, 3> vec(int i, int j, int k) const {
    const std::size_t b = 3 * grid.idx(i, j, k);
    return {v[b], v[b + 1], v[b + 2]};
  }
};

// Samples expr(r, z) on every node, then forces the outer ring to zero.
// Throws std::domain_error naming the node if expr returns a non-finite value.
ScalarField sample_scalar(const Grid2& g,
                          const std::function<double(double, double)>& expr);

// Samples expr(x) on every node. force_boundary zeroes the outermost shell
// (on by default; tests of pure stencils may disable it).
VectorField3 sample_vector(
    const Grid3& g,
    const std::function<std::array<double, 3>(double, double, double)>& expr,
    bool force_boundary = true);

Scalar3 sample_scalar3(const Grid3& g,
                       const std::function<double(double, double, double)>& expr);

// Weighted sums over the grid measures; fixed pairwise reduction order.
double integrate2(const ScalarField& f);
double integrate3(const Scalar3& f);

// Zeroes the outer ring / shell in place.
void force_boundary_ring(ScalarField& f);
void force_boundary_shell(VectorField3& f);

// Halves the spacing, keeps the domain: (nr, nz) -> (2nr, 2nz-1), n -> 2n-1.
Grid2 refine(const Grid2& g);
Grid3 refine(const Grid3& g);

}  // namespace cylvar
