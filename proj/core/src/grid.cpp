#include "cylvar/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cylvar/parallel.hpp"

namespace cylvar {

Grid2::Grid2(int nr_, int nz_, double rmax_, double zmax_)
    : nr(nr_), nz(nz_), rmax(rmax_), zmax(zmax_) {
  if (nr < 2 || nz < 3)
    throw std::invalid_argument("Grid2: need nr >= 2 and nz >= 3");
  if (!(rmax > 0.0) || !(zmax > 0.0))
    throw std::invalid_argument("Grid2: need rmax > 0 and zmax > 0");
}

double Grid2::weight(int i, int j) const {
  const double theta = (j == 0 || j == nz - 1) ? 0.5 : 1.0;
  return 2.0 * kPi * r(i) * dr() * dz() * theta;
}

Grid3::Grid3(int n_, double L_) : n(n_), L(L_) {
  if (n < 5) throw std::invalid_argument("Grid3: need n >= 5");
  if (!(L > 0.0)) throw std::invalid_argument("Grid3: need L > 0");
}

ScalarField sample_scalar(const Grid2& g,
                          const std::function<double(double, double)>& expr) {
  ScalarField f(g);
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nz; ++j) {
      const double val = expr(r, g.z(j));
      if (!std::isfinite(val)) {
        std::ostringstream msg;
        msg << "sample_scalar: non-finite value at r=" << r << " z=" << g.z(j);
        throw std::domain_error(msg.str());
      }
      f.at(i, j) = val;
    }
  }
  force_boundary_ring(f);
  return f;
}

VectorField3 sample_vector(
    const Grid3& g,
    const std::function<std::array<double, 3>(double, double, double)>& expr,
    bool force_boundary) {
  VectorField3 f(g);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j) {
      for (int k = 0; k < g.n; ++k) {
        const auto val = expr(g.coord(i), g.coord(j), g.coord(k));
        for (int c = 0; c < 3; ++c) {
          if (!std::isfinite(val[c])) {
            std::ostringstream msg;
            msg << "sample_vector: non-finite component " << c << " at x=("
                << g.coord(i) << "," << g.coord(j) << "," << g.coord(k) << ")";
            throw std::domain_error(msg.str());
          }
          f.at(i, j, k, c) = val[c];
        }
      }
    }
  }
  if (force_boundary) force_boundary_shell(f);
  return f;
}

Scalar3 sample_scalar3(
    const Grid3& g, const std::function<double(double, double, double)>& expr) {
  Scalar3 f(g);
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k)
        f.at(i, j, k) = expr(g.coord(i), g.coord(j), g.coord(k));
  return f;
}

double integrate2(const ScalarField& f) {
  const Grid2& g = f.grid;
  std::vector<double> weighted(g.size());
  parallel_for_ranges(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t s = b; s < e; ++s) {
      const int i = static_cast<int>(s) / g.nz;
      const int j = static_cast<int>(s) % g.nz;
      weighted[s] = g.weight(i, j) * f.v[s];
    }
  });
  return pairwise_sum(weighted);
}

double integrate3(const Scalar3& f) {
  const Grid3& g = f.grid;
  const double h3 = g.h() * g.h() * g.h();
  std::vector<double> weighted(g.size());
  const std::size_t nn = static_cast<std::size_t>(g.n) * g.n;
  parallel_for_ranges(g.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t s = b; s < e; ++s) {
      const int i = static_cast<int>(s / nn);
      const int j = static_cast<int>((s / g.n) % g.n);
      const int k = static_cast<int>(s % g.n);
      weighted[s] = g.boundary(i, j, k) ? 0.0 : f.v[s];
    }
  });
  return h3 * pairwise_sum(weighted);
}

void force_boundary_ring(ScalarField& f) {
  const Grid2& g = f.grid;
  for (int j = 0; j < g.nz; ++j) f.at(g.nr - 1, j) = 0.0;
  for (int i = 0; i < g.nr; ++i) {
    f.at(i, 0) = 0.0;
    f.at(i, g.nz - 1) = 0.0;
  }
}

void force_boundary_shell(VectorField3& f) {
  const Grid3& g = f.grid;
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k < g.n; ++k)
        if (g.boundary(i, j, k))
          for (int c = 0; c < 3; ++c) f.at(i, j, k, c) = 0.0;
}

Grid2 refine(const Grid2& g) { return Grid2(2 * g.nr, 2 * g.nz - 1, g.rmax, g.zmax); }

Grid3 refine(const Grid3& g) { return Grid3(2 * g.n - 1, g.L); }

}  // namespace cylvar
