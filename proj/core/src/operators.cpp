#include "cylvar/operators.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "cylvar/parallel.hpp"

namespace cylvar {

namespace {

void require_positive_a(double a) {
  if (!(a > 0.0))
    throw std::invalid_argument(
        "axis coefficient a must be > 0: the 1/r^2 term is otherwise not "
        "coercive for the horizontal-plane problem");
}

}  // namespace

// ---------------------------------------------------------------------------
// grad2
// ---------------------------------------------------------------------------

std::pair<ScalarField, ScalarField> grad2(const ScalarField& u) {
  const Grid2& g = u.grid;
  ScalarField dur(g), duz(g);
  const double idr2 = 1.0 / (2.0 * g.dr());
  const double idz2 = 1.0 / (2.0 * g.dz());
  for (int i = 0; i < g.nr; ++i) {
    for (int j = 0; j < g.nz; ++j) {
      double dr_val;
      if (i == 0)
        dr_val = (-3.0 * u.at(0, j) + 4.0 * u.at(1, j) - u.at(2, j)) * idr2;
      else if (i == g.nr - 1)
        dr_val = (3.0 * u.at(i, j) - 4.0 * u.at(i - 1, j) + u.at(i - 2, j)) * idr2;
      else
        dr_val = (u.at(i + 1, j) - u.at(i - 1, j)) * idr2;

      double dz_val;
      if (j == 0)
        dz_val = (-3.0 * u.at(i, 0) + 4.0 * u.at(i, 1) - u.at(i, 2)) * idz2;
      else if (j == g.nz - 1)
        dz_val = (3.0 * u.at(i, j) - 4.0 * u.at(i, j - 1) + u.at(i, j - 2)) * idz2;
      else
        dz_val = (u.at(i, j + 1) - u.at(i, j - 1)) * idz2;

      dur.at(i, j) = dr_val;
      duz.at(i, j) = dz_val;
    }
  }
  return {std::move(dur), std::move(duz)};
}

// ---------------------------------------------------------------------------
// Energy form and its operator
// ---------------------------------------------------------------------------

namespace {

void require_same_grid(const ScalarField& u, const ScalarField& v,
                       const char* who) {
  if (u.grid != v.grid)
    throw std::invalid_argument(std::string(who) + ": mismatched grids");
}

}  // namespace

double energy_form_r(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u, v, "energy_form_r");
  const Grid2& g = u.grid;
  const double dr = g.dr(), dz = g.dz();
  const double two_pi = 2.0 * kPi;

  // Radial flux faces sit midway between cell centers at r = (i+1) dr; the
  // implicit face at r = 0 carries zero measure, so the axis needs no
  // boundary condition.
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(g.nr - 1) * g.nz);
  for (int i = 0; i + 1 < g.nr; ++i) {
    const double rf = (i + 1) * dr;
    for (int j = 0; j < g.nz; ++j) {
      const double theta = (j == 0 || j == g.nz - 1) ? 0.5 : 1.0;
      const double du = (u.at(i + 1, j) - u.at(i, j)) / dr;
      const double dv = (v.at(i + 1, j) - v.at(i, j)) / dr;
      terms.push_back(two_pi * rf * dr * dz * theta * du * dv);
    }
  }
  return pairwise_sum(terms);
}

double energy_form_z(const ScalarField& u, const ScalarField& v) {
  require_same_grid(u, v, "energy_form_z");
  const Grid2& g = u.grid;
  const double dr = g.dr(), dz = g.dz();
  const double two_pi = 2.0 * kPi;
  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(g.nr) * (g.nz - 1));
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j + 1 < g.nz; ++j) {
      const double du = (u.at(i, j + 1) - u.at(i, j)) / dz;
      const double dv = (v.at(i, j + 1) - v.at(i, j)) / dz;
      terms.push_back(two_pi * r * dr * dz * du * dv);
    }
  }
  return pairwise_sum(terms);
}

double energy_form_mass(const ScalarField& u, const ScalarField& v, double a) {
  require_positive_a(a);
  require_same_grid(u, v, "energy_form_mass");
  const Grid2& g = u.grid;
  std::vector<double> terms;
  terms.reserve(g.size());
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nz; ++j)
      terms.push_back(g.weight(i, j) * (a / (r * r)) * u.at(i, j) * v.at(i, j));
  }
  return pairwise_sum(terms);
}

double x_inner(const ScalarField& u, const ScalarField& v, double a) {
  return energy_form_r(u, v) + energy_form_z(u, v) +
         energy_form_mass(u, v, a);
}

double x_norm_sq(const ScalarField& u, double a) { return x_inner(u, u, a); }

ScalarField apply_A(const ScalarField& u, double a) {
  require_positive_a(a);
  const Grid2& g = u.grid;
  ScalarField out(g);
  const double dr = g.dr(), dz = g.dz();
  const double two_pi = 2.0 * kPi;

  // Dirichlet ring: inputs there are treated as zero, outputs stay zero.
  const auto val = [&](int i, int j) -> double {
    if (i == g.nr - 1 || j == 0 || j == g.nz - 1) return 0.0;
    return u.at(i, j);
  };

  parallel_for_ranges(static_cast<std::size_t>(g.nr - 1),
                      [&](std::size_t ib, std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      const double r = g.r(i);
      for (int j = 1; j + 1 < g.nz; ++j) {
        const double theta = 1.0;  // interior rows only
        const double w = two_pi * r * dr * dz * theta;
        const double uij = val(i, j);

        // radial faces at (i +/- 1/2); the inner face of cell 0 is the axis
        // and carries zero measure
        const double c_rp = two_pi * (i + 1) * dr * dr * dz * theta / (dr * dr);
        const double c_rm = two_pi * i * dr * dr * dz * theta / (dr * dr);
        // vertical faces
        const double c_z = two_pi * r * dr * dz / (dz * dz);

        double acc = c_rp * (uij - val(i + 1, j));
        if (i > 0) acc += c_rm * (uij - val(i - 1, j));
        acc += c_z * (uij - val(i, j + 1));
        acc += c_z * (uij - val(i, j - 1));

        out.at(i, j) = acc / w + (a / (r * r)) * uij;
      }
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// RatioSpline
// ---------------------------------------------------------------------------

namespace {

// Thomas solve of the cubic-spline collocation system
//   (1/6) c[m-1] + (2/3) c[m] + (1/6) c[m+1] = d[m]
// with ghost coefficient rules folded into the end rows:
//   mirror_lo: c[-1] = c[0] (even reflection), otherwise c[-1] = 0;
//   the upper ghost c[n] is always 0 (zero extension).
void spline_filter_line(const double* d, int n, std::ptrdiff_t stride,
                        bool mirror_lo, double* c) {
  std::vector<double> diag(n), rhs(n);
  const double lo_diag = mirror_lo ? (2.0 / 3.0 + 1.0 / 6.0) : (2.0 / 3.0);
  diag[0] = lo_diag;
  rhs[0] = d[0];
  for (int m = 1; m < n; ++m) {
    const double w = (1.0 / 6.0) / diag[m - 1];
    diag[m] = 2.0 / 3.0 - w * (1.0 / 6.0);
    rhs[m] = d[static_cast<std::ptrdiff_t>(m) * stride] - w * rhs[m - 1];
  }
  c[static_cast<std::ptrdiff_t>(n - 1) * stride] = rhs[n - 1] / diag[n - 1];
  for (int m = n - 2; m >= 0; --m)
    c[static_cast<std::ptrdiff_t>(m) * stride] =
        (rhs[m] - (1.0 / 6.0) * c[static_cast<std::ptrdiff_t>(m + 1) * stride]) /
        diag[m];
}

// Uniform cubic B-spline basis weights for local coordinate t in [0,1).
inline void bspline_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = (1.0 - 3.0 * t + 3.0 * t2 - t3) / 6.0;
  w[1] = (4.0 - 6.0 * t2 + 3.0 * t3) / 6.0;
  w[2] = (1.0 + 3.0 * t + 3.0 * t2 - 3.0 * t3) / 6.0;
  w[3] = t3 / 6.0;
}

}  // namespace

RatioSpline::RatioSpline(const ScalarField& u) : grid_(u.grid) {
  const Grid2& g = grid_;
  std::vector<double> q(g.size());
  for (int i = 0; i < g.nr; ++i) {
    const double inv_r = 1.0 / g.r(i);
    for (int j = 0; j < g.nz; ++j) q[g.idx(i, j)] = u.at(i, j) * inv_r;
  }
  coef_.assign(g.size(), 0.0);
  // Filter along r (mirrored at the axis) for every z row, then along z.
  std::vector<double> tmp(g.size());
  for (int j = 0; j < g.nz; ++j)
    spline_filter_line(&q[g.idx(0, j)], g.nr, g.nz, /*mirror_lo=*/true,
                       &tmp[g.idx(0, j)]);
  for (int i = 0; i < g.nr; ++i)
    spline_filter_line(&tmp[g.idx(i, 0)], g.nz, 1, /*mirror_lo=*/false,
                       &coef_[g.idx(i, 0)]);
}

double RatioSpline::coef(int m, int l) const {
  if (l < 0 || l >= grid_.nz) return 0.0;
  if (m < 0) m = -1 - m;  // even mirror through the axis
  if (m >= grid_.nr) return 0.0;
  return coef_[grid_.idx(m, l)];
}

double RatioSpline::ratio(double rho, double z) const {
  const Grid2& g = grid_;
  const double sr = rho / g.dr() - 0.5;
  const double sz = (z + g.zmax) / g.dz();
  if (sr > g.nr + 2.0 || sz < -3.0 || sz > g.nz + 2.0) return 0.0;
  const double fr = std::floor(sr), fz = std::floor(sz);
  const int mr = static_cast<int>(fr), mz = static_cast<int>(fz);
  double wr[4], wz[4];
  bspline_weights(sr - fr, wr);
  bspline_weights(sz - fz, wz);
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int m = mr - 1 + a;
    double row = 0.0;
    for (int b = 0; b < 4; ++b) row += wz[b] * coef(m, mz - 1 + b);
    acc += wr[a] * row;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// lift / restrict
// ---------------------------------------------------------------------------

VectorField3 lift(const ScalarField& u, const Grid3& g3) {
  const RatioSpline spline(u);
  VectorField3 U(g3);
  const int n = g3.n;
  parallel_for_ranges(static_cast<std::size_t>(n), [&](std::size_t ib,
                                                       std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      const double x1 = g3.coord(i);
      for (int j = 0; j < n; ++j) {
        const double x2 = g3.coord(j);
        const double rho = std::sqrt(x1 * x1 + x2 * x2);
        for (int k = 0; k < n; ++k) {
          const double q = spline.ratio(rho, g3.coord(k));
          U.at(i, j, k, 0) = -x2 * q;
          U.at(i, j, k, 1) = x1 * q;
          // third component identically zero
        }
      }
    }
  });
  force_boundary_shell(U);
  return U;
}

AzimuthalFractions azimuthal_energy_fractions(const VectorField3& U) {
  const Grid3& g = U.grid;
  Scalar3 e_rho(g), e_tau(g), e_zeta(g);
  parallel_for_ranges(static_cast<std::size_t>(g.n), [&](std::size_t ib,
                                                         std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      const double x1 = g.coord(i);
      for (int j = 0; j < g.n; ++j) {
        const double x2 = g.coord(j);
        const double rho2 = x1 * x1 + x2 * x2;
        for (int k = 0; k < g.n; ++k) {
          const auto v = U.vec(i, j, k);
          if (rho2 > 0.0) {
            const double pr = v[0] * x1 + v[1] * x2;
            const double pt = -v[0] * x2 + v[1] * x1;
            e_rho.at(i, j, k) = pr * pr / rho2;
            e_tau.at(i, j, k) = pt * pt / rho2;
          }
          e_zeta.at(i, j, k) = v[2] * v[2];
        }
      }
    }
  });
  AzimuthalFractions f;
  const double mr = integrate3(e_rho);
  const double mt = integrate3(e_tau);
  const double mz = integrate3(e_zeta);
  const double total = mr + mt + mz;
  if (total > 0.0) {
    f.rho = mr / total;
    f.tau = mt / total;
    f.zeta = mz / total;
  }
  return f;
}

CylVectorField cylinder_components(const VectorField3& U, const Grid2& g2) {
  CylVectorField out;
  out.grid = g2;
  out.comp_r.resize(g2.size());
  out.comp_theta.resize(g2.size());
  out.comp_z.resize(g2.size());
  for (int i = 0; i < g2.nr; ++i) {
    for (int j = 0; j < g2.nz; ++j) {
      // On the meridian half-plane y = 0, x = r > 0 the cylindrical frame is
      // the Cartesian one: e_r = e_x, e_theta = e_y, e_z = e_z.
      const auto v = trilinear(U, g2.r(i), 0.0, g2.z(j));
      out.comp_r[g2.idx(i, j)] = v[0];
      out.comp_theta[g2.idx(i, j)] = v[1];
      out.comp_z[g2.idx(i, j)] = v[2];
    }
  }
  return out;
}

ScalarField restrict_azimuthal(const VectorField3& U, const Grid2& g2,
                               double purity_tol) {
  const AzimuthalFractions f = azimuthal_energy_fractions(U);
  if (f.rho + f.zeta > purity_tol) {
    std::ostringstream msg;
    msg << "restrict_azimuthal: field is not purely azimuthal (radial mass "
           "fraction "
        << f.rho << ", vertical mass fraction " << f.zeta << ", tolerance "
        << purity_tol << ")";
    throw std::invalid_argument(msg.str());
  }
  const CylVectorField cyl = cylinder_components(U, g2);
  ScalarField u(g2);
  u.v = cyl.comp_theta;
  force_boundary_ring(u);
  return u;
}

// ---------------------------------------------------------------------------
// 3D stencils
// ---------------------------------------------------------------------------

VectorField3 curl3(const VectorField3& U) {
  const Grid3& g = U.grid;
  VectorField3 C(g);
  const int n = g.n;
  const double i2h = 1.0 / (2.0 * g.h());
  parallel_for_ranges(static_cast<std::size_t>(n - 2), [&](std::size_t ib,
                                                           std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is) + 1;
      for (int j = 1; j + 1 < n; ++j) {
        for (int k = 1; k + 1 < n; ++k) {
          const double d2U3 = (U.at(i, j + 1, k, 2) - U.at(i, j - 1, k, 2)) * i2h;
          const double d3U2 = (U.at(i, j, k + 1, 1) - U.at(i, j, k - 1, 1)) * i2h;
          const double d3U1 = (U.at(i, j, k + 1, 0) - U.at(i, j, k - 1, 0)) * i2h;
          const double d1U3 = (U.at(i + 1, j, k, 2) - U.at(i - 1, j, k, 2)) * i2h;
          const double d1U2 = (U.at(i + 1, j, k, 1) - U.at(i - 1, j, k, 1)) * i2h;
          const double d2U1 = (U.at(i, j + 1, k, 0) - U.at(i, j - 1, k, 0)) * i2h;
          C.at(i, j, k, 0) = d2U3 - d3U2;
          C.at(i, j, k, 1) = d3U1 - d1U3;
          C.at(i, j, k, 2) = d1U2 - d2U1;
        }
      }
    }
  });
  return C;
}

Scalar3 div3(const VectorField3& U) {
  const Grid3& g = U.grid;
  Scalar3 D(g);
  const int n = g.n;
  const double i2h = 1.0 / (2.0 * g.h());
  parallel_for_ranges(static_cast<std::size_t>(n - 2), [&](std::size_t ib,
                                                           std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is) + 1;
      for (int j = 1; j + 1 < n; ++j)
        for (int k = 1; k + 1 < n; ++k)
          D.at(i, j, k) = (U.at(i + 1, j, k, 0) - U.at(i - 1, j, k, 0)) * i2h +
                          (U.at(i, j + 1, k, 1) - U.at(i, j - 1, k, 1)) * i2h +
                          (U.at(i, j, k + 1, 2) - U.at(i, j, k - 1, 2)) * i2h;
    }
  });
  return D;
}

double curlcurl_minus_laplacian_defect(const VectorField3& U) {
  const Grid3& g = U.grid;
  const VectorField3 C = curl3(U);
  const VectorField3 CC = curl3(C);
  const int n = g.n;
  const double ih2 = 1.0 / (g.h() * g.h());

  std::vector<double> row_max(static_cast<std::size_t>(n), 0.0);
  parallel_for_ranges(static_cast<std::size_t>(n - 2), [&](std::size_t ib,
                                                           std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is) + 1;
      double m = 0.0;
      for (int j = 1; j + 1 < n; ++j) {
        for (int k = 1; k + 1 < n; ++k) {
          for (int c = 0; c < 3; ++c) {
            const double lap =
                (U.at(i + 1, j, k, c) + U.at(i - 1, j, k, c) +
                 U.at(i, j + 1, k, c) + U.at(i, j - 1, k, c) +
                 U.at(i, j, k + 1, c) + U.at(i, j, k - 1, c) -
                 6.0 * U.at(i, j, k, c)) *
                ih2;
            m = std::max(m, std::abs(CC.at(i, j, k, c) + lap));
          }
        }
      }
      row_max[i] = m;
    }
  });
  double m = 0.0;
  for (double x : row_max) m = std::max(m, x);
  return m;
}

Scalar3 grad3_frobenius_sq(const VectorField3& U) {
  const Grid3& g = U.grid;
  Scalar3 out(g);
  const int n = g.n;
  const double i2h = 1.0 / (2.0 * g.h());
  parallel_for_ranges(static_cast<std::size_t>(n - 2), [&](std::size_t ib,
                                                           std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is) + 1;
      for (int j = 1; j + 1 < n; ++j)
        for (int k = 1; k + 1 < n; ++k) {
          double s = 0.0;
          for (int c = 0; c < 3; ++c) {
            const double d1 = (U.at(i + 1, j, k, c) - U.at(i - 1, j, k, c)) * i2h;
            const double d2 = (U.at(i, j + 1, k, c) - U.at(i, j - 1, k, c)) * i2h;
            const double d3 = (U.at(i, j, k + 1, c) - U.at(i, j, k - 1, c)) * i2h;
            s += d1 * d1 + d2 * d2 + d3 * d3;
          }
          out.at(i, j, k) = s;
        }
    }
  });
  return out;
}

std::array<double, 3> trilinear(const VectorField3& U, double x, double y,
                                double z) {
  const Grid3& g = U.grid;
  const double h = g.h();
  if (std::abs(x) > g.L || std::abs(y) > g.L || std::abs(z) > g.L)
    return {0.0, 0.0, 0.0};
  auto locate = [&](double t) {
    double s = (t + g.L) / h;
    int c = static_cast<int>(std::floor(s));
    c = std::min(std::max(c, 0), g.n - 2);
    return std::pair<int, double>{c, s - c};
  };
  const auto [i0, tx] = locate(x);
  const auto [j0, ty] = locate(y);
  const auto [k0, tz] = locate(z);
  std::array<double, 3> out{0.0, 0.0, 0.0};
  for (int c = 0; c < 3; ++c) {
    const double c00 = U.at(i0, j0, k0, c) * (1 - tx) + U.at(i0 + 1, j0, k0, c) * tx;
    const double c10 = U.at(i0, j0 + 1, k0, c) * (1 - tx) + U.at(i0 + 1, j0 + 1, k0, c) * tx;
    const double c01 = U.at(i0, j0, k0 + 1, c) * (1 - tx) + U.at(i0 + 1, j0, k0 + 1, c) * tx;
    const double c11 = U.at(i0, j0 + 1, k0 + 1, c) * (1 - tx) + U.at(i0 + 1, j0 + 1, k0 + 1, c) * tx;
    const double c0 = c00 * (1 - ty) + c10 * ty;
    const double c1 = c01 * (1 - ty) + c11 * ty;
    out[c] = c0 * (1 - tz) + c1 * tz;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rotation structure
// ---------------------------------------------------------------------------

Decomposition decompose(const VectorField3& U) {
  const Grid3& g = U.grid;
  Decomposition d{VectorField3(g), VectorField3(g), VectorField3(g)};
  parallel_for_ranges(static_cast<std::size_t>(g.n), [&](std::size_t ib,
                                                         std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      const double x1 = g.coord(i);
      for (int j = 0; j < g.n; ++j) {
        const double x2 = g.coord(j);
        const double rho2 = x1 * x1 + x2 * x2;
        for (int k = 0; k < g.n; ++k) {
          const auto v = U.vec(i, j, k);
          if (rho2 > 0.0) {
            const double pr = (v[0] * x1 + v[1] * x2) / rho2;
            const double pt = (-v[0] * x2 + v[1] * x1) / rho2;
            d.rho.at(i, j, k, 0) = pr * x1;
            d.rho.at(i, j, k, 1) = pr * x2;
            d.tau.at(i, j, k, 0) = -pt * x2;
            d.tau.at(i, j, k, 1) = pt * x1;
          }
          d.zeta.at(i, j, k, 2) = v[2];
        }
      }
    }
  });
  return d;
}

VectorField3 haar_average(const VectorField3& V, int m) {
  if (m < 4) throw std::invalid_argument("haar_average: need m >= 4 angles");
  const Grid3& g = V.grid;
  std::vector<double> cs(m), sn(m);
  for (int k = 0; k < m; ++k) {
    const double alpha = 2.0 * kPi * k / m;
    cs[k] = std::cos(alpha);
    sn[k] = std::sin(alpha);
  }
  VectorField3 out(g);
  parallel_for_ranges(static_cast<std::size_t>(g.n), [&](std::size_t ib,
                                                         std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      const double x1 = g.coord(i);
      for (int j = 0; j < g.n; ++j) {
        const double x2 = g.coord(j);
        for (int k3 = 0; k3 < g.n; ++k3) {
          const double x3 = g.coord(k3);
          double a0 = 0.0, a1 = 0.0, a2 = 0.0;
          for (int k = 0; k < m; ++k) {
            const double rx = cs[k] * x1 - sn[k] * x2;
            const double ry = sn[k] * x1 + cs[k] * x2;
            const auto v = trilinear(V, rx, ry, x3);
            // g^T v: inverse rotation of the sampled vector
            a0 += cs[k] * v[0] + sn[k] * v[1];
            a1 += -sn[k] * v[0] + cs[k] * v[1];
            a2 += v[2];
          }
          out.at(i, j, k3, 0) = a0 / m;
          out.at(i, j, k3, 1) = a1 / m;
          out.at(i, j, k3, 2) = a2 / m;
        }
      }
    }
  });
  force_boundary_shell(out);
  return out;
}

double equivariance_defect(const VectorField3& U, int m) {
  if (m < 1) throw std::invalid_argument("equivariance_defect: need m >= 1");
  const Grid3& g = U.grid;
  const double safe = g.L - g.h();
  std::vector<double> row_max(static_cast<std::size_t>(g.n), 0.0);
  parallel_for_ranges(static_cast<std::size_t>(g.n), [&](std::size_t ib,
                                                         std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      const double x1 = g.coord(i);
      double mx = 0.0;
      for (int j = 0; j < g.n; ++j) {
        const double x2 = g.coord(j);
        if (std::sqrt(x1 * x1 + x2 * x2) > safe) continue;
        for (int k3 = 1; k3 + 1 < g.n; ++k3) {
          const double x3 = g.coord(k3);
          const auto u = U.vec(i, j, k3);
          for (int k = 1; k < m; ++k) {
            const double alpha = 2.0 * kPi * k / m;
            const double c = std::cos(alpha), s = std::sin(alpha);
            const auto v = trilinear(U, c * x1 - s * x2, s * x1 + c * x2, x3);
            // g u(x) - u(g x), componentwise
            mx = std::max(mx, std::abs(c * u[0] - s * u[1] - v[0]));
            mx = std::max(mx, std::abs(s * u[0] + c * u[1] - v[1]));
            mx = std::max(mx, std::abs(u[2] - v[2]));
          }
        }
      }
      row_max[i] = std::max(row_max[i], mx);
    }
  });
  double mx = 0.0;
  for (double x : row_max) mx = std::max(mx, x);
  return mx;
}

}  // namespace cylvar
