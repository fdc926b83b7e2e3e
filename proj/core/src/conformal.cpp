#include "cylvar/conformal.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "cylvar/operators.hpp"
#include "cylvar/parallel.hpp"
#include "cylvar/rng.hpp"

namespace cylvar {

std::array<double, 3> stereo(const std::array<double, 4>& xi) {
  const double denom = 1.0 - xi[3];
  if (std::abs(denom) < 1e-12)
    throw std::domain_error(
        "stereo: point within 1e-12 of the north pole has no image");
  return {xi[0] / denom, xi[1] / denom, xi[2] / denom};
}

std::array<double, 4> stereo_inv(const std::array<double, 3>& x) {
  const double n2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  const double denom = n2 + 1.0;
  return {2.0 * x[0] / denom, 2.0 * x[1] / denom, 2.0 * x[2] / denom,
          (n2 - 1.0) / denom};
}

double conformal_factor(double x, double y, double z) {
  return std::sqrt(2.0 / (1.0 + x * x + y * y + z * z));
}

namespace {

struct Transport {
  double c1, s1, c2, s2;

  explicit Transport(const GroupElement& g)
      : c1(std::cos(g.alpha1)),
        s1(std::sin(g.alpha1)),
        c2(std::cos(g.alpha2)),
        s2(std::sin(g.alpha2)) {}

  // One node of (T_g U)(x); zero when the motion leaves the chart or the box.
  std::array<double, 3> at(const VectorField3& U, double x0, double x1,
                           double x2) const {
    const std::array<double, 4> xi = stereo_inv({x0, x1, x2});
    const std::array<double, 4> rot = {c1 * xi[0] - s1 * xi[1],
                                       s1 * xi[0] + c1 * xi[1],
                                       c2 * xi[2] - s2 * xi[3],
                                       s2 * xi[2] + c2 * xi[3]};
    const double denom = 1.0 - rot[3];
    if (denom < 1e-14) return {0.0, 0.0, 0.0};  // carried into the pole
    const std::array<double, 3> y = {rot[0] / denom, rot[1] / denom,
                                     rot[2] / denom};
    const std::array<double, 3> Uy = trilinear(U, y[0], y[1], y[2]);
    if (Uy[0] == 0.0 && Uy[1] == 0.0 && Uy[2] == 0.0) return {0.0, 0.0, 0.0};
    const double ratio = conformal_factor(x0, x1, x2) /
                         conformal_factor(y[0], y[1], y[2]);
    // apply R1^T (rotation about e3 by -alpha1) to the sampled vector
    return {ratio * (c1 * Uy[0] + s1 * Uy[1]),
            ratio * (-s1 * Uy[0] + c1 * Uy[1]), ratio * Uy[2]};
  }
};

}  // namespace

VectorField3 group_act(const VectorField3& U, const GroupElement& g) {
  if (g.alpha1 == 0.0 && g.alpha2 == 0.0) return U;  // identity, exactly
  const Grid3& grid = U.grid;
  VectorField3 out(grid);
  const Transport t(g);
  parallel_for_ranges(static_cast<std::size_t>(grid.n),
                      [&](std::size_t ib, std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      const double x0 = grid.coord(i);
      for (int j = 0; j < grid.n; ++j) {
        const double x1 = grid.coord(j);
        for (int k = 0; k < grid.n; ++k) {
          const auto v = t.at(U, x0, x1, grid.coord(k));
          out.at(i, j, k, 0) = v[0];
          out.at(i, j, k, 1) = v[1];
          out.at(i, j, k, 2) = v[2];
        }
      }
    }
  });
  force_boundary_shell(out);
  return out;
}

double symmetry_defect(const VectorField3& U,
                       const std::vector<GroupElement>& gs) {
  if (gs.empty())
    throw std::invalid_argument("symmetry_defect: no group elements sampled");
  const Grid3& grid = U.grid;
  const double rmax2 = 0.5625 * grid.L * grid.L;  // (0.75 L)^2
  double worst = 0.0;
  for (const GroupElement& g : gs) {
    const VectorField3 T = group_act(U, g);
    Scalar3 integrand(grid);
    parallel_for_ranges(static_cast<std::size_t>(grid.n),
                        [&](std::size_t ib, std::size_t ie) {
      for (std::size_t is = ib; is < ie; ++is) {
        const int i = static_cast<int>(is);
        const double x0 = grid.coord(i);
        for (int j = 0; j < grid.n; ++j) {
          const double x1 = grid.coord(j);
          for (int k = 0; k < grid.n; ++k) {
            const double x2 = grid.coord(k);
            if (x0 * x0 + x1 * x1 + x2 * x2 > rmax2) continue;
            const double d0 = T.at(i, j, k, 0) - U.at(i, j, k, 0);
            const double d1 = T.at(i, j, k, 1) - U.at(i, j, k, 1);
            const double d2 = T.at(i, j, k, 2) - U.at(i, j, k, 2);
            const double m2 = d0 * d0 + d1 * d1 + d2 * d2;
            integrand.at(i, j, k) = m2 * m2 * m2;
          }
        }
      }
    });
    worst = std::max(worst, std::pow(integrate3(integrand), 1.0 / 6.0));
  }
  return worst;
}

VectorField3 symmetrize(const VectorField3& U, int m1, int m2) {
  if (m1 < 4 || m2 < 4)
    throw std::invalid_argument("symmetrize: need m1, m2 >= 4 angles");
  const Grid3& grid = U.grid;
  VectorField3 acc(grid);
  for (int j = 0; j < m1; ++j)
    for (int k = 0; k < m2; ++k) {
      const GroupElement g{2.0 * kPi * j / m1, 2.0 * kPi * k / m2};
      const Transport t(g);
      parallel_for_ranges(static_cast<std::size_t>(grid.n),
                          [&](std::size_t ib, std::size_t ie) {
        for (std::size_t is = ib; is < ie; ++is) {
          const int i = static_cast<int>(is);
          const double x0 = grid.coord(i);
          for (int jj = 0; jj < grid.n; ++jj) {
            const double x1 = grid.coord(jj);
            for (int kk = 0; kk < grid.n; ++kk) {
              const auto v = t.at(U, x0, x1, grid.coord(kk));
              acc.at(i, jj, kk, 0) += v[0];
              acc.at(i, jj, kk, 1) += v[1];
              acc.at(i, jj, kk, 2) += v[2];
            }
          }
        }
      });
    }
  const double scale = 1.0 / (static_cast<double>(m1) * m2);
  for (double& x : acc.v) x *= scale;
  force_boundary_shell(acc);
  return acc;
}

std::vector<GroupElement> sample_group_elements(int m1, int m2) {
  if (m1 < 1 || m2 < 1)
    throw std::invalid_argument("sample_group_elements: need m1, m2 >= 1");
  std::vector<GroupElement> gs;
  gs.reserve(static_cast<std::size_t>(m1) * m2 - 1);
  for (int j = 0; j < m1; ++j)
    for (int k = 0; k < m2; ++k) {
      if (j == 0 && k == 0) continue;  // identity teaches nothing
      gs.push_back({2.0 * kPi * j / m1, 2.0 * kPi * k / m2});
    }
  return gs;
}

IsometryCheck l6_isometry_check(const VectorField3& U, int n_samples,
                                std::uint64_t seed) {
  if (n_samples < 2)
    throw std::invalid_argument("l6_isometry_check: need at least 2 samples");
  const Grid3& grid = U.grid;

  Scalar3 p6(grid);
  parallel_for_ranges(static_cast<std::size_t>(grid.n),
                      [&](std::size_t ib, std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      for (int j = 0; j < grid.n; ++j)
        for (int k = 0; k < grid.n; ++k) {
          const auto v = U.vec(i, j, k);
          const double m2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
          p6.at(i, j, k) = m2 * m2 * m2;
        }
    }
  });

  const CounterRng rng(seed);
  std::vector<double> w(static_cast<std::size_t>(n_samples), 0.0);
  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t s) {
    // uniform point on S^3 from four normals
    double xi[4];
    double n2 = 0.0;
    for (int c = 0; c < 4; ++c) {
      xi[c] = rng.normal(4 * s + c);
      n2 += xi[c] * xi[c];
    }
    if (n2 == 0.0) return;  // measure-zero guard
    const double inv = 1.0 / std::sqrt(n2);
    for (double& c : xi) c *= inv;
    const double denom = 1.0 - xi[3];
    if (denom < 1e-300) return;  // at the pole V has a zero-extension limit
    const double y0 = xi[0] / denom, y1 = xi[1] / denom, y2 = xi[2] / denom;
    const auto Uy = trilinear(U, y0, y1, y2);
    const double m2 = Uy[0] * Uy[0] + Uy[1] * Uy[1] + Uy[2] * Uy[2];
    if (m2 == 0.0) return;
    const double phi = conformal_factor(y0, y1, y2);
    const double v2 = m2 / (phi * phi);
    w[s] = v2 * v2 * v2;
  });

  const double vol_s3 = 2.0 * kPi * kPi;
  const double mean = pairwise_sum(w) / n_samples;
  std::vector<double> sq(w.size());
  for (std::size_t s = 0; s < w.size(); ++s) {
    const double d = w[s] - mean;
    sq[s] = d * d;
  }
  const double var = pairwise_sum(sq) / (n_samples - 1.0);

  IsometryCheck out;
  out.l6_grid = integrate3(p6);
  out.l6_sphere = vol_s3 * mean;
  out.std_error = vol_s3 * std::sqrt(var / n_samples);
  out.samples = n_samples;
  return out;
}

VolumeCheck phi6_volume_mc(int n_samples, std::uint64_t seed) {
  if (n_samples < 2)
    throw std::invalid_argument("phi6_volume_mc: need at least 2 samples");
  const CounterRng rng(seed);
  std::vector<double> w(static_cast<std::size_t>(n_samples), 0.0);
  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t s) {
    // radial importance sampling: s ~ half-Cauchy, density (2/pi)/(1+s^2);
    // the weight 16 pi^2 s^2/(1+s^2)^2 is bounded by 4 pi^2 (no tail blowup)
    const double u = rng.uniform(s);
    const double r = std::tan(0.5 * kPi * u);
    const double q = r * r / ((1.0 + r * r) * (1.0 + r * r));
    w[s] = 16.0 * kPi * kPi * q;
  });
  const double mean = pairwise_sum(w) / n_samples;
  std::vector<double> sq(w.size());
  for (std::size_t s = 0; s < w.size(); ++s) {
    const double d = w[s] - mean;
    sq[s] = d * d;
  }
  const double var = pairwise_sum(sq) / (n_samples - 1.0);

  VolumeCheck out;
  out.value = mean;
  out.std_error = std::sqrt(var / n_samples);
  out.expected = 2.0 * kPi * kPi;
  out.samples = n_samples;
  return out;
}

VectorField3 reference_symmetric_field(const Grid3& g) {
  return sample_vector(g, [](double x, double y, double z) {
    const double phi = conformal_factor(x, y, z);
    const double p3 = phi * phi * phi;
    return std::array<double, 3>{-p3 * y, p3 * x, 0.0};
  });
}

}  // namespace cylvar
