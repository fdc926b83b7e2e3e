#include <cmath>
#include <stdexcept>

#include "doctest.h"

#include "cylvar/grid.hpp"

using namespace cylvar;

TEST_SUITE("grid") {

TEST_CASE("half-plane grid geometry") {
  Grid2 g(16, 33, 12.0, 12.0);
  CHECK(g.dr() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(g.dz() == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(g.r(0) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(g.r(15) == doctest::Approx(12.0 - 0.375).epsilon(1e-15));
  CHECK(g.z(0) == -12.0);
  CHECK(g.z(32) == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(g.z(16) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK(g.size() == 16 * 33);
  CHECK(g.idx(2, 5) == 2 * 33 + 5);
}

TEST_CASE("interior weights carry the cylindrical measure, edges half") {
  Grid2 g(8, 9, 4.0, 2.0);
  const double dr = g.dr(), dz = g.dz();
  CHECK(g.weight(3, 4) ==
        doctest::Approx(2.0 * kPi * g.r(3) * dr * dz).epsilon(1e-14));
  CHECK(g.weight(3, 0) ==
        doctest::Approx(kPi * g.r(3) * dr * dz).epsilon(1e-14));
  CHECK(g.weight(3, 8) ==
        doctest::Approx(kPi * g.r(3) * dr * dz).epsilon(1e-14));
}

TEST_CASE("constant integrates to the exact cylinder volume") {
  Grid2 g(24, 49, 7.0, 3.0);
  ScalarField one(g);
  for (auto& x : one.v) x = 1.0;
  // midpoint rule in r integrates linear integrands exactly; trapezoid in z
  // integrates constants exactly
  CHECK(integrate2(one) ==
        doctest::Approx(kPi * 7.0 * 7.0 * 6.0).epsilon(1e-13));
}

TEST_CASE("Gaussian mass against the closed form") {
  // the cell-centered rule in r carries an O(h^2) axis term when the
  // integrand has nonzero slope there (Euler-Maclaurin h^2/24 * f'(0)),
  // so check the closed form at second order and the decay rate
  auto mass = [](int nr, int nz) {
    Grid2 g(nr, nz, 12.0, 12.0);
    const ScalarField f = sample_scalar(g, [](double r, double z) {
      return std::exp(-2.0 * (r * r + z * z));
    });
    return integrate2(f);
  };
  // int 2 pi r e^{-2r^2-2z^2} = (pi/2) sqrt(pi/2)
  const double oracle = 0.5 * kPi * std::sqrt(0.5 * kPi);
  const double e_coarse = std::abs(mass(64, 129) - oracle);
  const double e_fine = std::abs(mass(128, 257) - oracle);
  CHECK(e_coarse / oracle < 1e-2);
  CHECK(e_coarse / e_fine > 3.5);  // second-order decay gives ~4
}

TEST_CASE("cube integration: Gaussian against pi^(3/2)") {
  Grid3 g(65, 12.0);
  const Scalar3 f = sample_scalar3(g, [](double x, double y, double z) {
    return std::exp(-(x * x + y * y + z * z));
  });
  CHECK(integrate3(f) ==
        doctest::Approx(std::pow(kPi, 1.5)).epsilon(1e-12));
}

TEST_CASE("sampling forces the boundary and rejects non-finite values") {
  Grid2 g(8, 9, 4.0, 2.0);
  const ScalarField f =
      sample_scalar(g, [](double, double) { return 1.0; });
  CHECK(f.at(0, 0) == 0.0);
  CHECK(f.at(7, 4) == 0.0);
  CHECK(f.at(3, 8) == 0.0);
  CHECK(f.at(3, 4) == 1.0);

  CHECK_THROWS_AS(sample_scalar(g,
                                [](double r, double) {
                                  return r < 1.0 ? 1.0 / 0.0 : 0.0;
                                }),
                  std::domain_error);

  Grid3 g3(9, 2.0);
  const VectorField3 U = sample_vector(
      g3, [](double, double, double) { return std::array<double, 3>{1, 2, 3}; });
  CHECK(U.at(0, 4, 4, 0) == 0.0);
  CHECK(U.at(4, 4, 8, 2) == 0.0);
  CHECK(U.at(4, 4, 4, 1) == 2.0);

  const VectorField3 V = sample_vector(
      g3, [](double, double, double) { return std::array<double, 3>{1, 2, 3}; },
      false);
  CHECK(V.at(0, 4, 4, 0) == 1.0);
}

TEST_CASE("refinement halves spacings and nests node-centered axes") {
  Grid2 g(16, 33, 12.0, 7.0);
  Grid2 f = refine(g);
  CHECK(f.nr == 32);
  CHECK(f.nz == 65);
  CHECK(f.rmax == g.rmax);
  CHECK(f.dz() == g.dz() / 2.0);
  for (int j = 0; j < g.nz; ++j) CHECK(f.z(2 * j) == g.z(j));

  Grid3 c(9, 5.0);
  Grid3 cf = refine(c);
  CHECK(cf.n == 17);
  CHECK(cf.h() == c.h() / 2.0);
  for (int k = 0; k < c.n; ++k) CHECK(cf.coord(2 * k) == c.coord(k));
}

TEST_CASE("grid constructors reject degenerate shapes") {
  CHECK_THROWS(Grid2(0, 9, 1.0, 1.0));
  CHECK_THROWS(Grid2(8, 1, 1.0, 1.0));
  CHECK_THROWS(Grid2(8, 9, -1.0, 1.0));
  CHECK_THROWS(Grid3(1, 1.0));
  CHECK_THROWS(Grid3(9, 0.0));
}

}  // TEST_SUITE
