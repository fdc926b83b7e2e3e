#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"

#include "cylvar/functionals.hpp"
#include "cylvar/grid.hpp"
#include "cylvar/nonlinearity.hpp"
#include "cylvar/operators.hpp"
#include "helpers.hpp"

using namespace cylvar;

namespace {

ScalarField gauss_profile(const Grid2& g) {
  return sample_scalar(
      g, [](double r, double z) { return r * std::exp(-r * r - z * z); });
}

}  // namespace

TEST_SUITE("functionals") {

TEST_CASE("energy with no source term is half the squared norm") {
  const Grid2 g(32, 65, 8.0, 8.0);
  const ScalarField u = gauss_profile(g);
  const double a = 1.3;
  const EnergyBreakdown e = energy_scalar(u, a, Nonlinearity::zero());
  CHECK(e.quadratic == doctest::Approx(0.5 * x_norm_sq(u, a)).epsilon(1e-15));
  CHECK(e.nonlinear == 0.0);
  CHECK(e.total == e.quadratic);
}

TEST_CASE("critical energy assembles the sixth-power mass") {
  const Grid2 g(32, 65, 8.0, 8.0);
  const ScalarField u = gauss_profile(g);
  ScalarField u6(g);
  for (std::size_t m = 0; m < u.v.size(); ++m)
    u6.v[m] = std::pow(u.v[m], 6) / 6.0;
  const EnergyBreakdown e = energy_scalar(u, 1.0, Nonlinearity::critical());
  CHECK(e.nonlinear == doctest::Approx(integrate2(u6)).epsilon(1e-14));
  CHECK(e.total ==
        doctest::Approx(0.5 * x_norm_sq(u, 1.0) - integrate2(u6)).epsilon(1e-13));
}

TEST_CASE("weighted pairing matches the quadrature of the product") {
  const Grid2 g(24, 49, 8.0, 8.0);
  const ScalarField x = testing::random_profile(g, 21);
  const ScalarField y = testing::random_profile(g, 22);
  ScalarField xy(g);
  for (std::size_t m = 0; m < x.v.size(); ++m) xy.v[m] = x.v[m] * y.v[m];
  CHECK(dot_w(x, y) == doctest::Approx(integrate2(xy)).epsilon(1e-14));
  CHECK(dot_w(x, y) == dot_w(y, x));
}

TEST_CASE("gradient of the quadratic functional is the state itself") {
  const Grid2 g(32, 65, 8.0, 8.0);
  const ScalarField u = gauss_profile(g);
  const double a = 1.0;
  const GradientResult gr = gradient_scalar(u, a, Nonlinearity::zero(), 1e-12);

  // A riesz = A u  =>  riesz = u, up to the CG tolerance
  double worst = 0.0, scale = 0.0;
  for (std::size_t m = 0; m < u.v.size(); ++m) {
    worst = std::max(worst, std::abs(gr.riesz.v[m] - u.v[m]));
    scale = std::max(scale, std::abs(u.v[m]));
  }
  CHECK(worst < 1e-7 * scale);
  CHECK(gr.dual_norm ==
        doctest::Approx(std::sqrt(x_norm_sq(u, a))).epsilon(1e-8));
  CHECK(gr.cg_iterations > 0);

  // raw is the nodal operator image: <raw, v>_w = <u, v>_X for any v
  const ScalarField v = testing::random_profile(g, 31);
  CHECK(dot_w(gr.raw, v) == doctest::Approx(x_inner(u, v, a)).epsilon(1e-11));
}

TEST_CASE("fiber scaling roots match the homogeneous closed forms") {
  const Grid2 g(32, 65, 8.0, 8.0);
  const Nonlinearity p4 = Nonlinearity::power(4.0, 0.3);
  const Nonlinearity cr = Nonlinearity::critical();
  for (unsigned long seed : {101, 102, 103, 104, 105}) {
    const ScalarField u = testing::random_profile(g, seed);
    const double xn = x_norm_sq(u, 1.0);

    ScalarField gu4(g), u6(g);
    for (int i = 0; i < g.nr; ++i)
      for (int j = 0; j < g.nz; ++j) {
        const double w = weight_gamma(p4, g.z(j));
        gu4.at(i, j) = w * std::pow(u.at(i, j), 4);
        u6.at(i, j) = std::pow(u.at(i, j), 6);
      }

    const FiberProfile f4 = fiber_profile(u, 1.0, p4);
    REQUIRE(f4.root.has_value());
    CHECK(*f4.root ==
          doctest::Approx(std::sqrt(xn / integrate2(gu4))).epsilon(1e-8));
    CHECK(std::abs(fiber_derivative(u, 1.0, p4, *f4.root)) < 1e-8 * xn);

    const FiberProfile f6 = fiber_profile(u, 1.0, cr);
    REQUIRE(f6.root.has_value());
    CHECK(*f6.root ==
          doctest::Approx(std::pow(xn / integrate2(u6), 0.25)).epsilon(1e-8));
  }
}

TEST_CASE("fiber scan with no source reports an absent maximum") {
  const Grid2 g(24, 49, 8.0, 8.0);
  const ScalarField u = gauss_profile(g);
  const FiberProfile f = fiber_profile(u, 1.0, Nonlinearity::zero());
  CHECK_FALSE(f.root.has_value());
  REQUIRE(f.ts.size() == f.js.size());
  REQUIRE(f.ts.size() > 8);
  for (std::size_t k = 1; k < f.js.size(); ++k) {
    CHECK(f.ts[k] > f.ts[k - 1]);
    CHECK(f.js[k] > f.js[k - 1]);  // J(t u) = t^2 ||u||^2 / 2 rises
  }
}

TEST_CASE("ring profile is the documented trapezoid") {
  CHECK(ring_profile(0.5, 2.0, 5.0) == 0.0);
  CHECK(ring_profile(1.0, 2.0, 5.0) == 0.0);
  CHECK(ring_profile(1.5, 2.0, 5.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ring_profile(2.0, 2.0, 5.0) == 2.0);
  CHECK(ring_profile(3.7, 2.0, 5.0) == 2.0);
  CHECK(ring_profile(5.0, 2.0, 5.0) == 2.0);
  CHECK(ring_profile(5.5, 2.0, 5.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ring_profile(6.0, 2.0, 5.0) == 0.0);
  CHECK(ring_profile(7.3, 2.0, 5.0) == 0.0);
}

TEST_CASE("mountain-pass ring reports its two energies faithfully") {
  const Grid2 g(64, 129, 12.0, 12.0);
  const Nonlinearity nl = Nonlinearity::power(3.0, 0.0);
  const RingFunction ring = mountain_pass_ring(g, nl, 1.0, 5.0);
  CHECK(ring.radius == 5.0);

  const ScalarField w_manual = sample_scalar(g, [](double r, double z) {
    return ring_profile(r, 1.0, 5.0) * ring_profile(std::abs(z), 1.0, 5.0);
  });
  for (std::size_t m = 0; m < w_manual.v.size(); ++m)
    CHECK(ring.w.v[m] == w_manual.v[m]);

  ScalarField F(g);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j)
      F.at(i, j) = eval_F(nl, g.z(j), ring.w.at(i, j));
  CHECK(ring.f_mass == doctest::Approx(integrate2(F)).epsilon(1e-13));
  CHECK(ring.z_gradient ==
        doctest::Approx(0.5 * energy_form_z(ring.w, ring.w)).epsilon(1e-13));

  CHECK_THROWS_AS(mountain_pass_ring(g, nl, 1.0, 11.5), std::invalid_argument);
  CHECK_THROWS_AS(mountain_pass_ring(g, nl, 1.0, 2.5), std::invalid_argument);
}

TEST_CASE("ring search finds a radius at unit height but not at 0.05") {
  const Grid2 g(64, 129, 12.0, 12.0);
  const Nonlinearity nl = Nonlinearity::power(3.0, 0.0);

  const auto found = find_ring_radius(g, nl, 1.0);
  REQUIRE(found.has_value());
  CHECK(found->radius >= 3.0);
  CHECK(found->f_mass > found->z_gradient);

  CHECK_FALSE(find_ring_radius(g, nl, 0.05).has_value());
}

TEST_CASE("radial dilation energy is closed-form in lambda") {
  const Grid2 g(64, 129, 12.0, 12.0);
  const Nonlinearity nl = Nonlinearity::power(3.0, 0.0);
  const ScalarField w = find_ring_radius(g, nl, 1.0)->w;
  const double a = 1.0;

  const std::vector<double> lambdas{1.0, 0.8, 0.5, 0.25, 0.1, 0.05};
  const ScalingPath path = scaling_path(w, a, nl, lambdas);

  CHECK(path.A ==
        doctest::Approx(energy_form_r(w, w) + energy_form_mass(w, w, a))
            .epsilon(1e-14));
  ScalarField F(g);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j)
      F.at(i, j) = eval_F(nl, g.z(j), w.at(i, j));
  CHECK(path.B == doctest::Approx(0.5 * energy_form_z(w, w) - integrate2(F))
                      .epsilon(1e-13));

  REQUIRE(path.values.size() == lambdas.size());
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    CHECK(path.values[k] ==
          0.5 * path.A + path.B / (lambdas[k] * lambdas[k]));

  // lambda = 1 is the undilated energy up to reassociation
  const double j_w = energy_scalar(w, a, nl).total;
  CHECK(path.values[0] == doctest::Approx(j_w).epsilon(1e-12));

  // the admissible ring has B < 0, so small dilations go negative
  CHECK(path.B < 0.0);
  CHECK(path.negative_threshold > 0.0);
  const ScalingPath below =
      scaling_path(w, a, nl, {0.9 * path.negative_threshold});
  CHECK(below.values[0] < 0.0);

  // with no source term the path only rises as lambda shrinks
  const ScalingPath rising =
      scaling_path(w, a, Nonlinearity::zero(), lambdas);
  CHECK(rising.B > 0.0);
  CHECK(rising.negative_threshold == 0.0);
  for (std::size_t k = 1; k < rising.values.size(); ++k)
    CHECK(rising.values[k] > rising.values[k - 1]);

  CHECK_THROWS_AS(scaling_path(w, a, nl, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(scaling_path(w, a, nl, {0.5, 0.8}), std::invalid_argument);
  CHECK_THROWS_AS(scaling_path(w, a, nl, {0.5, -0.1}), std::invalid_argument);
}

}  // TEST_SUITE
