#include "cylvar/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "cylvar/parallel.hpp"

namespace cylvar {

namespace {

// Nodal F(z, u) ready for integrate2.
ScalarField f_big_field(const ScalarField& u, const Nonlinearity& nl,
                        double scale = 1.0) {
  const Grid2& g = u.grid;
  ScalarField out(g);
  parallel_for_ranges(static_cast<std::size_t>(g.nr),
                      [&](std::size_t ib, std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      for (int j = 0; j < g.nz; ++j)
        out.at(i, j) = eval_F(nl, g.z(j), scale * u.at(i, j));
    }
  });
  return out;
}

std::vector<double>& dot_scratch(std::size_t n) {
  thread_local std::vector<double> buf;
  buf.resize(n);
  return buf;
}

}  // namespace

EnergyBreakdown energy_scalar(const ScalarField& u, double a,
                              const Nonlinearity& nl) {
  EnergyBreakdown e;
  e.quadratic = 0.5 * x_norm_sq(u, a);
  e.nonlinear = integrate2(f_big_field(u, nl));
  e.total = e.quadratic - e.nonlinear;
  return e;
}

EnergyBreakdown energy_vector(const VectorField3& U, const Nonlinearity& nl) {
  const Grid3& g = U.grid;
  const VectorField3 C = curl3(U);
  Scalar3 csq(g), big(g);
  parallel_for_ranges(static_cast<std::size_t>(g.n),
                      [&](std::size_t ib, std::size_t ie) {
    for (std::size_t is = ib; is < ie; ++is) {
      const int i = static_cast<int>(is);
      for (int j = 0; j < g.n; ++j)
        for (int k = 0; k < g.n; ++k) {
          const auto c = C.vec(i, j, k);
          csq.at(i, j, k) = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
          const auto v = U.vec(i, j, k);
          const double mag =
              std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
          big.at(i, j, k) = eval_F(nl, g.coord(k), mag);
        }
    }
  });
  EnergyBreakdown e;
  e.quadratic = 0.5 * integrate3(csq);
  e.nonlinear = integrate3(big);
  e.total = e.quadratic - e.nonlinear;
  return e;
}

double dot_w(const ScalarField& x, const ScalarField& y) {
  if (x.grid != y.grid) throw std::invalid_argument("dot_w: mismatched grids");
  const Grid2& g = x.grid;
  auto& terms = dot_scratch(g.size());
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j)
      terms[g.idx(i, j)] = g.weight(i, j) * (x.at(i, j) * y.at(i, j));
  return pairwise_sum(terms);
}

ScalarField solve_A(const ScalarField& rhs, double a, double cg_tol,
                    const ScalarField* warm_start, int* iterations) {
  const Grid2& g = rhs.grid;
  const double nb = std::sqrt(std::max(0.0, dot_w(rhs, rhs)));
  ScalarField psi(g);
  if (iterations) *iterations = 0;
  if (nb == 0.0) return psi;

  if (warm_start) {
    if (warm_start->grid != g)
      throw std::invalid_argument("solve_A: warm start on a different grid");
    psi = *warm_start;
    force_boundary_ring(psi);
  }

  ScalarField r(g);
  {
    const ScalarField Ap = apply_A(psi, a);
    for (std::size_t k = 0; k < psi.v.size(); ++k) r.v[k] = rhs.v[k] - Ap.v[k];
    force_boundary_ring(r);
  }
  ScalarField p = r;
  double rho = dot_w(r, r);

  const int cap = 40 * std::max(g.nr, g.nz) + 2000;
  for (int it = 1; it <= cap; ++it) {
    const ScalarField Ap = apply_A(p, a);
    const double pAp = dot_w(p, Ap);
    if (!(pAp > 0.0))
      throw std::runtime_error(
          "solve_A: conjugate gradients lost positivity (pAp = " +
          std::to_string(pAp) + ")");
    const double alpha = rho / pAp;
    for (std::size_t k = 0; k < psi.v.size(); ++k) {
      psi.v[k] += alpha * p.v[k];
      r.v[k] -= alpha * Ap.v[k];
    }
    if (it % 50 == 0) {
      // periodic exact residual refresh against accumulated drift
      const ScalarField Apsi = apply_A(psi, a);
      for (std::size_t k = 0; k < r.v.size(); ++k)
        r.v[k] = rhs.v[k] - Apsi.v[k];
      force_boundary_ring(r);
    }
    const double rho_next = dot_w(r, r);
    if (iterations) *iterations = it;
    if (std::sqrt(std::max(0.0, rho_next)) <= cg_tol * nb) {
      force_boundary_ring(psi);
      return psi;
    }
    const double beta = rho_next / rho;
    for (std::size_t k = 0; k < p.v.size(); ++k)
      p.v[k] = r.v[k] + beta * p.v[k];
    rho = rho_next;
  }
  throw std::runtime_error(
      "solve_A: conjugate gradients did not reach relative tolerance " +
      std::to_string(cg_tol) + " within " + std::to_string(cap) +
      " iterations");
}

GradientResult gradient_scalar(const ScalarField& u, double a,
                               const Nonlinearity& nl, double cg_tol,
                               const ScalarField* warm_start) {
  const Grid2& g = u.grid;
  GradientResult res{ScalarField(g), ScalarField(g), 0.0, 0};
  const ScalarField Au = apply_A(u, a);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j)
      res.raw.at(i, j) = Au.at(i, j) - eval_f(nl, g.z(j), u.at(i, j));
  force_boundary_ring(res.raw);
  res.riesz = solve_A(res.raw, a, cg_tol, warm_start, &res.cg_iterations);
  res.dual_norm = std::sqrt(std::max(0.0, dot_w(res.raw, res.riesz)));
  return res;
}

double fiber_derivative(const ScalarField& u, double a, const Nonlinearity& nl,
                        double t) {
  const double xn = x_norm_sq(u, a);
  const Grid2& g = u.grid;
  ScalarField integrand(g);
  for (int i = 0; i < g.nr; ++i)
    for (int j = 0; j < g.nz; ++j) {
      const double tu = t * u.at(i, j);
      integrand.at(i, j) = eval_f(nl, g.z(j), tu) * tu;
    }
  return t * t * xn - integrate2(integrand);
}

FiberProfile fiber_profile(const ScalarField& u, double a,
                           const Nonlinearity& nl, double t_max, int samples) {
  if (samples < 8) throw std::invalid_argument("fiber_profile: samples < 8");
  if (!(t_max > 0.0)) throw std::invalid_argument("fiber_profile: t_max <= 0");
  const Grid2& g = u.grid;
  const double xn = x_norm_sq(u, a);
  if (!(xn > 0.0))
    throw std::invalid_argument("fiber_profile: field has zero energy norm");

  const auto gfun = [&](double t) {
    ScalarField integrand(g);
    for (int i = 0; i < g.nr; ++i)
      for (int j = 0; j < g.nz; ++j) {
        const double tu = t * u.at(i, j);
        integrand.at(i, j) = eval_f(nl, g.z(j), tu) * tu;
      }
    return t * t * xn - integrate2(integrand);
  };

  double t_lo = std::min(1e-4, t_max * 1e-6);
  std::vector<double> ts, gs;
  int sign_changes = 0;
  const auto scan = [&]() {
    ts.assign(samples, 0.0);
    gs.assign(samples, 0.0);
    const double ratio = std::log(t_max / t_lo);
    for (int k = 0; k < samples; ++k) {
      ts[k] = t_lo * std::exp(ratio * k / (samples - 1));
      gs[k] = gfun(ts[k]);
    }
    sign_changes = 0;
    for (int k = 0; k + 1 < samples; ++k)
      if ((gs[k] > 0.0 && gs[k + 1] < 0.0) || (gs[k] < 0.0 && gs[k + 1] > 0.0))
        ++sign_changes;
  };

  scan();
  // g(t) ~ t^2 ||u||^2 > 0 near t = 0 whenever the growth is superquadratic;
  // if the first sample already sits past the root, look closer to zero.
  while (sign_changes == 0 && gs.front() < 0.0 && t_lo > 1e-12) {
    t_lo *= 1e-2;
    scan();
  }
  if (sign_changes > 1)
    throw std::runtime_error(
        "fiber_profile: d/dt J(t u) changes sign " +
        std::to_string(sign_changes) +
        " times; f(z,u)/|u| is not monotone and the fiber projection is "
        "ill-defined");

  FiberProfile prof;
  if (sign_changes == 0 && gs.front() < 0.0)
    throw std::runtime_error(
        "fiber_profile: d/dt J(t u) is already negative at t = " +
        std::to_string(ts.front()) +
        "; no positive section near zero (degenerate input)");

  if (sign_changes == 1) {
    double lo = ts.front(), hi = ts.back();
    for (int k = 0; k + 1 < samples; ++k)
      if ((gs[k] > 0.0 && gs[k + 1] < 0.0) ||
          (gs[k] < 0.0 && gs[k + 1] > 0.0)) {
        lo = ts[k];
        hi = ts[k + 1];
        break;
      }
    double glo = gfun(lo);
    for (int it = 0; it < 200 && (hi - lo) > 1e-10 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double gm = gfun(mid);
      if (gm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((glo > 0.0) == (gm > 0.0)) {
        lo = mid;
        glo = gm;
      } else {
        hi = mid;
      }
    }
    prof.root = 0.5 * (lo + hi);
    prof.g_at_root = gfun(*prof.root);
  }
  // sign_changes == 0 with g > 0 throughout: no fiber maximum below t_max,
  // reported by leaving root empty

  prof.ts = std::move(ts);
  prof.js.resize(samples);
  for (int k = 0; k < samples; ++k) {
    const double t = prof.ts[k];
    prof.js[k] = 0.5 * t * t * xn - integrate2(f_big_field(u, nl, t));
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Mountain-pass scaffolding
// ---------------------------------------------------------------------------

double ring_profile(double t, double u0, double R) {
  if (t <= 1.0 || t >= R + 1.0) return 0.0;
  if (t < 2.0) return u0 * (t - 1.0);
  if (t <= R) return u0;
  return u0 * (R + 1.0 - t);
}

RingFunction mountain_pass_ring(const Grid2& g, const Nonlinearity& nl,
                                double u0, double R) {
  if (!(R >= 3.0))
    throw std::invalid_argument("mountain_pass_ring: need R >= 3");
  if (R + 1.0 > g.rmax || R + 1.0 > g.zmax)
    throw std::invalid_argument(
        "mountain_pass_ring: ring of outer radius R + 1 = " +
        std::to_string(R + 1.0) + " does not fit the grid");
  if (!(u0 > 0.0))
    throw std::invalid_argument("mountain_pass_ring: need u0 > 0");

  RingFunction ring{ScalarField(g), R, 0.0, 0.0};
  for (int i = 0; i < g.nr; ++i) {
    const double pr = ring_profile(g.r(i), u0, R);
    for (int j = 0; j < g.nz; ++j)
      ring.w.at(i, j) = pr * ring_profile(std::abs(g.z(j)), u0, R);
  }
  force_boundary_ring(ring.w);
  ring.f_mass = integrate2(f_big_field(ring.w, nl));
  ring.z_gradient = 0.5 * energy_form_z(ring.w, ring.w);
  return ring;
}

std::optional<RingFunction> find_ring_radius(const Grid2& g,
                                             const Nonlinearity& nl,
                                             double u0) {
  const int r_max = static_cast<int>(std::floor(std::min(g.rmax, g.zmax))) - 1;
  for (int R = 3; R <= r_max; ++R) {
    RingFunction ring = mountain_pass_ring(g, nl, u0, static_cast<double>(R));
    if (ring.f_mass > ring.z_gradient) return ring;
  }
  return std::nullopt;
}

ScalingPath scaling_path(const ScalarField& w, double a, const Nonlinearity& nl,
                         const std::vector<double>& lambdas) {
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0))
      throw std::invalid_argument("scaling_path: lambda must be positive");
    if (k > 0 && !(lambdas[k] < lambdas[k - 1]))
      throw std::invalid_argument(
          "scaling_path: lambdas must be strictly decreasing");
  }
  ScalingPath path;
  path.A = energy_form_r(w, w) + energy_form_mass(w, w, a);
  path.B = 0.5 * energy_form_z(w, w) - integrate2(f_big_field(w, nl));
  path.lambdas = lambdas;
  path.values.reserve(lambdas.size());
  for (double lam : lambdas)
    path.values.push_back(0.5 * path.A + path.B / (lam * lam));
  path.negative_threshold =
      path.B < 0.0 ? std::sqrt(-path.B / (0.5 * path.A + 1.0)) : 0.0;
  return path;
}

}  // namespace cylvar
