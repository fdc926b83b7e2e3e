#include "cylvar/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "cylvar/rng.hpp"

namespace cylvar {

namespace {

struct Constraint {
  bool positivity = false;
  bool antisym = false;
};

void enforce(ScalarField& u, const Constraint& c) {
  const Grid2& g = u.grid;
  if (c.positivity)
    for (double& x : u.v) x = std::abs(x);
  if (c.antisym) {
    for (int i = 0; i < g.nr; ++i)
      for (int j = 0; 2 * j < g.nz - 1; ++j) {
        const int jm = g.nz - 1 - j;
        const double d = 0.5 * (u.at(i, j) - u.at(i, jm));
        u.at(i, j) = d;
        u.at(i, jm) = -d;
      }
    if (g.nz % 2 == 1)
      for (int i = 0; i < g.nr; ++i) u.at(i, (g.nz - 1) / 2) = 0.0;
  }
  force_boundary_ring(u);
}

// Gaussian bump in r with a small seeded vertical ripple; the odd variant
// carries a factor z so the nodal-line constraint starts nondegenerate.
ScalarField starting_profile(const Grid2& g, std::uint64_t seed, bool odd) {
  CounterRng rng(seed);
  double am[3];
  for (int m = 0; m < 3; ++m) am[m] = 2.0 * rng.uniform(m + 1) - 1.0;
  ScalarField u(g);
  for (int i = 0; i < g.nr; ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.nz; ++j) {
      const double z = g.z(j);
      double ripple = 1.0;
      for (int m = 1; m <= 3; ++m)
        ripple += 0.05 * am[m - 1] * std::cos(m * kPi * z / g.zmax);
      double val = r * std::exp(-r * r - z * z) * ripple;
      if (odd) val *= z;
      u.at(i, j) = val;
    }
  }
  force_boundary_ring(u);
  return u;
}

void validate_config(const SolverConfig& cfg, const char* who) {
  const std::string w(who);
  if (cfg.max_iter < 1) throw std::invalid_argument(w + ": max_iter < 1");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument(w + ": tol must be > 0");
  if (!(cfg.step0 > 0.0)) throw std::invalid_argument(w + ": step0 must be > 0");
  if (!(cfg.cg_tol > 0.0 && cfg.cg_tol < 1.0))
    throw std::invalid_argument(w + ": cg_tol must lie in (0, 1)");
  if (cfg.k_nodes != 0 && cfg.k_nodes != 1)
    throw std::invalid_argument(w + ": k_nodes must be 0 or 1");
  if (cfg.k_nodes == 1 && cfg.positivity)
    throw std::invalid_argument(
        w + ": a nodal line and a positivity clamp are mutually exclusive");
}

// Flip the overall sign so the largest-magnitude node is positive. For odd
// states only the upper half z > 0 votes, fixing which lobe is positive.
// One-sided nonlinearities are not even in u, so there the sign carries
// meaning and must be left alone (handled by the callers).
void normalize_sign(ScalarField& u, bool antisym) {
  const Grid2& g = u.grid;
  const int j_lo = antisym ? (g.nz / 2 + 1) : 0;
  double best = -1.0, val = 0.0;
  for (int i = 0; i < g.nr; ++i)
    for (int j = j_lo; j < g.nz; ++j) {
      const double x = u.at(i, j);
      if (std::abs(x) > best) {
        best = std::abs(x);
        val = x;
      }
    }
  if (val < 0.0)
    for (double& x : u.v) x = -x;
}

SolveResult nehari_descent(const Grid2& g, double a, const Nonlinearity& nl,
                           const SolverConfig& cfg, const Constraint& con) {
  SolveResult out;
  ScalarField u = starting_profile(g, cfg.seed, con.antisym);
  enforce(u, con);
  {
    const FiberProfile prof = fiber_profile(u, a, nl, 1e4, 12);
    if (!prof.root)
      throw std::runtime_error(
          "nehari descent: the starting profile has no fiber maximum "
          "(growth not superquadratic on this range)");
    for (double& x : u.v) x *= *prof.root;
  }
  double J = energy_scalar(u, a, nl).total;

  ScalarField warm(g);
  bool have_warm = false;
  double last_dual = std::numeric_limits<double>::infinity();

  for (int it = 1; it <= cfg.max_iter; ++it) {
    out.iterations = it;
    const GradientResult grad =
        gradient_scalar(u, a, nl, cfg.cg_tol, have_warm ? &warm : nullptr);
    warm = grad.riesz;
    have_warm = true;
    last_dual = grad.dual_norm;
    out.trace.push_back({J, grad.dual_norm});
    if (grad.dual_norm <= cfg.tol) {
      out.converged = true;
      break;
    }

    const double res2 = grad.dual_norm * grad.dual_norm;
    bool accepted = false;
    ScalarField best;
    double bestJ = J;
    double s = cfg.step0;
    for (int half = 0; half < 40; ++half, s *= 0.5) {
      ScalarField trial(g);
      for (std::size_t k = 0; k < u.v.size(); ++k)
        trial.v[k] = u.v[k] - s * grad.riesz.v[k];
      enforce(trial, con);
      if (!(x_norm_sq(trial, a) > 1e-14)) continue;
      std::optional<double> root;
      try {
        root = fiber_profile(trial, a, nl, 1e4, 12).root;
      } catch (const std::runtime_error&) {
        continue;  // ill-defined fiber along this trial; shrink the step
      }
      if (!root) continue;  // no fiber maximum here; shrink the step
      for (double& x : trial.v) x *= *root;
      const double Jt = energy_scalar(trial, a, nl).total;
      if (Jt < bestJ) {
        bestJ = Jt;
        best = trial;
      }
      if (Jt <= J - 1e-4 * s * res2) {
        u = std::move(trial);
        J = Jt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (bestJ < J) {
        u = std::move(best);
        J = bestJ;
      } else {
        // Terminal phase: the true energy decrease per step falls below the
        // evaluation roundoff of J long before the dual norm reaches tight
        // tolerances, so certify progress on the dual norm instead.
        bool rescued = false;
        double sr = cfg.step0;
        for (int half = 0; half < 12 && !rescued; ++half, sr *= 0.5) {
          ScalarField trial(g);
          for (std::size_t k = 0; k < u.v.size(); ++k)
            trial.v[k] = u.v[k] - sr * grad.riesz.v[k];
          enforce(trial, con);
          if (!(x_norm_sq(trial, a) > 1e-14)) continue;
          std::optional<double> root;
          try {
            root = fiber_profile(trial, a, nl, 1e4, 12).root;
          } catch (const std::runtime_error&) {
            continue;
          }
          if (!root) continue;
          for (double& x : trial.v) x *= *root;
          const GradientResult gt =
              gradient_scalar(trial, a, nl, cfg.cg_tol, &warm);
          if (gt.dual_norm < (1.0 - 1e-3) * grad.dual_norm) {
            u = std::move(trial);
            J = energy_scalar(u, a, nl).total;
            warm = gt.riesz;
            rescued = true;
          }
        }
        if (!rescued) break;  // no certificate on either the energy or the dual
      }
    }
    if (x_norm_sq(u, a) < 1e-12)
      throw std::runtime_error(
          "nehari descent: iterates collapsed toward the zero state");
  }

  if (!nl.one_sided) normalize_sign(u, con.antisym);
  out.u = std::move(u);
  out.energy = energy_scalar(out.u, a, nl);
  out.dual_residual = last_dual;
  return out;
}

void normalize_l6(ScalarField& u, const char* who) {
  const Grid2& g = u.grid;
  ScalarField p6(g);
  for (std::size_t k = 0; k < u.v.size(); ++k) {
    const double x = u.v[k];
    p6.v[k] = x * x * x * x * x * x;
  }
  const double m6 = integrate2(p6);
  if (!(m6 > 1e-300))
    throw std::runtime_error(std::string(who) +
                             ": iterate has vanishing L6 norm");
  const double scale = 1.0 / std::pow(m6, 1.0 / 6.0);
  for (double& x : u.v) x *= scale;
}

SolveResult rayleigh_descent(const Grid2& g, double a, const SolverConfig& cfg,
                             const Constraint& con) {
  const Nonlinearity nl = Nonlinearity::critical();
  SolveResult out;
  ScalarField u = starting_profile(g, cfg.seed, con.antisym);
  enforce(u, con);
  normalize_l6(u, "rayleigh descent");
  double Q = x_norm_sq(u, a);

  ScalarField warm(g);
  bool have_warm = false;
  double last_dual = std::numeric_limits<double>::infinity();

  // residual of the quotient on the unit-|.|_6 sphere: A u - Q u^5; the
  // fiber-scaled state t* u multiplies its dual norm by Q^(1/4)
  struct Resid {
    ScalarField psi;
    double res2 = 0.0;
    double dual = 0.0;
  };
  const auto residual_at = [&](const ScalarField& w, double Qw) {
    Resid r;
    ScalarField raw(g);
    const ScalarField Aw = apply_A(w, a);
    for (std::size_t k = 0; k < raw.v.size(); ++k) {
      const double x = w.v[k];
      raw.v[k] = Aw.v[k] - Qw * x * x * x * x * x;
    }
    force_boundary_ring(raw);
    int cg_it = 0;
    r.psi = solve_A(raw, a, cfg.cg_tol, have_warm ? &warm : nullptr, &cg_it);
    r.res2 = std::max(0.0, dot_w(raw, r.psi));
    r.dual = std::pow(Qw, 0.25) * std::sqrt(r.res2);
    return r;
  };

  for (int it = 1; it <= cfg.max_iter; ++it) {
    out.iterations = it;
    const Resid rr = residual_at(u, Q);
    warm = rr.psi;
    have_warm = true;
    const ScalarField& psi = rr.psi;
    const double res2 = rr.res2;
    const double dual_scaled = rr.dual;
    last_dual = dual_scaled;
    out.trace.push_back({std::pow(Q, 1.5) / 3.0, dual_scaled});
    if (dual_scaled <= cfg.tol) {
      out.converged = true;
      break;
    }

    // Once the available decrease per step falls below the evaluation
    // roundoff of Q, the sufficient-decrease test accepts pure rounding
    // noise; certify progress on the dual norm itself in that regime.
    const bool terminal =
        2.0 * cfg.step0 * res2 <
        64.0 * std::numeric_limits<double>::epsilon() * std::abs(Q);
    if (terminal) {
      bool rescued = false;
      double sr = cfg.step0;
      for (int half = 0; half < 12 && !rescued; ++half, sr *= 0.5) {
        ScalarField trial(g);
        for (std::size_t k = 0; k < u.v.size(); ++k)
          trial.v[k] = u.v[k] - sr * psi.v[k];
        enforce(trial, con);
        try {
          normalize_l6(trial, "rayleigh descent");
        } catch (const std::runtime_error&) {
          continue;
        }
        const double Qt = x_norm_sq(trial, a);
        const Resid rt = residual_at(trial, Qt);
        if (rt.dual < (1.0 - 1e-3) * dual_scaled) {
          u = std::move(trial);
          Q = Qt;
          warm = rt.psi;
          rescued = true;
        }
      }
      if (!rescued) break;
      continue;
    }

    bool accepted = false;
    ScalarField best;
    double bestQ = Q;
    double s = cfg.step0;
    for (int half = 0; half < 40; ++half, s *= 0.5) {
      ScalarField trial(g);
      for (std::size_t k = 0; k < u.v.size(); ++k)
        trial.v[k] = u.v[k] - s * psi.v[k];
      enforce(trial, con);
      try {
        normalize_l6(trial, "rayleigh descent");
      } catch (const std::runtime_error&) {
        continue;
      }
      const double Qt = x_norm_sq(trial, a);
      if (Qt < bestQ) {
        bestQ = Qt;
        best = trial;
      }
      if (Qt <= Q - 1e-4 * s * 2.0 * res2) {
        u = std::move(trial);
        Q = Qt;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (bestQ < Q) {
        u = std::move(best);
        Q = bestQ;
      } else {
        break;
      }
    }
  }

  const double S = Q;
  for (double& x : u.v) x *= std::pow(S, 0.25);
  normalize_sign(u, con.antisym);
  out.u = std::move(u);
  out.energy = energy_scalar(out.u, a, nl);
  out.rayleigh = S;
  out.dual_residual = last_dual;
  return out;
}

}  // namespace

SolveResult solve_ground_state(const Grid2& g, double a, const Nonlinearity& nl,
                               const SolverConfig& cfg) {
  validate_config(cfg, "solve_ground_state");
  if (nl.kind == Nonlinearity::Kind::zero)
    throw std::invalid_argument(
        "solve_ground_state: the zero nonlinearity has no superquadratic "
        "part, so the constrained minimization is degenerate");
  if (nl.kind == Nonlinearity::Kind::critical)
    throw std::invalid_argument(
        "solve_ground_state: critical growth is handled by the "
        "Rayleigh-quotient solver (solve_critical)");
  if (cfg.k_nodes != 0)
    throw std::invalid_argument(
        "solve_ground_state: k_nodes != 0 belongs to excited_symmetric_state");
  return nehari_descent(g, a, nl, cfg, Constraint{cfg.positivity, false});
}

SolveResult solve_critical(const Grid2& g, double a, const SolverConfig& cfg) {
  validate_config(cfg, "solve_critical");
  return rayleigh_descent(g, a, cfg,
                          Constraint{cfg.positivity, cfg.k_nodes == 1});
}

SolveResult excited_symmetric_state(const Grid2& g, double a,
                                    const Nonlinearity& nl,
                                    const SolverConfig& cfg) {
  validate_config(cfg, "excited_symmetric_state");
  if (cfg.k_nodes != 1)
    throw std::invalid_argument("excited_symmetric_state: k_nodes must be 1");
  if (nl.kind == Nonlinearity::Kind::zero)
    throw std::invalid_argument(
        "excited_symmetric_state: the zero nonlinearity has no bound states");
  if (nl.kind == Nonlinearity::Kind::critical)
    return rayleigh_descent(g, a, cfg, Constraint{false, true});
  return nehari_descent(g, a, nl, cfg, Constraint{false, true});
}

// ---------------------------------------------------------------------------
// Mountain pass
// ---------------------------------------------------------------------------

namespace {

ScalarField lerp(const ScalarField& p, const ScalarField& q, double f) {
  ScalarField out(p.grid);
  for (std::size_t k = 0; k < out.v.size(); ++k)
    out.v[k] = (1.0 - f) * p.v[k] + f * q.v[k];
  return out;
}

double x_distance(const ScalarField& p, const ScalarField& q, double a) {
  ScalarField d(p.grid);
  for (std::size_t k = 0; k < d.v.size(); ++k) d.v[k] = q.v[k] - p.v[k];
  return std::sqrt(std::max(0.0, x_norm_sq(d, a)));
}

// Redistribute interior knots to equal X-arclength along the polyline.
void reparametrize(std::vector<ScalarField>& P, double a) {
  const int M = static_cast<int>(P.size());
  std::vector<double> cum(M, 0.0);
  for (int k = 1; k < M; ++k)
    cum[k] = cum[k - 1] + x_distance(P[k - 1], P[k], a);
  if (!(cum.back() > 0.0)) return;
  std::vector<ScalarField> Q(M);
  Q[0] = P[0];
  Q[M - 1] = P[M - 1];
  int seg = 1;
  for (int k = 1; k + 1 < M; ++k) {
    const double target = cum.back() * k / (M - 1.0);
    while (seg < M - 1 && cum[seg] < target) ++seg;
    const double len = cum[seg] - cum[seg - 1];
    const double f = len > 0.0 ? (target - cum[seg - 1]) / len : 0.0;
    Q[k] = lerp(P[seg - 1], P[seg], f);
  }
  P = std::move(Q);
}

}  // namespace

MountainPassResult mountain_pass_level_bound(const Grid2& g, double a,
                                             const Nonlinearity& nl,
                                             const SolverConfig& cfg,
                                             double u0, int knots) {
  validate_config(cfg, "mountain_pass_level_bound");
  if (nl.kind != Nonlinearity::Kind::power &&
      nl.kind != Nonlinearity::Kind::log_modified)
    throw std::invalid_argument(
        "mountain_pass_level_bound: needs a superquadratic subcritical "
        "nonlinearity");
  if (knots < 8)
    throw std::invalid_argument("mountain_pass_level_bound: knots < 8");

  MountainPassResult out;
  auto ring_opt = find_ring_radius(g, nl, u0);
  if (!ring_opt)
    throw std::runtime_error(
        "mountain_pass_level_bound: no plateau radius inside the grid makes "
        "the potential mass beat the vertical gradient; enlarge the domain "
        "or raise u0");
  const RingFunction ring = std::move(*ring_opt);
  out.ring_radius = ring.radius;

  // Certify negative dilation energies in closed form, then realize one
  // endpoint on the grid.
  ScalingPath sp = scaling_path(ring.w, a, nl, {});
  out.A = sp.A;
  out.B = sp.B;
  const double thr = sp.negative_threshold;

  ScalarField e(g);
  double Je = 1.0;
  const double lam_fit = (ring.radius + 1.0) / g.rmax;
  if (thr > lam_fit) {
    out.lambda = 0.5 * (lam_fit + thr);
    for (int i = 0; i < g.nr; ++i) {
      const double pr = ring_profile(out.lambda * g.r(i), u0, ring.radius);
      for (int j = 0; j < g.nz; ++j)
        e.at(i, j) = pr * ring_profile(std::abs(g.z(j)), u0, ring.radius);
    }
    force_boundary_ring(e);
    Je = energy_scalar(e, a, nl).total;
  }
  if (!(Je < 0.0)) {
    // dilation endpoint unusable (does not fit or fails on the grid):
    // walk out along the ray t -> t w instead, which also goes negative
    const std::optional<double> root = fiber_profile(ring.w, a, nl, 1e4, 24).root;
    double t = root ? 2.0 * *root : 1.0;
    for (int k = 0; k < 60 && !(Je < 0.0); ++k, t *= 2.0) {
      for (std::size_t q = 0; q < e.v.size(); ++q) e.v[q] = t * ring.w.v[q];
      Je = energy_scalar(e, a, nl).total;
    }
    out.lambda = 0.0;  // marks a ray endpoint
    if (!(Je < 0.0))
      throw std::runtime_error(
          "mountain_pass_level_bound: could not realize a negative-energy "
          "endpoint on the grid");
  }
  out.endpoint_energy = Je;

  const int M = knots;
  std::vector<ScalarField> P(M, ScalarField(g));
  for (int k = 0; k < M; ++k) {
    const double f = static_cast<double>(k) / (M - 1);
    for (std::size_t q = 0; q < e.v.size(); ++q) P[k].v[q] = f * e.v[q];
  }

  // Maximum of J along the polyline. A coarse scan alone can miss the ridge
  // crossing when the knots flanking it have already descended far down both
  // sides, so refine around each segment's coarse argmax by golden section.
  const auto path_level = [&](int* arg_seg, double* arg_frac) {
    double best = -std::numeric_limits<double>::infinity();
    for (int k = 0; k + 1 < M; ++k) {
      const auto J_at = [&](double f) {
        return energy_scalar(lerp(P[k], P[k + 1], f), a, nl).total;
      };
      double cf = 0.0, cb = -std::numeric_limits<double>::infinity();
      for (int m = 0; m <= 8; ++m) {
        const double f = m / 8.0;
        const double Jq = J_at(f);
        if (Jq > cb) {
          cb = Jq;
          cf = f;
        }
      }
      double lo = std::max(0.0, cf - 0.125), hi = std::min(1.0, cf + 0.125);
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
      double Jc = J_at(c), Jd = J_at(d);
      for (int m = 0; m < 16; ++m) {
        if (Jc < Jd) {
          lo = c;
          c = d;
          Jc = Jd;
          d = lo + gr * (hi - lo);
          Jd = J_at(d);
        } else {
          hi = d;
          d = c;
          Jd = Jc;
          c = hi - gr * (hi - lo);
          Jc = J_at(c);
        }
      }
      if (Jc > cb) {
        cb = Jc;
        cf = c;
      }
      if (Jd > cb) {
        cb = Jd;
        cf = d;
      }
      if (cb > best) {
        best = cb;
        *arg_seg = k;
        *arg_frac = cf;
      }
    }
    return best;
  };

  std::vector<ScalarField> warm(M, ScalarField(g));
  std::vector<char> have_warm(M, 0);
  double level = std::numeric_limits<double>::infinity();
  {
    int aseg = 0;
    double afrac = 0.0;
    const double lv = path_level(&aseg, &afrac);
    out.sweep_levels.push_back(lv);
    level = lv;
    out.peak = lerp(P[aseg], P[aseg + 1], afrac);
  }

  const int sweep_cap = std::min(cfg.max_iter, 160);
  int stale = 0;
  for (int sweep = 1; sweep <= sweep_cap; ++sweep) {
    out.sweeps = sweep;
    for (int k = 1; k + 1 < M; ++k) {
      const GradientResult grad = gradient_scalar(
          P[k], a, nl, cfg.cg_tol, have_warm[k] ? &warm[k] : nullptr);
      warm[k] = grad.riesz;
      have_warm[k] = 1;
      const double gnorm = grad.dual_norm;
      if (!(gnorm > 0.0)) continue;
      const double Jk = energy_scalar(P[k], a, nl).total;
      // cap the move at half the local knot spacing so the polyline stays
      // resolved across the ridge
      const double span = 0.5 * (x_distance(P[k - 1], P[k], a) +
                                 x_distance(P[k], P[k + 1], a));
      double s = std::min(cfg.step0, 0.5 * span / gnorm);
      for (int half = 0; half < 25; ++half, s *= 0.5) {
        ScalarField trial(g);
        for (std::size_t q = 0; q < trial.v.size(); ++q)
          trial.v[q] = P[k].v[q] - s * grad.riesz.v[q];
        force_boundary_ring(trial);
        const double Jt = energy_scalar(trial, a, nl).total;
        if (Jt <= Jk - 1e-4 * s * gnorm * gnorm) {
          P[k] = std::move(trial);
          break;
        }
      }
    }
    reparametrize(P, a);

    int aseg = 0;
    double afrac = 0.0;
    const double lv = path_level(&aseg, &afrac);
    out.sweep_levels.push_back(lv);
    if (lv < level - 1e-5 * std::abs(level)) {
      level = lv;
      out.peak = lerp(P[aseg], P[aseg + 1], afrac);
      stale = 0;
    } else {
      if (lv < level) {
        level = lv;
        out.peak = lerp(P[aseg], P[aseg + 1], afrac);
      }
      if (++stale >= 10) break;
    }
  }

  out.level = level;
  out.knot_energies.reserve(M);
  for (int k = 0; k < M; ++k)
    out.knot_energies.push_back(energy_scalar(P[k], a, nl).total);
  return out;
}

}  // namespace cylvar
