#include "cylvar/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cylvar {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLn2 = 0.69314718055994530942;

void check_eps(double eps) {
  if (!(eps >= 0.0 && eps <= 0.5))
    throw std::invalid_argument("weight amplitude eps must lie in [0, 1/2]");
}

}  // namespace

Nonlinearity Nonlinearity::power(double p, double eps_weight) {
  if (!(p > 2.0 && p < 6.0))
    throw std::invalid_argument("power kind requires 2 < p < 6");
  check_eps(eps_weight);
  return {Kind::power, p, eps_weight, false};
}

Nonlinearity Nonlinearity::critical() { return {Kind::critical, 6.0, 0.0, false}; }

Nonlinearity Nonlinearity::log_modified(double p, double eps_weight) {
  if (!(p >= 2.0 && p < 6.0))
    throw std::invalid_argument("log_modified kind requires 2 <= p < 6");
  check_eps(eps_weight);
  return {Kind::log_modified, p, eps_weight, false};
}

Nonlinearity Nonlinearity::zero() { return {Kind::zero, 0.0, 0.0, false}; }

Nonlinearity Nonlinearity::with_one_sided() const {
  Nonlinearity nl = *this;
  nl.one_sided = true;
  return nl;
}

std::string Nonlinearity::kind_name() const {
  std::string base;
  switch (kind) {
    case Kind::power: base = "power"; break;
    case Kind::critical: base = "critical"; break;
    case Kind::log_modified: base = "log_modified"; break;
    case Kind::zero: base = "zero"; break;
  }
  return one_sided ? base + "_one_sided" : base;
}

double weight_gamma(const Nonlinearity& nl, double z) {
  if (nl.eps_weight == 0.0) return 1.0;
  const double s = std::sin(kPi * z);
  return 1.0 + nl.eps_weight * s * s;
}

// ---------------------------------------------------------------------------
// Unweighted core f0 and its antiderivative F0 (both as functions of |u|)
// ---------------------------------------------------------------------------

namespace {

// f0(s) for s >= 0; extended to u by oddness.
double f0_abs(const Nonlinearity& nl, double s) {
  switch (nl.kind) {
    case Nonlinearity::Kind::power:
      return std::pow(s, nl.p - 1.0);
    case Nonlinearity::Kind::critical: {
      const double s2 = s * s;
      return s2 * s2 * s;
    }
    case Nonlinearity::Kind::log_modified:
      if (s == 0.0) return 0.0;
      if (s >= 1.0) return std::pow(s, nl.p - 1.0) * std::log1p(s);
      return kLn2 * s * s * s * s * s / (1.0 - std::log(s));
    case Nonlinearity::Kind::zero:
      return 0.0;
  }
  return 0.0;
}

// --- log_modified antiderivative machinery ---------------------------------

// Adaptive Simpson with absolute tolerance (used only at table build time).
double simpson_rule(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(const std::function<double(double)>& f, double a, double fa,
             double b, double fb, double m, double fm, double whole,
             double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_rule(a, m, fa, flm, fm);
  const double right = simpson_rule(m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adapt(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  return adapt(f, a, fa, b, fb, m, fm, simpson_rule(a, b, fa, fm, fb), tol, 40);
}

// Cumulative Hermite table of F0 on [a, b]: values plus exact derivatives f0
// at uniformly spaced nodes.
struct HermiteTable {
  double a = 0.0, b = 0.0;
  int n = 0;  // intervals
  std::vector<double> val;
  std::vector<double> der;

  double dx() const { return (b - a) / n; }

  double eval(double s) const {
    const double t = (s - a) / dx();
    int k = static_cast<int>(t);
    k = std::min(std::max(k, 0), n - 1);
    const double x = t - k;
    const double x2 = x * x, x3 = x2 * x;
    const double h00 = 2 * x3 - 3 * x2 + 1;
    const double h10 = x3 - 2 * x2 + x;
    const double h01 = -2 * x3 + 3 * x2;
    const double h11 = x3 - x2;
    return h00 * val[k] + h10 * dx() * der[k] + h01 * val[k + 1] +
           h11 * dx() * der[k + 1];
  }
};

HermiteTable build_table(const std::function<double(double)>& f, double a,
                         double b, int n, double start_value) {
  HermiteTable t;
  t.a = a;
  t.b = b;
  t.n = n;
  t.val.resize(n + 1);
  t.der.resize(n + 1);
  t.val[0] = start_value;
  t.der[0] = f(a);
  const double dx = (b - a) / n;
  for (int k = 1; k <= n; ++k) {
    const double lo = a + (k - 1) * dx, hi = a + k * dx;
    t.val[k] = t.val[k - 1] + adaptive_simpson(f, lo, hi, 1e-17);
    t.der[k] = f(hi);
  }
  return t;
}

struct LogTables {
  HermiteTable low;    // [0, 1]
  HermiteTable high;   // [1, 10]
  double F1 = 0.0;
  double F10 = 0.0;
  double p = 0.0;
};

// Tail s > 10:  int_10^s t^(p-1) ln(1+t) dt
//   = [t^p ln(1+t)/p]_10^s - (1/p) int_10^s t^p/(1+t) dt,
// the last integral via the alternating series sum_k (-1)^k t^(p-1-k),
// geometric with ratio <= 1/10 on t >= 10.
double log_tail(double s, double p, double F10) {
  const double lead =
      (std::pow(s, p) * std::log1p(s) - std::pow(10.0, p) * std::log1p(10.0)) / p;
  double series = 0.0;
  for (int k = 0; k <= 60; ++k) {
    const double e = p - k;
    double term;
    if (std::abs(e) < 1e-9)
      term = std::log(s / 10.0);
    else
      term = (std::pow(s, e) - std::pow(10.0, e)) / e;
    series += (k % 2 == 0 ? term : -term);
    if (k > p + 2 && std::abs(term) < 1e-18 * std::abs(series)) break;
  }
  return F10 + lead - series / p;
}

const LogTables& log_tables_for(double p) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<LogTables>> cache;
  std::scoped_lock lock(mu);
  auto it = cache.find(p);
  if (it != cache.end()) return *it->second;

  auto t = std::make_unique<LogTables>();
  t->p = p;
  const auto f_low = [](double s) {
    return s == 0.0 ? 0.0 : kLn2 * s * s * s * s * s / (1.0 - std::log(s));
  };
  const auto f_high = [p](double s) { return std::pow(s, p - 1.0) * std::log1p(s); };
  t->low = build_table(f_low, 0.0, 1.0, 4096, 0.0);
  t->F1 = t->low.val.back();
  t->high = build_table(f_high, 1.0, 10.0, 32768, t->F1);
  t->F10 = t->high.val.back();
  auto [pos, inserted] = cache.emplace(p, std::move(t));
  return *pos->second;
}

double F0_abs(const Nonlinearity& nl, double s) {
  switch (nl.kind) {
    case Nonlinearity::Kind::power:
      return std::pow(s, nl.p) / nl.p;
    case Nonlinearity::Kind::critical: {
      const double s3 = s * s * s;
      return s3 * s3 / 6.0;
    }
    case Nonlinearity::Kind::log_modified: {
      const LogTables& t = log_tables_for(nl.p);
      if (s <= 1.0) return t.low.eval(s);
      if (s <= 10.0) return t.high.eval(s);
      return log_tail(s, nl.p, t.F10);
    }
    case Nonlinearity::Kind::zero:
      return 0.0;
  }
  return 0.0;
}

}  // namespace

double eval_f(const Nonlinearity& nl, double z, double u) {
  if (u == 0.0) return 0.0;
  if (nl.one_sided && u < 0.0) return 0.0;
  const double s = std::abs(u);
  const double core = f0_abs(nl, s);
  return weight_gamma(nl, z) * (u > 0.0 ? core : -core);
}

double eval_F(const Nonlinearity& nl, double z, double u) {
  if (u == 0.0) return 0.0;
  if (nl.one_sided && u < 0.0) return 0.0;
  return weight_gamma(nl, z) * F0_abs(nl, std::abs(u));
}

std::array<double, 3> eval_h(const Nonlinearity& nl, double x3,
                             const std::array<double, 3>& U) {
  const double norm = std::sqrt(U[0] * U[0] + U[1] * U[1] + U[2] * U[2]);
  if (norm == 0.0) return {0.0, 0.0, 0.0};
  const double scale = eval_f(nl, x3, norm) / norm;
  return {scale * U[0], scale * U[1], scale * U[2]};
}

// ---------------------------------------------------------------------------
// Assumption battery
// ---------------------------------------------------------------------------

namespace {

using Status = AssumptionReport::Status;

const std::vector<double>& z_samples() {
  static const std::vector<double> zs{0.0, 0.13, 0.25, 0.37, 0.5, 1.11};
  return zs;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

bool AssumptionReport::all_hold() const {
  const auto ok = [](const Check& c) { return c.status == Status::holds_on_samples; };
  return ok(f1) && ok(f2) && ok(f3) && ok(f4) && ok(f5);
}

std::string to_string(AssumptionReport::Status s) {
  switch (s) {
    case Status::holds_on_samples: return "holds_on_samples";
    case Status::violated: return "violated";
    case Status::not_applicable: return "not_applicable";
  }
  return "?";
}

std::string AssumptionReport::to_string() const {
  std::ostringstream os;
  const auto line = [&os](const char* name, const Check& c) {
    os << name << ": " << cylvar::to_string(c.status);
    if (!c.detail.empty()) os << "  (" << c.detail << ")";
    os << "\n";
  };
  line("F1", f1);
  line("F2", f2);
  os << "    decay of f/|u|^5 at u->0: " << (f2_zero_decays ? "yes" : "no")
     << " (informational)\n";
  line("F3", f3);
  line("F4", f4);
  line("F5", f5);
  os << "    gamma_used = " << gamma_used << "\n";
  return os.str();
}

AssumptionReport check_assumptions(const Nonlinearity& nl,
                                   std::optional<double> gamma) {
  AssumptionReport rep;

  // F1: 1-periodicity of the weight in z.
  {
    double worst = 0.0;
    for (int i = 0; i <= 36; ++i) {
      const double z = -3.0 + i / 6.0;
      worst = std::max(worst,
                       std::abs(weight_gamma(nl, z + 1.0) - weight_gamma(nl, z)));
    }
    rep.f1.status = worst <= 1e-12 ? Status::holds_on_samples : Status::violated;
    rep.f1.detail = "max |Gamma(z+1)-Gamma(z)| = " + fmt(worst);
  }

  const double z_probe = 0.37;

  // F2 verdict: decay of f/|u|^5 along u = 10^k, k -> 8.
  {
    std::vector<double> q;
    for (int k = 5; k <= 8; ++k) {
      const double u = std::pow(10.0, k);
      q.push_back(std::abs(eval_f(nl, z_probe, u)) / std::pow(u, 5.0));
    }
    const bool all_zero = q[0] == 0.0 && q[3] == 0.0;
    bool decreasing = true;
    for (std::size_t m = 1; m < q.size(); ++m)
      if (!(q[m] < q[m - 1])) decreasing = false;
    if (all_zero || decreasing) {
      rep.f2.status = Status::holds_on_samples;
      rep.f2.detail = "f/|u|^5 at u=1e5..1e8: " + fmt(q[0]) + " -> " + fmt(q[3]);
    } else {
      rep.f2.status = Status::violated;
      rep.f2.detail = "no decay of f/|u|^5: ratio at u=1e8 is " + fmt(q[3]);
    }

    // informational: same ratio toward u -> 0
    std::vector<double> q0;
    for (int k = -5; k >= -8; --k) {
      const double u = std::pow(10.0, k);
      q0.push_back(std::abs(eval_f(nl, z_probe, u)) / std::pow(u, 5.0));
    }
    bool zero_decay = true;
    for (std::size_t m = 1; m < q0.size(); ++m)
      if (!(q0[m] <= q0[m - 1])) zero_decay = false;
    rep.f2_zero_decays = (q0[0] == 0.0 && q0[3] == 0.0) || zero_decay;
  }

  // F3: growth of F/u^2 along the ladder, both signs.
  {
    bool ok = true;
    std::string side;
    for (const double sign : {1.0, -1.0}) {
      std::vector<double> t;
      for (int k = 5; k <= 8; ++k) {
        const double u = sign * std::pow(10.0, k);
        t.push_back(eval_F(nl, z_probe, u) / std::pow(10.0, 2.0 * k));
      }
      bool increasing = true;
      for (std::size_t m = 1; m < t.size(); ++m)
        if (!(t[m] > t[m - 1])) increasing = false;
      if (!increasing) {
        ok = false;
        side = sign > 0 ? "u -> +inf" : "u -> -inf";
        break;
      }
    }
    rep.f3.status = ok ? Status::holds_on_samples : Status::violated;
    rep.f3.detail = ok ? "F/u^2 grows along u = +-10^k"
                       : "F/u^2 fails to grow toward " + side;
  }

  // F4: monotonicity of f(z,u)/|u| on each half-line.
  {
    std::vector<double> us;
    for (int k = -6; k <= 1; ++k) us.push_back(std::pow(10.0, k));
    for (int m = 1; m <= 400; ++m) us.push_back(0.025 * m);
    std::sort(us.begin(), us.end());
    bool ok = true;
    double witness = 0.0;
    // positive half-line: g(u) = f/|u| must not fall as u grows
    double prev = -1e300;
    for (double s : us) {
      const double gval = eval_f(nl, z_probe, s) / s;
      if (gval < prev - 1e-11 * std::max(1.0, std::abs(prev))) {
        ok = false;
        witness = s;
        break;
      }
      prev = std::max(prev, gval);
    }
    // negative half-line traversed with |u| growing, i.e. u decreasing, so
    // g must not rise along the traversal
    if (ok) {
      prev = 1e300;
      for (double s : us) {
        const double gval = eval_f(nl, z_probe, -s) / s;
        if (gval > prev + 1e-11 * std::max(1.0, std::abs(prev))) {
          ok = false;
          witness = -s;
          break;
        }
        prev = std::min(prev, gval);
      }
    }
    rep.f4.status = ok ? Status::holds_on_samples : Status::violated;
    rep.f4.detail = ok ? "f/|u| monotone on both half-lines"
                       : "monotonicity breaks near u = " + fmt(witness);
  }

  // F5: f u >= gamma F with gamma > 2, plus ess-inf F(z, u0) > 0.
  {
    double ratio_min = 1e300;
    double witness_u = 0.0;
    for (const double sign : {1.0, -1.0}) {
      for (int k = -6; k <= 8; ++k) {
        const double u = sign * std::pow(10.0, k);
        for (double z : z_samples()) {
          const double fu = eval_f(nl, z, u) * u;
          const double F = eval_F(nl, z, u);
          if (F <= 0.0) continue;  // one-sided negatives: 0 >= gamma*0 holds
          const double r = fu / F;
          if (r < ratio_min) {
            ratio_min = r;
            witness_u = u;
          }
        }
      }
    }
    // Large-u trend of the ratio, extrapolated linearly in 1/log u from the
    // top two rungs: limits like p + c/ln(u) land on p.
    double trend = ratio_min;
    {
      const double u7 = 1e7, u8 = 1e8;
      const double F7 = eval_F(nl, z_probe, u7), F8 = eval_F(nl, z_probe, u8);
      if (F7 > 0.0 && F8 > 0.0) {
        const double r7 = eval_f(nl, z_probe, u7) * u7 / F7;
        const double r8 = eval_f(nl, z_probe, u8) * u8 / F8;
        trend = 8.0 * r8 - 7.0 * r7;
      }
    }
    const bool homogeneous = nl.kind == Nonlinearity::Kind::power ||
                             nl.kind == Nonlinearity::Kind::critical;
    double g = 0.0;
    if (gamma)
      g = *gamma;
    else if (homogeneous)
      g = nl.p;
    else
      g = std::min(ratio_min, trend);
    rep.gamma_used = g;

    bool ok = g > 2.0 + (gamma || homogeneous ? 0.0 : 1e-6);
    if (ok && ratio_min < 1e300)
      ok = ratio_min >= g - 1e-9 * std::max(1.0, std::abs(g)) &&
           trend >= g - 1e-6 * std::max(1.0, std::abs(g));
    // positivity of F at a fixed height
    double Fmin = 1e300;
    for (double z : z_samples()) Fmin = std::min(Fmin, eval_F(nl, z, 1.0));
    if (!(Fmin > 0.0)) ok = false;

    rep.f5.status = ok ? Status::holds_on_samples : Status::violated;
    std::ostringstream d;
    if (ok) {
      d << "gamma = " << fmt(g) << ", min ratio " << fmt(ratio_min)
        << ", large-u trend " << fmt(trend);
    } else if (!(Fmin > 0.0)) {
      d << "no u0 with ess-inf F(z,u0) > 0 (F(., 1) = " << fmt(Fmin) << ")";
    } else {
      d << "ratio f u / F trends to " << fmt(trend) << " (<= 2) near u = "
        << fmt(witness_u) << "; no admissible gamma > 2";
    }
    rep.f5.detail = d.str();
  }

  // zero kind: everything about growth is vacuous/violated; report
  // not_applicable for the monotonicity which holds trivially.
  if (nl.kind == Nonlinearity::Kind::zero) {
    rep.f2.status = Status::holds_on_samples;
    rep.f2.detail = "f = 0";
  }

  return rep;
}

}  // namespace cylvar
