#include <algorithm>
#include <cmath>

#include "gapbound/error.hpp"
#include "gapbound/onedim.hpp"

namespace gapbound {

namespace {

// Growth test constants: functionals are compared at X, 2X and 4X where X is
// the distance over which u has risen by kGrowthRise.
constexpr double kGrowthRise = 100.0;
constexpr double kGrowthStep = 0.05;

double at(double theta, Side side, double s) { return side == Side::Plus ? theta + s : theta - s; }

double growth_radius(const Potential1D& p, double theta, Side side) {
  double u0 = p.u(theta);
  for (double s = 0.25; s < 1e8; s *= 2.0) {
    if (p.u(at(theta, side, s)) - u0 >= kGrowthRise) return s;
  }
  throw Error(ErrorKind::NonConvergent, "potential does not grow on the half-line");
}

// log int over the outer side of x of exp(u(x) - u(y) + lw(y)) dy, in the
// offset t = |y - x|.
double log_outer(const Potential1D& p, const RealFn* lw, double x, Side side, const QuadConfig& cfg) {
  double dir = side == Side::Plus ? 1.0 : -1.0;
  RealFn g = [&](double t) { return -p.u_step(x, dir * t) + (lw ? (*lw)(x + dir * t) : 0.0); };
  return integrate_log(g, {0.0, kInf}, cfg).log_magnitude;
}

// log int between theta and x of exp(u(y) - u(x) + lw(y)) dy.
double log_inner(const Potential1D& p, const RealFn* lw, double theta, double x, const QuadConfig& cfg) {
  if (x == theta) return -kInf;
  // y = x - dir t runs back toward theta.
  double dir = x > theta ? 1.0 : -1.0;
  RealFn g = [&](double t) { return p.u_step(x, -dir * t) + (lw ? (*lw)(x - dir * t) : 0.0); };
  return integrate_log(g, {0.0, std::abs(x - theta)}, cfg).log_magnitude;
}

struct HalfSup {
  double log_value = -kInf;
  bool diverges = false;
};

// sup over the half-line of exp(logf), reported divergent when the
// functional is still climbing at 2X and 4X.
HalfSup half_line_sup(const RealFn& logf, double theta, Side side, double x_growth, const QuadConfig& cfg) {
  double l1 = logf(at(theta, side, x_growth));
  double l2 = logf(at(theta, side, 2.0 * x_growth));
  double l3 = logf(at(theta, side, 4.0 * x_growth));
  HalfSup out;
  if (l2 - l1 > kGrowthStep && l3 - l2 > kGrowthStep) {
    out.diverges = true;
    out.log_value = kInf;
    return out;
  }
  Interval dom = side == Side::Plus ? Interval{theta, theta + 4.0 * x_growth} : Interval{theta - 4.0 * x_growth, theta};
  QuadConfig c = cfg;
  c.scan_points = std::min(cfg.scan_points, 512);
  out.log_value = sup_scan(logf, dom, c).max;
  return out;
}

double log_abs_expm1(double h) {
  if (h == 0.0) return -kInf;
  if (h > 30.0) return h + std::log1p(-std::exp(-h));
  return std::log(std::abs(std::expm1(h)));
}

double safe_mul(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

void require_unit(const Potential1D& p) {
  if (!p.unit_diffusion()) throw Error(ErrorKind::InvalidArgument, "criterion is stated for a == 1 only");
}

}  // namespace

Ergodicity ergodicity_criteria(const Potential1D& p, double nu, const QuadConfig& cfg) {
  cfg.validate();
  require_unit(p);
  if (!(nu > 2.0)) throw Error(ErrorKind::InvalidArgument, "nu must exceed 2");
  double theta = theta_root(p);
  const Side side = Side::Plus;
  double xg = growth_radius(p, theta, side);
  QuadConfig inner = cfg;
  inner.rel_tol = std::max(cfg.rel_tol, 1e-8);

  // e^{u(x)} T(x) and e^{-u(x)} S(x) with T = int_x^inf e^{-u}, S = int_theta^x e^u.
  auto log_ut = [&](double x) { return log_outer(p, nullptr, x, side, inner); };
  auto log_us = [&](double x) { return log_inner(p, nullptr, theta, x, inner); };

  Ergodicity out;
  {
    // T |log T| S
    RealFn f = [&](double x) {
      double lt = log_ut(x);
      double log_t = lt - p.u(x);
      double mag = std::abs(log_t);
      return lt + log_us(x) + (mag > 0.0 ? std::log(mag) : -kInf);
    };
    HalfSup s = half_line_sup(f, theta, side, xg, cfg);
    out.logsob.holds = !s.diverges;
    out.logsob.value = std::exp(s.log_value);
  }
  {
    // T^{1 - 2/nu} S = (e^u T)^{1-2/nu} (e^{-u} S) e^{2u/nu}
    RealFn f = [&](double x) { return (1.0 - 2.0 / nu) * log_ut(x) + log_us(x) + 2.0 * p.u(x) / nu; };
    HalfSup s = half_line_sup(f, theta, side, xg, cfg);
    out.nash.holds = !s.diverges;
    out.nash.value = std::exp(s.log_value);
  }
  {
    // int_theta^inf e^{u(x)} T(x) dx over doubling pieces.
    double sum = 0.0;
    double prev_inc = -1.0;
    int climbing = 0;
    bool diverges = true;
    double a = theta;
    double len = 0.5;
    for (int k = 0; k < 64; ++k) {
      double b = a + len;
      double inc = integrate_log(log_ut, {a, b}, inner).value();
      sum += inc;
      bool past = (b - theta) >= xg;
      if (past && prev_inc > 0.0) {
        double ratio = inc / prev_inc;
        climbing = ratio > 0.75 ? climbing + 1 : 0;
        if (climbing >= 2) break;
        if (inc < 1e-9 * sum) {
          sum += inc * ratio / (1.0 - ratio);  // geometric remainder
          diverges = false;
          break;
        }
      }
      prev_inc = inc;
      a = b;
      len *= 2.0;
    }
    out.strong.holds = !diverges;
    out.strong.value = diverges ? kInf : sum;
  }
  return out;
}

Perturbation perturbation_bound(const Potential1D& base, const RealFn& h, double theta, const QuadConfig& cfg) {
  cfg.validate();
  require_unit(base);
  if (!h) throw Error(ErrorKind::InvalidArgument, "perturbation h is empty");
  double u0 = base.u(0.0);
  try {
    integrate_log([&](double x) { return u0 - base.u(x) + h(x); }, {-kInf, kInf}, cfg);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NonConvergent) throw;
    throw Error(ErrorKind::InvalidArgument, "e^{C+h} is not integrable");
  }
  Measure1D m(base, cfg);
  QuadConfig inner = cfg;
  inner.rel_tol = std::max(cfg.rel_tol, 1e-8);
  RealFn lw_plus = [&](double y) { return log_abs_expm1(h(y)); };
  RealFn lw_minus = [&](double y) { return log_abs_expm1(-h(y)); };

  Perturbation out;
  for (Side side : {Side::Plus, Side::Minus}) {
    PerturbationSide& ps = side == Side::Plus ? out.plus : out.minus;
    double xg = growth_radius(base, theta, side);
    auto sup = [&](RealFn f) {
      HalfSup s = half_line_sup(f, theta, side, xg, cfg);
      return s.diverges ? kInf : std::exp(s.log_value);
    };
    ps.k1 = sup([&](double x) { return log_outer(base, nullptr, x, side, inner); });
    ps.k2 = sup([&](double x) { return log_inner(base, nullptr, theta, x, inner); });
    ps.k3 = sup([&](double x) { return log_outer(base, &lw_plus, x, side, inner); });
    ps.k4 = sup([&](double x) { return log_inner(base, &lw_minus, theta, x, inner); });
    ps.delta = half_line_delta(m, theta, side, cfg);
    ps.bound = ps.delta + safe_mul(ps.k2, ps.k3) + safe_mul(ps.k1, ps.k4) + safe_mul(ps.k4, ps.k3);
  }
  return out;
}

}  // namespace gapbound
