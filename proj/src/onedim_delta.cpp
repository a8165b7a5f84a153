#include <algorithm>
#include <cmath>

#include "gapbound/error.hpp"
#include "gapbound/onedim.hpp"

namespace gapbound {

double half_line_delta(const Measure1D& m, double theta, Side side, const QuadConfig& cfg) {
  cfg.validate();
  Interval w = m.window();
  double s_far = side == Side::Plus ? w.hi - theta : theta - w.lo;
  if (!(s_far > 0.0)) throw Error(ErrorKind::InvalidArgument, "theta lies outside the support window");
  // Tables run past the scan range so tails near its end are not clipped.
  double s_ext = 1.5 * s_far;
  double lo = side == Side::Plus ? theta : theta - s_ext;
  double hi = side == Side::Plus ? theta + s_ext : theta;
  LogCumulative speed([&](double x) { return m.log_speed(x); }, lo, hi, 2048, cfg);
  LogCumulative scale([&](double x) { return m.log_scale(x); }, lo, hi, 2048, cfg);
  auto f = [&](double x) {
    if (side == Side::Plus) return scale.log_prefix(x) + speed.log_suffix(x);
    return scale.log_suffix(x) + speed.log_prefix(x);
  };
  Interval scan = side == Side::Plus ? Interval{theta, theta + s_far} : Interval{theta - s_far, theta};
  return std::exp(sup_scan(f, scan, cfg).max);
}

double median(const Measure1D& m, const QuadConfig& cfg) {
  cfg.validate();
  Interval w = m.window();
  auto balance = [&](double x) { return m.log_cdf(x) - m.log_ccdf(x); };
  double tol = 1e-13 * std::max(1.0, w.hi - w.lo);
  return find_root(balance, w.lo + 1e-9 * (w.hi - w.lo), w.hi - 1e-9 * (w.hi - w.lo), tol);
}

Sandwich gap_sandwich_thm44(const Potential1D& p, const QuadConfig& cfg) {
  cfg.validate();
  Measure1D m(p, cfg);
  double med = median(m, cfg);
  double dp = half_line_delta(m, med, Side::Plus, cfg);
  double dm = half_line_delta(m, med, Side::Minus, cfg);
  double d = std::max(dp, dm);
  Sandwich out;
  for (BoundReport* r : {&out.lower, &out.upper}) {
    r->certified = false;
    r->diagnostics["median"] = med;
    r->diagnostics["delta_plus"] = dp;
    r->diagnostics["delta_minus"] = dm;
  }
  out.lower.direction = Direction::Lower;
  out.lower.method = "thm44_lower";
  out.lower.value = 1.0 / (4.0 * d);
  out.upper.direction = Direction::Upper;
  out.upper.method = "thm44_upper";
  out.upper.value = 2.0 / d;
  return out;
}

}  // namespace gapbound
