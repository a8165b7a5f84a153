#pragma once

// Log-domain quadrature, bracketed root refinement and supremum scanning.
//
// Every exponential weight in this library (e^{±u}, e^{±C}) is handled as a
// log-integrand: integrals are evaluated relative to the integrand's maximum
// and returned as a LogValue, so quartic potentials never overflow.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace gapbound {

using RealFn = std::function<double(double)>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct QuadConfig {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  // Maximum number of interval bisections in one adaptive integral.
  int max_refinements = 2000;
  // Semi-infinite ranges are cut where the log-integrand has fallen this far
  // below its running maximum.
  double truncation_log_drop = 60.0;
  // sup_scan grid size and relative tolerance of the local refinement.
  int scan_points = 2048;
  double scan_rel_tol = 1e-8;
  // Extent used by sup_scan on an infinite side of the domain.
  double scan_span = 1e3;

  void validate() const;
};

// sign * exp(log_magnitude); sign == 0 encodes an exact zero.
struct LogValue {
  double log_magnitude = -kInf;
  int sign = 0;

  static LogValue zero() { return {}; }
  static LogValue from_value(double v);
  static LogValue from_log(double log_magnitude) { return {log_magnitude, 1}; }

  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
};

LogValue operator*(LogValue a, LogValue b);
LogValue operator+(LogValue a, LogValue b);

// log(e^a + e^b) without overflow.
double log_add_exp(double a, double b);

struct Interval {
  double lo;
  double hi;
};

struct QuadResult {
  double value;
  double error;
  double l1;  // integral of |f|
};

// Globally adaptive G7/K15 on a finite [a, b]: the panel with the largest
// error estimate is bisected until error <= max(abs_tol, rel_tol * l1).
// Throws NonConvergent when max_refinements bisections do not suffice.
QuadResult integrate_adaptive(const RealFn& f, double a, double b, const QuadConfig& cfg);

// log of the integral of exp(log_integrand) over `interval` (ends may be
// infinite).
LogValue integrate_log(const RealFn& log_integrand, Interval interval, const QuadConfig& cfg);

// Integral of factor(x) * exp(log_weight(x)); factor may change sign.
LogValue integrate_weighted(const RealFn& factor, const RealFn& log_weight, Interval interval,
                            const QuadConfig& cfg);

// Replaces infinite ends by the point where log_integrand has dropped
// cfg.truncation_log_drop below its maximum. Throws NonConvergent when the
// integrand does not decay.
Interval truncate_interval(const RealFn& log_integrand, Interval interval, const QuadConfig& cfg);

// Bracketed root; the returned point lies in a final bracket of width <= tol.
double find_root(const RealFn& f, double lo, double hi, double tol);

struct ScanResult {
  double argmax;
  double max;
};

// Dense log-graded grid scan from the finite end of `domain` followed by a
// local Brent refinement around the best cell.
ScanResult sup_scan(const RealFn& f, Interval domain, const QuadConfig& cfg);

// Tabulated cumulative integrals of exp(log_integrand) on a finite [lo, hi].
// Both the running integral from lo and the tail integral to hi are stored in
// the log domain, so tails stay accurate long after they drop below the
// rounding level of the total.
class LogCumulative {
 public:
  LogCumulative() = default;
  LogCumulative(RealFn log_integrand, double lo, double hi, int cells, const QuadConfig& cfg);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double log_total() const { return prefix_.back(); }

  // log of the integral over [lo, x] and [x, hi]; x is clamped to the range.
  double log_prefix(double x) const;
  double log_suffix(double x) const;

 private:
  double log_cell_part(int cell, double a, double b) const;

  RealFn g_;
  QuadConfig cfg_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double width_ = 0.0;
  std::vector<double> prefix_;  // prefix_[k]: log integral over [lo, x_k]
  std::vector<double> suffix_;  // suffix_[k]: log integral over [x_k, hi]
};

}  // namespace gapbound
