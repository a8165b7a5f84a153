#include "gapbound/numkernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cstdint>
#include <queue>
#include <sstream>

#include "gapbound/error.hpp"

namespace gapbound {

namespace {

using GK = boost::math::quadrature::gauss_kronrod<double, 15>;

constexpr int kSamplesPerPiece = 16;
constexpr int kPieces = 16;

bool bad_log(double v) { return std::isnan(v) || v == kInf; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_interval(Interval iv) {
  if (std::isnan(iv.lo) || std::isnan(iv.hi) || !(iv.lo < iv.hi)) {
    throw Error(ErrorKind::InvalidInterval, "need lo < hi, got [" + fmt(iv.lo) + ", " + fmt(iv.hi) + "]");
  }
}

double eval_log(const RealFn& g, double x) {
  double v = g(x);
  if (bad_log(v)) throw Error(ErrorKind::NonFinite, "log-integrand is " + fmt(v) + " at x = " + fmt(x));
  return v;
}

struct Panel {
  double a, b, value, error, l1;
  bool operator<(const Panel& o) const { return error < o.error; }
};

// One G7/K15 panel. Boost's rule reports its error on the reference interval
// [-1, 1], so it is rescaled here.
Panel gk_panel(const RealFn& f, double a, double b) {
  double err = 0.0;
  double l1 = 0.0;
  double v = GK::integrate(f, a, b, 0, 1.0, &err, &l1);
  return {a, b, v, err * 0.5 * (b - a), l1};
}

// Integral of exp(g - shift) over a finite [a, b].
double shifted_integral(const RealFn& g, double shift, double a, double b, const QuadConfig& cfg) {
  RealFn f = [&](double x) {
    double v = g(x);
    if (bad_log(v)) throw Error(ErrorKind::NonFinite, "log-integrand is " + fmt(v) + " at x = " + fmt(x));
    return std::exp(v - shift);
  };
  QuadConfig c = cfg;
  c.abs_tol = cfg.abs_tol > 0.0 ? cfg.abs_tol * std::exp(-shift) : 0.0;
  return integrate_adaptive(f, a, b, c).value;
}

// Walks outward from `anchor` in direction `dir` until g has dropped `drop`
// below max(running, g seen so far), then bisects for the crossing.
double find_cut(const RealFn& g, double anchor, int dir, double& running_max, double drop) {
  double step = 1.0;
  double prev = anchor;
  double side_max = eval_log(g, anchor);
  running_max = std::max(running_max, side_max);
  for (int it = 0; it < 80; ++it) {
    double next = anchor + dir * step;
    double step_max = -kInf;
    for (int k = 1; k <= 32; ++k) {
      double x = prev + (next - prev) * k / 32.0;
      step_max = std::max(step_max, eval_log(g, x));
    }
    // A step that still climbs cannot end the support, whatever the target.
    bool rose = step_max > side_max;
    side_max = std::max(side_max, step_max);
    running_max = std::max(running_max, step_max);
    double target = running_max - drop;
    double gn = eval_log(g, next);
    if (gn < target && !rose) {
      // The last sample below target; bisect on g - target between the last
      // sample above it and `next`.
      // Look back through this step and the one before it.
      double back = it <= 1 ? anchor : anchor + dir * step * 0.25;
      double a = anchor;
      for (int k = 63; k >= 0; --k) {
        double x = k >= 32 ? prev + (next - prev) * (k - 32) / 32.0 : back + (prev - back) * k / 32.0;
        if (eval_log(g, x) >= target) {
          a = x;
          break;
        }
      }
      double b = next;
      for (int k = 0; k < 200 && std::abs(b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++k) {
        double m = 0.5 * (a + b);
        if (eval_log(g, m) >= target)
          a = m;
        else
          b = m;
      }
      return b;
    }
    prev = next;
    step *= 2.0;
    if (step > 1e12) break;
  }
  // Identically zero integrand: any cut is exact.
  if (running_max == -kInf) return anchor + dir;
  throw Error(ErrorKind::NonConvergent, "integrand does not decay; truncation point not found");
}

}  // namespace

void QuadConfig::validate() const {
  if (!(rel_tol > 0.0) || !std::isfinite(rel_tol))
    throw Error(ErrorKind::InvalidArgument, "rel_tol must be positive");
  if (!(abs_tol >= 0.0) || !std::isfinite(abs_tol))
    throw Error(ErrorKind::InvalidArgument, "abs_tol must be non-negative");
  if (max_refinements < 0) throw Error(ErrorKind::InvalidArgument, "max_refinements must be >= 0");
  if (!(truncation_log_drop > 0.0)) throw Error(ErrorKind::InvalidArgument, "truncation_log_drop must be positive");
  if (scan_points < 8) throw Error(ErrorKind::InvalidArgument, "scan_points must be >= 8");
  if (!(scan_rel_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "scan_rel_tol must be positive");
  if (!(scan_span > 0.0)) throw Error(ErrorKind::InvalidArgument, "scan_span must be positive");
}

LogValue LogValue::from_value(double v) {
  if (v == 0.0) return {};
  return {std::log(std::abs(v)), v > 0 ? 1 : -1};
}

LogValue operator*(LogValue a, LogValue b) {
  if (a.sign == 0 || b.sign == 0) return {};
  return {a.log_magnitude + b.log_magnitude, a.sign * b.sign};
}

LogValue operator+(LogValue a, LogValue b) {
  if (a.sign == 0) return b;
  if (b.sign == 0) return a;
  if (a.log_magnitude < b.log_magnitude) std::swap(a, b);
  double r = std::exp(b.log_magnitude - a.log_magnitude);
  if (a.sign == b.sign) return {a.log_magnitude + std::log1p(r), a.sign};
  if (r == 1.0) return {};
  return {a.log_magnitude + std::log1p(-r), a.sign};
}

double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

Interval truncate_interval(const RealFn& g, Interval iv, const QuadConfig& cfg) {
  cfg.validate();
  check_interval(iv);
  if (std::isfinite(iv.lo) && std::isfinite(iv.hi)) return iv;
  double drop = cfg.truncation_log_drop;
  double running = -kInf;
  if (std::isfinite(iv.lo)) {
    return {iv.lo, find_cut(g, iv.lo, +1, running, drop)};
  }
  if (std::isfinite(iv.hi)) {
    return {find_cut(g, iv.hi, -1, running, drop), iv.hi};
  }
  // Both ends open: iterate until the shared maximum is stable.
  double hi = find_cut(g, 0.0, +1, running, drop);
  double lo = find_cut(g, 0.0, -1, running, drop);
  double seen = running;
  hi = find_cut(g, 0.0, +1, running, drop);
  if (running > seen) lo = find_cut(g, 0.0, -1, running, drop);
  return {lo, hi};
}

QuadResult integrate_adaptive(const RealFn& f, double a, double b, const QuadConfig& cfg) {
  std::priority_queue<Panel> heap;
  Panel first = gk_panel(f, a, b);
  double value = first.value;
  double error = first.error;
  double l1 = first.l1;
  heap.push(first);
  int splits = 0;
  auto done = [&] { return error <= std::max(cfg.abs_tol, cfg.rel_tol * l1) || error == 0.0; };
  while (!done()) {
    if (splits >= cfg.max_refinements) {
      throw Error(ErrorKind::NonConvergent, "adaptive quadrature on [" + fmt(a) + ", " + fmt(b) +
                                                "] stopped with error " + fmt(error) + " after " +
                                                std::to_string(splits) + " bisections");
    }
    Panel p = heap.top();
    double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) break;  // panel at rounding resolution
    heap.pop();
    Panel left = gk_panel(f, p.a, mid);
    Panel right = gk_panel(f, mid, p.b);
    value += left.value + right.value - p.value;
    error += left.error + right.error - p.error;
    l1 += left.l1 + right.l1 - p.l1;
    heap.push(left);
    heap.push(right);
    ++splits;
    // Rebuild the sums now and then; the running updates drift.
    if (splits % 64 == 0) {
      auto copy = heap;
      value = error = l1 = 0.0;
      while (!copy.empty()) {
        value += copy.top().value;
        error += copy.top().error;
        l1 += copy.top().l1;
        copy.pop();
      }
    }
  }
  if (!std::isfinite(value)) throw Error(ErrorKind::NonFinite, "quadrature produced a non-finite value");
  return {value, error, l1};
}

LogValue integrate_weighted(const RealFn& factor, const RealFn& log_weight, Interval iv,
                            const QuadConfig& cfg) {
  cfg.validate();
  check_interval(iv);
  Interval w = truncate_interval(log_weight, iv, cfg);
  const int n = kPieces * kSamplesPerPiece;
  double shift = -kInf;
  for (int k = 0; k <= n; ++k) {
    double x = w.lo + (w.hi - w.lo) * k / n;
    shift = std::max(shift, eval_log(log_weight, x));
  }
  if (shift == -kInf) return LogValue::zero();
  auto f = [&](double x) {
    double v = log_weight(x);
    if (bad_log(v)) throw Error(ErrorKind::NonFinite, "log-weight is " + fmt(v) + " at x = " + fmt(x));
    double fx = factor(x);
    if (!std::isfinite(fx)) throw Error(ErrorKind::NonFinite, "factor is " + fmt(fx) + " at x = " + fmt(x));
    return fx * std::exp(v - shift);
  };
  QuadConfig c = cfg;
  c.abs_tol = cfg.abs_tol > 0.0 ? cfg.abs_tol * std::exp(-shift) : 0.0;
  double total = 0.0;
  for (int p = 0; p < kPieces; ++p) {
    double a = w.lo + (w.hi - w.lo) * p / kPieces;
    double b = w.lo + (w.hi - w.lo) * (p + 1) / kPieces;
    total += integrate_adaptive(f, a, b, c).value;
  }
  LogValue out = LogValue::from_value(total);
  if (out.sign != 0) out.log_magnitude += shift;
  return out;
}

LogValue integrate_log(const RealFn& g, Interval iv, const QuadConfig& cfg) {
  cfg.validate();
  check_interval(iv);
  Interval w = truncate_interval(g, iv, cfg);
  const int n = kPieces * kSamplesPerPiece;
  double shift = -kInf;
  for (int k = 0; k <= n; ++k) {
    double x = w.lo + (w.hi - w.lo) * k / n;
    shift = std::max(shift, eval_log(g, x));
  }
  if (shift == -kInf) return LogValue::zero();
  double total = 0.0;
  for (int p = 0; p < kPieces; ++p) {
    double a = w.lo + (w.hi - w.lo) * p / kPieces;
    double b = w.lo + (w.hi - w.lo) * (p + 1) / kPieces;
    total += shifted_integral(g, shift, a, b, cfg);
  }
  if (!(total > 0.0)) return LogValue::zero();
  return {std::log(total) + shift, 1};
}

double find_root(const RealFn& f, double lo, double hi, double tol) {
  if (std::isnan(lo) || std::isnan(hi) || !(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::InvalidInterval, "root bracket must be finite with lo < hi");
  }
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "root tolerance must be positive");
  double flo = f(lo);
  double fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi))
    throw Error(ErrorKind::NonFinite, "function is not finite at the bracket ends");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    throw Error(ErrorKind::NoSignChange, "f(" + fmt(lo) + ") = " + fmt(flo) + " and f(" + fmt(hi) +
                                             ") = " + fmt(fhi) + " have the same sign");
  }
  auto checked = [&](double x) {
    double v = f(x);
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "function is " + fmt(v) + " at " + fmt(x));
    return v;
  };
  auto done = [tol](double a, double b) {
    double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b));
    return std::abs(b - a) <= std::max(tol, floor);
  };
  std::uintmax_t iters = 400;
  auto r = boost::math::tools::toms748_solve(checked, lo, hi, flo, fhi, done, iters);
  if (!done(r.first, r.second)) {
    throw Error(ErrorKind::RootNotFound, "bracket did not shrink below " + fmt(tol));
  }
  return 0.5 * (r.first + r.second);
}

ScanResult sup_scan(const RealFn& f, Interval domain, const QuadConfig& cfg) {
  cfg.validate();
  check_interval(domain);
  const int n = cfg.scan_points;
  std::vector<double> xs;
  xs.reserve(2 * n + 2);
  auto graded = [&](double origin, double dir, double span, int count) {
    // origin + dir * span * 10^(-6 .. 0)
    for (int k = 0; k < count; ++k) {
      double t = span * std::pow(10.0, -6.0 + 6.0 * k / (count - 1));
      xs.push_back(origin + dir * t);
    }
  };
  bool lo_fin = std::isfinite(domain.lo);
  bool hi_fin = std::isfinite(domain.hi);
  if (lo_fin && hi_fin) {
    double w = domain.hi - domain.lo;
    graded(domain.lo, +1.0, w, n / 2);
    graded(domain.hi, -1.0, w, n / 2);
    for (int k = 0; k <= n; ++k) xs.push_back(domain.lo + w * k / n);
  } else if (lo_fin) {
    graded(domain.lo, +1.0, cfg.scan_span, n);
  } else if (hi_fin) {
    graded(domain.hi, -1.0, cfg.scan_span, n);
  } else {
    graded(0.0, +1.0, cfg.scan_span, n / 2);
    graded(0.0, -1.0, cfg.scan_span, n / 2);
    xs.push_back(0.0);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  // Keep strictly interior points on a closed finite end only when they are
  // inside the domain; endpoints themselves are valid samples.
  xs.erase(std::remove_if(xs.begin(), xs.end(), [&](double x) { return x < domain.lo || x > domain.hi; }),
           xs.end());

  std::size_t best = 0;
  double best_val = -kInf;
  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v = f(xs[i]);
    if (std::isnan(v) || v == kInf) {
      throw Error(ErrorKind::NonFinite, "scanned function is " + fmt(v) + " at x = " + fmt(xs[i]));
    }
    vals[i] = v;
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  ScanResult out{xs[best], best_val};
  if (best_val == -kInf) return out;
  double a = xs[best > 0 ? best - 1 : best];
  double b = xs[best + 1 < xs.size() ? best + 1 : best];
  if (b > a) {
    int bits = std::max(8, static_cast<int>(-std::log2(cfg.scan_rel_tol)) + 2);
    std::uintmax_t iters = 200;
    auto neg = [&](double x) {
      double v = f(x);
      if (std::isnan(v) || v == kInf) throw Error(ErrorKind::NonFinite, "scanned function is not finite");
      return -v;
    };
    auto r = boost::math::tools::brent_find_minima(neg, a, b, bits, iters);
    if (-r.second > out.max) out = {r.first, -r.second};
  }
  return out;
}

LogCumulative::LogCumulative(RealFn g, double lo, double hi, int cells, const QuadConfig& cfg)
    : g_(std::move(g)), cfg_(cfg), lo_(lo), hi_(hi) {
  cfg.validate();
  check_interval({lo, hi});
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorKind::InvalidInterval, "cumulative table needs a finite range");
  if (cells < 1) throw Error(ErrorKind::InvalidArgument, "cells must be >= 1");
  width_ = (hi - lo) / cells;
  std::vector<double> cell(cells);
  for (int k = 0; k < cells; ++k) {
    double a = lo + width_ * k;
    double b = (k + 1 == cells) ? hi : lo + width_ * (k + 1);
    cell[k] = log_cell_part(k, a, b);
  }
  prefix_.assign(cells + 1, -kInf);
  suffix_.assign(cells + 1, -kInf);
  for (int k = 0; k < cells; ++k) prefix_[k + 1] = log_add_exp(prefix_[k], cell[k]);
  for (int k = cells - 1; k >= 0; --k) suffix_[k] = log_add_exp(suffix_[k + 1], cell[k]);
}

double LogCumulative::log_cell_part(int, double a, double b) const {
  if (!(b > a)) return -kInf;
  double shift = -kInf;
  for (int k = 0; k <= 4; ++k) shift = std::max(shift, eval_log(g_, a + (b - a) * k / 4.0));
  if (shift == -kInf) return -kInf;
  double v = shifted_integral(g_, shift, a, b, cfg_);
  if (!(v > 0.0)) return -kInf;
  return std::log(v) + shift;
}

double LogCumulative::log_prefix(double x) const {
  if (x <= lo_) return -kInf;
  if (x >= hi_) return prefix_.back();
  int cells = static_cast<int>(prefix_.size()) - 1;
  int k = std::min(cells - 1, static_cast<int>((x - lo_) / width_));
  double xk = lo_ + width_ * k;
  return log_add_exp(prefix_[k], log_cell_part(k, xk, x));
}

double LogCumulative::log_suffix(double x) const {
  if (x >= hi_) return -kInf;
  if (x <= lo_) return suffix_.front();
  int cells = static_cast<int>(prefix_.size()) - 1;
  int k = std::min(cells - 1, static_cast<int>((x - lo_) / width_));
  double xk1 = (k + 1 == cells) ? hi_ : lo_ + width_ * (k + 1);
  return log_add_exp(log_cell_part(k, x, xk1), suffix_[k + 1]);
}

}  // namespace gapbound
