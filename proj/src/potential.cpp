#include "gapbound/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gapbound/error.hpp"

namespace gapbound {

namespace {

double quad(const RealFn& f, double a, double b) {
  QuadConfig c;
  c.rel_tol = 1e-13;
  return integrate_adaptive(f, a, b, c).value;
}

// Real roots of 4x^3 - 2 b1 x + b2 via the trigonometric / hyperbolic
// closed forms. The branch with cos(4pi/3 + ...) is the one that tends to 0
// as b2 -> 0.
double quartic_theta(double b1, double b2) {
  if (b2 == 0.0) return 0.0;
  if (b1 == 0.0) return -std::cbrt(b2 / 4.0);
  // The printed closed form takes C = b2 (3/(2|b1|))^{3/2}; with that sign it
  // returns a root of 4x^3 - 2 b1 x - b2. The root of u' needs -C.
  double c = -b2 * std::pow(3.0 / (2.0 * std::abs(b1)), 1.5);
  if (b1 < 0.0) return 2.0 * std::sqrt(-b1 / 6.0) * std::sinh(std::asinh(c) / 3.0);
  double s = 2.0 * std::sqrt(b1 / 6.0);
  if (std::abs(c) > 1.0) {
    double sg = c > 0 ? 1.0 : -1.0;
    return s * sg * std::cosh(std::acosh(sg * c) / 3.0);
  }
  return s * std::cos(4.0 * M_PI / 3.0 + std::acos(c) / 3.0);
}

double custom_theta(const Potential1D& p) {
  for (double span = 1.0; span <= 1.1e6; span *= 4.0) {
    const int n = 4000;
    double best = kInf;
    double best_lo = 0.0;
    double best_hi = 0.0;
    double prev_x = -span;
    double prev_v = p.du(prev_x);
    for (int k = 1; k <= n; ++k) {
      double x = -span + 2.0 * span * k / n;
      double v = p.du(x);
      if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "u' is not finite on the scan window");
      if (v == 0.0) return x;
      if ((prev_v < 0.0) != (v < 0.0)) {
        double mid = 0.5 * (prev_x + x);
        // Prefer a - to + crossing (a well), then the one nearest 0.
        double key = std::abs(mid) + (prev_v < 0.0 ? 0.0 : 1e12);
        if (key < best) {
          best = key;
          best_lo = prev_x;
          best_hi = x;
        }
      }
      prev_x = x;
      prev_v = v;
    }
    if (best < kInf) {
      return find_root([&](double x) { return p.du(x); }, best_lo, best_hi, 1e-14 * std::max(1.0, span));
    }
  }
  throw Error(ErrorKind::RootNotFound, "u' has no sign change on [-1e6, 1e6]");
}

// C(x) = int_0^x b/a tabulated on [-X, X] with Hermite interpolation.
struct CTable {
  double lo = 0.0;
  double hi = 0.0;
  double h = 0.0;
  std::vector<double> c;
  std::vector<double> dc;
};

CTable build_ctable(const Potential1D& p, double span, int cells) {
  CTable t;
  t.lo = -span;
  t.hi = span;
  t.h = 2.0 * span / cells;
  t.c.assign(cells + 1, 0.0);
  t.dc.assign(cells + 1, 0.0);
  auto ratio = [&](double x) { return p.drift(x) / p.a(x); };
  int mid = cells / 2;
  for (int k = 0; k <= cells; ++k) t.dc[k] = ratio(t.lo + t.h * k);
  for (int k = mid; k < cells; ++k) {
    double a = t.lo + t.h * k;
    t.c[k + 1] = t.c[k] + quad(ratio, a, a + t.h);
  }
  for (int k = mid; k > 0; --k) {
    double b = t.lo + t.h * k;
    t.c[k - 1] = t.c[k] - quad(ratio, b - t.h, b);
  }
  return t;
}

double ctable_eval(const CTable& t, const Potential1D& p, double x) {
  auto ratio = [&](double y) { return p.drift(y) / p.a(y); };
  if (x <= t.lo) return t.c.front() - quad(ratio, x, t.lo);
  if (x >= t.hi) return t.c.back() + quad(ratio, t.hi, x);
  int cells = static_cast<int>(t.c.size()) - 1;
  int k = std::min(cells - 1, static_cast<int>((x - t.lo) / t.h));
  double s = (x - (t.lo + t.h * k)) / t.h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  double h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s);
  double h11 = s * s * (s - 1);
  return h00 * t.c[k] + h10 * t.h * t.dc[k] + h01 * t.c[k + 1] + h11 * t.h * t.dc[k + 1];
}

}  // namespace

Potential1D Potential1D::quadratic(double alpha, double beta) {
  if (!(alpha > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    throw Error(ErrorKind::InvalidArgument, "quadratic potential needs alpha > 0 and finite beta");
  }
  Potential1D p;
  p.kind_ = Kind::Quadratic;
  p.p1_ = alpha;
  p.p2_ = beta;
  return p;
}

Potential1D Potential1D::quartic(double beta1, double beta2) {
  if (!std::isfinite(beta1) || !std::isfinite(beta2)) {
    throw Error(ErrorKind::InvalidArgument, "quartic potential needs finite beta1, beta2");
  }
  Potential1D p;
  p.kind_ = Kind::Quartic;
  p.p1_ = beta1;
  p.p2_ = beta2;
  return p;
}

Potential1D Potential1D::custom(RealFn u, RealFn du, RealFn d2u, const QuadConfig& cfg) {
  if (!u || !du || !d2u) throw Error(ErrorKind::InvalidArgument, "custom potential needs u, u', u''");
  Potential1D p;
  p.kind_ = Kind::Custom;
  p.p1_ = p.p2_ = 0.0;
  p.u_ = std::make_shared<const RealFn>(std::move(u));
  p.du_ = std::make_shared<const RealFn>(std::move(du));
  p.d2u_ = std::make_shared<const RealFn>(std::move(d2u));
  double u0 = p.u(0.0);
  try {
    integrate_log([&](double x) { return u0 - p.u(x); }, {-kInf, kInf}, cfg);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("e^{-u} is not integrable: ") + e.what());
  }
  return p;
}

Potential1D Potential1D::with_diffusion(RealFn a) const {
  if (!a) throw Error(ErrorKind::InvalidArgument, "diffusion coefficient is empty");
  for (double x : {-10.0, -1.0, 0.0, 1.0, 10.0}) {
    double v = a(x);
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(ErrorKind::InvalidArgument, "diffusion coefficient must be finite and positive");
  }
  Potential1D p = *this;
  p.a_ = std::make_shared<const RealFn>(std::move(a));
  return p;
}

std::string Potential1D::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind_) {
    case Kind::Quadratic:
      os << "quadratic(alpha=" << p1_ << ", beta=" << p2_ << ")";
      break;
    case Kind::Quartic:
      os << "quartic(beta1=" << p1_ << ", beta2=" << p2_ << ")";
      break;
    case Kind::Custom:
      os << "custom";
      break;
  }
  if (a_) os << " with diffusion a(x)";
  return os.str();
}

double Potential1D::u(double x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return p1_ * x * x + p2_ * x;
    case Kind::Quartic: {
      double x2 = x * x;
      return x2 * x2 - p1_ * x2 + p2_ * x;
    }
    case Kind::Custom:
      return (*u_)(x);
  }
  return 0.0;
}

double Potential1D::u_step(double x, double t) const {
  double y = x + t;
  double sum = 2.0 * x + t;
  switch (kind_) {
    case Kind::Quadratic:
      return t * (p1_ * sum + p2_);
    case Kind::Quartic:
      return t * (sum * (y * y + x * x) - p1_ * sum + p2_);
    case Kind::Custom:
      return (*u_)(y) - (*u_)(x);
  }
  return 0.0;
}

double Potential1D::du(double x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return 2.0 * p1_ * x + p2_;
    case Kind::Quartic:
      return 4.0 * x * x * x - 2.0 * p1_ * x + p2_;
    case Kind::Custom:
      return (*du_)(x);
  }
  return 0.0;
}

double Potential1D::d2u(double x) const {
  switch (kind_) {
    case Kind::Quadratic:
      return 2.0 * p1_;
    case Kind::Quartic:
      return 12.0 * x * x - 2.0 * p1_;
    case Kind::Custom:
      return (*d2u_)(x);
  }
  return 0.0;
}

double Potential1D::a(double x) const { return a_ ? (*a_)(x) : 1.0; }

double theta_root(const Potential1D& p) {
  switch (p.kind()) {
    case Potential1D::Kind::Quadratic:
      return -p.p2() / (2.0 * p.p1());
    case Potential1D::Kind::Quartic:
      return quartic_theta(p.p1(), p.p2());
    case Potential1D::Kind::Custom:
      return custom_theta(p);
  }
  return 0.0;
}

struct Measure1D::Impl {
  Impl(Potential1D pot, const QuadConfig& c) : p(std::move(pot)), cfg(c) {}

  Potential1D p;
  QuadConfig cfg;
  double u0 = 0.0;
  double theta = 0.0;
  Interval window{0.0, 0.0};
  double log_z = 0.0;
  std::shared_ptr<CTable> ctable;
  LogCumulative speed;

  double c(double x) const {
    if (ctable) return ctable_eval(*ctable, p, x);
    return u0 - p.u(x);
  }
  double log_speed(double x) const {
    if (ctable) return c(x) - std::log(p.a(x));
    return u0 - p.u(x);
  }
};

Measure1D::Measure1D(Potential1D p, const QuadConfig& cfg) {
  cfg.validate();
  auto impl = std::make_shared<Impl>(p, cfg);
  impl->u0 = p.u(0.0);
  impl->theta = theta_root(p);
  if (!p.unit_diffusion()) {
    // Grow the table until the speed density has decayed at both ends.
    for (double span = 8.0;; span *= 2.0) {
      if (span > 1e6) throw Error(ErrorKind::NonConvergent, "speed density does not decay within 1e6");
      auto t = std::make_shared<CTable>(build_ctable(p, span, 8192));
      double top = -kInf;
      for (std::size_t k = 0; k < t->c.size(); ++k)
        top = std::max(top, t->c[k] - std::log(p.a(t->lo + t->h * k)));
      double left = t->c.front() - std::log(p.a(t->lo));
      double right = t->c.back() - std::log(p.a(t->hi));
      if (left < top - cfg.truncation_log_drop - 5.0 && right < top - cfg.truncation_log_drop - 5.0) {
        impl->ctable = t;
        break;
      }
    }
  }
  const Impl& cref = *impl;
  RealFn ls = [&cref](double x) { return cref.log_speed(x); };
  impl->window = truncate_interval(ls, {-kInf, kInf}, cfg);
  if (impl->theta < impl->window.lo || impl->theta > impl->window.hi) {
    impl->window.lo = std::min(impl->window.lo, impl->theta - 1.0);
    impl->window.hi = std::max(impl->window.hi, impl->theta + 1.0);
  }
  Impl* raw = impl.get();
  impl->speed = LogCumulative([raw](double x) { return raw->log_speed(x); }, impl->window.lo, impl->window.hi,
                              2048, cfg);
  impl->log_z = impl->speed.log_total();
  impl_ = std::move(impl);
}

const Potential1D& Measure1D::potential() const { return impl_->p; }
const QuadConfig& Measure1D::config() const { return impl_->cfg; }
double Measure1D::log_z() const { return impl_->log_z; }
double Measure1D::theta() const { return impl_->theta; }
Interval Measure1D::window() const { return impl_->window; }
double Measure1D::c(double x) const { return impl_->c(x); }
double Measure1D::log_speed(double x) const { return impl_->log_speed(x); }
double Measure1D::log_scale(double x) const { return -impl_->c(x); }
double Measure1D::log_cdf(double x) const { return impl_->speed.log_prefix(x) - impl_->log_z; }
double Measure1D::log_ccdf(double x) const { return impl_->speed.log_suffix(x) - impl_->log_z; }

}  // namespace gapbound
