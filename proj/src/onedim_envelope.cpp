#include <algorithm>
#include <cmath>

#include "gapbound/error.hpp"
#include "gapbound/onedim.hpp"

namespace gapbound {

namespace {

double quad(const RealFn& f, double a, double b) {
  QuadConfig c;
  c.rel_tol = 1e-13;
  return integrate_adaptive(f, a, b, c).value;
}

constexpr int kGridCells = 4096;

struct SideResult {
  double value = 0.0;
  double s_star = 0.0;  // distance |r - theta| of r+ or r-
  double f = 0.0;       // S(r)
  bool limit_branch = false;
  bool no_positive_k = false;
};

double position(double theta, Side side, double s) { return side == Side::Plus ? theta + s : theta - s; }

// Solves K(r) Phi(r) = 1 on the side, or takes the far limit when the product
// stays below 1.
SideResult solve_side(const KEnvelope& env) {
  SideResult out;
  double th = env.theta();
  auto at = [&](double s) { return position(th, env.side(), s); };
  double k_far;
  if (env.representation() == KEnvelope::Representation::ClosedFormQuartic) {
    k_far = kInf;
  } else if (env.representation() == KEnvelope::Representation::Constant) {
    k_far = env(at(1.0));
  } else {
    k_far = env.grid_values().back();
  }
  if (!(k_far > 0.0)) {
    out.no_positive_k = true;
    return out;
  }
  auto product = [&](double s) { return env(at(s)) * env.phi(at(s)); };
  double s_hi = 1.0;
  while (product(s_hi) <= 1.0) {
    s_hi *= 2.0;
    if (s_hi > 1e12) {
      out.limit_branch = true;
      out.s_star = kInf;
      out.f = env.stieltjes(at(s_hi));
      out.value = env(at(s_hi)) * std::exp(-out.f);
      return out;
    }
  }
  double s = find_root([&](double t) { return product(t) - 1.0; }, 0.0, s_hi, 1e-15 * s_hi);
  out.s_star = s;
  out.f = env.stieltjes(at(s));
  out.value = env(at(s)) * std::exp(-out.f);
  return out;
}

}  // namespace

std::string_view to_string(Side s) noexcept { return s == Side::Plus ? "plus" : "minus"; }
std::string_view to_string(Direction d) noexcept { return d == Direction::Lower ? "lower" : "upper"; }

std::size_t KEnvelope::cell(double s) const {
  std::size_t n = s_.size() - 1;
  if (s >= s_[n]) return n;
  return std::min(n, static_cast<std::size_t>(s / s_[1]));
}

double KEnvelope::k_at(double s) const {
  switch (rep_) {
    case Representation::Constant:
      return konst_;
    case Representation::ClosedFormQuartic: {
      if (symmetric_) return 4.0 * s * s + konst_;
      double t = std::max(s, s0_);
      return t * t + konst_;
    }
    case Representation::GridEnvelope:
      return k_[cell(s)];
  }
  return 0.0;
}

double KEnvelope::phi_at(double s) const {
  if (p_.unit_diffusion()) return 0.5 * s * s;
  auto integrand = [&](double t) { return t / p_.a(position(theta_, side_, t)); };
  if (s_.empty()) return quad(integrand, 0.0, s);
  std::size_t n = s_.size() - 1;
  if (s >= s_[n]) return phi_node_[n] + (s > s_[n] ? quad(integrand, s_[n], s) : 0.0);
  double h = s_[1];
  std::size_t k = std::min(n - 1, static_cast<std::size_t>(s / h));
  return phi_node_[k] + (s > s_[k] ? quad(integrand, s_[k], s) : 0.0);
}

double KEnvelope::s_at(double s) const {
  switch (rep_) {
    case Representation::Constant:
      return 0.0;
    case Representation::ClosedFormQuartic: {
      if (symmetric_) return s * s * s * s;
      double t = std::max(s, s0_);
      return 0.25 * (t * t * t * t - s0_ * s0_ * s0_ * s0_);
    }
    case Representation::GridEnvelope:
      return s_prefix_[cell(s)];
  }
  return 0.0;
}

double KEnvelope::operator()(double r) const { return k_at(std::abs(r - theta_)); }
double KEnvelope::phi(double r) const { return phi_at(std::abs(r - theta_)); }
double KEnvelope::stieltjes(double r) const { return s_at(std::abs(r - theta_)); }

KEnvelope k_envelope(const Potential1D& p, double theta, Side side, const QuadConfig& cfg) {
  KEnvelope env;
  env.side_ = side;
  env.theta_ = theta;
  env.p_ = p;
  double scale = 1.0 + std::abs(p.du(theta + 1.0)) + std::abs(p.du(theta - 1.0));
  if (!(std::abs(p.du(theta)) <= 1e-8 * scale)) {
    throw Error(ErrorKind::InvalidArgument, "theta is not a root of u'");
  }
  if (p.unit_diffusion() && p.kind() == Potential1D::Kind::Quadratic) {
    env.rep_ = KEnvelope::Representation::Constant;
    env.konst_ = 2.0 * p.p1();
    return env;
  }
  if (p.unit_diffusion() && p.kind() == Potential1D::Kind::Quartic) {
    env.rep_ = KEnvelope::Representation::ClosedFormQuartic;
    env.konst_ = -2.0 * p.p1();
    if (p.p2() == 0.0 && theta == 0.0) {
      env.symmetric_ = true;
    } else {
      // K = (r - theta)^2 - 2 beta1 beyond r - theta = -3 theta/2, constant
      // 9 theta^2/4 - 2 beta1 before it.
      env.s0_ = std::max(0.0, side == Side::Plus ? -1.5 * theta : 1.5 * theta);
    }
    return env;
  }

  env.rep_ = KEnvelope::Representation::GridEnvelope;
  Measure1D m(p, cfg);
  Interval w = m.window();
  double extent = side == Side::Plus ? w.hi - theta : theta - w.lo;
  if (!(extent > 0.0)) extent = 1.0;
  env.extent_ = extent;
  const int n = kGridCells;
  double h = extent / n;
  env.s_.resize(n + 1);
  env.k_.resize(n + 1);
  // K is the step function k_j on [s_j, s_{j+1}), k_j the minimum of -b/(x - theta)
  // over the nodes from j outward, so it stays below the ratio inside each cell
  // wherever the ratio is monotone there.
  std::vector<double> g(n + 1);
  g[0] = p.d2u(theta);
  for (int k = 0; k <= n; ++k) {
    env.s_[k] = h * k;
    if (k > 0) {
      double x = position(theta, side, env.s_[k]);
      g[k] = p.du(x) / (x - theta);
    }
    if (!std::isfinite(g[k])) throw Error(ErrorKind::NonFinite, "-b/(x - theta) is not finite on the grid");
  }
  env.k_[n] = g[n];
  for (int k = n - 1; k >= 0; --k) env.k_[k] = std::min(g[k], env.k_[k + 1]);

  env.phi_node_.assign(n + 1, 0.0);
  if (p.unit_diffusion()) {
    for (int k = 0; k <= n; ++k) env.phi_node_[k] = 0.5 * env.s_[k] * env.s_[k];
  } else {
    auto integrand = [&](double t) { return t / p.a(position(theta, side, t)); };
    for (int k = 0; k < n; ++k) env.phi_node_[k + 1] = env.phi_node_[k] + quad(integrand, env.s_[k], env.s_[k + 1]);
  }
  // int Phi dK is a sum over the jumps of K.
  env.s_prefix_.assign(n + 1, 0.0);
  for (int k = 1; k <= n; ++k)
    env.s_prefix_[k] = env.s_prefix_[k - 1] + env.phi_node_[k] * (env.k_[k] - env.k_[k - 1]);
  return env;
}

BoundReport gap_lower_thm41(const Potential1D& p, const QuadConfig& cfg) {
  cfg.validate();
  double theta = theta_root(p);
  BoundReport rep;
  rep.direction = Direction::Lower;
  rep.method = "thm41";
  rep.diagnostics["theta"] = theta;
  bool certified = true;
  double best = kInf;
  for (Side side : {Side::Plus, Side::Minus}) {
    KEnvelope env = k_envelope(p, theta, side, cfg);
    if (env.representation() == KEnvelope::Representation::GridEnvelope) certified = false;
    SideResult r = solve_side(env);
    std::string tag(to_string(side));
    if (r.no_positive_k) {
      rep.notes.push_back("K <= 0 on the whole " + tag + " side; bound is 0");
      rep.diagnostics["no_positive_k_" + tag] = 1.0;
    }
    double pos = std::isfinite(r.s_star) ? position(theta, side, r.s_star) : (side == Side::Plus ? kInf : -kInf);
    rep.diagnostics["r_" + tag] = pos;
    rep.diagnostics["F_" + tag] = r.f;
    rep.diagnostics["value_" + tag] = r.value;
    rep.diagnostics["limit_branch_" + tag] = r.limit_branch ? 1.0 : 0.0;
    if (std::isfinite(r.s_star)) {
      rep.diagnostics["product_" + tag] = env(pos) * env.phi(pos);
    }
    best = std::min(best, r.value);
  }
  rep.value = std::max(0.0, best);
  rep.certified = certified;
  return rep;
}

BoundReport closed_form_quartic(double beta1, QuarticCase c) {
  if (!std::isfinite(beta1)) throw Error(ErrorKind::InvalidArgument, "beta1 must be finite");
  BoundReport rep;
  rep.direction = Direction::Lower;
  rep.certified = true;
  double b = beta1;
  if (c == QuarticCase::UniformInBeta2) {
    double r = std::sqrt(b * b + 2.0);
    rep.method = "quartic_uniform";
    rep.value = (r - b) / std::sqrt(M_E) * std::exp(-0.5 * b * (b + r));
  } else {
    double r = std::sqrt(b * b + 8.0);
    rep.method = "quartic_symmetric";
    rep.value = (r - b) / std::sqrt(M_E) * std::exp(-b * (b + r) / 8.0);
  }
  rep.diagnostics["beta1"] = beta1;
  return rep;
}

double variational_lower_testfn(const Potential1D& p, double theta, Side side, const TestFunction* tf,
                                const QuadConfig& cfg) {
  cfg.validate();
  Measure1D m(p, cfg);
  Interval w = m.window();
  double s_far = side == Side::Plus ? w.hi - theta : theta - w.lo;
  if (!(s_far > 0.0)) throw Error(ErrorKind::InvalidArgument, "theta lies outside the support window");
  double s_ext = 1.5 * s_far;
  auto at = [&](double s) { return position(theta, side, s); };

  RealFn abs_f;
  RealFn df;
  // Tabulated default test function; kept alive for the lambdas below.
  std::vector<double> fs, dfs;
  double cell = 0.0;
  if (tf) {
    if (!tf->f || !tf->df) throw Error(ErrorKind::InvalidTestFunction, "test function or derivative missing");
    abs_f = [tf](double x) { return std::abs(tf->f(x)); };
    df = tf->df;
  } else {
    KEnvelope env = k_envelope(p, theta, side, cfg);
    SideResult r = solve_side(env);
    if (r.no_positive_k) return 0.0;
    double s_star = std::min(r.s_star, s_ext);
    double k_star = env(at(s_star));
    auto big_f = [&](double s) {
      double t = std::min(s, s_star);
      return (k_star - env(at(t))) * env.phi(at(t)) + env.stieltjes(at(t));
    };
    const int n = kGridCells;
    cell = s_ext / n;
    fs.assign(n + 1, 0.0);
    dfs.assign(n + 1, 1.0);
    for (int k = 0; k <= n; ++k) dfs[k] = std::exp(-big_f(cell * k));
    for (int k = 0; k < n; ++k) {
      auto g = [&](double s) { return std::exp(-big_f(s)); };
      fs[k + 1] = fs[k] + quad(g, cell * k, cell * (k + 1));
    }
    auto interp = [fs, dfs, cell, n](double s, bool deriv) {
      if (s <= 0.0) return deriv ? dfs[0] : 0.0;
      if (s >= cell * n) {
        double slope = dfs[n];
        return deriv ? slope : fs[n] + slope * (s - cell * n);
      }
      int k = std::min(n - 1, static_cast<int>(s / cell));
      double t = (s - cell * k) / cell;
      if (deriv) {
        double d00 = 6 * t * t - 6 * t, d10 = 3 * t * t - 4 * t + 1, d01 = -d00, d11 = 3 * t * t - 2 * t;
        return (d00 * fs[k] + d01 * fs[k + 1]) / cell + d10 * dfs[k] + d11 * dfs[k + 1];
      }
      double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
      double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
      return h00 * fs[k] + h10 * cell * dfs[k] + h01 * fs[k + 1] + h11 * cell * dfs[k + 1];
    };
    abs_f = [interp, theta](double x) { return interp(std::abs(x - theta), false); };
    df = [interp, theta](double x) { return interp(std::abs(x - theta), true); };
  }

  double lo = side == Side::Plus ? theta : theta - s_ext;
  double hi = side == Side::Plus ? theta + s_ext : theta;
  LogCumulative tail(
      [&](double x) {
        double v = abs_f(x);
        return (v > 0.0 ? std::log(v) : -kInf) + m.log_speed(x);
      },
      lo, hi, 2048, cfg);
  auto log_i = [&](double x) {
    double d = df(x);
    if (!(d > 0.0)) throw Error(ErrorKind::InvalidTestFunction, "f' <= 0 on the evaluation grid");
    double lt = side == Side::Plus ? tail.log_suffix(x) : tail.log_prefix(x);
    return -m.c(x) - std::log(d) + lt;
  };
  Interval scan = side == Side::Plus ? Interval{theta, theta + s_far} : Interval{theta - s_far, theta};
  ScanResult sr = sup_scan(log_i, scan, cfg);
  return std::exp(-sr.max);
}

}  // namespace gapbound
