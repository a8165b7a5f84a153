#include "gapbound/logsob.hpp"

#include <algorithm>
#include <cmath>

#include "gapbound/error.hpp"

namespace gapbound {

namespace {
constexpr int kGammaCells = 4096;
}

GammaProfile::GammaProfile(const Potential1D& p, const QuadConfig& cfg) {
  if (p.kind() == Potential1D::Kind::Quadratic) {
    rep_ = Representation::Constant;
    c_ = 2.0 * p.p1();
    return;
  }
  if (p.kind() == Potential1D::Kind::Quartic) {
    rep_ = Representation::Quartic;
    c_ = p.p1();
    return;
  }
  rep_ = Representation::Grid;
  Measure1D m(p, cfg);
  Interval w = m.window();
  double radius = std::max(std::abs(w.lo), std::abs(w.hi));
  const int n = kGammaCells;
  h_ = radius / n;
  g_.assign(n + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    double r = h_ * k;
    g_[k] = std::min(p.d2u(r), p.d2u(-r));
    if (!std::isfinite(g_[k])) throw Error(ErrorKind::NonFinite, "u'' is not finite on the grid");
  }
  for (int k = n - 1; k >= 0; --k) g_[k] = std::min(g_[k], g_[k + 1]);
  // Step profile: g_k on [k h, (k + 1) h).
  int_.assign(n + 1, 0.0);
  mom_.assign(n + 1, 0.0);
  for (int k = 0; k < n; ++k) {
    double a = h_ * k, b = a + h_;
    int_[k + 1] = int_[k] + h_ * g_[k];
    mom_[k + 1] = mom_[k] + g_[k] * 0.5 * (b * b - a * a);
  }
}

std::size_t GammaProfile::cell(double r) const {
  std::size_t n = g_.size() - 1;
  if (r >= h_ * static_cast<double>(n)) return n;
  return std::min(n, static_cast<std::size_t>(r / h_));
}

double GammaProfile::operator()(double r) const {
  r = std::abs(r);
  switch (rep_) {
    case Representation::Constant:
      return c_;
    case Representation::Quartic:
      return 12.0 * r * r - 2.0 * c_;
    case Representation::Grid:
      return g_[cell(r)];
  }
  return 0.0;
}

double GammaProfile::sup() const {
  switch (rep_) {
    case Representation::Constant:
      return c_;
    case Representation::Quartic:
      return kInf;
    case Representation::Grid:
      return g_.back();
  }
  return 0.0;
}

double GammaProfile::integral(double a) const {
  switch (rep_) {
    case Representation::Constant:
      return c_ * a;
    case Representation::Quartic:
      return 4.0 * a * a * a - 2.0 * c_ * a;
    case Representation::Grid: {
      std::size_t k = cell(a);
      return int_[k] + g_[k] * (a - h_ * static_cast<double>(k));
    }
  }
  return 0.0;
}

double GammaProfile::moment(double a) const {
  switch (rep_) {
    case Representation::Constant:
      return 0.5 * c_ * a * a;
    case Representation::Quartic:
      return 3.0 * a * a * a * a - c_ * a * a;
    case Representation::Grid: {
      std::size_t k = cell(a);
      double x0 = h_ * static_cast<double>(k);
      return mom_[k] + g_[k] * 0.5 * (a * a - x0 * x0);
    }
  }
  return 0.0;
}

BoundReport logsob_lower_lemma51(const Potential1D& p, const QuadConfig& cfg) {
  cfg.validate();
  BoundReport rep;
  rep.direction = Direction::Lower;
  rep.method = "lemma51";
  rep.certified = p.kind() != Potential1D::Kind::Custom;
  GammaProfile gamma(p, cfg);
  if (!(gamma.sup() > 0.0)) {
    rep.value = 0.0;
    rep.notes.push_back("lemma inapplicable: sup gamma <= 0");
    rep.diagnostics["gamma_sup"] = gamma.sup();
    return rep;
  }
  auto eq = [&](double a) { return a * gamma.integral(a) - 2.0; };
  double hi = 1.0;
  while (eq(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e12) throw Error(ErrorKind::RootNotFound, "a * int gamma never reaches 2");
  }
  double a0 = find_root(eq, 0.0, hi, 1e-15 * hi);
  rep.value = 2.0 * M_E / (a0 * a0) * std::exp(-gamma.moment(a0));
  rep.diagnostics["a0"] = a0;
  rep.diagnostics["moment"] = gamma.moment(a0);
  return rep;
}

double logsob_quartic_cases(double beta1) {
  if (!std::isfinite(beta1)) throw Error(ErrorKind::InvalidArgument, "beta1 must be finite");
  double v;
  if (beta1 < 0.0) {
    v = -2.0 * beta1 + 2.0 / (std::sqrt(M_E / 2.0) - beta1);
  } else if (beta1 == 0.0) {
    v = 2.0 * std::sqrt(2.0 / M_E);
  } else {
    v = std::exp(-beta1 * beta1 / 4.0) / (std::sqrt(M_E / 8.0) + beta1);
  }
  double full = logsob_lower_lemma51(Potential1D::quartic(beta1, 0.0)).value;
  if (v > full + 1e-12) {
    throw Error(ErrorKind::NonFinite, "simplified quartic case exceeds the lemma value");
  }
  return v;
}

Prop14 prop14_sandwich(double beta1) {
  if (!(beta1 >= 0.0) || !std::isfinite(beta1)) throw Error(ErrorKind::InvalidArgument, "beta1 must be >= 0");
  double r = std::sqrt(beta1 * beta1 + 8.0);
  Prop14 out;
  out.upper = 4.0 * std::exp(14.0 - beta1 * beta1 / 4.0 + 2.0 * std::log1p(beta1));
  out.lower = (r - beta1) / std::sqrt(M_E) * std::exp(-beta1 * (beta1 + r) / 8.0);
  if (!(out.upper >= out.lower)) throw Error(ErrorKind::NonFinite, "Prop 1.4 sandwich is inverted");
  return out;
}

double prop14_delta_upper(double beta1, const QuadConfig& cfg) {
  Sandwich s = gap_sandwich_thm44(Potential1D::quartic(beta1, 0.0), cfg);
  return s.upper.value;
}

}  // namespace gapbound
