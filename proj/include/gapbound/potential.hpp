#pragma once

#include <memory>
#include <string>

#include "gapbound/numkernel.hpp"

namespace gapbound {

// Generator L = a d^2/dx^2 + b d/dx with b = -u'. The reversible measure is
// mu(dx) = e^{C(x)} / (Z a(x)) dx with C(x) = int_0^x b/a.
class Potential1D {
 public:
  enum class Kind { Quadratic, Quartic, Custom };

  // u = alpha x^2 + beta x, alpha > 0.
  static Potential1D quadratic(double alpha, double beta);
  // u = x^4 - beta1 x^2 + beta2 x.
  static Potential1D quartic(double beta1, double beta2);
  // u, u', u'' supplied by the caller; integrability of e^{-u} is checked.
  static Potential1D custom(RealFn u, RealFn du, RealFn d2u, const QuadConfig& cfg = {});

  // Same potential with diffusion coefficient a (continuous, a > 0).
  Potential1D with_diffusion(RealFn a) const;

  Kind kind() const { return kind_; }
  bool unit_diffusion() const { return !a_; }
  double p1() const { return p1_; }  // alpha or beta1
  double p2() const { return p2_; }  // beta or beta2
  std::string describe() const;

  double u(double x) const;
  // u(x + t) - u(x), computed from t directly for the closed-form kinds so
  // that tiny steps far out keep their relative accuracy.
  double u_step(double x, double t) const;
  double du(double x) const;
  double d2u(double x) const;
  double a(double x) const;
  double drift(double x) const { return -du(x); }

 private:
  Potential1D() = default;

  Kind kind_ = Kind::Quadratic;
  double p1_ = 1.0;
  double p2_ = 0.0;
  std::shared_ptr<const RealFn> u_, du_, d2u_;
  std::shared_ptr<const RealFn> a_;
};

// A real root of u'.
double theta_root(const Potential1D& p);

// Normalized reversible measure of a Potential1D together with the
// truncation window used by every quadrature over it.
class Measure1D {
 public:
  explicit Measure1D(Potential1D p, const QuadConfig& cfg = {});

  const Potential1D& potential() const;
  const QuadConfig& config() const;
  double log_z() const;
  double theta() const;
  // Where log(e^C/a) is within truncation_log_drop of its maximum.
  Interval window() const;

  double c(double x) const;          // C(x) = int_0^x b/a
  double log_speed(double x) const;  // C(x) - log a(x)
  double log_scale(double x) const;  // -C(x)

  // log mu(-inf, x] and log mu[x, inf).
  double log_cdf(double x) const;
  double log_ccdf(double x) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace gapbound
