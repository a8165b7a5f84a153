#pragma once

// Log-Sobolev constant lower bounds.

#include <vector>

#include "gapbound/onedim.hpp"

namespace gapbound {

// gamma(r) = inf_{|x| >= r} u''(x), nondecreasing in r.
class GammaProfile {
 public:
  enum class Representation { Constant, Quartic, Grid };

  explicit GammaProfile(const Potential1D& p, const QuadConfig& cfg = {});

  Representation representation() const { return rep_; }
  double operator()(double r) const;
  double sup() const;
  // int_0^a gamma and int_0^a r gamma(r) dr.
  double integral(double a) const;
  double moment(double a) const;

 private:
  std::size_t cell(double r) const;

  Representation rep_ = Representation::Constant;
  double c_ = 0.0;  // Constant: 2 alpha; Quartic: beta1
  double h_ = 0.0;
  std::vector<double> g_;
  std::vector<double> int_, mom_;
};

BoundReport logsob_lower_lemma51(const Potential1D& p, const QuadConfig& cfg = {});

// Simplified three-case value for u = x^4 - beta1 x^2 + beta2 x.
double logsob_quartic_cases(double beta1);

struct Prop14 {
  double upper;
  double lower;
};
Prop14 prop14_sandwich(double beta1);

// Checks the upper half of the sandwich through delta at the median:
// returns 2 / max(delta_m+, delta_m-) for u = x^4 - beta1 x^2, which must not
// exceed prop14_sandwich(beta1).upper.
double prop14_delta_upper(double beta1, const QuadConfig& cfg = {});

}  // namespace gapbound
