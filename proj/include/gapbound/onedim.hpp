#pragma once

// One-dimensional spectral gap bounds for L = a d^2 + b d.

#include <map>
#include <string>
#include <vector>

#include "gapbound/numkernel.hpp"
#include "gapbound/potential.hpp"

namespace gapbound {

enum class Side { Plus, Minus };
enum class Direction { Lower, Upper };

std::string_view to_string(Side s) noexcept;
std::string_view to_string(Direction d) noexcept;

struct BoundReport {
  double value = 0.0;
  Direction direction = Direction::Lower;
  std::string method;
  bool certified = false;  // closed form rather than numeric
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;
};

// Nondecreasing minorant K(r) of -b(x)/(x - theta) on one half-line, with
// Phi(r) = int_theta^r (t - theta)/a(t) dt and S(r) = int_theta^r Phi dK.
class KEnvelope {
 public:
  enum class Representation { Constant, ClosedFormQuartic, GridEnvelope };

  Side side() const { return side_; }
  double theta() const { return theta_; }
  Representation representation() const { return rep_; }

  // All three take a position r on the envelope's half-line.
  double operator()(double r) const;
  double phi(double r) const;
  double stieltjes(double r) const;

  // Distance from theta covered by the grid (infinite for closed forms).
  double extent() const { return extent_; }
  const std::vector<double>& grid_distances() const { return s_; }
  const std::vector<double>& grid_values() const { return k_; }

 private:
  friend KEnvelope k_envelope(const Potential1D&, double, Side, const QuadConfig&);

  std::size_t cell(double s) const;
  double k_at(double s) const;
  double phi_at(double s) const;
  double s_at(double s) const;

  Side side_ = Side::Plus;
  double theta_ = 0.0;
  Representation rep_ = Representation::Constant;
  double extent_ = kInf;
  double konst_ = 0.0;  // Constant: the value; ClosedFormQuartic: -2 beta1
  double s0_ = 0.0;     // ClosedFormQuartic: distance where K starts to grow
  bool symmetric_ = false;
  Potential1D p_ = Potential1D::quadratic(1.0, 0.0);
  // Grid: distances s_k, step values k_k, Phi at nodes, S at nodes.
  std::vector<double> s_, k_, phi_node_, s_prefix_;
};

KEnvelope k_envelope(const Potential1D& p, double theta, Side side, const QuadConfig& cfg = {});

BoundReport gap_lower_thm41(const Potential1D& p, const QuadConfig& cfg = {});

enum class QuarticCase { UniformInBeta2, Symmetric };
BoundReport closed_form_quartic(double beta1, QuarticCase c);

// sup over the half-line of phi_theta(x) * int_x^{+-inf} e^C/a.
double half_line_delta(const Measure1D& m, double theta, Side side, const QuadConfig& cfg = {});

double median(const Measure1D& m, const QuadConfig& cfg = {});

struct Sandwich {
  BoundReport lower;
  BoundReport upper;
};
Sandwich gap_sandwich_thm44(const Potential1D& p, const QuadConfig& cfg = {});

struct TestFunction {
  RealFn f;
  RealFn df;
};

// inf over the half-line of 1/I(f)(x); with no test function the
// construction f(x) = int_theta^x exp[-F(y ^ r)] dy from the K envelope is used.
double variational_lower_testfn(const Potential1D& p, double theta, Side side,
                                const TestFunction* f = nullptr, const QuadConfig& cfg = {});

struct Criterion {
  bool holds = false;
  double value = 0.0;  // +inf when divergent
};
struct Ergodicity {
  Criterion logsob;
  Criterion strong;
  Criterion nash;
};
// Half-line [theta, inf) criteria for the log-Sobolev inequality, strong
// ergodicity and the Nash inequality of order nu > 2. Needs a == 1.
Ergodicity ergodicity_criteria(const Potential1D& p, double nu, const QuadConfig& cfg = {});

struct PerturbationSide {
  double k1 = 0.0, k2 = 0.0, k3 = 0.0, k4 = 0.0;
  double delta = 0.0;
  double bound = 0.0;  // delta + k2 k3 + k1 k4 + k4 k3, +inf when unavailable
};
struct Perturbation {
  PerturbationSide plus;
  PerturbationSide minus;
};
// Base measure e^{C} with C = -u (a == 1) perturbed to e^{C + h}.
Perturbation perturbation_bound(const Potential1D& base, const RealFn& h, double theta,
                                const QuadConfig& cfg = {});

}  // namespace gapbound
