#pragma once

// Nearest-neighbour continuous spin systems on finite boxes of Z^d.

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include "gapbound/matbound.hpp"

namespace gapbound {

using Site = std::vector<int>;

struct LatticeModel {
  enum class SiteKind { Gaussian, Quartic };  // alpha x^2  |  x^4 - beta x^2
  enum class Hamiltonian { Quadratic, Bilinear };  // J sum (x_i - x_j)^2  |  -2J sum x_i x_j
  enum class Boundary { External, Periodic, Free };  // Free: no bonds leave the box

  int d = 1;
  std::vector<Site> box;
  double J = 0.0;
  Boundary boundary = Boundary::External;
  std::function<double(const Site&)> omega;  // External only
  SiteKind site = SiteKind::Gaussian;
  double site_param = 1.0;  // alpha or beta
  Hamiltonian hamiltonian = Hamiltonian::Quadratic;

  // {0..L-1}^d with the given boundary; omega defaults to 0 for External.
  static LatticeModel cube(int d, int L, double J, SiteKind site, double site_param, Hamiltonian h,
                           Boundary b = Boundary::External);

  void validate() const;
  double u(double x) const;
};

// Bonds of the model, one entry per bond <i, j> of the lattice (or torus).
struct BondList {
  std::vector<std::pair<int, int>> inner;  // both ends in the box (indices)
  std::vector<std::pair<int, Site>> outer; // box index, outside site
};
BondList bonds(const LatticeModel& m);

double conditional_potential(const LatticeModel& m, const std::vector<double>& x);
// Same, with the bond list precomputed; omega is read at each outer bond.
double conditional_potential(const LatticeModel& m, const BondList& b, const std::vector<double>& x);
double marginal_eta(const LatticeModel& m);
TildeHessSpec lattice_spec(const LatticeModel& m);
BoundReport system_bound(const LatticeModel& m);

// (sqrt(b^2+8) - b)/sqrt(e) exp[-b(b + sqrt(b^2+8))/8]
double quartic_marginal(double beta);
// Gamma(3/4)/Gamma(1/4) + b/(2 + 4 Gamma(1/4)/(9(1+b)Gamma(3/4))), b >= 0
double remark64_factor(double beta);
BoundReport refined_bound_remark64(double beta, int d, double J);

struct RegionScan {
  enum class Kind { Eq69, Eq610, Eq611 };
  Kind kind = Kind::Eq69;
  std::vector<double> beta_grid, r_grid;
  std::vector<std::vector<double>> value;  // [beta][r]
  std::vector<std::vector<bool>> positivity;
  std::vector<std::pair<double, double>> boundary_curve;  // (beta, r*)
};

double region_bound(RegionScan::Kind kind, double beta, double r);
RegionScan region_scan(RegionScan::Kind kind, Interval beta_range, Interval r_range, int grid_n, int threads = 1);
// Same on explicit increasing grids.
RegionScan region_scan(RegionScan::Kind kind, std::vector<double> beta_grid, std::vector<double> r_grid,
                       int threads = 1);
void write_region_csv(const RegionScan& s, std::ostream& os);
void write_region_svg(const RegionScan& s, std::ostream& os);

struct BoundaryRatio {
  double ratio;
  double cube_value;  // 2d/L when the box is a cube, NaN otherwise
};
BoundaryRatio min_boundary_ratio(const std::vector<Site>& box);

// Reflection-coupling rate for U = sum (x_i^4 - beta x_i^2) + interaction,
// via the radial profile C(r) = -r^4/(16 N) + beta r^2/4.
class CouplingProfile {
 public:
  CouplingProfile(int lambda_size, double beta, const QuadConfig& cfg = {});

  int lambda_size() const { return n_; }
  double beta() const { return beta_; }
  double c(double r) const;
  double log_phi(double r) const;  // log int_0^r e^{-C}
  double log_f(double r) const;    // log int_0^r e^{-C(s)} int_s^inf e^C sqrt(phi) ds
  double f(double r) const { return std::exp(log_f(r)); }
  double epsilon() const { return eps_; }
  double epsilon_floor() const { return floor_; }
  double argmin() const { return argmin_; }
  double radius() const { return radius_; }

 private:
  struct Tables;
  int n_;
  double beta_;
  double radius_ = 0.0;
  double eps_ = 0.0;
  double floor_ = 0.0;
  double argmin_ = 0.0;
  std::shared_ptr<const Tables> t_;
};

CouplingProfile coupling_rate(int lambda_size, double beta, const QuadConfig& cfg = {});

}  // namespace gapbound
