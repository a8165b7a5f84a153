#pragma once

// Brute-force reference values: discretized generators, integration-by-parts
// identities and a reflection-coupling simulation.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gapbound/spin.hpp"

namespace gapbound {

struct OracleValue {
  double value;   // Richardson-extrapolated when both levels are available
  double coarse;  // n points
  double fine;    // 2n - 1 points
};

// Conductance discretization of L on a uniform grid: masses e^{C}/a at the
// nodes, conductances e^{C} at the midpoints. Neumann at both ends.
struct Tridiagonal {
  std::vector<double> grid;
  std::vector<double> diag, offdiag;  // symmetrized matrix
  std::vector<double> log_mass;       // unnormalized
};
Tridiagonal discretize_1d(const Measure1D& m, Interval range, int n);

// Smallest `count` eigenvalues of a symmetric tridiagonal matrix.
std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag, const std::vector<double>& offdiag,
                                            int count);

// Second eigenvalue of the Neumann discretization on T (default: the measure
// window).
OracleValue gap_1d(const Potential1D& p, std::optional<Interval> T = std::nullopt, int n = 2001,
                   const QuadConfig& cfg = {});

// Principal eigenvalue on the half-line beyond theta, killed at theta and
// reflected at the far truncation end.
OracleValue dirichlet_gap_halfline(const Potential1D& p, double theta, Side side,
                                   std::optional<double> far = std::nullopt, int n = 2001,
                                   const QuadConfig& cfg = {});

struct NdOptions {
  double half_width = 0.0;  // 0: chosen from log_drop
  int points = 0;           // per axis; 0: 4001 / 301 / 31 for 1 / 2 / 3 sites
  double log_drop = 30.0;
  int max_nodes = 300000;
  int dense_below = 500;
};

struct NdResult {
  double value;
  double residual;
  double half_width;
  int points;
};

// Second eigenvalue of exp(-U) for a lattice model with at most 3 sites on a
// product grid [-T, T]^N.
NdResult gap_nd(const LatticeModel& m, const NdOptions& opt = {});

struct SmoothFn {
  RealFn f, df, d2f;
};

struct L2Identity {
  double lhs;        // int (Lf)^2 dmu
  double rhs;        // int (f'')^2 + u'' f'^2 dmu
  double dirichlet;  // int f'^2 dmu
  double lambda1;    // oracle gap
  bool poincare_holds;
};
L2Identity check_L2_identity(const Potential1D& p, const SmoothFn& f, const QuadConfig& cfg = {});

struct SpectralIdentity {
  double ratio_min;  // min ||A f||^2 / f^T A f over f orthogonal to the null vector
  double lambda1;    // second eigenvalue
};
SpectralIdentity discrete_spectral_identity(const Potential1D& p, int n = 160, const QuadConfig& cfg = {});

struct CouplingSimConfig {
  double step = 1e-3;
  double horizon = 1.0;
  int paths = 2000;
  std::uint64_t seed = 1;
  double J = 0.0;
  int record_every = 10;
  int threads = 1;
  double coalesce_tol = 1e-6;
  void validate() const;
};

struct DecaySeries {
  std::vector<double> t, mean_f, stderr_f;
  double f0 = 0.0;  // f(|x0 - y0|)
};

// Reflection coupling of dX = b(X) dt + sqrt(2) dW on a ring of lambda_size
// sites, b_i = -4x_i^3 + 2 beta x_i - 2J sum_{j~i}(x_i - x_j); f is the
// coupling_rate profile.
DecaySeries coupling_sim(const CouplingProfile& prof, const std::vector<double>& x0, const std::vector<double>& y0,
                         const CouplingSimConfig& cfg);
void write_decay_csv(const DecaySeries& s, std::ostream& os);

// Counter-based standard normal: splitmix64 of (seed, path, step, component),
// Box-Muller on the resulting pair of uniforms.
double counter_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint64_t component);

}  // namespace gapbound
