#pragma once

// Matrix lower bounds for the spectral gap and log-Sobolev constant of
// multidimensional diffusions, built from scalar marginal gaps and
// worst-case mixed second derivatives.

#include <optional>

#include <Eigen/Dense>

#include "gapbound/onedim.hpp"

namespace gapbound {

struct TildeHessSpec {
  Eigen::VectorXd eta;      // marginal gap floors
  Eigen::MatrixXd offdiag;  // sup |d_ij U|, symmetric, zero diagonal

  int n() const { return static_cast<int>(eta.size()); }
  void validate() const;
};

struct EigenPair {
  double value;
  Eigen::VectorXd vector;
};

// Smallest eigenvalue of a symmetric matrix and a unit eigenvector.
EigenPair lambda_min_sym(const Eigen::MatrixXd& m);

BoundReport tilde_hess_bound(const TildeHessSpec& spec);

// min_i (eta_i - sum_j offdiag_ij w_j / w_i). Without w the Perron vector of
// diag(eta - s_floor) - offdiag is used.
BoundReport weighted_bound(const TildeHessSpec& spec, const std::optional<Eigen::VectorXd>& w = std::nullopt);

struct CheegerData {
  Eigen::VectorXd s, q, d;
  double s_floor = 0.0;
  double h_half = 0.0;
  double h_one = 0.0;
};

inline constexpr int kExhaustiveLimit = 20;

double h_gamma(const TildeHessSpec& spec, double gamma);
CheegerData cheeger_data(const TildeHessSpec& spec);
BoundReport thm12_bound(const TildeHessSpec& spec);

BoundReport logsob_matrix_bound(const Eigen::VectorXd& sigma_floors, const Eigen::MatrixXd& offdiag_sups);

}  // namespace gapbound
