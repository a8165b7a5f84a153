#include "gapbound/matbound.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gapbound/error.hpp"

namespace gapbound {

namespace {

void check_offdiag(const Eigen::MatrixXd& m, Eigen::Index n) {
  if (m.rows() != n || m.cols() != n) throw Error(ErrorKind::InvalidArgument, "offdiag must be n x n");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m(i, i) != 0.0) throw Error(ErrorKind::InvalidArgument, "offdiag must have a zero diagonal");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(m(i, j))) throw Error(ErrorKind::NonFinite, "offdiag entry is not finite");
      if (m(i, j) < 0.0) throw Error(ErrorKind::InvalidArgument, "offdiag entries must be >= 0");
      if (std::abs(m(i, j) - m(j, i)) > 1e-12 * std::max(1.0, std::abs(m(i, j))))
        throw Error(ErrorKind::NonSymmetric, "offdiag is not symmetric");
    }
  }
}

Eigen::MatrixXd coupled(const Eigen::VectorXd& diag, const Eigen::MatrixXd& offdiag) {
  Eigen::MatrixXd m = -offdiag;
  m.diagonal() = diag;
  return m;
}

bool connected(const Eigen::MatrixXd& offdiag) {
  const Eigen::Index n = offdiag.rows();
  if (n == 0) return true;
  std::vector<char> seen(n, 0);
  std::vector<Eigen::Index> stack{0};
  seen[0] = 1;
  Eigen::Index count = 1;
  while (!stack.empty()) {
    Eigen::Index i = stack.back();
    stack.pop_back();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!seen[j] && offdiag(i, j) > 0.0) {
        seen[j] = 1;
        ++count;
        stack.push_back(j);
      }
    }
  }
  return count == n;
}

BoundReport lower(std::string method, double value) {
  BoundReport r;
  r.value = value;
  r.direction = Direction::Lower;
  r.method = std::move(method);
  r.certified = true;
  return r;
}

}  // namespace

void TildeHessSpec::validate() const {
  if (eta.size() == 0) throw Error(ErrorKind::InvalidArgument, "spec needs at least one site");
  for (Eigen::Index i = 0; i < eta.size(); ++i)
    if (!std::isfinite(eta(i))) throw Error(ErrorKind::NonFinite, "eta is not finite");
  check_offdiag(offdiag, eta.size());
}

EigenPair lambda_min_sym(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw Error(ErrorKind::InvalidArgument, "matrix must be square and nonempty");
  if (!m.allFinite()) throw Error(ErrorKind::NonFinite, "matrix has non-finite entries");
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw Error(ErrorKind::NonSymmetric, "matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::EigensolveFailure, "symmetric eigensolver failed");
  EigenPair out{es.eigenvalues()(0), es.eigenvectors().col(0)};
  if (out.vector.sum() < 0.0) out.vector = -out.vector;
  return out;
}

BoundReport tilde_hess_bound(const TildeHessSpec& spec) {
  spec.validate();
  return lower("tilde_hess", lambda_min_sym(coupled(spec.eta, spec.offdiag)).value);
}

BoundReport weighted_bound(const TildeHessSpec& spec, const std::optional<Eigen::VectorXd>& w_in) {
  spec.validate();
  const int n = spec.n();
  Eigen::VectorXd w;
  BoundReport rep = lower("weighted", 0.0);
  if (w_in) {
    w = *w_in;
    if (w.size() != n) throw Error(ErrorKind::InvalidArgument, "weights must have length n");
    for (int i = 0; i < n; ++i)
      if (!(w(i) > 0.0) || !std::isfinite(w(i))) throw Error(ErrorKind::NonPositiveWeights, "weights must be > 0");
  } else {
    Eigen::VectorXd s = spec.eta - spec.offdiag.rowwise().sum();
    double s_floor = s.minCoeff();
    Eigen::VectorXd q = spec.eta.array() - s_floor;
    bool ok = connected(spec.offdiag);
    if (ok) {
      w = lambda_min_sym(coupled(q, spec.offdiag)).vector;
      ok = (w.array() > 0.0).all();
    }
    if (!ok) {
      w = Eigen::VectorXd::Ones(n);
      rep.notes.push_back("coupling matrix reducible; weights set to 1");
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) row += spec.offdiag(i, j) * w(j);
    best = std::min(best, spec.eta(i) - row / w(i));
  }
  rep.value = best;
  return rep;
}

double h_gamma(const TildeHessSpec& spec, double gamma) {
  spec.validate();
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw Error(ErrorKind::InvalidArgument, "gamma must be >= 0");
  const int n = spec.n();
  if (n > kExhaustiveLimit) throw Error(ErrorKind::TooLarge, "exhaustive subset search is capped at 20 sites");
  Eigen::VectorXd s = spec.eta - spec.offdiag.rowwise().sum();
  double s_floor = s.minCoeff();
  Eigen::VectorXd q = spec.eta.array() - s_floor;
  Eigen::VectorXd d = s.array() - s_floor;

  auto ratio = [&](double num, double den) {
    if (num == 0.0) return 0.0;
    double p = std::pow(den, gamma);
    if (!(p > 0.0)) throw Error(ErrorKind::DegenerateQ, "q vanishes under a nonzero term");
    return num / p;
  };
  std::vector<double> dterm(n);
  for (int i = 0; i < n; ++i) dterm[i] = ratio(d(i), q(i));
  Eigen::MatrixXd cross(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cross(i, j) = i == j ? 0.0 : ratio(spec.offdiag(i, j), std::max(q(i), q(j)));

  // Walk subsets in Gray-code order, updating the numerator by one flip.
  const std::uint32_t total = std::uint32_t{1} << n;
  std::vector<char> in(n, 0);
  double num = 0.0;
  int size = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t k = 1; k < total; ++k) {
    int i = __builtin_ctz(k);
    double link_in = 0.0, link_out = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      (in[j] ? link_in : link_out) += cross(i, j);
    }
    if (!in[i]) {
      in[i] = 1;
      ++size;
      num += dterm[i] + link_out - link_in;
    } else {
      in[i] = 0;
      --size;
      num -= dterm[i] + link_out - link_in;
    }
    if (size > 0) best = std::min(best, std::max(0.0, num) / size);
  }
  return best;
}

CheegerData cheeger_data(const TildeHessSpec& spec) {
  spec.validate();
  CheegerData c;
  c.s = spec.eta - spec.offdiag.rowwise().sum();
  c.s_floor = c.s.minCoeff();
  c.q = spec.eta.array() - c.s_floor;
  c.d = c.s.array() - c.s_floor;
  c.h_half = h_gamma(spec, 0.5);
  c.h_one = h_gamma(spec, 1.0);
  return c;
}

BoundReport thm12_bound(const TildeHessSpec& spec) {
  CheegerData c = cheeger_data(spec);
  BoundReport rep = lower("thm12", 0.0);
  double h1 = c.h_one;
  if (h1 > 1.0) {
    rep.notes.push_back("h^(1) exceeds 1; clamped to 1");
    rep.diagnostics["h_one_raw"] = h1;
    h1 = 1.0;
  }
  rep.diagnostics["s_floor"] = c.s_floor;
  rep.diagnostics["h_half"] = c.h_half;
  rep.diagnostics["h_one"] = h1;
  rep.value = c.s_floor + c.h_half * c.h_half / (1.0 + std::sqrt(1.0 - h1 * h1));
  return rep;
}

BoundReport logsob_matrix_bound(const Eigen::VectorXd& sigma_floors, const Eigen::MatrixXd& offdiag_sups) {
  TildeHessSpec spec{sigma_floors, offdiag_sups};
  spec.validate();
  return lower("logsob_matrix", lambda_min_sym(coupled(sigma_floors, offdiag_sups)).value);
}

}  // namespace gapbound
