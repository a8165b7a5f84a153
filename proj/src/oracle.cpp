#include "gapbound/oracle.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "gapbound/error.hpp"

namespace gapbound {

namespace {

// Symmetrized tridiagonal matrix from node log-masses and midpoint
// log-conductances (already divided by h).
void assemble(const std::vector<double>& log_mass, const std::vector<double>& log_cond, double left_cond,
              std::vector<double>& diag, std::vector<double>& off) {
  const std::size_t n = log_mass.size();
  diag.assign(n, 0.0);
  off.assign(n > 0 ? n - 1 : 0, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    diag[k] += std::exp(log_cond[k] - log_mass[k]);
    diag[k + 1] += std::exp(log_cond[k] - log_mass[k + 1]);
    off[k] = -std::exp(log_cond[k] - 0.5 * (log_mass[k] + log_mass[k + 1]));
  }
  if (n > 0 && left_cond > -kInf) diag[0] += std::exp(left_cond - log_mass[0]);
}

double richardson(double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; }

}  // namespace

Tridiagonal discretize_1d(const Measure1D& m, Interval range, int n) {
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "grid needs at least 3 points");
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || !(range.lo < range.hi))
    throw Error(ErrorKind::InvalidInterval, "grid range must be finite with lo < hi");
  const double h = (range.hi - range.lo) / (n - 1);
  Tridiagonal t;
  t.grid.resize(n);
  t.log_mass.resize(n);
  std::vector<double> log_cond(n - 1);
  for (int k = 0; k < n; ++k) {
    t.grid[k] = range.lo + h * k;
    double w = (k == 0 || k == n - 1) ? 0.5 * h : h;
    t.log_mass[k] = m.log_speed(t.grid[k]) + std::log(w);
  }
  for (int k = 0; k + 1 < n; ++k) log_cond[k] = m.c(range.lo + h * (k + 0.5)) - std::log(h);
  assemble(t.log_mass, log_cond, -kInf, t.diag, t.offdiag);
  return t;
}

std::vector<double> tridiagonal_eigenvalues(const std::vector<double>& diag, const std::vector<double>& offdiag,
                                            int count) {
  const lapack_int n = static_cast<lapack_int>(diag.size());
  if (n < 1 || count < 1 || count > n || offdiag.size() + 1 != diag.size())
    throw Error(ErrorKind::InvalidArgument, "bad tridiagonal eigenvalue request");
  for (double v : diag)
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "tridiagonal diagonal is not finite");
  for (double v : offdiag)
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "tridiagonal off-diagonal is not finite");
  std::vector<double> w(n);
  std::vector<lapack_int> iblock(n), isplit(n);
  lapack_int found = 0, nsplit = 0;
  lapack_int info = LAPACKE_dstebz('I', 'E', n, 0.0, 0.0, 1, count, 2.0 * DBL_MIN, diag.data(), offdiag.data(),
                                   &found, &nsplit, w.data(), iblock.data(), isplit.data());
  if (info != 0 || found < count)
    throw Error(ErrorKind::EigensolveFailure, "dstebz failed with info " + std::to_string(info));
  w.resize(count);
  std::sort(w.begin(), w.end());
  return w;
}

OracleValue gap_1d(const Potential1D& p, std::optional<Interval> T, int n, const QuadConfig& cfg) {
  Measure1D m(p, cfg);
  Interval range = T ? *T : m.window();
  auto level = [&](int pts) {
    Tridiagonal t = discretize_1d(m, range, pts);
    return tridiagonal_eigenvalues(t.diag, t.offdiag, 2)[1];
  };
  OracleValue out;
  out.coarse = level(n);
  out.fine = level(2 * n - 1);
  out.value = richardson(out.coarse, out.fine);
  return out;
}

OracleValue dirichlet_gap_halfline(const Potential1D& p, double theta, Side side, std::optional<double> far, int n,
                                   const QuadConfig& cfg) {
  if (n < 3) throw Error(ErrorKind::InvalidArgument, "grid needs at least 3 points");
  Measure1D m(p, cfg);
  Interval w = m.window();
  double span = far ? *far : (side == Side::Plus ? w.hi - theta : theta - w.lo);
  if (!(span > 0.0) || !std::isfinite(span)) throw Error(ErrorKind::InvalidInterval, "half-line range is empty");
  const double dir = side == Side::Plus ? 1.0 : -1.0;
  auto level = [&](int pts) {
    const double h = span / (pts - 1);
    // Unknowns at k = 1..pts-1; node 0 is pinned to zero.
    std::vector<double> log_mass(pts - 1), log_cond(pts - 2);
    for (int k = 1; k < pts; ++k) {
      double wk = k == pts - 1 ? 0.5 * h : h;
      log_mass[k - 1] = m.log_speed(theta + dir * h * k) + std::log(wk);
    }
    for (int k = 1; k + 1 < pts; ++k) log_cond[k - 1] = m.c(theta + dir * h * (k + 0.5)) - std::log(h);
    double left = m.c(theta + dir * 0.5 * h) - std::log(h);
    std::vector<double> diag, off;
    assemble(log_mass, log_cond, left, diag, off);
    return tridiagonal_eigenvalues(diag, off, 1)[0];
  };
  OracleValue out;
  out.coarse = level(n);
  out.fine = level(2 * n - 1);
  out.value = richardson(out.coarse, out.fine);
  return out;
}

NdResult gap_nd(const LatticeModel& m, const NdOptions& opt) {
  m.validate();
  const int N = static_cast<int>(m.box.size());
  if (N > 3) throw Error(ErrorKind::TooLarge, "the lattice oracle handles at most 3 sites");
  if (!(opt.log_drop > 0.0) || opt.max_nodes < 9) throw Error(ErrorKind::InvalidArgument, "bad oracle options");
  BondList b = bonds(m);
  std::vector<double> x(N);
  auto U = [&](const std::vector<double>& v) { return conditional_potential(m, b, v); };

  // Half-width: the box face must sit log_drop above the minimum.
  double T = opt.half_width;
  if (T <= 0.0) {
    const int probe = N == 1 ? 401 : N == 2 ? 101 : 31;
    for (T = 1.0;; T *= 1.25) {
      if (T > 1e4) throw Error(ErrorKind::NonConvergent, "potential does not confine the lattice oracle");
      double umin = kInf, face = kInf;
      long total = 1;
      for (int k = 0; k < N; ++k) total *= probe;
      for (long idx = 0; idx < total; ++idx) {
        long r = idx;
        bool on_face = false;
        for (int k = 0; k < N; ++k) {
          int c = static_cast<int>(r % probe);
          r /= probe;
          on_face = on_face || c == 0 || c == probe - 1;
          x[k] = -T + 2.0 * T * c / (probe - 1);
        }
        double u = U(x);
        umin = std::min(umin, u);
        if (on_face) face = std::min(face, u);
      }
      if (face - umin >= opt.log_drop) break;
    }
  }
  int n = opt.points;
  if (n <= 0) {
    // Sparse Cholesky fill grows quickly with dimension; these keep each
    // solve within a few seconds.
    const int cap = N == 1 ? 4001 : N == 2 ? 301 : 31;
    n = std::min(cap, static_cast<int>(std::floor(std::pow(static_cast<double>(opt.max_nodes), 1.0 / N) + 1e-9)));
  }
  long nodes = 1;
  for (int k = 0; k < N; ++k) nodes *= n;
  if (n < 3 || nodes > opt.max_nodes) throw Error(ErrorKind::TooLarge, "grid exceeds the node budget");
  const double h = 2.0 * T / (n - 1);

  std::vector<double> unode(nodes);
  std::vector<int> coord(N);
  auto decode = [&](long idx) {
    for (int k = 0; k < N; ++k) {
      coord[k] = static_cast<int>(idx % n);
      idx /= n;
    }
  };
  for (long idx = 0; idx < nodes; ++idx) {
    decode(idx);
    for (int k = 0; k < N; ++k) x[k] = -T + h * coord[k];
    unode[idx] = U(x);
  }
  const double ushift = *std::min_element(unode.begin(), unode.end());
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<double> diag(nodes, 0.0);
  long stride = 1;
  for (int k = 0; k < N; ++k) {
    for (long idx = 0; idx < nodes; ++idx) {
      decode(idx);
      if (coord[k] + 1 >= n) continue;
      long jdx = idx + stride;
      for (int a = 0; a < N; ++a) x[a] = -T + h * coord[a];
      x[k] += 0.5 * h;
      double umid = U(x);
      double ui = unode[idx], uj = unode[jdx];
      // Symmetrized conductance exp(-U_mid)/h^2 between masses exp(-U).
      double off = std::exp(-(umid - 0.5 * (ui + uj))) / (h * h);
      trip.emplace_back(idx, jdx, -off);
      trip.emplace_back(jdx, idx, -off);
      diag[idx] += std::exp(-(umid - ui)) / (h * h);
      diag[jdx] += std::exp(-(umid - uj)) / (h * h);
    }
    stride *= n;
  }
  for (long idx = 0; idx < nodes; ++idx) trip.emplace_back(idx, idx, diag[idx]);
  Eigen::SparseMatrix<double> A(nodes, nodes);
  A.setFromTriplets(trip.begin(), trip.end());
  for (double v : diag)
    if (!std::isfinite(v)) throw Error(ErrorKind::NonFinite, "oracle matrix is not finite");

  NdResult out;
  out.half_width = T;
  out.points = n;
  const double anorm = 2.0 * *std::max_element(diag.begin(), diag.end());

  if (nodes < opt.dense_below) {
    Eigen::MatrixXd dense(A);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigensolveFailure, "dense eigensolve failed");
    out.value = es.eigenvalues()(1);
    Eigen::VectorXd v = es.eigenvectors().col(1);
    out.residual = (dense * v - out.value * v).norm() / anorm;
    return out;
  }

  // Null vector sqrt(mass), projected out of every iterate.
  Eigen::VectorXd v0(nodes);
  for (long idx = 0; idx < nodes; ++idx) v0(idx) = std::exp(-0.5 * (unode[idx] - ushift));
  v0.normalize();
  // ||A|| is dominated by the steep edges of the box; the shift must stay far
  // below the gap itself.
  const double sigma = std::min(1e-10 * anorm, 1e-4 * *std::min_element(diag.begin(), diag.end()));
  Eigen::SparseMatrix<double> S = A;
  for (long idx = 0; idx < nodes; ++idx) S.coeffRef(idx, idx) += sigma;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(S);
  if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::EigensolveFailure, "sparse factorization failed");

  const int block = 4;
  Eigen::MatrixXd X(nodes, block);
  for (long idx = 0; idx < nodes; ++idx) {
    decode(idx);
    for (int c = 0; c < block; ++c) {
      double s = 0.0;
      for (int k = 0; k < N; ++k) s += std::sin((c + 1.0) * (k + 1.0) * (coord[k] + 0.5) / n * 3.0) * (k + c + 1);
      X(idx, c) = s + 1e-3 * std::cos(0.7 * idx + c);
    }
  }
  auto orth = [&](Eigen::MatrixXd& Y) {
    for (int c = 0; c < Y.cols(); ++c) Y.col(c) -= v0 * v0.dot(Y.col(c));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Y);
    Y = qr.householderQ() * Eigen::MatrixXd::Identity(Y.rows(), Y.cols());
    for (int c = 0; c < Y.cols(); ++c) Y.col(c) -= v0 * v0.dot(Y.col(c));
  };
  orth(X);
  for (int it = 0; it < 1000; ++it) {
    Eigen::MatrixXd Y = ldlt.solve(X);
    orth(Y);
    Eigen::MatrixXd AY = A * Y;
    Eigen::MatrixXd H = Y.transpose() * AY;
    H = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    X = Y * es.eigenvectors();
    Eigen::VectorXd x1 = X.col(0);
    double theta = es.eigenvalues()(0);
    double res = (AY * es.eigenvectors().col(0) - theta * x1).norm() / anorm;
    if (res <= 1e-8) {
      out.value = theta;
      out.residual = res;
      return out;
    }
  }
  throw Error(ErrorKind::EigensolveFailure, "subspace iteration did not reach the residual target");
}

L2Identity check_L2_identity(const Potential1D& p, const SmoothFn& f, const QuadConfig& cfg) {
  if (!p.unit_diffusion()) throw Error(ErrorKind::InvalidArgument, "identity is stated for a == 1");
  if (!f.f || !f.df || !f.d2f) throw Error(ErrorKind::InvalidTestFunction, "test function needs f, f', f''");
  Measure1D m(p, cfg);
  RealFn lw = [&](double x) { return m.log_speed(x); };
  const Interval all{-kInf, kInf};
  auto mean = [&](RealFn g) {
    LogValue v = integrate_weighted(g, lw, all, cfg);
    if (v.sign == 0) return 0.0;
    return v.sign * std::exp(v.log_magnitude - m.log_z());
  };
  L2Identity out;
  out.lhs = mean([&](double x) {
    double lf = f.d2f(x) - p.du(x) * f.df(x);
    return lf * lf;
  });
  out.rhs = mean([&](double x) {
    double d1 = f.df(x), d2 = f.d2f(x);
    return d2 * d2 + p.d2u(x) * d1 * d1;
  });
  out.dirichlet = mean([&](double x) { return f.df(x) * f.df(x); });
  out.lambda1 = gap_1d(p, std::nullopt, 2001, cfg).value;
  out.poincare_holds = out.lhs >= out.lambda1 * out.dirichlet * (1.0 - 1e-6);
  return out;
}

SpectralIdentity discrete_spectral_identity(const Potential1D& p, int n, const QuadConfig& cfg) {
  Measure1D m(p, cfg);
  Tridiagonal t = discretize_1d(m, m.window(), n);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) A(k, k) = t.diag[k];
  for (int k = 0; k + 1 < n; ++k) A(k, k + 1) = A(k + 1, k) = t.offdiag[k];
  const double top = *std::max_element(t.log_mass.begin(), t.log_mass.end());
  Eigen::VectorXd v0(n);
  for (int k = 0; k < n; ++k) v0(k) = std::exp(0.5 * (t.log_mass[k] - top));
  v0.normalize();
  // Orthonormal basis of the complement of v0.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(v0);
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd Qc = Q.rightCols(n - 1);
  Eigen::MatrixXd B = Qc.transpose() * A * A * Qc;
  Eigen::MatrixXd C = Qc.transpose() * A * Qc;
  B = 0.5 * (B + B.transpose());
  C = 0.5 * (C + C.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(B, C);
  if (ges.info() != Eigen::Success) throw Error(ErrorKind::EigensolveFailure, "generalized eigensolve failed");
  SpectralIdentity out;
  out.ratio_min = ges.eigenvalues().minCoeff();
  out.lambda1 = tridiagonal_eigenvalues(t.diag, t.offdiag, 2)[1];
  return out;
}

void CouplingSimConfig::validate() const {
  if (!(step > 0.0) || !(horizon > 0.0) || !std::isfinite(step) || !std::isfinite(horizon))
    throw Error(ErrorKind::InvalidArgument, "step and horizon must be positive");
  if (paths < 1 || record_every < 1 || threads < 1) throw Error(ErrorKind::InvalidArgument, "bad simulation counts");
  if (!(J >= 0.0)) throw Error(ErrorKind::InvalidArgument, "J must be >= 0");
  if (!(coalesce_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "coalescence tolerance must be positive");
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void ring_drift(const std::vector<double>& x, double beta, double J, std::vector<double>& b) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    double left = x[(i + n - 1) % n], right = x[(i + 1) % n];
    b[i] = -4.0 * x[i] * x[i] * x[i] + 2.0 * beta * x[i] - 2.0 * J * ((x[i] - left) + (x[i] - right));
  }
}

double dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step, std::uint64_t component) {
  std::uint64_t key = splitmix64(splitmix64(splitmix64(splitmix64(seed) ^ path) ^ step) ^ component);
  std::uint64_t h2 = splitmix64(key);
  double u1 = (static_cast<double>(key >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

DecaySeries coupling_sim(const CouplingProfile& prof, const std::vector<double>& x0, const std::vector<double>& y0,
                         const CouplingSimConfig& cfg) {
  cfg.validate();
  const std::size_t n = x0.size();
  if (n != static_cast<std::size_t>(prof.lambda_size()) || y0.size() != n)
    throw Error(ErrorKind::InvalidArgument, "start points must have lambda_size components");
  const double beta = prof.beta();
  auto fval = [&](double r) { return r <= 0.0 ? 0.0 : prof.f(std::min(r, prof.radius())); };
  const long steps = std::lround(cfg.horizon / cfg.step);
  const long records = steps / cfg.record_every + 1;

  DecaySeries out;
  for (long k = 0; k < records; ++k) out.t.push_back(k * cfg.record_every * cfg.step);
  const double d0 = dist(x0, y0);
  out.f0 = fval(d0);
  if (d0 == 0.0) {
    out.mean_f.assign(records, 0.0);
    out.stderr_f.assign(records, 0.0);
    return out;
  }
  {
    std::vector<double> bx(n), by(n);
    ring_drift(x0, beta, cfg.J, bx);
    ring_drift(y0, beta, cfg.J, by);
    double bmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) bmax = std::max({bmax, std::abs(bx[i]), std::abs(by[i])});
    if (bmax * std::sqrt(static_cast<double>(n)) * cfg.step >= 0.1 * d0)
      throw Error(ErrorKind::StepTooLarge, "drift * step must stay below 0.1 |x0 - y0|");
  }

  std::vector<std::vector<double>> per_path(cfg.paths, std::vector<double>(records, 0.0));
  auto run = [&](int path) {
    std::vector<double> X = x0, Y = y0, bx(n), by(n), dw(n), e(n);
    std::vector<double>& rec = per_path[path];
    rec[0] = fval(d0);
    bool frozen = false;
    const double sq = std::sqrt(2.0 * cfg.step);
    for (long s = 1; s <= steps; ++s) {
      if (!frozen) {
        double r = dist(X, Y);
        for (std::size_t i = 0; i < n; ++i) e[i] = (X[i] - Y[i]) / r;
        double proj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          dw[i] = counter_normal(cfg.seed, path, s, i);
          proj += e[i] * dw[i];
        }
        ring_drift(X, beta, cfg.J, bx);
        ring_drift(Y, beta, cfg.J, by);
        double along = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          X[i] += bx[i] * cfg.step + sq * dw[i];
          Y[i] += by[i] * cfg.step + sq * (dw[i] - 2.0 * e[i] * proj);
          along += (X[i] - Y[i]) * e[i];
        }
        if (along <= 0.0 || dist(X, Y) < cfg.coalesce_tol) frozen = true;
      }
      if (s % cfg.record_every == 0) rec[s / cfg.record_every] = frozen ? 0.0 : fval(dist(X, Y));
    }
  };
  if (cfg.threads == 1) {
    for (int p = 0; p < cfg.paths; ++p) run(p);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < cfg.threads; ++t)
      pool.emplace_back([&, t] {
        for (int p = t; p < cfg.paths; p += cfg.threads) run(p);
      });
    for (auto& th : pool) th.join();
  }
  out.mean_f.assign(records, 0.0);
  out.stderr_f.assign(records, 0.0);
  for (long k = 0; k < records; ++k) {
    double s = 0.0, s2 = 0.0;
    for (int p = 0; p < cfg.paths; ++p) {
      s += per_path[p][k];
      s2 += per_path[p][k] * per_path[p][k];
    }
    double mean = s / cfg.paths;
    double var = cfg.paths > 1 ? std::max(0.0, (s2 - cfg.paths * mean * mean) / (cfg.paths - 1)) : 0.0;
    out.mean_f[k] = mean;
    out.stderr_f[k] = std::sqrt(var / cfg.paths);
  }
  return out;
}

void write_decay_csv(const DecaySeries& s, std::ostream& os) {
  char buf[128];
  os << "t,mean_f_dist,stderr\n";
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", s.t[k], s.mean_f[k], s.stderr_f[k]);
    os << buf;
  }
}

}  // namespace gapbound
