#include <doctest.h>

#include <cmath>

#include "gapbound/matbound.hpp"
#include "gen.hpp"

using namespace gapbound;
using gen::error_kind;

namespace {

TildeHessSpec path3() {
  TildeHessSpec s;
  s.eta = Eigen::Vector3d(1, 2, 3);
  s.offdiag = Eigen::MatrixXd::Zero(3, 3);
  s.offdiag(0, 1) = s.offdiag(1, 0) = 1;
  s.offdiag(1, 2) = s.offdiag(2, 1) = 1;
  return s;
}

TildeHessSpec random_spec(gen::Rng& r, int n, bool connected) {
  TildeHessSpec s;
  s.eta.resize(n);
  s.offdiag = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    s.eta(i) = r.uniform(-1, 5);
    for (int j = i + 1; j < n; ++j) {
      double v = connected || r.coin() ? r.uniform(0.05, 2) : 0.0;
      s.offdiag(i, j) = s.offdiag(j, i) = v;
    }
  }
  return s;
}

}  // namespace

TEST_SUITE("matbound") {
  TEST_CASE("lambda_min_sym") {
    CHECK(lambda_min_sym(Eigen::Matrix3d::Identity()).value == doctest::Approx(1.0));
    CHECK(lambda_min_sym(Eigen::Matrix3d::Identity()).vector.norm() == doctest::Approx(1.0));
    EigenPair d = lambda_min_sym(Eigen::Vector3d(-5, 2, 7).asDiagonal().toDenseMatrix());
    CHECK(d.value == -5.0);
    CHECK(d.vector(0) == doctest::Approx(1.0));
    Eigen::Matrix2d bad{{1, 2}, {0, 1}};
    CHECK(error_kind([&] { lambda_min_sym(bad); }) == ErrorKind::NonSymmetric);
  }

  TEST_CASE("lambda_min_sym property: eigenpair and Rayleigh bound") {
    gen::for_cases(41, 60, [](gen::Rng& r, int) {
      int n = r.integer(1, 8);
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = r.uniform(-3, 3);
      EigenPair e = lambda_min_sym(a);
      CHECK((a * e.vector - e.value * e.vector).norm() <= 1e-10 * (1 + a.norm()));
      Eigen::VectorXd v = Eigen::VectorXd::Map(r.vec(n, -1, 1).data(), n);
      CHECK(v.dot(a * v) / v.squaredNorm() >= e.value - 1e-12);
    });
  }

  TEST_CASE("tilde-Hessian bound") {
    TildeHessSpec two;
    two.eta = Eigen::Vector2d(2, 2);
    two.offdiag = Eigen::Matrix2d{{0, 1}, {1, 0}};
    CHECK(tilde_hess_bound(two).value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(tilde_hess_bound(path3()).value == doctest::Approx(2 - std::sqrt(3.0)).epsilon(1e-12));
    TildeHessSpec none;
    none.eta = Eigen::Vector3d(4, -1, 2);
    none.offdiag = Eigen::MatrixXd::Zero(3, 3);
    CHECK(tilde_hess_bound(none).value == -1.0);
  }

  TEST_CASE("spec validation") {
    TildeHessSpec s = path3();
    s.offdiag(0, 1) = 2;
    CHECK(error_kind([&] { s.validate(); }) == ErrorKind::NonSymmetric);
    s = path3();
    s.offdiag(1, 1) = 1;
    CHECK(error_kind([&] { s.validate(); }) == ErrorKind::InvalidArgument);
    s = path3();
    s.offdiag(0, 2) = s.offdiag(2, 0) = -1;
    CHECK(error_kind([&] { s.validate(); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind([&] { weighted_bound(path3(), Eigen::Vector3d(1, 0, 1)); }) == ErrorKind::NonPositiveWeights);
  }

  TEST_CASE("weighted bound") {
    TildeHessSpec s = path3();
    BoundReport perron = weighted_bound(s);
    CHECK(perron.value == doctest::Approx(2 - std::sqrt(3.0)).epsilon(1e-10));
    double r3 = std::sqrt(3.0);
    CHECK(weighted_bound(s, Eigen::Vector3d(2 + r3, 1 + r3, 1)).value == doctest::Approx(2 - r3).epsilon(1e-10));
    CHECK(std::abs(weighted_bound(s, Eigen::Vector3d::Ones()).value) < 1e-14);
    TildeHessSpec none;
    none.eta = Eigen::Vector3d(4, 1, 2);
    none.offdiag = Eigen::MatrixXd::Zero(3, 3);
    CHECK(weighted_bound(none, Eigen::Vector3d(0.1, 7, 3)).value == 1.0);
  }

  TEST_CASE("weighted bound property: never above the eigenvalue, equal at the Perron vector") {
    gen::for_cases(42, 80, [](gen::Rng& r, int) {
      int n = r.integer(2, 7);
      TildeHessSpec s = random_spec(r, n, r.coin());
      double lam = tilde_hess_bound(s).value;
      Eigen::VectorXd w = Eigen::VectorXd::Map(r.vec(n, 0.1, 3).data(), n);
      CHECK(weighted_bound(s, w).value <= lam + 1e-10);
      double ones = weighted_bound(s, Eigen::VectorXd::Ones(n)).value;
      CHECK(ones == doctest::Approx((s.eta - s.offdiag.rowwise().sum()).minCoeff()).epsilon(1e-13));
    });
    gen::for_cases(43, 40, [](gen::Rng& r, int) {
      TildeHessSpec s = random_spec(r, r.integer(2, 7), true);
      CHECK(weighted_bound(s).value == doctest::Approx(tilde_hess_bound(s).value).epsilon(1e-9).scale(1.0));
    });
  }

  TEST_CASE("isoperimetric constant by enumeration") {
    // three equal sites in a row, bond weight 2J with J = 1/2
    TildeHessSpec s;
    s.eta = Eigen::Vector3d::Constant(1.0);
    s.offdiag = Eigen::MatrixXd::Zero(3, 3);
    s.offdiag(0, 1) = s.offdiag(1, 0) = 1;
    s.offdiag(1, 2) = s.offdiag(2, 1) = 1;
    CHECK(h_gamma(s, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    s.offdiag.setZero();
    CHECK(h_gamma(s, 1.0) == 0.0);
    CHECK(h_gamma(s, 0.5) == 0.0);
    TildeHessSpec big;
    big.eta = Eigen::VectorXd::Ones(kExhaustiveLimit + 1);
    big.offdiag = Eigen::MatrixXd::Zero(kExhaustiveLimit + 1, kExhaustiveLimit + 1);
    CHECK(error_kind([&] { h_gamma(big, 1.0); }) == ErrorKind::TooLarge);
    CHECK(error_kind([&] { h_gamma(path3(), -1.0); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("Cheeger-type bound") {
    TildeHessSpec flat;
    flat.eta = Eigen::Vector3d::Constant(2.5);
    flat.offdiag = Eigen::MatrixXd::Zero(3, 3);
    CHECK(thm12_bound(flat).value == doctest::Approx(2.5).epsilon(1e-14));

    TildeHessSpec s;
    s.eta = Eigen::Vector3d::Constant(3.0);
    s.offdiag = Eigen::MatrixXd::Zero(3, 3);
    s.offdiag(0, 1) = s.offdiag(1, 0) = 1;
    s.offdiag(1, 2) = s.offdiag(2, 1) = 1;
    CheegerData cd = cheeger_data(s);
    BoundReport b = thm12_bound(s);
    CHECK(cd.h_half > 0.0);
    CHECK(b.value > cd.s_floor);
    CHECK(b.value <= tilde_hess_bound(s).value + 1e-12);
  }

  TEST_CASE("log-Sobolev matrix bound") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(3, 3);
    CHECK(logsob_matrix_bound(Eigen::Vector3d(3, 1.5, 2), z).value == 1.5);
    Eigen::Matrix2d j{{0, 0.4}, {0.4, 0}};
    CHECK(logsob_matrix_bound(Eigen::Vector2d(1.7, 1.7), j).value == doctest::Approx(1.3).epsilon(1e-14));
  }
}
