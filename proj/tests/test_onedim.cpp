#include <doctest.h>

#include <cmath>

#include "gapbound/onedim.hpp"
#include "gapbound/oracle.hpp"
#include "gen.hpp"

using namespace gapbound;
using gen::error_kind;

namespace {

const double kGaussDelta = 0.239405;
const double kSqrt2e = std::sqrt(2.0 / std::exp(1.0));

}  // namespace

TEST_SUITE("onedim") {
  TEST_CASE("potential validation") {
    CHECK(error_kind([] { Potential1D::quadratic(0.0, 1.0); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind([] { Potential1D::quadratic(-1.0, 0.0); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind([] { Potential1D::quartic(NAN, 0.0); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind([] {
            Potential1D::custom([](double x) { return -x * x; }, [](double x) { return -2 * x; },
                                [](double) { return -2.0; });
          }) == ErrorKind::InvalidArgument);
    auto p = Potential1D::quadratic(1.0, 0.0);
    CHECK(error_kind([&] { p.with_diffusion([](double x) { return x; }); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("theta_root") {
    CHECK(theta_root(Potential1D::quadratic(1.0, 2.0)) == doctest::Approx(-1.0));
    CHECK(theta_root(Potential1D::quartic(0.0, 0.0)) == 0.0);
    CHECK(theta_root(Potential1D::quartic(0.0, 4.0)) == doctest::Approx(-1.0).epsilon(1e-14));
  }

  TEST_CASE("theta_root property: u' vanishes at theta") {
    gen::for_cases(21, 300, [](gen::Rng& r, int) {
      double b1 = r.uniform(-5, 5), b2 = r.uniform(-5, 5);
      if (r.integer(0, 4) == 0) b2 = 0.0;
      auto p = Potential1D::quartic(b1, b2);
      double t = theta_root(p);
      double scale = 4 * std::abs(t * t * t) + 2 * std::abs(b1 * t) + std::abs(b2) + 1.0;
      CHECK(std::abs(p.du(t)) <= 1e-12 * scale);
    });
  }

  TEST_CASE("half_line_delta") {
    Measure1D g(Potential1D::quadratic(1.0, 0.0));
    CHECK(half_line_delta(g, 0.0, Side::Plus) == doctest::Approx(kGaussDelta).epsilon(1e-5));
    CHECK(half_line_delta(g, 0.0, Side::Minus) == doctest::Approx(kGaussDelta).epsilon(1e-5));
    Measure1D g2(Potential1D::quadratic(2.0, 0.0));
    CHECK(half_line_delta(g2, 0.0, Side::Plus) == doctest::Approx(kGaussDelta / 2).epsilon(1e-5));
    Measure1D q(Potential1D::quartic(0.0, 0.0));
    double dp = half_line_delta(q, 0.0, Side::Plus);
    CHECK(dp == doctest::Approx(0.209323347711442).epsilon(1e-8));
    CHECK(half_line_delta(q, 0.0, Side::Minus) == doctest::Approx(dp).epsilon(1e-10));
  }

  TEST_CASE("median") {
    CHECK(std::abs(median(Measure1D(Potential1D::quadratic(1.0, 0.0)))) < 1e-10);
    CHECK(std::abs(median(Measure1D(Potential1D::quartic(2.0, 0.0)))) < 1e-10);
    CHECK(median(Measure1D(Potential1D::quartic(0.0, 1.0))) == doctest::Approx(-0.398413333034302).epsilon(1e-9));
  }

  TEST_CASE("sandwich for the Gaussian") {
    for (double beta : {0.0, 5.0}) {
      Sandwich s = gap_sandwich_thm44(Potential1D::quadratic(1.0, beta));
      CHECK(s.lower.value == doctest::Approx(1.0 / (4 * kGaussDelta)).epsilon(1e-5));
      CHECK(s.upper.value == doctest::Approx(2.0 / kGaussDelta).epsilon(1e-5));
      CHECK(s.lower.direction == Direction::Lower);
      CHECK(s.upper.direction == Direction::Upper);
    }
  }

  TEST_CASE("sandwich brackets the oracle") {
    auto p = Potential1D::quartic(1.0, 0.0);
    Sandwich s = gap_sandwich_thm44(p);
    double lam = gap_1d(p).value;
    CHECK(s.lower.value <= lam);
    CHECK(lam <= s.upper.value);
  }

  TEST_CASE("K envelope closed forms") {
    auto k6 = k_envelope(Potential1D::quadratic(3.0, 0.0), 0.0, Side::Plus);
    CHECK(k6.representation() == KEnvelope::Representation::Constant);
    for (double r : {0.1, 1.0, 7.0}) CHECK(k6(r) == 6.0);

    auto kq = k_envelope(Potential1D::quartic(1.0, 0.0), 0.0, Side::Plus);
    CHECK(kq.representation() == KEnvelope::Representation::ClosedFormQuartic);
    for (double r : {0.25, 1.0, 2.5}) CHECK(kq(r) == doctest::Approx(4 * r * r - 2).epsilon(1e-14));
    auto km = k_envelope(Potential1D::quartic(1.0, 0.0), 0.0, Side::Minus);
    for (double r : {-0.25, -1.0, -2.5}) CHECK(km(r) == doctest::Approx(4 * r * r - 2).epsilon(1e-14));

    auto kc = k_envelope(Potential1D::custom([](double x) { return x * x; }, [](double x) { return 2 * x; },
                                             [](double) { return 2.0; }),
                         0.0, Side::Plus);
    CHECK(kc.representation() == KEnvelope::Representation::GridEnvelope);
    for (double r : {0.5, 2.0, 4.0}) CHECK(kc(r) == doctest::Approx(2.0).epsilon(1e-12));
  }

  TEST_CASE("K envelope is nondecreasing") {
    gen::for_cases(22, 8, [](gen::Rng& rng, int) {
      double b1 = rng.uniform(-2, 3), b2 = rng.uniform(-2, 2);
      auto p = Potential1D::custom([=](double x) { return x * x * x * x - b1 * x * x + b2 * x + std::sin(x); },
                                   [=](double x) { return 4 * x * x * x - 2 * b1 * x + b2 + std::cos(x); },
                                   [=](double x) { return 12 * x * x - 2 * b1 - std::sin(x); });
      double t = theta_root(p);
      for (Side side : {Side::Plus, Side::Minus}) {
        auto k = k_envelope(p, t, side);
        double dir = side == Side::Plus ? 1.0 : -1.0;
        double prev = -kInf;
        for (double s = 0.01; s < 3.0; s *= 1.3) {
          double v = k(t + dir * s);
          CHECK(v >= prev);
          // minorant of -b(x)/(x - theta) at x itself
          double x = t + dir * s;
          CHECK(v <= p.du(x) / (x - t) + 1e-9 * (1 + std::abs(v)));
          prev = v;
        }
      }
    });
  }

  TEST_CASE("lower bound is exact for Gaussians") {
    gen::for_cases(23, 40, [](gen::Rng& r, int) {
      double a = r.uniform(0.05, 20), b = r.uniform(-10, 10);
      BoundReport rep = gap_lower_thm41(Potential1D::quadratic(a, b));
      CHECK(rep.value == doctest::Approx(2 * a).epsilon(1e-10));
      CHECK(rep.direction == Direction::Lower);
    });
  }

  TEST_CASE("lower bound for the pure quartic") {
    BoundReport rep = gap_lower_thm41(Potential1D::quartic(0.0, 0.0));
    CHECK(rep.value == doctest::Approx(2 * kSqrt2e).epsilon(1e-10));
    CHECK(rep.diagnostics.at("theta") == 0.0);
    CHECK(rep.diagnostics.at("r_plus") == doctest::Approx(std::pow(0.5, 0.25)).epsilon(1e-10));
  }

  TEST_CASE("closed forms for the quartic") {
    CHECK(closed_form_quartic(0.0, QuarticCase::UniformInBeta2).value == doctest::Approx(kSqrt2e).epsilon(1e-14));
    CHECK(closed_form_quartic(0.0, QuarticCase::Symmetric).value == doctest::Approx(2 * kSqrt2e).epsilon(1e-14));
    double s12 = std::sqrt(12.0);
    CHECK(closed_form_quartic(2.0, QuarticCase::Symmetric).value ==
          doctest::Approx((s12 - 2) / std::sqrt(std::exp(1.0)) * std::exp(-2 * (2 + s12) / 8)).epsilon(1e-14));
    CHECK(closed_form_quartic(2.0, QuarticCase::Symmetric).value == doctest::Approx(0.2266).epsilon(2e-4));
    CHECK(closed_form_quartic(2.0, QuarticCase::UniformInBeta2).value == doctest::Approx(0.0031855447).epsilon(1e-8));
  }

  TEST_CASE("per-instance bound dominates the uniform closed form") {
    CHECK(gap_lower_thm41(Potential1D::quartic(2.0, 1.0)).value >=
          closed_form_quartic(2.0, QuarticCase::UniformInBeta2).value * (1 - 1e-9));
    gen::for_cases(24, 25, [](gen::Rng& r, int) {
      double b1 = r.uniform(-2, 3), b2 = r.uniform(-2, 2);
      double lower = gap_lower_thm41(Potential1D::quartic(b1, b2)).value;
      CHECK(lower >= closed_form_quartic(b1, QuarticCase::UniformInBeta2).value * (1 - 1e-9));
    });
  }

  TEST_CASE("variational lower bound") {
    TestFunction lin{[](double x) { return x; }, [](double) { return 1.0; }};
    CHECK(variational_lower_testfn(Potential1D::quadratic(1.0, 0.0), 0.0, Side::Plus, &lin) ==
          doctest::Approx(2.0).epsilon(1e-8));
    auto p = Potential1D::quartic(1.0, 0.0);
    CHECK(variational_lower_testfn(p, 0.0, Side::Plus) >= gap_lower_thm41(p).value);
    gen::for_cases(25, 6, [](gen::Rng& r, int) {
      auto q = Potential1D::quartic(r.uniform(-1, 2), r.uniform(-1, 1));
      double t = theta_root(q);
      TestFunction id{[t](double x) { return x - t; }, [](double) { return 1.0; }};
      CHECK(variational_lower_testfn(q, t, r.coin() ? Side::Plus : Side::Minus, &id) > 0.0);
    });
  }

  TEST_CASE("ergodicity criteria") {
    Ergodicity q = ergodicity_criteria(Potential1D::quartic(1.0, 0.0), 4.0);
    CHECK(q.logsob.holds);
    CHECK(q.strong.holds);
    CHECK_FALSE(q.nash.holds);
    CHECK(std::isinf(q.nash.value));
    Ergodicity g = ergodicity_criteria(Potential1D::quadratic(1.0, 0.0), 4.0);
    CHECK(g.logsob.holds);
    CHECK_FALSE(g.strong.holds);
    CHECK(error_kind([] { ergodicity_criteria(Potential1D::quadratic(1.0, 0.0), 2.0); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("perturbation of the pure quartic") {
    auto base = Potential1D::quartic(0.0, 0.0);
    Perturbation none = perturbation_bound(base, [](double) { return 0.0; }, 0.0);
    CHECK(none.plus.k3 == 0.0);
    CHECK(none.plus.k4 == 0.0);
    CHECK(none.plus.bound == doctest::Approx(none.plus.delta).epsilon(1e-14));
    CHECK(none.plus.delta == doctest::Approx(0.209323347711442).epsilon(1e-8));
    CHECK(1.0 / (4.0 * none.plus.bound) > 0.0);

    Perturbation one = perturbation_bound(base, [](double x) { return x * x; }, 0.0);
    CHECK(one.plus.k1 <= std::tgamma(1.25) * (1 + 1e-9));
    CHECK(one.plus.k4 < 0.6);
    // e^{x^2} - 1 against the e^{-x^4} tail leaves e^{x^2} / x^3 growth
    CHECK(std::isinf(one.plus.k3));
    CHECK(std::isinf(one.plus.bound));
    CHECK(std::isinf(one.minus.bound));
  }
}
