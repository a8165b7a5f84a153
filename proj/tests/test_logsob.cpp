#include <doctest.h>

#include <cmath>

#include "gapbound/logsob.hpp"
#include "gapbound/oracle.hpp"
#include "gen.hpp"

using namespace gapbound;
using gen::error_kind;

namespace {

const double kE = std::exp(1.0);

// Two-sided closed form for x^4 - b x^2.
double quartic_formula(double b) {
  double s = std::sqrt(b * b + 8);
  return (s - b) / std::sqrt(kE) * std::exp(-b * (b + s) / 8);
}

}  // namespace

TEST_SUITE("logsob") {
  TEST_CASE("gamma profile representations") {
    GammaProfile c(Potential1D::quadratic(1.5, 3.0));
    CHECK(c.representation() == GammaProfile::Representation::Constant);
    CHECK(c(0.0) == 3.0);
    CHECK(c(10.0) == 3.0);
    GammaProfile q(Potential1D::quartic(1.0, 0.7));
    CHECK(q.representation() == GammaProfile::Representation::Quartic);
    CHECK(q(0.5) == doctest::Approx(12 * 0.25 - 2));
    CHECK(q.integral(1.0) == doctest::Approx(4.0 - 2.0));
  }

  TEST_CASE("grid profile is a minorant of the closed form") {
    auto p = Potential1D::custom([](double x) { return x * x * x * x; }, [](double x) { return 4 * x * x * x; },
                                 [](double x) { return 12 * x * x; });
    GammaProfile g(p);
    CHECK(g.representation() == GammaProfile::Representation::Grid);
    for (double r = 0.0; r < 2.0; r += 0.137) {
      CHECK(g(r) <= 12 * r * r + 1e-12);
      CHECK(g(r) >= 12 * r * r - 0.05);
    }
  }

  TEST_CASE("lemma value for Gaussians is exact") {
    gen::for_cases(31, 50, [](gen::Rng& r, int) {
      double a = r.uniform(0.05, 30), b = r.uniform(-20, 20);
      BoundReport rep = logsob_lower_lemma51(Potential1D::quadratic(a, b));
      CHECK(rep.value == doctest::Approx(2 * a).epsilon(1e-12));
      CHECK(rep.diagnostics.at("a0") == doctest::Approx(1 / std::sqrt(a)).epsilon(1e-12));
    });
    CHECK(logsob_lower_lemma51(Potential1D::quadratic(3.0, 1.0)).value == doctest::Approx(6.0).epsilon(1e-14));
  }

  TEST_CASE("lemma value for quartics matches the closed form and ignores the tilt") {
    CHECK(logsob_lower_lemma51(Potential1D::quartic(0.0, 0.0)).value ==
          doctest::Approx(2 * std::sqrt(2 / kE)).epsilon(1e-12));
    gen::for_cases(32, 60, [](gen::Rng& r, int) {
      double b1 = r.uniform(-3, 3), b2 = r.uniform(-3, 3);
      double v = logsob_lower_lemma51(Potential1D::quartic(b1, b2)).value;
      CHECK(v == doctest::Approx(quartic_formula(b1)).epsilon(1e-12));
      CHECK(v == doctest::Approx(logsob_lower_lemma51(Potential1D::quartic(b1, 0.0)).value).epsilon(1e-13));
    });
  }

  TEST_CASE("lemma on a gridded profile") {
    auto p = Potential1D::custom([](double x) { return x * x * x * x; }, [](double x) { return 4 * x * x * x; },
                                 [](double x) { return 12 * x * x; });
    BoundReport rep = logsob_lower_lemma51(p);
    CHECK(rep.value <= 2 * std::sqrt(2 / kE));
    CHECK(rep.value == doctest::Approx(2 * std::sqrt(2 / kE)).epsilon(1e-3));
    CHECK_FALSE(rep.certified);
  }

  TEST_CASE("lemma reports zero when the profile never turns positive") {
    // u'' dips below zero at every scale
    auto p = Potential1D::custom([](double x) { return std::sqrt(1 + x * x) + 0.5 * std::sin(x); },
                                 [](double x) { return x / std::sqrt(1 + x * x) + 0.5 * std::cos(x); },
                                 [](double x) { return std::pow(1 + x * x, -1.5) - 0.5 * std::sin(x); });
    BoundReport rep = logsob_lower_lemma51(p);
    CHECK(rep.value == 0.0);
    CHECK_FALSE(rep.notes.empty());
  }

  TEST_CASE("simplified quartic cases") {
    CHECK(logsob_quartic_cases(0.0) == doctest::Approx(2 * std::sqrt(2 / kE)).epsilon(1e-14));
    CHECK(logsob_quartic_cases(-1.0) == doctest::Approx(2 + 2 / (std::sqrt(kE / 2) + 1)).epsilon(1e-14));
    CHECK(logsob_quartic_cases(2.0) == doctest::Approx(std::exp(-1.0) / (std::sqrt(kE / 8) + 2)).epsilon(1e-14));
    gen::for_cases(33, 200, [](gen::Rng& r, int) {
      double b = r.uniform(-10, 10);
      CHECK(logsob_quartic_cases(b) <= quartic_formula(b) * (1 + 1e-12));
    });
  }

  TEST_CASE("two-sided worst-gap estimate") {
    Prop14 z = prop14_sandwich(0.0);
    CHECK(z.upper == doctest::Approx(4 * std::exp(14.0)).epsilon(1e-14));
    CHECK(z.lower == doctest::Approx(2 * std::sqrt(2 / kE)).epsilon(1e-12));
    CHECK(prop14_sandwich(2.0).upper == doctest::Approx(4 * std::exp(14.0) * std::exp(-1 + 2 * std::log(3.0))).epsilon(1e-14));
    Prop14 four = prop14_sandwich(4.0);
    CHECK(std::isfinite(four.upper / four.lower));
    CHECK(four.upper / four.lower > 1.0);
    Prop14 ten = prop14_sandwich(10.0);
    CHECK(std::log(ten.upper) - std::log(ten.lower) <= 25.0);
    CHECK(error_kind([] { prop14_sandwich(-0.5); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("upper estimate from the sandwich covers the oracle") {
    double lam = gap_1d(Potential1D::quartic(1.0, 0.0)).value;
    CHECK(prop14_delta_upper(1.0) >= lam);
  }
}
