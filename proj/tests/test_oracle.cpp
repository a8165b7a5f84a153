#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gapbound/logsob.hpp"
#include "gapbound/onedim.hpp"
#include "gapbound/oracle.hpp"
#include "gapbound/spin.hpp"
#include "gen.hpp"

using namespace gapbound;
using gen::error_kind;

namespace {

using SK = LatticeModel::SiteKind;
using HM = LatticeModel::Hamiltonian;
using BC = LatticeModel::Boundary;

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("tridiagonal eigenvalues") {
    int n = 50;
    std::vector<double> d(n, 2.0), e(n - 1, -1.0);
    auto ev = tridiagonal_eigenvalues(d, e, 3);
    REQUIRE(ev.size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(ev[k] == doctest::Approx(2 - 2 * std::cos((k + 1) * M_PI / (n + 1))).epsilon(1e-12));
  }

  TEST_CASE("one-dimensional gaps") {
    CHECK(gap_1d(Potential1D::quadratic(1.0, 0.0)).value == doctest::Approx(2.0).epsilon(1e-2));
    CHECK(gap_1d(Potential1D::quadratic(1.0, 3.0)).value == doctest::Approx(2.0).epsilon(1e-2));
    // reference values from an independent finite-difference Schroedinger solve
    CHECK(gap_1d(Potential1D::quartic(0.0, 0.0)).value == doctest::Approx(2.737185049).epsilon(1e-6));
    CHECK(gap_1d(Potential1D::quartic(1.0, 0.0)).value == doctest::Approx(1.584176860).epsilon(1e-6));
    CHECK(gap_1d(Potential1D::quartic(3.0, 1.0)).value == doctest::Approx(0.391704022).epsilon(1e-6));
  }

  TEST_CASE("pure quartic gap sits inside its bounds") {
    auto p = Potential1D::quartic(0.0, 0.0);
    double v = gap_1d(p).value;
    CHECK(v >= gap_lower_thm41(p).value);
    CHECK(v <= gap_sandwich_thm44(p).upper.value);
  }

  TEST_CASE("Richardson levels agree") {
    OracleValue v = gap_1d(Potential1D::quartic(2.0, 0.5));
    CHECK(std::abs(v.fine - v.coarse) <= 1e-3 * v.value);
    CHECK(std::abs(v.value - v.fine) <= std::abs(v.fine - v.coarse));
  }

  TEST_CASE("half-line Dirichlet gaps") {
    auto g = Potential1D::quadratic(1.0, 0.0);
    double delta = half_line_delta(Measure1D(g), 0.0, Side::Plus);
    double v = dirichlet_gap_halfline(g, 0.0, Side::Plus).value;
    CHECK(v >= 1 / (4 * delta));
    CHECK(v <= 1 / delta);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-4));
    auto q = Potential1D::quartic(0.0, 0.0);
    CHECK(dirichlet_gap_halfline(q, 0.0, Side::Plus).value ==
          doctest::Approx(dirichlet_gap_halfline(q, 0.0, Side::Minus).value).epsilon(1e-9));
  }

  TEST_CASE("lattice gaps") {
    auto two = LatticeModel::cube(1, 2, 0.5, SK::Gaussian, 1.0, HM::Quadratic, BC::Free);
    CHECK(gap_nd(two).value == doctest::Approx(2.0).epsilon(2e-2));

    auto one = LatticeModel::cube(1, 1, 0.3, SK::Quartic, 1.0, HM::Bilinear);
    double v = gap_nd(one).value;
    CHECK(v >= system_bound(one).value);
    CHECK(v == doctest::Approx(1.584176860).epsilon(1e-4));

    // two wells coupled by 2J x1 x2 inside the positivity region
    double beta = 0.5, J = 0.2;
    auto pair = LatticeModel::cube(1, 2, J, SK::Quartic, beta, HM::Bilinear, BC::Free);
    CHECK(gap_nd(pair).value >= quartic_marginal(beta) - 4 * J);
    CHECK(quartic_marginal(beta) - 4 * J > 0.0);
  }

  TEST_CASE("lattice bounds stay below the three-site oracle") {
    auto m = LatticeModel::cube(1, 3, 0.2, SK::Quartic, 0.0, HM::Bilinear, BC::Free);
    NdOptions opt;
    opt.points = 25;
    double v = gap_nd(m, opt).value;
    CHECK(system_bound(m).value <= v * 1.02);
    CHECK(tilde_hess_bound(lattice_spec(m)).value <= v * 1.02);
  }

  TEST_CASE("L2 identity") {
    auto g = Potential1D::quadratic(1.0, 0.0);
    L2Identity lin = check_L2_identity(g, {[](double x) { return x; }, [](double) { return 1.0; }, [](double) { return 0.0; }});
    CHECK(lin.lhs == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(lin.rhs == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(lin.poincare_holds);
    L2Identity sq = check_L2_identity(g, {[](double x) { return x * x; }, [](double x) { return 2 * x; }, [](double) { return 2.0; }});
    CHECK(sq.lhs == doctest::Approx(sq.rhs).epsilon(1e-9));
    L2Identity c = check_L2_identity(Potential1D::quartic(1.0, 0.5),
                                     {[](double) { return 3.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }});
    CHECK(c.lhs == 0.0);
    CHECK(c.rhs == 0.0);
  }

  TEST_CASE("L2 identity property on random quartics") {
    gen::for_cases(61, 6, [](gen::Rng& r, int) {
      auto p = Potential1D::quartic(r.uniform(-1, 2), r.uniform(-1, 1));
      double a = r.uniform(0.2, 2);
      L2Identity s = check_L2_identity(p, {[a](double x) { return std::sin(a * x); },
                                           [a](double x) { return a * std::cos(a * x); },
                                           [a](double x) { return -a * a * std::sin(a * x); }});
      CHECK(s.lhs == doctest::Approx(s.rhs).epsilon(1e-7));
      CHECK(s.poincare_holds);
    });
  }

  TEST_CASE("discrete spectral identity") {
    SpectralIdentity s = discrete_spectral_identity(Potential1D::quartic(1.0, 0.0));
    CHECK(s.ratio_min == doctest::Approx(s.lambda1).epsilon(1e-9));
  }

  TEST_CASE("counter-based normals") {
    CHECK(counter_normal(7, 3, 11, 0) == counter_normal(7, 3, 11, 0));
    CHECK(counter_normal(7, 3, 11, 0) != counter_normal(7, 3, 11, 1));
    CHECK(counter_normal(7, 3, 11, 0) != counter_normal(8, 3, 11, 0));
    double s1 = 0, s2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      double z = counter_normal(5, static_cast<std::uint64_t>(i), 0, 0);
      s1 += z;
      s2 += z * z;
    }
    CHECK(std::abs(s1 / n) < 0.01);
    CHECK(std::abs(s2 / n - 1) < 0.02);
  }

  TEST_CASE("coupling simulation") {
    CouplingProfile prof(1, 0.0);
    CouplingSimConfig cfg;
    cfg.paths = 200;
    cfg.horizon = 0.5;
    DecaySeries same = coupling_sim(prof, {0.7}, {0.7}, cfg);
    for (double m : same.mean_f) CHECK(m == 0.0);

    DecaySeries a = coupling_sim(prof, {1.0}, {-1.0}, cfg);
    cfg.threads = 2;
    DecaySeries b = coupling_sim(prof, {1.0}, {-1.0}, cfg);
    CHECK(a.mean_f == b.mean_f);
    CHECK(a.stderr_f == b.stderr_f);
    CHECK(a.mean_f.front() == doctest::Approx(a.f0));
    CHECK(a.mean_f.back() <= a.f0 * std::exp(-prof.epsilon() * a.t.back()) + 3 * a.stderr_f.back());

    std::stringstream ss;
    write_decay_csv(a, ss);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "t,mean_f_dist,stderr");

    cfg.step = 1.0;
    CHECK(error_kind([&] { coupling_sim(prof, {1.0}, {-1.0}, cfg); }) == ErrorKind::StepTooLarge);
    cfg = {};
    cfg.paths = 0;
    CHECK(error_kind([&] { cfg.validate(); }) == ErrorKind::InvalidArgument);
  }
}
