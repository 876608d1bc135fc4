#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <doctest.h>

#include "thermoshield/geometry.hpp"
#include "thermoshield/radial_engine.hpp"

using namespace thermoshield;
using namespace thermoshield::radial;
using std::numbers::e;
using std::numbers::pi;

namespace {

// Independent closed form of E_beta(B_1, B_R) written from scratch:
// u* = A + B Phi(rho), u*(1) = 1, Robin condition at R.
double oracle_convection(int n, double beta, double R) {
  const auto Phi = [n](double r) { return n == 2 ? std::log(r) : -std::pow(r, 2.0 - n) / (n - 2); };
  const double per1 = n * std::pow(pi, n / 2.0) / std::tgamma(n / 2.0 + 1);
  return beta * per1 / (std::pow(R, 1.0 - n) + beta * (Phi(R) - Phi(1.0)));
}

}  // namespace

TEST_SUITE("radial_engine") {
  TEST_CASE("geometry constants") {
    CHECK(unit_ball_volume(2) == doctest::Approx(pi));
    CHECK(unit_ball_volume(3) == doctest::Approx(4 * pi / 3));
    CHECK(unit_ball_volume(4) == doctest::Approx(pi * pi / 2));
    for (int n = 1; n <= 9; ++n)
      CHECK(unit_ball_volume(n) == doctest::Approx(std::pow(pi, n / 2.0) / std::tgamma(n / 2.0 + 1)).epsilon(1e-14));
    CHECK(sphere_area(3, 2.0) == doctest::Approx(16 * pi));
    CHECK(ball_volume(2, 3.0) == doctest::Approx(9 * pi));
  }

  TEST_CASE("profile functions") {
    CHECK(phi(2, 1.0) == 0.0);
    CHECK(phi(3, 2.0) == doctest::Approx(-0.5));
    for (int n : {2, 3, 4, 7}) CHECK(phi_prime(n, 1.0) == 1.0);
    CHECK(phi_prime(3, 2.0) == doctest::Approx(0.25));
    const double h = 1e-6;
    for (int n : {2, 3, 5}) CHECK((phi(n, 1.7 + h) - phi(n, 1.7 - h)) / (2 * h) == doctest::Approx(phi_prime(n, 1.7)).epsilon(1e-8));
  }

  TEST_CASE("convection energy closed form") {
    CHECK(convection_energy(2, 1.0, 1.0).total == doctest::Approx(2 * pi));
    CHECK(convection_energy(2, 1.0, e).total == doctest::Approx(2 * pi * e / (1 + e)));
    CHECK(convection_energy(2, 1.0, e).total == doctest::Approx(4.5934).epsilon(1e-4));
    CHECK(convection_energy(3, 1.0, std::numeric_limits<double>::infinity()).total == doctest::Approx(4 * pi));
    for (int n : {2, 3, 4})
      for (double beta : {0.3, 1.0, 4.0})
        for (double R : {1.0, 1.3, 2.0, 7.0}) {
          const auto E = convection_energy(n, beta, R);
          CHECK(E.total == doctest::Approx(oracle_convection(n, beta, R)).epsilon(1e-12));
          CHECK(E.total == doctest::Approx(E.dirichlet + E.boundary + E.penalty).epsilon(1e-15));
          CHECK(E.penalty == 0.0);
          CHECK(E.trace >= 0.0);
          CHECK(E.trace <= 1.0);
        }
    const auto one = convection_energy(3, 2.0, 1.0);
    CHECK(one.trace == 1.0);
    CHECK(one.dirichlet == 0.0);
  }

  TEST_CASE("convection state") {
    CHECK(convection_state(3, 0.7, 4.0, 0.5) == 1.0);
    CHECK(convection_state(2, 1.0, e, e) == doctest::Approx(1 / (1 + e)));
    CHECK(convection_state(2, 1.0, e, 1.0) == doctest::Approx(1.0));
    double prev = 1.0;
    for (int i = 1; i <= 100; ++i) {
      const double v = convection_state(3, 0.9, 3.0, 1.0 + 2.0 * i / 100);
      CHECK(v < prev);
      prev = v;
    }
  }

  TEST_CASE("general radial energy") {
    const auto E = general_radial_energy(2, DissipationLaw::convection(1.0), e);
    CHECK(E.total == doctest::Approx(2 * pi * e / (1 + e)).epsilon(1e-10));
    CHECK(E.trace == doctest::Approx(0.26894).epsilon(1e-4));
    CHECK(general_radial_energy(2, DissipationLaw::radiation(1.0), 1.0).total == doctest::Approx(2 * pi * 5.2));
    // Two-branch oracle for a jump at zero: l = 0 costs Per(B_1)/ln 2.
    const auto sc = general_radial_energy(2, DissipationLaw::surface_cost(1.0, 0.0, 1.0), 2.0);
    CHECK(sc.total == doctest::Approx(2 * pi / std::log(2.0)).epsilon(1e-10));
    CHECK(sc.trace == 0.0);
    CHECK(sc.boundary == 0.0);
    // Penalty term.
    const auto pen = general_radial_energy(2, DissipationLaw::convection(1.0), 2.0, 0.1);
    CHECK(pen.penalty == doctest::Approx(0.1 * pi * 3));
  }

  TEST_CASE("the trace minimizer never exceeds a scanned candidate") {
    const DissipationLaw laws[] = {DissipationLaw::radiation(1.0), DissipationLaw::power(1.0, 0.5),
                                   DissipationLaw::surface_cost(0.5, 2.0, 2.0),
                                   DissipationLaw::tabulated({{0, 0}, {0.3, 0.1}, {0.3, 1.0}, {1, 2}})};
    for (const auto& law : laws)
      for (double R : {1.2, 2.0, 4.0}) {
        const double got = general_radial_energy(2, law, R).total;
        const double A = 2 * pi / std::log(R);
        for (int k = 0; k <= 200; ++k) {
          const double l = k / 200.0;
          CHECK(got <= A * (1 - l) * (1 - l) + 2 * pi * R * eval(law, l) + 1e-12);
        }
      }
  }

  TEST_CASE("threshold radius") {
    const auto t = threshold_radius(2, 0.5);
    REQUIRE(t.has_value());
    CHECK(*t == doctest::Approx(4.92).epsilon(0.01 / 4.92));
    CHECK(1 / *t + 0.5 * std::log(*t) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK_FALSE(threshold_radius(2, 1.5).has_value());
    CHECK_FALSE(threshold_radius(3, 0.5).has_value());
    for (int n : {3, 4})
      for (double beta : {n - 1.9, n - 1.5, n - 1.1}) {
        const auto r = threshold_radius(n, beta);
        REQUIRE(r.has_value());
        const double e1 = beta * unit_sphere_area(n);
        CHECK(std::abs(convection_energy(n, beta, *r).total - e1) < 1e-8 * e1);
      }
  }

  TEST_CASE("regime classification examples") {
    const auto a = classify_regime(3, 2.5, 3.0);
    CHECK(a.regime == Regime::a);
    CHECK(a.optimal_radius == 3.0);
    const auto c = classify_regime(3, 0.8, 5.0);
    CHECK(c.regime == Regime::c);
    CHECK(c.optimal_radius == 1.0);
    CHECK(c.optimal_energy == doctest::Approx(3.2 * pi));
    const auto b = classify_regime(2, 0.5, 3.0);
    CHECK(b.regime == Regime::b);
    CHECK(b.optimal_radius == 1.0);
    const auto b2 = classify_regime(2, 0.5, 6.0);
    CHECK(b2.optimal_radius == 6.0);
    const auto tie = classify_regime(2, 0.5, *threshold_radius(2, 0.5));
    CHECK(tie.tie);
  }

  TEST_CASE("critical radius is the sign change of dE/dR") {
    for (int n : {2, 3, 4})
      for (double beta : {0.3, 0.6, 1.2}) {
        const double cr = critical_radius(n, beta);
        if (cr <= 1.0) continue;
        const auto dE = [&](double R) {
          const double h = 1e-7 * R;
          return (oracle_convection(n, beta, R + h) - oracle_convection(n, beta, R - h)) / (2 * h);
        };
        CHECK(dE(cr * (1 - 1e-3)) > 0);
        CHECK(dE(cr * (1 + 1e-3)) < 0);
      }
  }

  TEST_CASE("best radius") {
    CHECK(best_radius(2, DissipationLaw::convection(1.0), 3.0).R_star == doctest::Approx(3.0));
    CHECK(best_radius(2, DissipationLaw::convection(0.5), 3.0).R_star == doctest::Approx(1.0));
    const auto pen = best_radius(2, DissipationLaw::convection(1.0), std::numeric_limits<double>::infinity(), 0.1);
    CHECK(pen.R_star >= 1.7);
    CHECK(pen.R_star <= 2.0);
    const double R = pen.R_star;
    const double q = 1 / R + std::log(R);
    CHECK((R - 1) / (R * R * R * q * q) == doctest::Approx(0.1).epsilon(1e-6));
    // Grid oracle.
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40000; ++i) {
      const double r = 1.0 + 4.0 * i / 40000;
      best = std::min(best, oracle_convection(2, 1.0, r) + 0.1 * pi * (r * r - 1));
    }
    CHECK(pen.energy.total <= best + 1e-12);
    CHECK(pen.energy.total == doctest::Approx(best).epsilon(1e-8));
  }

  TEST_CASE("perturbation expansion") {
    CHECK(perturbation_expansion(2, DissipationLaw::radiation(1.0), 1e-3).first_order_coeff ==
          doctest::Approx((5.2 - 56.25) * 2 * pi));
    CHECK(perturbation_expansion(2, DissipationLaw::convection(1.0), 1e-3).first_order_coeff == doctest::Approx(0.0));
    const auto flat = DissipationLaw::tabulated({{0, 0}, {0.5, 1.0}, {1, 1.0}});
    CHECK(perturbation_expansion(3, flat, 1e-3).first_order_coeff == doctest::Approx(2 * 1.0 * unit_sphere_area(3)));
    // Remainder / eps shrinks with eps.
    const auto law = DissipationLaw::radiation(0.5);
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      const auto pe = perturbation_expansion(2, law, eps);
      const double rem = std::abs(pe.energy_eps - eval(law, 1.0) * 2 * pi - pe.first_order_coeff * eps) / eps;
      CHECK(rem < prev);
      prev = rem;
    }
  }

  TEST_CASE("gradient ratio and energy monotonicity agree") {
    // The ratio equals beta at R by the Robin condition.
    CHECK(gradient_ratio_max(2, 2.0, 4.0) <= 2.0 + 1e-9);
    CHECK(gradient_ratio_max(3, 5.0, 10.0) <= 5.0 + 1e-9);
    CHECK(gradient_ratio_max(2, 0.5, 1.5) > 0.5);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ub(0.1, 4.0), uR(1.05, 8.0);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 2 + trial % 3;
      const double beta = ub(rng), R = uR(rng);
      const bool ratio_ok = gradient_ratio_max(n, beta, R) <= beta + 1e-9;
      const double ER = oracle_convection(n, beta, R);
      bool scan_ok = true;
      for (int k = 0; k < 64; ++k) scan_ok = scan_ok && oracle_convection(n, beta, 1.0 + (R - 1.0) * k / 63) >= ER - 1e-9;
      CHECK(ratio_ok == scan_ok);
    }
  }
}
