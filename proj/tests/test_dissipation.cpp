#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "thermoshield/dissipation.hpp"
#include "thermoshield/errors.hpp"

using namespace thermoshield;
using std::numbers::pi;

namespace {

std::vector<DissipationLaw> sample_laws() {
  return {DissipationLaw::convection(0.5),
          DissipationLaw::convection(2.0),
          DissipationLaw::radiation(1.0),
          DissipationLaw::radiation(0.3),
          DissipationLaw::linear(1.0),
          DissipationLaw::power(2.0, 0.5),
          DissipationLaw::power(1.0, 3.0),
          DissipationLaw::surface_cost(1.0, 1.0, 1.0),
          DissipationLaw::surface_cost(2.0, 0.0, 1.0),
          DissipationLaw::tabulated({{0, 0}, {0.5, 0.2}, {0.5, 0.7}, {1, 1}}),
          DissipationLaw::tabulated({{0, 0}, {1, 0}})};
}

// Independent midpoint-rule integral with a log-substitution near zero.
double midpoint_integral(double (*f)(double), double a, double b, int n) {
  double s = 0.0, h = (b - a) / n;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

}  // namespace

TEST_SUITE("dissipation") {
  TEST_CASE("closed-form values") {
    CHECK(eval(DissipationLaw::convection(1.0), 1.0) == doctest::Approx(1.0));
    CHECK(eval(DissipationLaw::radiation(1.0), 1.0) == doctest::Approx(5.2));
    CHECK(eval(DissipationLaw::surface_cost(2.0, 0.0, 1.0), 0.0) == 0.0);
    CHECK(eval(DissipationLaw::surface_cost(2.0, 3.0, 2.0), 0.5) == doctest::Approx(2.0 + 0.75));
    CHECK(eval(DissipationLaw::power(2.0, 0.5), 0.25) == doctest::Approx(1.0));
    CHECK(eval(DissipationLaw::linear(3.0), 0.5) == doctest::Approx(1.5));
  }

  TEST_CASE("derivatives") {
    CHECK(derivative(DissipationLaw::convection(2.0), 0.5) == doctest::Approx(2.0));
    CHECK(derivative(DissipationLaw::radiation(1.0), 1.0) == doctest::Approx(15.0));
    CHECK_THROWS_AS(derivative(DissipationLaw::surface_cost(1.0, 1.0, 1.0), 0.0), NonDifferentiable);
    // Finite-difference oracle for the radiation polynomial at an interior point.
    const auto rad = DissipationLaw::radiation(0.7);
    const double h = 1e-6, u = 0.4;
    const double fd = (eval(rad, u + h) - eval(rad, u - h)) / (2 * h);
    CHECK(derivative(rad, u) == doctest::Approx(fd).epsilon(1e-7));
    const auto tab = DissipationLaw::tabulated({{0, 0}, {0.5, 1.0}, {1, 1.5}});
    CHECK(derivative(tab, 0.25) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(derivative(tab, 0.75) == doctest::Approx(1.0).epsilon(1e-6));
  }

  TEST_CASE("invalid parameters and arguments") {
    CHECK_THROWS_AS(DissipationLaw::convection(0.0), std::invalid_argument);
    CHECK_THROWS_AS(DissipationLaw::radiation(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(DissipationLaw::power(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(DissipationLaw::surface_cost(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(DissipationLaw::tabulated({{0, 0}, {0.5, 1.0}, {0.4, 1.2}, {1, 2}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DissipationLaw::tabulated({{0, 0}, {0.5, 1.0}, {1, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(DissipationLaw::tabulated({{0, 0.1}, {1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(eval(DissipationLaw::convection(1.0), 1.5), std::domain_error);
    CHECK_THROWS_AS(eval(DissipationLaw::convection(1.0), -0.1), std::domain_error);
  }

  TEST_CASE("every law is admissible: zero at zero, nonnegative, nondecreasing") {
    for (const auto& law : sample_laws()) {
      CAPTURE(law.name());
      CHECK(eval(law, 0.0) == 0.0);
      CHECK(is_admissible_on_grid(law, 1024));
      double prev = 0.0;
      for (int i = 0; i <= 1024; ++i) {
        const double v = eval(law, i / 1024.0);
        CHECK(v >= prev);
        prev = v;
      }
    }
  }

  TEST_CASE("tabulated jump takes the lower value") {
    const auto law = DissipationLaw::tabulated({{0, 0}, {0.5, 0.2}, {0.5, 0.7}, {1, 1}});
    CHECK(eval(law, 0.5) == doctest::Approx(0.2));
    CHECK(eval(law, 0.5 + 1e-9) == doctest::Approx(0.7).epsilon(1e-6));
    CHECK(eval(law, 0.25) == doctest::Approx(0.1));
  }

  TEST_CASE("hyp_theta_inf") {
    for (int g : {64, 256, 1024, 4096}) CHECK(hyp_theta_inf(DissipationLaw::convection(3.0), g) == doctest::Approx(1.0 / 9));
    CHECK(hyp_theta_inf(DissipationLaw::power(1.0, 1.0)) == doctest::Approx(1.0 / 3));
    // Independent oracle: direct minimization of the ratio on a dense log grid.
    const auto rad = DissipationLaw::radiation(1.0);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 20000; ++k) {
      const double s = std::pow(10.0, -8.0 * k / 20000.0);
      const double u = s / 3, uu = s;
      const double num = std::pow(u, 5) / 5 + std::pow(u, 4) + 2 * std::pow(u, 3) + 2 * u * u;
      const double den = std::pow(uu, 5) / 5 + std::pow(uu, 4) + 2 * std::pow(uu, 3) + 2 * uu * uu;
      best = std::min(best, num / den);
    }
    CHECK(best == doctest::Approx(0.309465 / 5.2).epsilon(1e-4));
    CHECK(hyp_theta_inf(rad) == doctest::Approx(best).epsilon(1e-6));
    CHECK_THROWS_AS(hyp_theta_inf(DissipationLaw::tabulated({{0, 0}, {1, 0}})), DegenerateLaw);
  }

  TEST_CASE("volume_bound") {
    CHECK(std::isinf(volume_bound(DissipationLaw::convection(1.0), 2)));
    // Power(1,1): (1/3)^4 * int_0^1 t^3 / t^2 dt = 1/162.
    const double oracle = pi + std::pow(1.0 / 3, 4) *
                                   midpoint_integral([](double t) { return t * t * t / (t * t); }, 0, 1, 100000);
    CHECK(volume_bound(DissipationLaw::power(1.0, 1.0), 2) == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(volume_bound(DissipationLaw::power(1.0, 1.0), 2) == doctest::Approx(pi + 1.0 / 162).epsilon(1e-10));
    CHECK(volume_bound(DissipationLaw::surface_cost(1.0, 0.0, 1.0), 2) == doctest::Approx(pi + 0.25).epsilon(1e-10));
    // c_n scales the excess linearly.
    const double e1 = volume_bound(DissipationLaw::power(1.0, 1.0), 2, 1.0) - pi;
    const double e3 = volume_bound(DissipationLaw::power(1.0, 1.0), 2, 3.0) - pi;
    CHECK(e3 == doctest::Approx(3 * e1));
  }

  TEST_CASE("flat criterion") {
    const auto r = flat_criterion(DissipationLaw::radiation(1.0), 2);
    CHECK(r.ratio == doctest::Approx(225 / 5.2));
    CHECK(r.bound == 4.0);
    CHECK_FALSE(r.flat_optimal_for_small_M);
    const auto c = flat_criterion(DissipationLaw::convection(1.5), 3);
    CHECK(c.ratio == doctest::Approx(6.0));
    CHECK(c.bound == 8.0);
    CHECK(c.flat_optimal_for_small_M);
    for (int n : {2, 3, 4})
      for (int i = 1; i <= 50; ++i) {
        const double beta = 0.1 * i;
        CHECK(flat_criterion(DissipationLaw::convection(beta), n).flat_optimal_for_small_M == (4 * beta < 4 * (n - 1)));
      }
  }

  TEST_CASE("epsilon regularization keeps jumps of tabulated laws") {
    const auto law = DissipationLaw::tabulated({{0, 0}, {0.5, 0.2}, {0.5, 0.7}, {1, 1}});
    const auto reg = epsilon_regularize(law, 0.1);
    CHECK(eval(reg, 0.5) == doctest::Approx(0.3));
    CHECK(eval(reg, 0.5 + 1e-9) == doctest::Approx(0.8).epsilon(1e-6));
  }

  TEST_CASE("epsilon regularization") {
    const auto lin = epsilon_regularize(DissipationLaw::linear(1.0), 0.5);
    CHECK(eval(lin, 0.0) == 0.0);
    CHECK(eval(lin, 1.0) == doctest::Approx(1.5));
    for (const auto& law : sample_laws()) {
      CAPTURE(law.name());
      const double eps = 0.1;
      const auto reg = epsilon_regularize(law, eps);
      CHECK(is_admissible_on_grid(reg));
      CHECK(eval(reg, 0.001) <= (eval(law, 1.0) + eps) * 1e-4 + 1e-15);
      // Knot abscissas of the default 4096-point grid.
      for (int i = 0; i <= 4095; i += 5) {
        const double u = i / 4095.0;
        CHECK(eval(reg, u) <= eval(law, u) + eps + 1e-12);
        CHECK(eval(reg, u) <= (eval(law, 1.0) + eps) * (u / eps) * (u / eps) + 1e-12);
      }
    }
  }
}
