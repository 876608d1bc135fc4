#include <cmath>
#include <numbers>

#include <doctest.h>

#include "thermoshield/errors.hpp"
#include "thermoshield/fourier.hpp"
#include "thermoshield/shape_optimizer.hpp"

using namespace thermoshield;
using std::numbers::pi;

namespace {

// Independent quadrature of 1/2 int r^2 over a fine midpoint grid.
double oracle_area(const FourierRadius& r) {
  constexpr int kN = 20000;
  double s = 0.0;
  for (int i = 0; i < kN; ++i) {
    const double v = r(2 * pi * (i + 0.5) / kN);
    s += v * v;
  }
  return 0.5 * s * 2 * pi / kN;
}

}  // namespace

TEST_SUITE("fourier") {
  TEST_CASE("evaluation and derivative") {
    const FourierRadius r(1.0, {0.1, 0.0}, {0.0, 0.2});
    CHECK(r(0.3) == doctest::Approx(1.0 + 0.1 * std::cos(0.3) + 0.2 * std::sin(0.6)));
    const double h = 1e-6;
    CHECK(r.derivative(0.7) == doctest::Approx((r(0.7 + h) - r(0.7 - h)) / (2 * h)).epsilon(1e-8));
    CHECK(r.asymmetry() == doctest::Approx(0.2));
    CHECK_THROWS_AS(FourierRadius(1.0, {0.1}, {}), std::invalid_argument);
  }

  TEST_CASE("area") {
    CHECK(area(FourierRadius::circle(1.0)) == doctest::Approx(pi));
    CHECK(area(FourierRadius::circle(2.0)) == doctest::Approx(4 * pi));
    CHECK(area(FourierRadius(1.0, {0.1}, {0.0})) == doctest::Approx(pi * 1.005).epsilon(1e-13));
    const FourierRadius r(1.3, {0.05, -0.1, 0.02}, {0.07, 0.0, -0.03});
    CHECK(area(r) == doctest::Approx(oracle_area(r)).epsilon(1e-9));
    double sum = 1.3 * 1.3;
    for (double c : {0.05, -0.1, 0.02, 0.07, 0.0, -0.03}) sum += 0.5 * c * c;
    CHECK(area(r) == doctest::Approx(pi * sum).epsilon(1e-13));
  }

  TEST_CASE("inner volume projection") {
    CHECK(project_inner_volume(FourierRadius::circle(2.0)).a0() == doctest::Approx(1.0));
    CHECK(project_inner_volume(FourierRadius::circle(1.0)).a0() == doctest::Approx(1.0));
    const auto p = project_inner_volume(FourierRadius(1.0, {0.1}, {0.0}));
    CHECK(p.a0() == doctest::Approx(1 / std::sqrt(1.005)).epsilon(1e-13));
    CHECK(std::abs(area(p) - pi) < 1e-12);
  }

  TEST_CASE("coefficient round trip, order padding, rotation") {
    const FourierRadius r(1.3, {0.05, -0.1}, {0.07, 0.01});
    const auto c = r.coefficients();
    REQUIRE(c.size() == 5);
    const auto back = FourierRadius::from_coefficients(c);
    CHECK(back(1.1) == doctest::Approx(r(1.1)));
    const auto padded = r.with_order(4);
    CHECK(padded.order() == 4);
    CHECK(padded(2.3) == doctest::Approx(r(2.3)));
    const auto rot = r.rotated(0.4);
    for (double t : {0.0, 1.0, 2.5}) CHECK(rot(t) == doctest::Approx(r(t - 0.4)));
    CHECK(area(rot) == doctest::Approx(area(r)));
  }

  TEST_CASE("star pair validation") {
    CHECK_NOTHROW(StarPair::circles(1.0, 2.0));
    CHECK_THROWS_AS(StarPair::circles(1.0, 1.0005), GeometryError);
    CHECK_THROWS_AS(StarPair(FourierRadius::circle(1.0), FourierRadius(1.2, {0.3}, {0.0})), GeometryError);
    CHECK_THROWS_AS(StarPair(FourierRadius(0.5, {0.6}, {0.0}), FourierRadius::circle(3.0)), GeometryError);
    CHECK_FALSE(StarPair::try_make(FourierRadius::circle(1.0), FourierRadius::circle(0.9)).has_value());
    const auto p = StarPair::circles(1.0, 2.0);
    CHECK(p.gap() == doctest::Approx(1.0));
  }

  TEST_CASE("outer shrink to area") {
    const FourierRadius inner(1.0, {0.05}, {0.0});
    const FourierRadius outer(3.0, {0.2}, {0.1});
    const double M = 0.6 * area(outer) + 0.4 * area(inner);
    const auto s = shrink_outer_to_area(inner, outer, M);
    CHECK(area(s) == doctest::Approx(M).epsilon(1e-12));
    CHECK(area(shrink_outer_to_area(inner, outer, 100.0)) == doctest::Approx(area(outer)));
  }

  TEST_CASE("recentering removes the inner first modes") {
    // A unit circle shifted by (0.1, -0.05) has nonzero k = 1 modes.
    const double dx = 0.1, dy = -0.05;
    constexpr int kN = 64;
    std::vector<double> c(9, 0.0);
    // Sampled radius of the shifted circle, fitted to order 4 by DFT.
    std::vector<double> samples(kN);
    for (int j = 0; j < kN; ++j) {
      const double t = 2 * pi * j / kN;
      const double p = dx * std::cos(t) + dy * std::sin(t);
      samples[j] = p + std::sqrt(p * p - (dx * dx + dy * dy) + 1.0);
    }
    std::vector<double> cs(4), sn(4);
    double a0 = 0;
    for (int j = 0; j < kN; ++j) a0 += samples[j] / kN;
    for (int k = 1; k <= 4; ++k)
      for (int j = 0; j < kN; ++j) {
        const double t = 2 * pi * j / kN;
        cs[k - 1] += 2 * samples[j] * std::cos(k * t) / kN;
        sn[k - 1] += 2 * samples[j] * std::sin(k * t) / kN;
      }
    const FourierRadius inner(a0, cs, sn);
    CHECK(std::abs(inner.cos_coeff(1)) > 0.05);
    const auto centered = center_on_inner(inner, FourierRadius::circle(2.5, 4));
    CHECK(std::abs(centered.inner().cos_coeff(1)) < 1e-6);
    CHECK(std::abs(centered.inner().sin_coeff(1)) < 1e-6);
    CHECK(centered.inner().asymmetry() < 1e-4);
    CHECK(area(centered.inner()) == doctest::Approx(area(inner)).epsilon(1e-6));
  }
}
