#include "thermoshield/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace thermoshield {

double unit_ball_volume(int n) {
  if (n < 0) throw std::domain_error("unit_ball_volume: dimension must be nonnegative");
  double omega = (n % 2 == 0) ? 1.0 : 2.0;
  for (int k = (n % 2 == 0) ? 2 : 3; k <= n; k += 2) omega *= 2.0 * std::numbers::pi / k;
  return omega;
}

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

double sphere_area(int n, double radius) {
  return unit_sphere_area(n) * std::pow(radius, n - 1);
}

double ball_volume(int n, double radius) { return unit_ball_volume(n) * std::pow(radius, n); }

}  // namespace thermoshield
