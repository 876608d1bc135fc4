#pragma once

namespace thermoshield {

/// Volume of the unit ball in R^n, via omega_n = (2*pi/n) * omega_{n-2}
/// with omega_0 = 1 and omega_1 = 2.
double unit_ball_volume(int n);

/// Perimeter of the unit ball, n * omega_n.
double unit_sphere_area(int n);

/// Per(B_R) = n * omega_n * R^{n-1}.
double sphere_area(int n, double radius);

/// |B_R| = omega_n * R^n.
double ball_volume(int n, double radius);

}  // namespace thermoshield
