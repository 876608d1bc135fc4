#pragma once

#include <optional>
#include <span>
#include <vector>

namespace thermoshield {

inline constexpr int kMaxFourierOrder = 16;
inline constexpr double kGapMin = 1e-3;

/// Truncated Fourier series r(theta) = a0 + sum_k (a_k cos k theta + b_k sin k theta).
class FourierRadius {
 public:
  FourierRadius() = default;
  /// Circle of the given radius, padded with `order` zero modes.
  static FourierRadius circle(double radius, int order = 0);
  /// cos[k-1] / sin[k-1] hold the mode-k coefficients; sizes must match.
  FourierRadius(double a0, std::vector<double> cos, std::vector<double> sin);

  int order() const { return static_cast<int>(cos_.size()); }
  double a0() const { return a0_; }
  double cos_coeff(int k) const { return cos_[k - 1]; }
  double sin_coeff(int k) const { return sin_[k - 1]; }

  double operator()(double theta) const;
  double derivative(double theta) const;

  /// Same curve rotated counterclockwise by `angle`: r'(theta) = r(theta - angle).
  FourierRadius rotated(double angle) const;
  FourierRadius scaled(double factor) const;
  /// Zero-padded or truncated copy with the given order.
  FourierRadius with_order(int order) const;
  FourierRadius plus_mode(int k, double cos_amp, double sin_amp) const;

  /// Flat coefficient vector [a0, a_1..a_m, b_1..b_m].
  std::vector<double> coefficients() const;
  static FourierRadius from_coefficients(std::span<const double> coeffs);

  /// max over k >= 1 of |coefficient| / a0.
  double asymmetry() const;

 private:
  double a0_ = 1.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

/// 1/2 int_0^{2 pi} r(theta)^2 d theta, trapezoid rule on 4096 points.
double area(const FourierRadius& shape);

/// Rescales all coefficients so that the enclosed area equals pi.
FourierRadius project_inner_volume(const FourierRadius& shape);

/// Nested star-shaped pair (K, Omega) around a common origin. Construction
/// checks r_K > 0 and r_Omega - r_K >= kGapMin on a 1024-point grid.
class StarPair {
 public:
  StarPair(FourierRadius inner, FourierRadius outer);
  static std::optional<StarPair> try_make(FourierRadius inner, FourierRadius outer);
  static StarPair circles(double inner_radius, double outer_radius, int order = 0);

  const FourierRadius& inner() const { return inner_; }
  const FourierRadius& outer() const { return outer_; }
  int order() const { return inner_.order(); }
  /// min over the check grid of r_Omega - r_K.
  double gap() const { return gap_; }

  StarPair rotated(double angle) const;

 private:
  struct Unchecked {};
  StarPair(FourierRadius inner, FourierRadius outer, double gap, Unchecked);
  FourierRadius inner_;
  FourierRadius outer_;
  double gap_ = 0.0;
};

}  // namespace thermoshield
