#include "thermoshield/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "thermoshield/errors.hpp"

namespace thermoshield {

namespace {

constexpr int kCheckPoints = 1024;
constexpr int kAreaPoints = 4096;

struct GapScan {
  double min_inner;
  double min_gap;
};

GapScan scan(const FourierRadius& inner, const FourierRadius& outer) {
  GapScan s{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int j = 0; j < kCheckPoints; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / kCheckPoints;
    const double rk = inner(theta);
    s.min_inner = std::min(s.min_inner, rk);
    s.min_gap = std::min(s.min_gap, outer(theta) - rk);
  }
  return s;
}

}  // namespace

FourierRadius FourierRadius::circle(double radius, int order) {
  return FourierRadius(radius, std::vector<double>(order, 0.0), std::vector<double>(order, 0.0));
}

FourierRadius::FourierRadius(double a0, std::vector<double> cos, std::vector<double> sin)
    : a0_(a0), cos_(std::move(cos)), sin_(std::move(sin)) {
  if (cos_.size() != sin_.size())
    throw std::invalid_argument("FourierRadius: cosine and sine coefficient counts differ");
  if (order() > kMaxFourierOrder)
    throw std::invalid_argument("FourierRadius: order exceeds 16");
  if (!std::isfinite(a0_)) throw std::invalid_argument("FourierRadius: non-finite coefficient");
  for (int k = 0; k < order(); ++k)
    if (!std::isfinite(cos_[k]) || !std::isfinite(sin_[k]))
      throw std::invalid_argument("FourierRadius: non-finite coefficient");
}

double FourierRadius::operator()(double theta) const {
  double r = a0_;
  for (int k = 1; k <= order(); ++k) r += cos_[k - 1] * std::cos(k * theta) + sin_[k - 1] * std::sin(k * theta);
  return r;
}

double FourierRadius::derivative(double theta) const {
  double dr = 0.0;
  for (int k = 1; k <= order(); ++k)
    dr += k * (-cos_[k - 1] * std::sin(k * theta) + sin_[k - 1] * std::cos(k * theta));
  return dr;
}

FourierRadius FourierRadius::rotated(double angle) const {
  FourierRadius out = *this;
  for (int k = 1; k <= order(); ++k) {
    const double c = std::cos(k * angle);
    const double s = std::sin(k * angle);
    out.cos_[k - 1] = cos_[k - 1] * c - sin_[k - 1] * s;
    out.sin_[k - 1] = cos_[k - 1] * s + sin_[k - 1] * c;
  }
  return out;
}

FourierRadius FourierRadius::scaled(double factor) const {
  FourierRadius out = *this;
  out.a0_ *= factor;
  for (double& c : out.cos_) c *= factor;
  for (double& s : out.sin_) s *= factor;
  return out;
}

FourierRadius FourierRadius::with_order(int order) const {
  if (order < 0 || order > kMaxFourierOrder)
    throw std::invalid_argument("FourierRadius: order must be in [0, 16]");
  FourierRadius out = *this;
  out.cos_.resize(order, 0.0);
  out.sin_.resize(order, 0.0);
  return out;
}

FourierRadius FourierRadius::plus_mode(int k, double cos_amp, double sin_amp) const {
  if (k < 1) throw std::invalid_argument("FourierRadius: mode index must be >= 1");
  FourierRadius out = order() < k ? with_order(k) : *this;
  out.cos_[k - 1] += cos_amp;
  out.sin_[k - 1] += sin_amp;
  return out;
}

std::vector<double> FourierRadius::coefficients() const {
  std::vector<double> c;
  c.reserve(1 + 2 * order());
  c.push_back(a0_);
  c.insert(c.end(), cos_.begin(), cos_.end());
  c.insert(c.end(), sin_.begin(), sin_.end());
  return c;
}

FourierRadius FourierRadius::from_coefficients(std::span<const double> coeffs) {
  if (coeffs.empty() || coeffs.size() % 2 == 0)
    throw std::invalid_argument("FourierRadius: coefficient vector must have odd length");
  const std::size_t m = (coeffs.size() - 1) / 2;
  return FourierRadius(coeffs[0], {coeffs.begin() + 1, coeffs.begin() + 1 + m},
                       {coeffs.begin() + 1 + m, coeffs.end()});
}

double FourierRadius::asymmetry() const {
  double worst = 0.0;
  for (int k = 0; k < order(); ++k) worst = std::max({worst, std::abs(cos_[k]), std::abs(sin_[k])});
  return worst / std::abs(a0_);
}

double area(const FourierRadius& shape) {
  double sum = 0.0;
  for (int j = 0; j < kAreaPoints; ++j) {
    const double r = shape(2.0 * std::numbers::pi * j / kAreaPoints);
    sum += r * r;
  }
  return 0.5 * sum * (2.0 * std::numbers::pi / kAreaPoints);
}

FourierRadius project_inner_volume(const FourierRadius& shape) {
  const double a = area(shape);
  if (!(a > 0.0)) throw GeometryError("project_inner_volume: degenerate shape");
  return shape.scaled(std::sqrt(std::numbers::pi / a));
}

StarPair::StarPair(FourierRadius inner, FourierRadius outer) {
  auto pair = try_make(std::move(inner), std::move(outer));
  if (!pair) throw GeometryError("StarPair: need r_K > 0 and r_Omega - r_K >= 1e-3 everywhere");
  *this = std::move(*pair);
}

StarPair::StarPair(FourierRadius inner, FourierRadius outer, double gap, Unchecked)
    : inner_(std::move(inner)), outer_(std::move(outer)), gap_(gap) {}

std::optional<StarPair> StarPair::try_make(FourierRadius inner, FourierRadius outer) {
  const int m = std::max(inner.order(), outer.order());
  inner = inner.with_order(m);
  outer = outer.with_order(m);
  const GapScan s = scan(inner, outer);
  if (!(s.min_inner > 0.0) || !(s.min_gap >= kGapMin * (1.0 - 1e-9))) return std::nullopt;
  return StarPair(std::move(inner), std::move(outer), s.min_gap, Unchecked{});
}

StarPair StarPair::circles(double inner_radius, double outer_radius, int order) {
  return StarPair(FourierRadius::circle(inner_radius, order),
                  FourierRadius::circle(outer_radius, order));
}

StarPair StarPair::rotated(double angle) const {
  return StarPair(inner_.rotated(angle), outer_.rotated(angle));
}

}  // namespace thermoshield
