#include "thermoshield/radial_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "thermoshield/geometry.hpp"
#include "thermoshield/numerics.hpp"

namespace thermoshield::radial {

namespace {

void require_dimension(int n) {
  if (n < 2) throw std::invalid_argument("dimension n must be >= 2");
}

void require_radius(double R, bool allow_infinite) {
  if (!(R >= 1.0) || (!allow_infinite && !std::isfinite(R)))
    throw std::domain_error("outer radius must satisfy R >= 1");
}

// Phi_n(R) - Phi_n(1), written to avoid cancellation for large R.
double phi_gap(int n, double R) {
  if (n == 2) return std::log(R);
  return -std::expm1((2.0 - n) * std::log(R)) / (n - 2);
}

}  // namespace

double phi(int n, double rho) {
  require_dimension(n);
  if (!(rho > 0.0)) throw std::domain_error("phi: rho must be positive");
  if (n == 2) return std::log(rho);
  return -1.0 / ((n - 2) * std::pow(rho, n - 2));
}

double phi_prime(int n, double rho) {
  require_dimension(n);
  if (!(rho > 0.0)) throw std::domain_error("phi_prime: rho must be positive");
  return std::pow(rho, 1 - n);
}

EnergyBreakdown convection_energy(int n, double beta, double R) {
  require_dimension(n);
  require_radius(R, true);
  if (!(beta > 0.0)) throw std::invalid_argument("convection_energy: beta must be positive");
  const double per1 = unit_sphere_area(n);
  if (std::isinf(R)) {
    if (n == 2) return EnergyBreakdown::make(0.0, 0.0, 0.0, 0.0);
    return EnergyBreakdown::make((n - 2) * per1, 0.0, 0.0, 0.0);
  }
  const double gap = phi_gap(n, R);
  const double denom = phi_prime(n, R) + beta * gap;
  const double trace = phi_prime(n, R) / denom;
  const double dirichlet = (beta / denom) * (beta / denom) * per1 * gap;
  const double boundary = beta * trace * trace * sphere_area(n, R);
  return EnergyBreakdown::make(dirichlet, boundary, 0.0, trace);
}

double convection_state(int n, double beta, double R, double rho) {
  require_dimension(n);
  require_radius(R, false);
  if (!(rho >= 0.0 && rho <= R)) throw std::domain_error("convection_state: rho outside [0, R]");
  if (rho <= 1.0) return 1.0;
  const double denom = phi_prime(n, R) + beta * phi_gap(n, R);
  return 1.0 - beta * phi_gap(n, rho) / denom;
}

double convection_gradient_ratio(int n, double beta, double R, double rho) {
  require_dimension(n);
  require_radius(R, false);
  if (!(rho >= 1.0 && rho <= R)) throw std::domain_error("gradient ratio: rho outside [1, R]");
  const double denom = phi_prime(n, R) + beta * phi_gap(n, R);
  return beta * phi_prime(n, rho) / (denom - beta * phi_gap(n, rho));
}

EnergyBreakdown general_radial_energy(int n, const DissipationLaw& law, double R, double lambda) {
  require_dimension(n);
  require_radius(R, false);
  if (!(lambda >= 0.0)) throw std::invalid_argument("general_radial_energy: lambda must be >= 0");
  const double per1 = unit_sphere_area(n);
  const double penalty = lambda * unit_ball_volume(n) * (std::pow(R, n) - 1.0);
  if (R == 1.0) return EnergyBreakdown::make(0.0, eval(law, 1.0) * per1, 0.0, 1.0);

  const double stiffness = per1 / phi_gap(n, R);
  const double outer_area = sphere_area(n, R);
  const auto energy = [&](double l) {
    return (1.0 - l) * (1.0 - l) * stiffness + outer_area * eval(law, l);
  };
  // Theta may jump or be nonconvex, so scan globally before refining.
  static const std::vector<double> grid = numerics::linspace(0.0, 1.0, 4097);
  const numerics::Minimum best = numerics::scan_and_refine(energy, grid, 1e-13);
  const double l = std::clamp(best.x, 0.0, 1.0);
  return EnergyBreakdown::make((1.0 - l) * (1.0 - l) * stiffness, outer_area * eval(law, l),
                               penalty, l);
}

double critical_radius(int n, double beta) {
  require_dimension(n);
  if (!(beta > 0.0)) throw std::invalid_argument("critical_radius: beta must be positive");
  return std::max(1.0, (n - 1) / beta);
}

std::optional<double> threshold_radius(int n, double beta) {
  require_dimension(n);
  if (!(beta > 0.0)) return std::nullopt;
  const bool intermediate = (n == 2) ? beta < 1.0 : (beta > n - 2 && beta < n - 1);
  if (!intermediate) return std::nullopt;
  const auto excess = [n, beta](double R) { return phi_prime(n, R) + beta * phi_gap(n, R) - 1.0; };
  const double lo = (n - 1) / beta;
  double hi = 2.0 * lo;
  for (int i = 0; i < 200 && excess(hi) <= 0.0; ++i) hi *= 2.0;
  return numerics::bisect(excess, lo, hi, 1e-10);
}

char regime_label(Regime r) {
  switch (r) {
    case Regime::a:
      return 'a';
    case Regime::b:
      return 'b';
    case Regime::c:
      return 'c';
  }
  return '?';
}

RegimeReport classify_regime(int n, double beta, double R_max) {
  require_dimension(n);
  require_radius(R_max, true);
  if (!(beta > 0.0)) throw std::invalid_argument("classify_regime: beta must be positive");
  RegimeReport report{};
  report.critical_radius = critical_radius(n, beta);
  report.threshold_radius = threshold_radius(n, beta);
  report.tie = false;
  if (beta >= n - 1) {
    report.regime = Regime::a;
    report.optimal_radius = R_max;
  } else if (beta <= n - 2) {
    report.regime = Regime::c;
    report.optimal_radius = 1.0;
  } else {
    report.regime = Regime::b;
    const double threshold = *report.threshold_radius;
    report.tie = std::abs(R_max - threshold) < 1e-9;
    report.optimal_radius = (R_max > threshold && !report.tie) ? R_max : 1.0;
  }
  report.optimal_energy = convection_energy(n, beta, report.optimal_radius).total;
  return report;
}

BestRadius best_radius(int n, const DissipationLaw& law, double R_max, double lambda) {
  require_dimension(n);
  require_radius(R_max, true);
  if (!(lambda >= 0.0)) throw std::invalid_argument("best_radius: lambda must be >= 0");
  double hi = R_max;
  if (lambda > 0.0) {
    // Beyond this radius the penalty alone exceeds E(B_1, B_1) = Theta(1) Per(B_1).
    const double cap = std::pow(1.0 + n * eval(law, 1.0) / lambda, 1.0 / n);
    hi = std::min(hi, cap);
  } else if (std::isinf(R_max)) {
    throw std::invalid_argument("best_radius: R_max must be finite when lambda = 0");
  }
  const auto energy = [&](double R) { return general_radial_energy(n, law, R, lambda).total; };
  if (hi <= 1.0) return {1.0, general_radial_energy(n, law, 1.0, lambda)};

  std::vector<double> grid{1.0};
  for (double offset : numerics::logspace(1e-6 * (hi - 1.0), hi - 1.0, 512))
    grid.push_back(1.0 + offset);
  grid.back() = hi;
  const numerics::Minimum best = numerics::scan_and_refine(energy, grid, 1e-11 * hi);
  const double R = std::clamp(best.x, 1.0, hi);
  return {R, general_radial_energy(n, law, R, lambda)};
}

PerturbationExpansion perturbation_expansion(int n, const DissipationLaw& law, double eps) {
  require_dimension(n);
  if (!(eps > 0.0 && eps < 0.5)) throw std::domain_error("perturbation_expansion: eps in (0, 0.5)");
  const double slope = derivative(law, 1.0);
  const double theta1 = eval(law, 1.0);
  const double shell_value = 1.0 - 0.5 * slope * eps;
  if (shell_value < 0.0)
    throw std::domain_error("perturbation_expansion: linear profile leaves [0, 1]; reduce eps");
  const double omega = unit_ball_volume(n);
  const double energy = n * omega * std::pow(1.0 + eps, n - 1) * eval(law, shell_value) +
                        omega * (std::pow(1.0 + eps, n) - 1.0) * slope * slope / 4.0;
  const double coeff = ((n - 1) * theta1 - 0.25 * slope * slope) * unit_sphere_area(n);
  return {energy, coeff};
}

double gradient_ratio_max(int n, double beta, double R) {
  require_dimension(n);
  if (!(R > 1.0) || !std::isfinite(R)) throw std::domain_error("gradient_ratio_max: need R > 1");
  double best = 0.0;
  for (double rho : numerics::linspace(1.0, R, 4096))
    best = std::max(best, convection_gradient_ratio(n, beta, R, rho));
  return best;
}

}  // namespace thermoshield::radial
