#pragma once

#include <optional>

#include "thermoshield/dissipation.hpp"

namespace thermoshield {

/// Energy of a configuration split into its terms. `trace` is the outer
/// boundary value of the state (arclength mean for non-radial fields).
struct EnergyBreakdown {
  double dirichlet = 0.0;
  double boundary = 0.0;
  double penalty = 0.0;
  double total = 0.0;
  double trace = 1.0;

  static EnergyBreakdown make(double dirichlet, double boundary, double penalty, double trace) {
    return {dirichlet, boundary, penalty, dirichlet + boundary + penalty, trace};
  }
};

/// Concentric configuration (B_1, B_R) in R^n with penalty weight lambda.
struct RadialConfig {
  int n = 2;
  DissipationLaw law = DissipationLaw::convection(1.0);
  double R = 1.0;
  double lambda = 0.0;
};

namespace radial {

/// Increasing radial profile: log(rho) for n = 2, -1/((n-2) rho^{n-2}) otherwise.
double phi(int n, double rho);
/// rho^{1-n}.
double phi_prime(int n, double rho);

/// Closed-form energy of (B_1, B_R) for Theta = beta u^2. R = +infinity is
/// accepted and evaluated through the limit formulas.
EnergyBreakdown convection_energy(int n, double beta, double R);

/// Convection state u*(rho) on [0, R]: 1 on the inner ball, harmonic outside.
double convection_state(int n, double beta, double R, double rho);

/// |grad u*| / u* of the convection state at rho in [1, R].
double convection_gradient_ratio(int n, double beta, double R, double rho);

/// Energy of (B_1, B_R) for any law: minimizes over the outer trace l the
/// harmonic-profile energy (1-l)^2 Per(B_1) / (Phi(R) - Phi(1)) + Per(B_R) Theta(l),
/// plus lambda * omega_n (R^n - 1).
EnergyBreakdown general_radial_energy(int n, const DissipationLaw& law, double R,
                                      double lambda = 0.0);

/// Radius where E_beta(B_1, B_R) returns to E_beta(B_1, B_1); empty outside
/// the intermediate regime n-2 < beta < n-1.
std::optional<double> threshold_radius(int n, double beta);

/// max(1, (n-1)/beta): where R -> E_beta(B_1, B_R) switches from increasing to decreasing.
double critical_radius(int n, double beta);

enum class Regime { a, b, c };

char regime_label(Regime r);

struct RegimeReport {
  Regime regime;
  double critical_radius;
  std::optional<double> threshold_radius;
  double optimal_radius;
  double optimal_energy;
  bool tie;
};

RegimeReport classify_regime(int n, double beta, double R_max);

struct BestRadius {
  double R_star;
  EnergyBreakdown energy;
};

/// Global minimizer of general_radial_energy over R in [1, R_max]. With
/// lambda > 0, R_max may be +infinity; the bracket is then capped where the
/// penalty alone exceeds the R = 1 energy.
BestRadius best_radius(int n, const DissipationLaw& law, double R_max, double lambda = 0.0);

struct PerturbationExpansion {
  double energy_eps;
  double first_order_coeff;
};

/// Energy of the thin-shell competitor on (B_1, B_{1+eps}) with linear profile
/// of slope Theta'(1)/2, and the first-order coefficient of its expansion in eps.
PerturbationExpansion perturbation_expansion(int n, const DissipationLaw& law, double eps);

/// max over a 4096-point radial grid on [1, R] of |grad u*| / u*.
double gradient_ratio_max(int n, double beta, double R);

}  // namespace radial
}  // namespace thermoshield
