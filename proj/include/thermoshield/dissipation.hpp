#pragma once

#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace thermoshield {

/// Boundary dissipation law Theta on [0, 1]: lower semicontinuous,
/// nondecreasing, Theta(0) = 0.
///
/// Laws are immutable values; every factory validates its parameters and
/// throws std::invalid_argument on bad input.
class DissipationLaw {
 public:
  struct Convection {
    double beta;
  };
  /// Theta(u) = u^5/5 + gamma u^4 + 2 gamma^2 u^3 + 2 gamma^3 u^2.
  struct Radiation {
    double gamma;
  };
  struct Linear {
    double c;
  };
  struct Power {
    double c;
    double alpha;
  };
  /// Theta(u) = c1 * 1_{u>0} + c2 * u^alpha; jumps at 0 when c1 > 0.
  struct SurfaceCost {
    double c1;
    double c2;
    double alpha;
  };
  /// Piecewise linear through sorted (u, Theta(u)) knots spanning [0, 1].
  /// A repeated abscissa encodes a jump; the value at the jump point is the
  /// lower (left) one, which keeps the law lower semicontinuous.
  struct Tabulated {
    std::vector<std::pair<double, double>> knots;
  };

  using Variant = std::variant<Convection, Radiation, Linear, Power, SurfaceCost, Tabulated>;

  static DissipationLaw convection(double beta);
  static DissipationLaw radiation(double gamma);
  static DissipationLaw linear(double c);
  static DissipationLaw power(double c, double alpha);
  static DissipationLaw surface_cost(double c1, double c2, double alpha);
  static DissipationLaw tabulated(std::vector<std::pair<double, double>> knots);

  const Variant& variant() const { return law_; }
  std::string_view name() const;

 private:
  explicit DissipationLaw(Variant law) : law_(std::move(law)) {}
  Variant law_;
};

/// Theta(u); throws std::domain_error if u is outside [0, 1].
double eval(const DissipationLaw& law, double u);

/// Theta'(u). Analytic for closed-form laws, central difference (h = 1e-6,
/// one-sided at the ends) for tabulated ones. Throws NonDifferentiable at a jump.
double derivative(const DissipationLaw& law, double u);

/// One-sided slope used by descent solvers: equals `derivative` where the law
/// is smooth, ignores jumps, and takes the segment slope to the right of a
/// tabulated kink. Always finite.
double descent_slope(const DissipationLaw& law, double u);

/// Nonnegative curvature estimate max(Theta''(u), 0), capped; zero for
/// piecewise-linear laws.
double curvature(const DissipationLaw& law, double u);

/// Samples the law on `grid_size` uniform points and checks it is
/// nondecreasing, nonnegative and vanishes at 0.
bool is_admissible_on_grid(const DissipationLaw& law, int grid_size = 1024);

/// min over a logarithmic grid s in (0, 1] of Theta(s/3)/Theta(s), skipping
/// points where Theta(s) = 0. Throws DegenerateLaw if every point is skipped.
double hyp_theta_inf(const DissipationLaw& law, int grid_size = 1024);

/// omega_n + c_n * hyp_theta_inf^{2n} * int_0^1 t^{2n-1} / Theta(t)^n dt,
/// or +infinity when the integral diverges at 0.
double volume_bound(const DissipationLaw& law, int n, double c_n = 1.0);

struct FlatCriterion {
  double ratio;  // Theta'(1)^2 / Theta(1)
  double bound;  // 4 (n - 1)
  bool flat_optimal_for_small_M;
};

FlatCriterion flat_criterion(const DissipationLaw& law, int n);

/// Tabulated sampling of min((Theta(1)+eps)(u/eps)^2, Theta(u) + eps 1_{(0,1]}).
/// Knot values are lowered where needed so the piecewise-linear interpolant
/// stays below the quadratic cap between knots as well.
DissipationLaw epsilon_regularize(const DissipationLaw& law, double eps, int grid_size = 4096);

}  // namespace thermoshield
