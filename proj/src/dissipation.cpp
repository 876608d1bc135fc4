#include "thermoshield/dissipation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "thermoshield/errors.hpp"
#include "thermoshield/geometry.hpp"
#include "thermoshield/numerics.hpp"

namespace thermoshield {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

void require_unit_interval(double u, const char* fn) {
  if (!(u >= 0.0 && u <= 1.0))
    throw std::domain_error(std::string(fn) + ": argument outside [0, 1]");
}

double eval_tabulated(const DissipationLaw::Tabulated& t, double u) {
  const auto& k = t.knots;
  auto it = std::lower_bound(k.begin(), k.end(), u,
                             [](const std::pair<double, double>& p, double x) { return p.first < x; });
  if (it == k.end()) return k.back().second;
  if (it->first == u) return it->second;
  const auto& right = *it;
  const auto& left = *std::prev(it);
  return left.second + (right.second - left.second) * (u - left.first) / (right.first - left.first);
}

bool is_tabulated_jump(const DissipationLaw::Tabulated& t, double u) {
  const auto& k = t.knots;
  for (std::size_t i = 1; i < k.size(); ++i)
    if (k[i].first == u && k[i - 1].first == u && k[i].second != k[i - 1].second) return true;
  return false;
}

double power_derivative(double c, double alpha, double u) {
  if (u == 0.0) {
    if (alpha > 1.0) return 0.0;
    if (alpha == 1.0) return c;
    throw NonDifferentiable("derivative: u^alpha with alpha < 1 has infinite slope at 0");
  }
  return c * alpha * std::pow(u, alpha - 1.0);
}

double power_curvature(double c, double alpha, double u) {
  if (alpha <= 1.0) return 0.0;
  return c * alpha * (alpha - 1.0) * std::pow(std::max(u, 1e-3), alpha - 2.0);
}

}  // namespace

DissipationLaw DissipationLaw::convection(double beta) {
  require_positive(beta, "convection beta");
  return DissipationLaw(Convection{beta});
}

DissipationLaw DissipationLaw::radiation(double gamma) {
  require_positive(gamma, "radiation gamma");
  return DissipationLaw(Radiation{gamma});
}

DissipationLaw DissipationLaw::linear(double c) {
  require_positive(c, "linear c");
  return DissipationLaw(Linear{c});
}

DissipationLaw DissipationLaw::power(double c, double alpha) {
  require_positive(c, "power c");
  require_positive(alpha, "power alpha");
  return DissipationLaw(Power{c, alpha});
}

DissipationLaw DissipationLaw::surface_cost(double c1, double c2, double alpha) {
  require_positive(c1, "surface_cost c1");
  if (!(c2 >= 0.0) || !std::isfinite(c2))
    throw std::invalid_argument("surface_cost c2 must be nonnegative");
  require_positive(alpha, "surface_cost alpha");
  return DissipationLaw(SurfaceCost{c1, c2, alpha});
}

DissipationLaw DissipationLaw::tabulated(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("tabulated law needs at least two knots");
  if (knots.front().first != 0.0 || knots.front().second != 0.0)
    throw std::invalid_argument("tabulated law must start at (0, 0)");
  if (knots.back().first != 1.0) throw std::invalid_argument("tabulated law must end at u = 1");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [u, v] = knots[i];
    if (!std::isfinite(u) || !std::isfinite(v) || u < 0.0 || u > 1.0 || v < 0.0)
      throw std::invalid_argument("tabulated knot outside [0,1] x [0,inf)");
    if (i > 0 && (u < knots[i - 1].first || v < knots[i - 1].second))
      throw std::invalid_argument("tabulated knots must be sorted and nondecreasing");
  }
  return DissipationLaw(Tabulated{std::move(knots)});
}

std::string_view DissipationLaw::name() const {
  return std::visit(overloaded{[](const Convection&) { return "convection"; },
                               [](const Radiation&) { return "radiation"; },
                               [](const Linear&) { return "linear"; },
                               [](const Power&) { return "power"; },
                               [](const SurfaceCost&) { return "surface_cost"; },
                               [](const Tabulated&) { return "tabulated"; }},
                    law_);
}

double eval(const DissipationLaw& law, double u) {
  require_unit_interval(u, "eval");
  return std::visit(
      overloaded{
          [u](const DissipationLaw::Convection& l) { return l.beta * u * u; },
          [u](const DissipationLaw::Radiation& l) {
            const double g = l.gamma;
            return u * u * (2.0 * g * g * g + u * (2.0 * g * g + u * (g + u / 5.0)));
          },
          [u](const DissipationLaw::Linear& l) { return l.c * u; },
          [u](const DissipationLaw::Power& l) { return l.c * std::pow(u, l.alpha); },
          [u](const DissipationLaw::SurfaceCost& l) {
            return u > 0.0 ? l.c1 + l.c2 * std::pow(u, l.alpha) : 0.0;
          },
          [u](const DissipationLaw::Tabulated& l) { return eval_tabulated(l, u); }},
      law.variant());
}

double derivative(const DissipationLaw& law, double u) {
  require_unit_interval(u, "derivative");
  return std::visit(
      overloaded{
          [u](const DissipationLaw::Convection& l) { return 2.0 * l.beta * u; },
          [u](const DissipationLaw::Radiation& l) {
            const double g = l.gamma;
            return u * (4.0 * g * g * g + u * (6.0 * g * g + u * (4.0 * g + u)));
          },
          [](const DissipationLaw::Linear& l) { return l.c; },
          [u](const DissipationLaw::Power& l) { return power_derivative(l.c, l.alpha, u); },
          [u](const DissipationLaw::SurfaceCost& l) {
            if (u == 0.0) throw NonDifferentiable("derivative: surface cost jumps at u = 0");
            return power_derivative(l.c2, l.alpha, u);
          },
          [u, &law](const DissipationLaw::Tabulated& l) {
            if (is_tabulated_jump(l, u)) throw NonDifferentiable("derivative: tabulated jump");
            constexpr double h = 1e-6;
            if (u < h) return (eval(law, u + h) - eval(law, u)) / h;
            if (u > 1.0 - h) return (eval(law, u) - eval(law, u - h)) / h;
            return (eval(law, u + h) - eval(law, u - h)) / (2.0 * h);
          }},
      law.variant());
}

double descent_slope(const DissipationLaw& law, double u) {
  u = std::clamp(u, 0.0, 1.0);
  return std::visit(
      overloaded{
          [u, &law](const DissipationLaw::Convection&) { return derivative(law, u); },
          [u, &law](const DissipationLaw::Radiation&) { return derivative(law, u); },
          [](const DissipationLaw::Linear& l) { return l.c; },
          [u](const DissipationLaw::Power& l) {
            return l.c * l.alpha * std::pow(std::max(u, 1e-12), l.alpha - 1.0);
          },
          [u](const DissipationLaw::SurfaceCost& l) {
            return l.c2 * l.alpha * std::pow(std::max(u, 1e-12), l.alpha - 1.0);
          },
          [u](const DissipationLaw::Tabulated& l) {
            const auto& k = l.knots;
            auto it = std::upper_bound(
                k.begin(), k.end(), u,
                [](double x, const std::pair<double, double>& p) { return x < p.first; });
            if (it == k.end()) it = std::prev(k.end());
            auto left = std::prev(it);
            while (left->first == it->first && left != k.begin()) --left;
            if (left->first == it->first) return 0.0;
            return (it->second - left->second) / (it->first - left->first);
          }},
      law.variant());
}

double curvature(const DissipationLaw& law, double u) {
  u = std::clamp(u, 0.0, 1.0);
  const double c = std::visit(
      overloaded{[](const DissipationLaw::Convection& l) { return 2.0 * l.beta; },
                 [u](const DissipationLaw::Radiation& l) {
                   const double g = l.gamma;
                   return 4.0 * g * g * g + u * (12.0 * g * g + u * (12.0 * g + 4.0 * u));
                 },
                 [](const DissipationLaw::Linear&) { return 0.0; },
                 [u](const DissipationLaw::Power& l) { return power_curvature(l.c, l.alpha, u); },
                 [u](const DissipationLaw::SurfaceCost& l) {
                   return power_curvature(l.c2, l.alpha, u);
                 },
                 [](const DissipationLaw::Tabulated&) { return 0.0; }},
      law.variant());
  return std::min(std::max(c, 0.0), 1e6);
}

bool is_admissible_on_grid(const DissipationLaw& law, int grid_size) {
  if (grid_size < 2) throw std::invalid_argument("is_admissible_on_grid: grid_size < 2");
  if (eval(law, 0.0) != 0.0) return false;
  double previous = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double v = eval(law, static_cast<double>(i) / (grid_size - 1));
    if (!(v >= 0.0) || v < previous) return false;
    previous = v;
  }
  return true;
}

double hyp_theta_inf(const DissipationLaw& law, int grid_size) {
  if (grid_size < 64) throw std::invalid_argument("hyp_theta_inf: grid_size must be >= 64");
  // s_k = 3^{-k/m}, spanning (1e-12, 1].
  const double span = 12.0 * std::log(10.0) / std::log(3.0);
  const double per_third = (grid_size - 1) / span;
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid_size; ++k) {
    const double s = std::pow(3.0, -k / per_third);
    const double denom = eval(law, s);
    if (denom <= 0.0) continue;
    best = std::min(best, eval(law, s / 3.0) / denom);
  }
  if (!std::isfinite(best)) throw DegenerateLaw("hyp_theta_inf: Theta vanishes on the whole grid");
  return std::clamp(best, 0.0, 1.0);
}

double volume_bound(const DissipationLaw& law, int n, double c_n) {
  if (n < 2) throw std::invalid_argument("volume_bound: n must be >= 2");
  require_positive(c_n, "volume_bound c_n");
  const auto integrand = [&](double t) {
    const double theta = eval(law, t);
    if (theta <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(t, 2 * n - 1) / std::pow(theta, n);
  };
  // t * f(t) not decaying as t -> 0 means the integral diverges at 0.
  constexpr double eps = 1e-8;
  const double tail_near = eps * integrand(eps);
  const double tail_far = 1e-6 * integrand(1e-6);
  if (!std::isfinite(tail_near) || tail_near >= tail_far * (1.0 - 1e-6))
    return std::numeric_limits<double>::infinity();

  // Integrate in log t: int_eps^1 f(t) dt = int_{ln eps}^0 f(e^x) e^x dx.
  const double integral = numerics::integrate(
      [&](double x) {
        const double t = std::exp(x);
        return integrand(t) * t;
      },
      std::log(eps), 0.0);
  if (!std::isfinite(integral)) return std::numeric_limits<double>::infinity();
  const double ratio = hyp_theta_inf(law);
  return unit_ball_volume(n) + c_n * std::pow(ratio, 2 * n) * integral;
}

FlatCriterion flat_criterion(const DissipationLaw& law, int n) {
  if (n < 2) throw std::invalid_argument("flat_criterion: n must be >= 2");
  const double theta1 = eval(law, 1.0);
  if (!(theta1 > 0.0)) throw DegenerateLaw("flat_criterion: Theta(1) = 0");
  const double slope = derivative(law, 1.0);
  const double ratio = slope * slope / theta1;
  const double bound = 4.0 * (n - 1);
  return {ratio, bound, ratio < bound};
}

DissipationLaw epsilon_regularize(const DissipationLaw& law, double eps, int grid_size) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("epsilon_regularize: eps in (0,1)");
  grid_size = std::max(grid_size, 1024);
  const double scale = (eval(law, 1.0) + eps) / (eps * eps);
  const auto cap = [scale](double u) { return scale * u * u; };

  // Jumps of a tabulated input become knots with a repeated abscissa, so the
  // regularized law keeps them instead of smearing them over a grid cell.
  std::vector<std::pair<double, double>> jumps;
  if (const auto* tab = std::get_if<DissipationLaw::Tabulated>(&law.variant()))
    for (std::size_t k = 1; k < tab->knots.size(); ++k)
      if (tab->knots[k].first == tab->knots[k - 1].first && tab->knots[k].first > 0.0)
        jumps.emplace_back(tab->knots[k].first, tab->knots[k].second);

  std::vector<double> grid;
  grid.reserve(grid_size + jumps.size());
  for (int i = 1; i < grid_size; ++i) grid.push_back(i == grid_size - 1 ? 1.0 : static_cast<double>(i) / (grid_size - 1));
  for (const auto& j : jumps) grid.push_back(j.first);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<std::pair<double, double>> knots;
  knots.reserve(grid.size() + jumps.size() + 1);
  knots.emplace_back(0.0, 0.0);
  double previous_u = 0.0;
  for (double u : grid) {
    // Chord from the previous knot stays under the convex cap only if the
    // knot does not exceed the cap at the left end of the segment.
    knots.emplace_back(u, std::min({cap(u), eval(law, u) + eps, cap(previous_u)}));
    for (const auto& j : jumps)
      if (j.first == u && u < 1.0) knots.emplace_back(u, std::max(knots.back().second, std::min(cap(u), j.second + eps)));
    previous_u = u;
  }
  return DissipationLaw::tabulated(std::move(knots));
}

}  // namespace thermoshield
