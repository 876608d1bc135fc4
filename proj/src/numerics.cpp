#include "thermoshield/numerics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace thermoshield::numerics {

Minimum golden_section(const std::function<double(double)>& f, double lo, double hi, double tol,
                       int max_iters) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iters && (hi - lo) > tol; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return fc < fd ? Minimum{c, fc} : Minimum{d, fd};
}

Minimum scan_and_refine(const std::function<double(double)>& f, std::span<const double> grid,
                        double tol) {
  if (grid.empty()) throw std::invalid_argument("scan_and_refine: empty grid");
  std::size_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = f(grid[i]);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  Minimum result{grid[best], best_value};
  if (grid.size() < 2) return result;
  const double lo = grid[best == 0 ? 0 : best - 1];
  const double hi = grid[std::min(best + 1, grid.size() - 1)];
  if (hi > lo) {
    const Minimum refined = golden_section(f, lo, hi, tol);
    if (refined.value < result.value) result = refined;
  }
  return result;
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double rel_tol,
              int max_iters) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) throw std::invalid_argument("bisect: no sign change");
  for (int it = 0; it < max_iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo <= rel_tol * std::abs(hi)) break;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 2) throw std::invalid_argument("linspace: count must be >= 2");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = lo + (hi - lo) * i / (count - 1);
  out.back() = hi;
  return out;
}

std::vector<double> logspace(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("logspace: need 0 < lo < hi");
  std::vector<double> out = linspace(std::log(lo), std::log(hi), count);
  for (double& x : out) x = std::exp(x);
  out.front() = lo;
  out.back() = hi;
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-12);
}

}  // namespace thermoshield::numerics
