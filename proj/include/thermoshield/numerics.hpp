#pragma once

#include <functional>
#include <span>
#include <vector>

namespace thermoshield::numerics {

struct Minimum {
  double x;
  double value;
};

/// Golden-section refinement of a unimodal bracket [lo, hi]; stops when the
/// bracket is narrower than `tol`.
Minimum golden_section(const std::function<double(double)>& f, double lo, double hi,
                       double tol = 1e-12, int max_iters = 200);

/// Global minimization over [lo, hi]: evaluate `f` on the given sorted grid,
/// then golden-section refine between the neighbours of the best grid point.
/// The best grid point is kept if refinement does not improve on it.
Minimum scan_and_refine(const std::function<double(double)>& f, std::span<const double> grid,
                        double tol = 1e-12);

/// Bisection for a sign change of `f` on [lo, hi] until (hi-lo) <= rel_tol*|hi|.
/// Throws std::invalid_argument if f(lo), f(hi) do not bracket a root.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double rel_tol = 1e-10, int max_iters = 500);

/// `count` points with lo..hi spaced uniformly (count >= 2).
std::vector<double> linspace(double lo, double hi, int count);

/// `count` points spaced geometrically from lo to hi (0 < lo < hi).
std::vector<double> logspace(double lo, double hi, int count);

/// Adaptive Gauss-Kronrod integral of f over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b);

}  // namespace thermoshield::numerics
