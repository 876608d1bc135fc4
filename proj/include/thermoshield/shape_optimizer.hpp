#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "thermoshield/annulus_solver.hpp"
#include "thermoshield/dissipation.hpp"
#include "thermoshield/fourier.hpp"
#include "thermoshield/radial_engine.hpp"

namespace thermoshield {

struct OptimizeOptions {
  int fourier_order = 4;
  /// First trial step, in coefficient units per unit of gradient.
  double initial_step = 1e-2;
  double backtrack = 0.5;
  double min_step = 1e-10;
  /// Central-difference step relative to the inner a0.
  double fd_step = 1e-5;
  int max_outer_iters = 500;
  double volume_tolerance = 1e-8;
  /// Projected-gradient norm below which the descent stops.
  double gradient_tol = 1e-6;
  /// Relative objective decrease regarded as stagnation (three in a row stop the run).
  double energy_tol = 1e-11;
  Mesh mesh{};
  double solve_tol = 1e-12;

  void validate() const;
};

struct TraceRow {
  int iter;
  double energy;
  double dirichlet;
  double boundary;
  double penalty;
  double inner_area;
  double outer_area;
  double deficit;
  double step;
};

enum class StopReason { gradient, step, stagnation, collapsed, max_iters };

std::string_view stop_reason_name(StopReason r);

struct OptimizeResult {
  StarPair pair;
  /// Objective at the final pair. After a collapse this is the smaller of the
  /// solved value and the analytic Omega = K value Theta(1) * 2 pi.
  EnergyBreakdown energy;
  /// max over both boundaries of max_k |coefficient| / a0.
  double deficit;
  bool collapsed;
  int iterations;
  StopReason reason;
  std::vector<TraceRow> trace;
};

/// Projected descent on the Fourier coefficients of (K, Omega) for
/// min E subject to |K| = pi and |Omega| <= M. Throws std::invalid_argument on
/// an infeasible start; NonConvergence from the state solver propagates.
OptimizeResult optimize_constrained(const DissipationLaw& law, double M, const StarPair& init,
                                    const OptimizeOptions& opts = {});

/// Same descent for min E + lambda (|Omega| - pi) subject to |K| = pi.
OptimizeResult optimize_penalized(const DissipationLaw& law, double lambda, const StarPair& init,
                                  const OptimizeOptions& opts = {});

/// Trace CSV with header iter,energy,dirichlet,boundary,penalty,inner_area,outer_area,deficit,step.
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

/// Scales `outer` toward `inner` (outer' = inner + tau (outer - inner), tau in
/// [0, 1]) so that area(outer') = M; unchanged when already within M.
FourierRadius shrink_outer_to_area(const FourierRadius& inner, const FourierRadius& outer, double M);

double deficit(const StarPair& pair);

/// Re-expresses both boundaries about the point where the inner boundary's
/// k = 1 Fourier modes vanish, refitted to the common order. Translations are
/// a symmetry of the energy, so the optimizers start from this frame and keep
/// the inner k = 1 modes at zero.
StarPair center_on_inner(const FourierRadius& inner, const FourierRadius& outer);

}  // namespace thermoshield
