#pragma once

#include <iosfwd>
#include <vector>

#include "thermoshield/annulus_solver.hpp"
#include "thermoshield/dissipation.hpp"
#include "thermoshield/fourier.hpp"

namespace thermoshield {

// Level-set quantities are computed on the P1 triangulation of the mesh in
// physical coordinates (every cell split along its (i,j)-(i+1,j+1) diagonal),
// so contour lengths, clipped areas and integrals of nodal densities are
// exact for the piecewise-linear interpolant. K itself is excluded: areas
// and integrals cover only the annulus.

/// Superlevel-set data of a field at a list of levels t, with
/// Omega_t = {u > t}.
struct LevelDecomposition {
  ScalarField field;
  StarPair pair;
  std::vector<double> levels;
  /// Length of {u = t} inside the annulus.
  std::vector<double> interior_length;
  /// Arclength of the outer-boundary nodes with u > t.
  std::vector<double> exterior_length;
  /// Area of {u > t} within the annulus.
  std::vector<double> area;
  double outer_length;
  /// Minimum of u over the outer boundary.
  double min_trace;
};

/// n_levels levels uniform in the open interval (min_trace, 1). Throws
/// DegenerateField if u is constant.
LevelDecomposition decompose_levels(const ScalarField& field, const StarPair& pair, int n_levels);

/// Decomposition at explicit levels in [0, 1).
LevelDecomposition decompose_at(const ScalarField& field, const StarPair& pair,
                                std::vector<double> levels);

/// Integral over Omega_t of the nodal density, per level. Throws MeshMismatch
/// if the density lives on another mesh.
std::vector<double> level_integrals(const LevelDecomposition& dec, const ScalarField& density);

/// beta * exterior_length + int_{u=t} phi ds - int_{Omega_t} phi^2 dx per level.
/// Throws MeshMismatch if phi lives on another mesh.
std::vector<double> h_function(const LevelDecomposition& dec, double beta, const ScalarField& phi);

/// Nodal |grad u| / u, with the gradient averaged over adjacent triangles
/// (area weighted); zero where u = 0.
ScalarField gradient_ratio_field(const ScalarField& field, const StarPair& pair);

struct RadialReference {
  int n = 2;
  double beta = 1.0;
  double R = 2.0;
};

/// Transplants |grad u*| / u* of the reference radial state onto the level
/// sets of `field`: a node with value v gets the ratio at radius r where
/// |B_r| = |K| + |{u > v}|, normalized so that |K| maps to the unit ball and
/// clamped to [1, R].
ScalarField dearrangement(const ScalarField& field, const StarPair& pair, const RadialReference& ref);

struct HInequality {
  double energy;
  double min_H;
  double weighted_integral;
  bool passes;
  std::vector<double> levels;
  std::vector<double> H;
};

/// int_0^1 t (H(t, phi) - E) dt by the trapezoid rule over the levels (H is
/// constant on [0, min_trace]) and min over levels of H, with E the
/// convection energy of the field. phi defaults to the dearrangement against
/// (B_1, B_R) with |B_R| / |B_1| = |Omega| / |K|. Passes when both are within
/// 2% of E.
HInequality h_inequality_check(const ScalarField& field, const StarPair& pair, double beta,
                               int n_levels, const ScalarField* phi = nullptr);

struct TruncationScan {
  double baseline_energy;
  double best_t;
  double best_energy;
  bool improved;
};

/// Relaxed energy of u 1_{u>t} for the P1 interpolant: int_{Omega_t} |grad u|^2
/// + trapezoid-rule int of Theta(u) over the outer chords where u > t
/// + Theta(t) times the length of the new jump {u = t}.
double truncated_energy(const ScalarField& field, const StarPair& pair, const DissipationLaw& law, double t);

/// Scans t over {0}, n_thresholds uniform points of (0, 1) and midpoints
/// between distinct nodal values at n_thresholds + 1 quantiles. The baseline
/// is the t = 0 value, so best_energy never exceeds it.
TruncationScan truncation_scan(const ScalarField& field, const StarPair& pair,
                               const DissipationLaw& law, int n_thresholds);

struct HighCutoff {
  double delta;
  bool feasible;
};

/// Largest delta = k/4096 with delta + C_n Theta(1) / sqrt(Theta(delta)) (M - omega_n)^{1/(2n)} < 1.
/// The second term is zero when M = omega_n. delta = 0 when infeasible.
HighCutoff high_cutoff_bound(const DissipationLaw& law, int n, double M, double C_n = 1.0);

/// CSV with header t,interior_length,exterior_length,area,H_value.
void write_levels_csv(std::ostream& out, const LevelDecomposition& dec, const std::vector<double>& H);

}  // namespace thermoshield
