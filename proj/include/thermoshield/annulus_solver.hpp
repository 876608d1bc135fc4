#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "thermoshield/dissipation.hpp"
#include "thermoshield/fourier.hpp"
#include "thermoshield/radial_engine.hpp"

namespace thermoshield {

/// Structured polar mesh of the annulus between the two boundaries of a
/// StarPair: node (i, j) sits at s_i = i/(n_s-1), theta_j = 2 pi j / n_theta,
/// mapped to rho = r_K(theta) + s (r_Omega(theta) - r_K(theta)).
struct Mesh {
  int n_s = 64;
  int n_theta = 256;

  int nodes() const { return n_s * n_theta; }
  int index(int i, int j) const { return i * n_theta + j; }
  void validate() const;
  friend bool operator==(const Mesh&, const Mesh&) = default;
};

/// Nodal temperatures on a Mesh, row-major with n_s rows. Row 0 is the
/// Dirichlet row on the boundary of K.
class ScalarField {
 public:
  ScalarField(Mesh mesh, std::vector<double> values);
  static ScalarField constant(Mesh mesh, double value);

  const Mesh& mesh() const { return mesh_; }
  double operator()(int i, int j) const { return values_[mesh_.index(i, j)]; }
  double& at(int i, int j) { return values_[mesh_.index(i, j)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Row 0 equal to 1 and all values in [0, 1].
  bool is_admissible() const;
  double min() const;
  double max() const;

 private:
  Mesh mesh_;
  std::vector<double> values_;
};

/// Discrete energy of a star pair on a mesh: bilinear elements on the mapped
/// rectangle with vertex (trapezoid) quadrature for int |grad u|^2, and the
/// trapezoid rule with arclength weights for the boundary term.
class AnnulusProblem {
 public:
  AnnulusProblem(const StarPair& pair, const Mesh& mesh);

  const Mesh& mesh() const { return mesh_; }
  /// Quadratic Dirichlet form u^T A u.
  double dirichlet(std::span<const double> u) const;
  /// out = A u.
  void apply(std::span<const double> u, std::span<double> out) const;
  /// Trapezoid weights sqrt(r_Omega^2 + r_Omega'^2) dtheta of the outer row.
  std::span<const double> boundary_weights() const { return weights_; }
  EnergyBreakdown energy(std::span<const double> u, const DissipationLaw& law) const;

  /// Symmetric positive semidefinite matrix A over all nodes; constants are
  /// in its kernel.
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }

 private:
  Mesh mesh_;
  Eigen::SparseMatrix<double> matrix_;
  std::vector<double> weights_;
};

/// Factorization of 2 A_ff + diag(w_j * curvature) over the free nodes.
/// Reusable as a preconditioner for nearby geometries on the same mesh.
class StateFactorization;

struct SolveOptions {
  double tol = 1e-10;
  int max_iters = 20000;
  const ScalarField* warm_start = nullptr;
  std::shared_ptr<const StateFactorization> preconditioner;
};

struct StateSolution {
  ScalarField field;
  EnergyBreakdown energy;
  int iterations = 0;
  std::shared_ptr<const StateFactorization> preconditioner;
};

/// Minimizes the discrete energy over nodal values in [0, 1] with row 0
/// pinned to 1, by preconditioned projected nonlinear conjugate gradients.
/// Stops when the preconditioned residual predicts a remaining relative
/// energy decrease below `tol`. Throws NonConvergence after max_iters.
StateSolution solve_state(const StarPair& pair, const DissipationLaw& law, const Mesh& mesh,
                          const SolveOptions& options);
StateSolution solve_state(const StarPair& pair, const DissipationLaw& law,
                          const Mesh& mesh = {}, double tol = 1e-10);

/// Discrete energy of a given field. Throws MeshMismatch on a malformed field.
EnergyBreakdown energy_of(const ScalarField& field, const StarPair& pair,
                          const DissipationLaw& law);

/// Dilates the geometry by t, keeping nodal values. Throws GeometryError if
/// the dilated pair violates the minimum gap.
std::pair<ScalarField, StarPair> scale_field(const ScalarField& field, const StarPair& pair,
                                             double t);

/// Physical (x, y) position of every mesh node.
std::vector<std::array<double, 2>> node_positions(const StarPair& pair, const Mesh& mesh);

/// CSV dump: first line "n_s,n_theta,fourier_order,<inner coeffs>,<outer coeffs>",
/// then n_s rows of n_theta values. Coefficients are [a0, a_1..a_m, b_1..b_m].
void write_field_csv(std::ostream& out, const ScalarField& field, const StarPair& pair);
std::pair<ScalarField, StarPair> read_field_csv(std::istream& in);

}  // namespace thermoshield
