#pragma once

#include "burgers/block_operator.hpp"

#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <vector>

namespace burgers {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class BoundaryTag { Dirichlet, Neumann };

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  BoundaryTag tag = BoundaryTag::Neumann;
};

/// Structured P1 triangulation of the unit square with N x N nodes. Node
/// (i, j) sits at (i, j) / (N - 1) and has index i + N j. The Dirichlet part
/// of the boundary is the left edge x = 0.
struct MeshP1 {
  int N = 0;
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<double> areas;
  std::vector<BoundaryEdge> boundary;
  std::vector<char> dirichlet;  // per node

  static MeshP1 unit_square(int n_nodes);
  double spacing() const { return 1.0 / (N - 1); }
  Eigen::Vector2d centroid(int e) const;
};

/// Constant-strain map of a triangle: Kelvin strain (e11, e22, sqrt2 e12)
/// from the six nodal displacement components (u1, u2 per node).
Eigen::Matrix<double, 3, 6> strain_displacement(const MeshP1& mesh, int e);

struct FemOperators {
  SparseMatrix mass;       // 2 N^2 square
  SparseMatrix stiffness;  // instantaneous stiffness from C0 per element
  std::vector<Eigen::Matrix<double, 3, 6>> b;
  std::vector<std::array<int, 6>> dofs;
};

/// Consistent (or lumped) mass matrix and the C0 stiffness. `c0[e]` is the
/// Maxwell spring of element e.
FemOperators assemble(const MeshP1& mesh, const std::vector<Matrix>& c0, double rho,
                      bool lumped = false);

struct FemConfig {
  int N = 9;
  double t_end = 40.0;
  /// 0 picks the largest step with h alpha1 <= 0.5 and h <= dx / (2 c).
  double h = 0.0;
  bool lumped_mass = false;
  /// Skip the internal-variable updates (purely elastic limit).
  bool freeze_internal = false;
  /// Scale of the smooth initial displacement and velocity.
  double amplitude = 0.1;
  /// Materials per element: element e uses materials[region[e]], region
  /// empty means every element uses materials[0]. All share d = 2, n, rho.
  std::vector<BurgersMaterial> materials;
  std::vector<int> region;
};

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> kinetic;
  std::vector<double> elastic;  // 1/2 (C0 psi) : psi
  std::vector<double> stored;   // sum_i 1/2 (C_i phi_i) : phi_i
  std::vector<double> total;
};

struct DecayResult {
  EnergyTrace trace;
  double h = 0.0;
  int steps = 0;
  /// Least-squares slope of log E over [T/2, T].
  double slope = 0.0;
  /// E(T) / E(0)
  double ratio = 0.0;
  /// max_j (E_{j+1} - E_j) / E(0), <= 0 for a dissipative run.
  double max_energy_increase = 0.0;
  /// max |u| over Dirichlet nodes at any step.
  double dirichlet_max = 0.0;
  /// Largest relative residual of the midpoint linear solves.
  double max_solve_residual = 0.0;
};

/// One value per step, called with (t, nodal displacement) after each step.
using SnapshotFn = std::function<void(double, const Vector&)>;

/// Internal-variable Strang splitting: exact relaxation over h/2, implicit
/// midpoint for the wave part with the dashpot strains frozen, exact
/// relaxation over h/2.
DecayResult run_decay_experiment(const FemConfig& cfg, const SnapshotFn& snapshot = nullptr);

/// Least-squares slope of log(values) against times over t >= t_from.
double fit_log_slope(const std::vector<double>& times, const std::vector<double>& values,
                     double t_from);

}  // namespace burgers
