#pragma once

// Box-constrained variant of the regularized likelihood problem:
//
//   maximize  L_A(P) - C tr P   over P PSD with 1/n <= P_ij <= 1 - 1/n (i != j),
//
// solved in the primal by accelerated projected gradient ascent with
// warm-started Dykstra projections onto PSD ∩ box.

#include "rdpg/graph.hpp"
#include "rdpg/recovery.hpp"

namespace rdpg {

struct RegModOptions {
  double c = 1.0;
  int max_iter = 20000;
  /// Stop when ||P_next - Y||_F / (step * max(1, ||grad||_F)) <= tol.
  double tol = 1e-7;
  double dykstra_tol = 1e-11;
  int dykstra_max_iter = 20000;
  /// Rank threshold for d_star.
  double tau = 1e-3;

  void validate() const;
};

/// Regularized objective on the box; same value as regularized_objective.
double regmod_objective(const SymMatrixd& p, const Graph& g, double c);

/// Off-diagonal A_ij / P_ij - (1 - A_ij) / (1 - P_ij); diagonal -c.
SymMatrixd regmod_gradient(const SymMatrixd& p, const Graph& g, double c);

/// Multiplier view of optimality. Q comes from the PSD part of the normal
/// cone at P (diag Q = C, Q PSD, PQ = 0 at an optimum) and box_multiplier
/// holds d_ij - c_ij on the off-diagonal; stationarity is grad + Q - box = 0.
struct RegModKkt {
  SymMatrixd q;
  SymMatrixd box_multiplier;
  /// ||P - Proj(P + s grad)||_F / s, zero exactly at a KKT point.
  double stationarity = 0.0;
  double comp_slack = 0.0;       // ||P Q||_F
  double q_diag_error = 0.0;     // max |Q_ii - C|
  double q_min_eigenvalue = 0.0;
  /// Most negative box multiplier sign violation (0 when all signs are right).
  double box_sign_violation = 0.0;
};
RegModKkt regmod_kkt(const SymMatrixd& p, const Graph& g, double c, double step = 0.0);

struct RegModSolution {
  PrimalSolution primal;
  int iterations = 0;
  double grad_map_norm = 0.0;
  double box_residual = 0.0;  // max distance of an off-diagonal entry from the box
  double step = 0.0;          // final step size
  /// Projections that stopped at the iteration cap, and their worst
  /// PSD-to-box residual.
  int inexact_projections = 0;
  double max_projection_residual = 0.0;
  bool converged = false;
  RegModKkt kkt;
};

/// Requires n >= 2 (for n = 2 the box is the single point 1/2). A
/// non-converged solve returns its last iterate with converged = false.
RegModSolution solve_regmod(const Graph& g, const RegModOptions& options);

}  // namespace rdpg
