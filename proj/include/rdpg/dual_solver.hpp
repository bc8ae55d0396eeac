#pragma once

#include <optional>

#include "rdpg/graph.hpp"
#include "rdpg/symmat.hpp"

namespace rdpg {

/// Options for the reduced-dual solve. `c` is the trace-penalty strength.
struct SolverOptions {
  double c = 1.0;
  int max_iter = 20000;
  /// Stopping threshold on ||G||_F / max(1, ||Q||_F), G the projected-gradient mapping.
  double tol = 1e-7;
  /// Inner projection tolerance; <= 0 selects min(1e-9, tol / 10).
  double dykstra_tol = 0.0;
  int dykstra_max_iter = 5000;
  /// Function-value restart of the momentum sequence.
  bool restart = true;

  void validate() const;
  double effective_dykstra_tol() const;
};

struct DualSolution {
  SymMatrixd q;
  double c = 0.0;
  double objective = 0.0;
  int iterations = 0;
  double grad_map_norm = 0.0;  // relative, at exit
  double proj_residual = 0.0;  // PSD residual of the final projection
  int projection_iterations = 0;  // total inner iterations
  bool converged = false;
};

/// Reduced dual objective, summed over ordered pairs i != j:
/// edges     q            if q >= -1,  -1 - log(-q)   otherwise
/// nonedges  0            if q <= 1,    q - log q - 1 otherwise
double dual_objective(const SymMatrixd& q, const Graph& g);

/// Entrywise derivative of the per-pair terms; zero diagonal.
SymMatrixd dual_gradient(const SymMatrixd& q, const Graph& g);

/// Minimizes dual_objective over {Q PSD, diag Q = c} by accelerated projected
/// gradient (step 1, the gradient's Lipschitz constant) with function-value
/// restart and warm-started Dykstra projections. A non-converged solve returns
/// the last iterate with converged = false.
DualSolution solve_dual(const Graph& g, const SolverOptions& options,
                        const std::optional<SymMatrixd>& warm_start = std::nullopt);

/// For c <= 1: true iff every edge entry satisfies Q_ij >= -1 - 1e-6, i.e.
/// the objective reduces to the MAXCUT SDP relaxation sum over edges.
bool maxcut_mode_check(const DualSolution& sol, const Graph& g);

}  // namespace rdpg
