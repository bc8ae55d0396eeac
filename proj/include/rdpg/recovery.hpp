#pragma once

// Primal recovery from a dual solution and closed-form cone multipliers.
//
// Off-diagonal entries follow from the per-pair optimality conditions:
//   edge     P = 1 if Q > -1, else -1/Q
//   nonedge  P = 0 if Q <  1, else 1 - 1/Q
// and the diagonal from complementary slackness PQ = 0 read on the diagonal:
//   P_ii = -(1/C) [ sum_{j~i} max(-1, Q_ij) + sum_{j!~i, j!=i} P_ij / (1 - P_ij) ].

#include <vector>

#include "rdpg/dual_solver.hpp"
#include "rdpg/graph.hpp"

namespace rdpg {

struct OffdiagRecovery {
  SymMatrixd p;  // zero diagonal
  double clamp_mass = 0.0;
};

/// Entries are clamped to [0,1]; the total clamped amount is reported.
OffdiagRecovery recover_offdiag(const SymMatrixd& q, const Graph& g);

struct DiagRecovery {
  Eigen::VectorXd diag;
  double clamp_mass = 0.0;
  /// Smallest value before clamping at 0 (isolated nodes excluded).
  double min_raw = 0.0;
  /// Some entry fell below -1e-6 before clamping: the dual is not converged enough.
  bool warning = false;
};

/// Isolated nodes get 0. `offdiag_p` comes from recover_offdiag.
DiagRecovery recover_diag(const SymMatrixd& q, const Graph& g, double c,
                          const SymMatrixd& offdiag_p);

struct PrimalSolution {
  ProbMatrix p;
  double c = 0.0;
  /// Regularized objective of p, recomputed from p.
  double objective = 0.0;
  /// Numerical rank of p at threshold tau.
  int d_star = 0;
  double tau = 1e-3;
  /// max(0, -min eig P).
  double psd_residual = 0.0;
  /// ||P Q||_F (0 when no dual is attached).
  double comp_slack_residual = 0.0;
  /// Off-diagonal plus diagonal clamp mass.
  double clamp_mass = 0.0;
  bool diag_warning = false;
};

/// recover_offdiag + recover_diag + residuals.
PrimalSolution recover_primal(const DualSolution& dual, const Graph& g, double tau = 1e-3);

/// Membership in the exponential cone
///   K = {(x,y,z): y > 0, x >= y exp(z/y)} u {(x,0,z): x >= 0, z <= 0},
/// with slack `tol`. z = -inf is accepted on the y > 0 branch.
bool in_exp_cone(double x, double y, double z, double tol = 1e-9);

/// Membership in its dual
///   K* = {(u,v,w): w < 0, u >= -w exp(v/w - 1)} u {(u,v,0): u >= 0, v >= 0}.
bool in_exp_dual_cone(double u, double v, double w, double tol = 1e-9);

/// Multipliers and residuals for one unordered pair i < j. lambda = (r,s,t)
/// pairs with (P, 1, alpha), nu = (u,v,w) with (1 - P, 1, beta), where
/// alpha = log P and beta = log(1 - P).
struct PairMultipliers {
  int i = 0;
  int j = 0;
  bool edge = false;
  double q = 0.0;
  double p = 0.0;
  double r = 0.0, s = 0.0, t = 0.0;
  double u = 0.0, v = 0.0, w = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  /// r P + s + t alpha, and u (1 - P) + v + w beta (products with a zero
  /// factor are taken as 0 even when the log is infinite).
  double residual_lambda = 0.0;
  double residual_nu = 0.0;
  bool lambda_in_dual_cone = true;
  bool nu_in_dual_cone = true;
  bool primal_in_cone = true;
  /// A log of a nonpositive multiplier was required.
  bool degenerate = false;
  /// |Q + 1| for edges, |Q - 1| for nonedges.
  double branch_proximity = 0.0;
};

struct DualCertificate {
  std::vector<PairMultipliers> pairs;
  double max_stationarity = 0.0;
  /// max |u - r - Q|.
  double max_multiplier_mismatch = 0.0;
  bool all_in_cone = true;
  int degenerate_pairs = 0;
  double min_branch_proximity = 0.0;
};

/// Closed-form multipliers from Q and stationarity residuals against P.
DualCertificate assemble_certificate(const SymMatrixd& p, const SymMatrixd& q, const Graph& g,
                                     double c);

/// Dual objective of Q minus regularized primal objective of P.
double duality_gap(const SymMatrixd& p, const SymMatrixd& q, const Graph& g, double c);
double duality_gap(const PrimalSolution& primal, const DualSolution& dual, const Graph& g);

}  // namespace rdpg
