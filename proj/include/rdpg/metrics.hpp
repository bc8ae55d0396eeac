#pragma once

// Likelihoods, divergences, distances and level-set counts. Every sum over
// pairs runs over ordered pairs i != j, so each unordered pair counts twice.

#include <Eigen/Dense>

#include <vector>

#include "rdpg/graph.hpp"

namespace rdpg {

/// sum_{i != j} A_ij log M_ij + (1 - A_ij) log(1 - M_ij). Returns -inf when a
/// log argument is 0 under a nonzero coefficient. Throws DomainError when an
/// off-diagonal entry leaves [0,1].
double bernoulli_loglik(const SymMatrixd& m, const Graph& a);

/// bernoulli_loglik(M, A) - c tr M.
double regularized_objective(const SymMatrixd& m, const Graph& a, double c);

/// -sum_{i != j} P_ij log P_ij with 0 log 0 = 0.
double entropy(const SymMatrixd& p);

/// Mean entrywise Bernoulli KL divergence over ordered off-diagonal pairs,
/// normalized by n(n-1). +inf when Y sits at 0 or 1 against a different X.
double matrix_kl(const SymMatrixd& x, const SymMatrixd& y);

/// Bernoulli KL divergence of Ber(y) from Ber(x).
double bernoulli_kl(double x, double y);

/// ||M1 - M2||_2.
double spectral_distance(const SymMatrixd& m1, const SymMatrixd& m2);
/// ||M1^2 - M2^2||_2.
double squared_spectral_distance(const SymMatrixd& m1, const SymMatrixd& m2);

/// Smallest inter-cluster Euclidean distance over the largest cluster
/// diameter; rows of `points` are observations. Returns +inf when every
/// cluster has zero diameter. Throws DomainError with fewer than two
/// clusters.
double dunn_index(const Eigen::MatrixXd& points, const std::vector<int>& labels);

/// Ordered-pair counts of edges and nonedges with |P_ij - level| <= eps.
struct LevelCounts {
  long edges = 0;
  long nonedges = 0;
};
LevelCounts level_counts(const SymMatrixd& p, const Graph& g, double level, double eps = 1e-6);

/// Level-set statistics at the box levels lo = 1/n and hi = 1 - 1/n. "mid"
/// counts entries strictly inside (lo + eps, hi - eps). For n = 2 the two
/// levels coincide and the same pairs appear in both.
struct LambdaStats {
  int n = 0;
  double level_eps = 1e-6;
  long edges_lo = 0;
  long edges_mid = 0;
  long edges_hi = 0;
  long nonedges_lo = 0;
  long nonedges_mid = 0;
  long nonedges_hi = 0;
  /// nonedges_lo - nonedges_mid.
  long z = 0;

  long all_lo() const { return edges_lo + nonedges_lo; }
};
LambdaStats lambda_stats(const SymMatrixd& p, const Graph& g, double level_eps = 1e-6);

}  // namespace rdpg
