#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <utility>
#include <vector>

#include "rdpg/symmat.hpp"

namespace rdpg {

using Edge = std::pair<int, int>;

/// Simple undirected unweighted graph on nodes 0..n-1.
class Graph {
 public:
  Graph() = default;
  /// Throws InputError on self-loops or out-of-range endpoints. Duplicate
  /// edges (in either orientation) are merged.
  Graph(int n, const std::vector<Edge>& edges);

  static Graph empty(int n) { return Graph(n, {}); }
  static Graph complete(int n);
  /// n/2 disjoint edges (2i, 2i+1); n must be even.
  static Graph disjoint_edges(int n);
  /// Undirected graph from a symmetric 0/1 matrix with zero diagonal.
  static Graph from_adjacency(const Eigen::MatrixXd& a);

  int n() const { return n_; }
  std::size_t m() const { return edges_.size(); }
  /// Edges as (i, j) with i < j, sorted lexicographically.
  const std::vector<Edge>& edges() const { return edges_; }
  bool has_edge(int i, int j) const { return adj_(i, j) != 0; }
  int degree(int i) const { return degrees_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& degrees() const { return degrees_; }
  int max_degree() const;
  int min_degree() const;
  /// Dense 0/1 adjacency matrix.
  Eigen::MatrixXd adjacency() const { return adj_.cast<double>(); }
  const Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic>& adjacency_mask() const {
    return adj_;
  }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> degrees_;
  Eigen::Matrix<unsigned char, Eigen::Dynamic, Eigen::Dynamic> adj_;
};

/// Symmetric matrix in the role of an edge-probability matrix. Off-diagonal
/// entries lie in [0,1] up to `slack`; the diagonal holds latent-vector norms.
class ProbMatrix {
 public:
  ProbMatrix() = default;
  /// Throws ModelViolation listing the offending pairs when an off-diagonal
  /// entry leaves [-slack, 1 + slack].
  explicit ProbMatrix(SymMatrixd values, double slack = 1e-8);

  int n() const { return static_cast<int>(values_.n()); }
  const SymMatrixd& values() const { return values_; }
  const Eigen::MatrixXd& dense() const { return values_.dense(); }
  double operator()(int i, int j) const { return values_(i, j); }
  double trace() const { return values_.trace(); }

  /// min eigenvalue >= -tol * ||P||_2.
  bool is_psd(double tol = 1e-6) const;

 private:
  SymMatrixd values_;
};

}  // namespace rdpg
