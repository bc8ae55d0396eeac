#pragma once

#include <Eigen/Dense>

#include "rdpg/graph.hpp"

namespace rdpg {

enum class EmbeddingSource { Ase, InferredP };

/// Rows are node coordinates; columns are ordered by descending eigenvalue.
/// Each column's sign is fixed so its largest-magnitude entry is positive
/// (embeddings are otherwise unique only up to an orthogonal transform).
struct Embedding {
  Eigen::MatrixXd x;
  int k = 0;
  EmbeddingSource source = EmbeddingSource::Ase;
  /// The k eigenvalues used, descending, before clamping at 0.
  Eigen::VectorXd eigenvalues;

  /// X X^T.
  SymMatrixd gram() const { return SymMatrixd::symmetrize(x * x.transpose()); }
};

/// Top-d algebraic eigenpairs of M with negative eigenvalues clamped to 0:
/// X = V_d sqrt(max(L_d, 0)). Throws InputError unless 1 <= d <= n.
Embedding ase(const SymMatrixd& m, int d);

/// Adjacency spectral embedding of a graph.
Embedding ase(const Graph& g, int d);

/// The same construction on an inferred probability matrix.
Embedding embed_from_p(const ProbMatrix& p, int k);

}  // namespace rdpg
