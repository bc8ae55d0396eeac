#include "rdpg/embedding.hpp"

#include <cmath>
#include <string>

namespace rdpg {

namespace {

Embedding top_eigen_embedding(const SymMatrixd& m, int d, EmbeddingSource source) {
  const int n = static_cast<int>(m.n());
  if (d < 1 || d > n) {
    throw InputError("embedding dimension " + std::to_string(d) + " outside [1, " +
                     std::to_string(n) + "]");
  }
  const auto e = eigh(m);  // ascending
  Embedding out;
  out.k = d;
  out.source = source;
  out.x.resize(n, d);
  out.eigenvalues.resize(d);
  for (int c = 0; c < d; ++c) {
    const int idx = n - 1 - c;
    const double lambda = e.values(idx);
    Eigen::VectorXd v = e.vectors.col(idx);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    out.eigenvalues(c) = lambda;
    out.x.col(c) = v * std::sqrt(std::max(0.0, lambda));
  }
  return out;
}

}  // namespace

Embedding ase(const SymMatrixd& m, int d) { return top_eigen_embedding(m, d, EmbeddingSource::Ase); }

Embedding ase(const Graph& g, int d) {
  return top_eigen_embedding(SymMatrixd::symmetrize(g.adjacency()), d, EmbeddingSource::Ase);
}

Embedding embed_from_p(const ProbMatrix& p, int k) {
  return top_eigen_embedding(p.values(), k, EmbeddingSource::InferredP);
}

}  // namespace rdpg
