#include "rdpg/graph.hpp"

#include <algorithm>
#include <string>

namespace rdpg {

Graph::Graph(int n, const std::vector<Edge>& edges) : n_(n) {
  if (n < 1) throw InputError("graph needs at least one node");
  adj_.setZero(n, n);
  degrees_.assign(static_cast<std::size_t>(n), 0);
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw InputError("edge (" + std::to_string(i) + "," + std::to_string(j) + ") out of range");
    }
    if (i == j) throw InputError("self-loop at node " + std::to_string(i));
    if (adj_(i, j)) continue;
    adj_(i, j) = adj_(j, i) = 1;
    edges_.emplace_back(std::min(i, j), std::max(i, j));
    ++degrees_[static_cast<std::size_t>(i)];
    ++degrees_[static_cast<std::size_t>(j)];
  }
  std::sort(edges_.begin(), edges_.end());
}

Graph Graph::complete(int n) {
  std::vector<Edge> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, e);
}

Graph Graph::disjoint_edges(int n) {
  if (n % 2 != 0) throw InputError("disjoint_edges: n must be even");
  std::vector<Edge> e;
  for (int i = 0; i < n; i += 2) e.emplace_back(i, i + 1);
  return Graph(n, e);
}

Graph Graph::from_adjacency(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw InputError("adjacency is not square");
  std::vector<Edge> e;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    if (a(i, i) != 0.0) throw InputError("adjacency has nonzero diagonal");
    for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
      if (a(i, j) != a(j, i)) throw InputError("adjacency is not symmetric");
      if (a(i, j) != 0.0 && a(i, j) != 1.0) throw InputError("adjacency is not 0/1");
      if (a(i, j) == 1.0) e.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return Graph(static_cast<int>(a.rows()), e);
}

int Graph::max_degree() const { return *std::max_element(degrees_.begin(), degrees_.end()); }
int Graph::min_degree() const { return *std::min_element(degrees_.begin(), degrees_.end()); }

ProbMatrix::ProbMatrix(SymMatrixd values, double slack) : values_(std::move(values)) {
  std::vector<std::pair<std::size_t, std::size_t>> bad;
  const auto& p = values_.dense();
  for (Eigen::Index j = 0; j < p.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < p.rows(); ++i) {
      if (!(p(i, j) >= -slack && p(i, j) <= 1.0 + slack)) {
        bad.emplace_back(static_cast<std::size_t>(j), static_cast<std::size_t>(i));
      }
    }
  }
  if (!bad.empty()) {
    std::string msg = "probability matrix has " + std::to_string(bad.size()) +
                      " off-diagonal entries outside [0,1], first at (" +
                      std::to_string(bad.front().first) + "," + std::to_string(bad.front().second) +
                      ")";
    throw ModelViolation(msg, std::move(bad));
  }
}

bool ProbMatrix::is_psd(double tol) const {
  const auto w = eigvalsh(values_);
  const double scale = std::max(1e-300, w.cwiseAbs().maxCoeff());
  return w.minCoeff() >= -tol * scale;
}

}  // namespace rdpg
