#pragma once

// Shared helpers for the unit tests: random instances and independent oracles.

#include <cmath>
#include <functional>
#include <random>

#include "rdpg/graph.hpp"

namespace testutil {

inline rdpg::SymMatrixd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = z(rng);
  return rdpg::SymMatrixd::symmetrize(a);
}

inline rdpg::SymMatrixd random_psd(int n, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0.0, 1.0);
  Eigen::MatrixXd x(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) x(i, j) = z(rng);
  return rdpg::SymMatrixd::symmetrize(x * x.transpose());
}

inline rdpg::Graph random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<rdpg::Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) edges.emplace_back(i, j);
  return rdpg::Graph(n, edges);
}

/// Largest |eigenvalue| by power iteration on M^2 (avoids +-lambda ties).
inline double power_iteration_norm(const Eigen::MatrixXd& m, int iters = 20000) {
  const Eigen::MatrixXd m2 = m * m;
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(m.rows(), 1.0, 2.0);
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    const Eigen::VectorXd w = m2 * v;
    const double next = w.norm();
    v = w / next;
    if (std::abs(next - lambda) <= 1e-15 * next) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  return std::sqrt(lambda);
}

/// Central difference of f along the symmetric perturbation E_ij + E_ji.
inline double central_difference(const std::function<double(const rdpg::SymMatrixd&)>& f,
                                 const rdpg::SymMatrixd& x, int i, int j, double h) {
  rdpg::SymMatrixd up = x, down = x;
  up.set(i, j, x(i, j) + h);
  down.set(i, j, x(i, j) - h);
  return (f(up) - f(down)) / (2 * h);
}

}  // namespace testutil
