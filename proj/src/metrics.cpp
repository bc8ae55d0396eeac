#include "rdpg/metrics.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace rdpg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_size(const SymMatrixd& m, const Graph& g) {
  if (m.n() != g.n()) throw InputError("matrix and graph sizes differ");
}

void require_same_size(const SymMatrixd& a, const SymMatrixd& b) {
  if (a.n() != b.n()) throw InputError("matrix sizes differ");
}

// x log(x / y) with the 0 log 0 = 0 convention.
double xlogx_over_y(double x, double y) {
  if (x == 0.0) return 0.0;
  if (y == 0.0) return kInf;
  return x * std::log(x / y);
}

}  // namespace

double bernoulli_loglik(const SymMatrixd& m, const Graph& a) {
  require_same_size(m, a);
  const auto& mask = a.adjacency_mask();
  double total = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    for (int j = i + 1; j < m.n(); ++j) {
      const double v = m(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw DomainError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                          ") = " + std::to_string(v) + " is outside [0,1]");
      }
      const double arg = mask(i, j) ? v : 1.0 - v;
      if (arg == 0.0) return -kInf;
      total += mask(i, j) ? std::log(v) : std::log1p(-v);
    }
  }
  return 2.0 * total;
}

double regularized_objective(const SymMatrixd& m, const Graph& a, double c) {
  return bernoulli_loglik(m, a) - c * m.trace();
}

double entropy(const SymMatrixd& p) {
  double total = 0.0;
  for (int i = 0; i < p.n(); ++i) {
    for (int j = i + 1; j < p.n(); ++j) {
      const double v = p(i, j);
      if (v > 0.0) total -= v * std::log(v);
    }
  }
  return 2.0 * total;
}

double bernoulli_kl(double x, double y) {
  return xlogx_over_y(x, y) + xlogx_over_y(1.0 - x, 1.0 - y);
}

double matrix_kl(const SymMatrixd& x, const SymMatrixd& y) {
  require_same_size(x, y);
  const int n = x.n();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double xv = x(i, j);
      const double yv = y(i, j);
      if (!(xv >= 0.0 && xv <= 1.0) || !(yv >= 0.0 && yv <= 1.0)) {
        throw DomainError("divergence arguments must lie in [0,1] off the diagonal");
      }
      total += bernoulli_kl(xv, yv);
    }
  }
  return 2.0 * total / (static_cast<double>(n) * (n - 1));
}

double spectral_distance(const SymMatrixd& m1, const SymMatrixd& m2) {
  require_same_size(m1, m2);
  return spectral_norm(m1 - m2);
}

double squared_spectral_distance(const SymMatrixd& m1, const SymMatrixd& m2) {
  require_same_size(m1, m2);
  const Eigen::MatrixXd d = m1.dense() * m1.dense() - m2.dense() * m2.dense();
  return spectral_norm(SymMatrixd::symmetrize(d));
}

double dunn_index(const Eigen::MatrixXd& points, const std::vector<int>& labels) {
  if (static_cast<Eigen::Index>(labels.size()) != points.rows()) {
    throw InputError("one label per point is required");
  }
  std::map<int, int> sizes;
  for (int l : labels) ++sizes[l];
  if (sizes.size() < 2) throw DomainError("the Dunn index needs at least two clusters");

  double min_between = kInf;
  double max_diameter = 0.0;
  for (Eigen::Index a = 0; a < points.rows(); ++a) {
    for (Eigen::Index b = a + 1; b < points.rows(); ++b) {
      const double d = (points.row(a) - points.row(b)).norm();
      if (labels[static_cast<std::size_t>(a)] == labels[static_cast<std::size_t>(b)]) {
        max_diameter = std::max(max_diameter, d);
      } else {
        min_between = std::min(min_between, d);
      }
    }
  }
  if (max_diameter == 0.0) return kInf;
  return min_between / max_diameter;
}

LevelCounts level_counts(const SymMatrixd& p, const Graph& g, double level, double eps) {
  require_same_size(p, g);
  LevelCounts out;
  for (int i = 0; i < p.n(); ++i) {
    for (int j = i + 1; j < p.n(); ++j) {
      if (std::abs(p(i, j) - level) > eps) continue;
      (g.has_edge(i, j) ? out.edges : out.nonedges) += 2;
    }
  }
  return out;
}

LambdaStats lambda_stats(const SymMatrixd& p, const Graph& g, double level_eps) {
  require_same_size(p, g);
  const int n = p.n();
  LambdaStats s;
  s.n = n;
  s.level_eps = level_eps;
  if (n < 2) return s;
  const double lo = 1.0 / n;
  const double hi = 1.0 - 1.0 / n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = p(i, j);
      const bool edge = g.has_edge(i, j);
      if (std::abs(v - lo) <= level_eps) (edge ? s.edges_lo : s.nonedges_lo) += 2;
      if (std::abs(v - hi) <= level_eps) (edge ? s.edges_hi : s.nonedges_hi) += 2;
      if (v > lo + level_eps && v < hi - level_eps) (edge ? s.edges_mid : s.nonedges_mid) += 2;
    }
  }
  s.z = s.nonedges_lo - s.nonedges_mid;
  return s;
}

}  // namespace rdpg
