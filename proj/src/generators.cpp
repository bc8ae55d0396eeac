#include "rdpg/generators.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace rdpg {

namespace {

std::vector<int> split_sizes(int n, std::size_t parts, const std::vector<int>& given) {
  if (!given.empty()) {
    if (given.size() != parts) throw ConfigError("sizes must match the number of components");
    int total = 0;
    for (int s : given) {
      if (s < 0) throw ConfigError("negative component size");
      total += s;
    }
    if (total != n) throw ConfigError("component sizes must sum to n");
    return given;
  }
  std::vector<int> out(parts, n / static_cast<int>(parts));
  for (int r = 0; r < n % static_cast<int>(parts); ++r) ++out[static_cast<std::size_t>(r)];
  return out;
}

void check_count(int n, std::size_t parts) {
  if (n < 1) throw ConfigError("n must be positive");
  if (parts == 0) throw ConfigError("at least one component is required");
}

// Orthonormal u, v completing the unit vector c to a right-handed frame.
std::pair<Eigen::Vector3d, Eigen::Vector3d> complete_frame(const Eigen::Vector3d& c) {
  const Eigen::Vector3d helper =
      std::abs(c.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  const Eigen::Vector3d u = helper.cross(c).normalized();
  return {u, c.cross(u)};
}

}  // namespace

SbmConfig default_sbm() {
  SbmConfig cfg;
  cfg.sizes = {15, 10, 25};
  cfg.block_probs.resize(3, 3);
  cfg.block_probs << 0.25, 0.05, 0.02,  //
      0.05, 0.35, 0.07,                 //
      0.02, 0.07, 0.40;
  return cfg;
}

CapsConfig default_caps(int n) {
  CapsConfig cfg;
  cfg.n = n;
  cfg.caps = {{Eigen::Vector3d(4, 1, 1).normalized(), 0.22},
              {Eigen::Vector3d(1, 4, 1).normalized(), 0.22}};
  return cfg;
}

BallsConfig default_balls(int n) {
  BallsConfig cfg;
  cfg.n = n;
  cfg.balls = {{Eigen::Vector3d(0.55, 0.25, 0.25), 0.2}, {Eigen::Vector3d(0.25, 0.55, 0.25), 0.2}};
  return cfg;
}

ProbMatrix prob_from_latent(const Eigen::MatrixXd& x) {
  if (x.rows() < 1) throw InputError("latent matrix has no rows");
  if (!x.allFinite()) throw InputError("latent matrix has non-finite entries");
  const Eigen::MatrixXd p = x * x.transpose();
  constexpr double kRounding = 1e-12;
  std::vector<std::pair<std::size_t, std::size_t>> bad;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < p.cols(); ++j) {
      if (p(i, j) < -kRounding || p(i, j) > 1.0 + kRounding) {
        bad.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  if (!bad.empty()) {
    std::string msg = "latent dot products outside [0,1] at " + std::to_string(bad.size()) +
                      " pairs:";
    for (std::size_t k = 0; k < bad.size() && k < 10; ++k) {
      msg += " (" + std::to_string(bad[k].first) + "," + std::to_string(bad[k].second) + ")";
    }
    throw ModelViolation(msg, std::move(bad));
  }
  return ProbMatrix(SymMatrixd::symmetrize(p));
}

Graph sample_rdpg(const ProbMatrix& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = p.n();
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (unit(rng) < p(i, j)) edges.emplace_back(i, j);
    }
  }
  return Graph(n, edges);
}

std::vector<int> block_labels(const std::vector<int>& sizes) {
  std::vector<int> labels;
  for (std::size_t b = 0; b < sizes.size(); ++b) labels.insert(labels.end(), static_cast<std::size_t>(sizes[b]), static_cast<int>(b));
  return labels;
}

ProbMatrix gen_sbm(const SbmConfig& cfg) {
  const auto& b = cfg.block_probs;
  const auto k = static_cast<Eigen::Index>(cfg.sizes.size());
  if (k == 0 || b.rows() != k || b.cols() != k) {
    throw InputError("block matrix must be k x k for k block sizes");
  }
  int n = 0;
  for (int s : cfg.sizes) {
    if (s < 0) throw InputError("negative block size");
    n += s;
  }
  if (n < 1) throw InputError("SBM has no nodes");
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 0.0) throw ModelViolation("block matrix is not symmetric");
  if (b.minCoeff() < 0.0 || b.maxCoeff() > 1.0) throw ModelViolation("block probabilities outside [0,1]");
  const double min_eig = min_eigenvalue(SymMatrixd::from_dense(b));
  if (min_eig < -1e-12) {
    throw ModelViolation("block matrix is not PSD (min eigenvalue " + std::to_string(min_eig) + ")");
  }
  const auto labels = block_labels(cfg.sizes);
  SymMatrixd p(n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      p.set(i, j, b(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]));
  return ProbMatrix(std::move(p));
}

LatentSample gen_sphere_caps(const CapsConfig& cfg, std::uint64_t seed) {
  check_count(cfg.n, cfg.caps.size());
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  for (const auto& cap : cfg.caps) {
    if (std::abs(cap.center.norm() - 1.0) > 1e-9) throw ConfigError("cap center is not unit norm");
    if (cap.radius < 0.0) throw ConfigError("cap radius is negative");
    for (int axis = 0; axis < 3; ++axis) {
      const double angle = std::acos(std::clamp(cap.center(axis), -1.0, 1.0));
      if (angle + cap.radius > kHalfPi + 1e-12) {
        throw ConfigError("cap leaves the nonnegative orthant");
      }
    }
  }
  const auto sizes = split_sizes(cfg.n, cfg.caps.size(), cfg.sizes);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LatentSample out;
  out.x.resize(cfg.n, 3);
  int row = 0;
  for (std::size_t c = 0; c < cfg.caps.size(); ++c) {
    const auto& cap = cfg.caps[c];
    const Eigen::Vector3d center = cap.center.normalized();
    const auto [u, v] = complete_frame(center);
    const double cos_r = std::cos(cap.radius);
    for (int k = 0; k < sizes[c]; ++k, ++row) {
      const double cos_t = cos_r + (1.0 - cos_r) * unit(rng);
      const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const Eigen::Vector3d pt =
          sin_t * std::cos(phi) * u + sin_t * std::sin(phi) * v + cos_t * center;
      out.x.row(row) = pt.normalized().transpose();
      out.labels.push_back(static_cast<int>(c));
    }
  }
  return out;
}

LatentSample gen_balls(const BallsConfig& cfg, std::uint64_t seed) {
  check_count(cfg.n, cfg.balls.size());
  for (const auto& ball : cfg.balls) {
    if (ball.radius < 0.0) throw ConfigError("ball radius is negative");
    if (ball.center.minCoeff() - ball.radius < -1e-12 ||
        ball.center.norm() + ball.radius > 1.0 + 1e-12) {
      throw ConfigError("ball leaves the nonnegative unit ball");
    }
  }
  const auto sizes = split_sizes(cfg.n, cfg.balls.size(), cfg.sizes);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LatentSample out;
  out.x.resize(cfg.n, 3);
  int row = 0;
  for (std::size_t b = 0; b < cfg.balls.size(); ++b) {
    const auto& ball = cfg.balls[b];
    for (int k = 0; k < sizes[b]; ++k, ++row) {
      const double z = 2.0 * unit(rng) - 1.0;
      const double phi = 2.0 * std::numbers::pi * unit(rng);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Eigen::Vector3d dir(rho * std::cos(phi), rho * std::sin(phi), z);
      const double r = ball.radius * std::cbrt(unit(rng));
      out.x.row(row) = (ball.center + r * dir).transpose();
      out.labels.push_back(static_cast<int>(b));
    }
  }
  return out;
}

GeneratedModel generate(const LatentConfig& cfg) {
  return std::visit(
      [&](const auto& model) -> GeneratedModel {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, SbmConfig>) {
          return {gen_sbm(model), std::nullopt, block_labels(model.sizes)};
        } else if constexpr (std::is_same_v<T, CapsConfig>) {
          auto s = gen_sphere_caps(model, cfg.seed);
          return {prob_from_latent(s.x), s.x, s.labels};
        } else {
          auto s = gen_balls(model, cfg.seed);
          return {prob_from_latent(s.x), s.x, s.labels};
        }
      },
      cfg.model);
}

Graph karate() {
  static const std::vector<Edge> kEdges = {
      {0, 1},   {0, 2},   {0, 3},   {0, 4},   {0, 5},   {0, 6},   {0, 7},   {0, 8},
      {0, 10},  {0, 11},  {0, 12},  {0, 13},  {0, 17},  {0, 19},  {0, 21},  {0, 31},
      {1, 2},   {1, 3},   {1, 7},   {1, 13},  {1, 17},  {1, 19},  {1, 21},  {1, 30},
      {2, 3},   {2, 7},   {2, 8},   {2, 9},   {2, 13},  {2, 27},  {2, 28},  {2, 32},
      {3, 7},   {3, 12},  {3, 13},  {4, 6},   {4, 10},  {5, 6},   {5, 10},  {5, 16},
      {6, 16},  {8, 30},  {8, 32},  {8, 33},  {9, 33},  {13, 33}, {14, 32}, {14, 33},
      {15, 32}, {15, 33}, {18, 32}, {18, 33}, {19, 33}, {20, 32}, {20, 33}, {22, 32},
      {22, 33}, {23, 25}, {23, 27}, {23, 29}, {23, 32}, {23, 33}, {24, 25}, {24, 27},
      {24, 31}, {25, 31}, {26, 29}, {26, 33}, {27, 33}, {28, 31}, {28, 33}, {29, 32},
      {29, 33}, {30, 32}, {30, 33}, {31, 32}, {31, 33}, {32, 33}};
  return Graph(34, kEdges);
}

std::vector<int> karate_factions() {
  return {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0,
          0, 1, 0, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
}

}  // namespace rdpg
