#pragma once

// Synthetic RDPG instances: latent-vector generators, SBMs, Bernoulli
// sampling and the bundled karate club graph.
//
// Randomness comes from std::mt19937_64 seeded with the caller's 64-bit
// seed. Output is reproducible within one build; bit-exactness across
// standard libraries is not promised.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "rdpg/graph.hpp"

namespace rdpg {

struct SbmConfig {
  std::vector<int> sizes;
  Eigen::MatrixXd block_probs;
};

struct SphericalCap {
  Eigen::Vector3d center;  // unit norm
  double radius = 0.0;     // angular radius in radians
};

struct CapsConfig {
  int n = 0;
  std::vector<SphericalCap> caps;
  std::vector<int> sizes;  // empty: equal split, remainder to the first caps
};

struct Ball {
  Eigen::Vector3d center;
  double radius = 0.0;
};

struct BallsConfig {
  int n = 0;
  std::vector<Ball> balls;
  std::vector<int> sizes;
};

struct LatentConfig {
  std::variant<SbmConfig, CapsConfig, BallsConfig> model;
  std::uint64_t seed = 0;
};

/// Latent positions (rows) with the index of the component that produced each.
struct LatentSample {
  Eigen::MatrixXd x;
  std::vector<int> labels;
};

/// The three-block SBM used for the 50-node regularization profiles.
SbmConfig default_sbm();
/// Two caps inside the nonnegative orthant of S^2.
CapsConfig default_caps(int n);
/// Two balls inside the nonnegative unit ball.
BallsConfig default_balls(int n);

/// P = X X^T. Throws ModelViolation listing every off-diagonal pair outside [0,1].
ProbMatrix prob_from_latent(const Eigen::MatrixXd& x);

/// Each pair i<j is an edge independently with probability P_ij, visited in
/// row-major order of the upper triangle.
Graph sample_rdpg(const ProbMatrix& p, std::uint64_t seed);

/// P_ij = B[b(i)][b(j)], diagonal included. Throws ModelViolation when B is
/// not symmetric, has entries outside [0,1] or is not PSD.
ProbMatrix gen_sbm(const SbmConfig& cfg);
std::vector<int> block_labels(const std::vector<int>& sizes);

/// Uniform samples on spherical caps. Throws ConfigError when a center is
/// not unit norm or a cap leaves the closed nonnegative orthant.
LatentSample gen_sphere_caps(const CapsConfig& cfg, std::uint64_t seed);

/// Uniform samples in balls. Throws ConfigError when a ball leaves the
/// nonnegative unit ball.
LatentSample gen_balls(const BallsConfig& cfg, std::uint64_t seed);

/// Probability matrix and (for latent models) positions and labels for any
/// LatentConfig variant.
struct GeneratedModel {
  ProbMatrix p;
  std::optional<Eigen::MatrixXd> latent;
  std::vector<int> labels;
};
GeneratedModel generate(const LatentConfig& cfg);

/// Zachary's karate club: 34 nodes, 78 edges.
Graph karate();
/// Faction per node after the split: 0 = instructor ("Mr. Hi"), 1 = officer.
std::vector<int> karate_factions();

}  // namespace rdpg
