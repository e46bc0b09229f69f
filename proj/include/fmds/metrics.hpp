#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fmds/core.hpp"
#include "fmds/rng.hpp"

namespace fmds {

// Rank-based neighborhood preservation (original -> embedded). Ranks are
// computed in the original space, ties broken by ascending sample index,
// self excluded (nearest neighbor has rank 1). The normalizer is valid for
// k < N/2; `force_k` computes the literal formula beyond that.
double trustworthiness(const DistanceMatrix& d, const Embedding& z, int k,
                       bool force_k = false);

// Mirror of trustworthiness with the two spaces swapped.
double continuity(const DistanceMatrix& d, const Embedding& z, int k,
                  bool force_k = false);

// sum (d_ij - ||z_i - z_j||)^2 / sum ||z_i - z_j||^2 (no square root).
// `kruskal_root` applies the classical square root on top.
double stress1(const DistanceMatrix& d, const Embedding& z, bool kruskal_root = false);

struct ShepardResult {
  std::vector<std::pair<double, double>> pairs;  // (original, embedded) per unordered pair
  double pearson_r = 0.0;
};

ShepardResult shepard(const DistanceMatrix& d, const Embedding& z);

// Pearson correlation; identical inputs return exactly 1, and rounding is
// clamped into [-1, 1].
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct FStatMetrics {
  double f_correlation = 0.0;
  double f_rank_ratio = 0.0;
};

// Both F-based metrics from one shared permutation batch: permutation i is
// applied to BOTH spaces (unlike the mapping function's independent pairs).
FStatMetrics f_stat_metrics(const DistanceMatrix& d, const Embedding& z,
                            const LabelVector& labels, int k, const SeededRng& rng);

double f_correlation(const DistanceMatrix& d, const Embedding& z, const LabelVector& labels,
                     int k, const SeededRng& rng);
double f_rank_ratio(const DistanceMatrix& d, const Embedding& z, const LabelVector& labels,
                    int k, const SeededRng& rng);

struct GroupGeometry {
  int label = 0;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  double long_axis_variance = 0.0;
  double short_axis_variance = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();
};

struct ClusterGeometry {
  std::vector<GroupGeometry> groups;           // ascending label order
  Eigen::MatrixXd centroid_distances;          // groups x groups
};

// Per-group centroid and covariance eigenvalues plus inter-centroid
// distances. Every group needs at least 3 points.
ClusterGeometry cluster_geometry(const Embedding& z, const LabelVector& labels);

struct Ellipse {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double semi_major = 0.0;
  double semi_minor = 0.0;
  double rotation_radians = 0.0;  // of the major axis
};

// Confidence ellipse of a 2D Gaussian: semi-axes sqrt(eigenvalue * q) with
// q the chi-square(2) quantile at `level`, q = -2 ln(1 - level).
Ellipse confidence_ellipse(const Eigen::Vector2d& centroid, const Eigen::Matrix2d& covariance,
                           double level);

struct QualityReport {
  double trustworthiness_local = 0.0;
  double trustworthiness_global = 0.0;
  double continuity_local = 0.0;
  double continuity_global = 0.0;
  double stress1 = 0.0;
  double shepard_r = 0.0;
  double f_correlation = 0.0;
  double f_rank_ratio = 0.0;
  int k_local = 0;
  int k_global = 0;
  bool k_global_valid = true;  // false when forced past the normalizer's range
  int permutations = 0;
  std::uint64_t seed = 0;
};

QualityReport evaluate_quality(const DistanceMatrix& d, const Embedding& z,
                               const LabelVector& labels, int k_local, int k_global,
                               int permutations, const SeededRng& rng, bool force_k = false,
                               bool kruskal_root = false);

}  // namespace fmds
