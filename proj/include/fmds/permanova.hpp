#pragma once

#include <cstdint>
#include <vector>

#include "fmds/core.hpp"
#include "fmds/rng.hpp"

namespace fmds {

// F = (sum d^2 - 2 sum eps*d^2) / (2 sum eps*d^2) * (N - 2), summed over
// ordered pairs. The same (N-2) factor is applied for any group count.
double pseudo_f(const DistanceMatrix& d, const LabelVector& labels);

// As pseudo_f with d_ij replaced by the Euclidean distance between rows of
// z. The distances go through the same code path as the distance metrics so
// isometric configurations reproduce the matrix statistic bit for bit.
double pseudo_f_embedding(const Embedding& z, const LabelVector& labels);

struct PermutationDistribution {
  double observed_f = 0.0;
  std::vector<double> permuted_f;
  std::uint64_t seed = 0;

  int k() const { return static_cast<int>(permuted_f.size()); }
};

// p = (1/K) sum 1{F_perm >= F_obs}, exactly; may be 0.
double p_value(const PermutationDistribution& dist);

// Monte-Carlo corrected variant (1 + count) / (1 + K).
double p_value_conservative(const PermutationDistribution& dist);

// K pseudo-F values under uniformly shuffled labels; permutation i draws
// from substream (seed, i), so results are stable for any worker count.
PermutationDistribution permutation_distribution(const DistanceMatrix& d,
                                                 const LabelVector& labels, int k,
                                                 const SeededRng& rng);
PermutationDistribution permutation_distribution(const Embedding& z,
                                                 const LabelVector& labels, int k,
                                                 const SeededRng& rng);

namespace detail {

// Elementwise-squared pairwise distances for each input kind.
Eigen::MatrixXd squared_distances(const DistanceMatrix& d);
Eigen::MatrixXd squared_distances(const Embedding& z);

// Core statistic on a squared-distance matrix and raw label values.
double pseudo_f_squared(const Eigen::MatrixXd& sq, const std::vector<int>& y);

// Within-group squared-distance sum (ordered pairs, self-pairs included).
double within_group_sum(const Eigen::MatrixXd& sq, const std::vector<int>& y);

// Batch of permuted pseudo-F values; entry i uses rng.stream(i).
std::vector<double> permuted_f_batch(const Eigen::MatrixXd& sq, const LabelVector& labels,
                                     int k, const SeededRng& rng);

void check_labels_for_test(const LabelVector& labels);

}  // namespace detail

}  // namespace fmds
