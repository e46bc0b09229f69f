#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fmds/core.hpp"
#include "fmds/rng.hpp"

namespace fmds {

enum class SimKind { binary_compositional, ternary };

struct SimSpec {
  SimKind kind = SimKind::binary_compositional;
  int n_per_group = 50;
  std::uint64_t seed = 0;
  int replicate = 0;  // feeds seed derivation; replicates are independent draws
};

// i.i.d. draws from a diagonal-covariance normal truncated to the
// nonnegative orthant, one row per draw. Per-coordinate rejection; errors
// out when the acceptance probability of any coordinate drops below 1e-6.
Eigen::MatrixXd sample_truncated_normal(const Eigen::VectorXd& mean,
                                        const Eigen::VectorXd& variance_diag, int n,
                                        const SeededRng& rng);

// Row-normalizes to unit sum and returns a compositional table.
AbundanceTable total_sum_scale(const Eigen::MatrixXd& w, std::vector<std::string> sample_ids,
                               std::vector<std::string> feature_ids);

struct SimulatedDataset {
  AbundanceTable table;
  LabelVector labels;
};

// Binary 4D dataset: n_per_group draws each from truncated normals with
// means mu +/- delta (mu = 1/4, delta = (1,-1,0,0)/(20 sqrt 2)) and
// covariance diag(0.01, 4, 4, 1)/100, then total sum scaling. Labels 0/1.
SimulatedDataset simulate_binary(const SimSpec& spec);

// Ternary 4D dataset: n_per_group draws per group from untruncated normals
// with means (0,0,0,0), (0,0,2,0), (0,0,1,sqrt 3) and covariance
// diag(5,5,1,1); no normalization. Labels 0/1/2.
SimulatedDataset simulate_ternary(const SimSpec& spec);

}  // namespace fmds
