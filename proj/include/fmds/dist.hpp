#pragma once

#include "fmds/core.hpp"
#include "fmds/phylo.hpp"

namespace fmds {

// Pairwise Euclidean distances between matrix rows. Shared by the distance,
// embedding and metric code so that identical configurations produce
// bit-identical distances everywhere.
Eigen::MatrixXd pairwise_euclidean_rows(const Eigen::MatrixXd& rows);

DistanceMatrix euclidean(const AbundanceTable& table);

// d_ij = sum_k |x_ik - x_jk| / sum_k (x_ik + x_jk). A pair of all-zero
// samples has no defined distance and is an error.
DistanceMatrix bray_curtis(const AbundanceTable& table);

// Weighted UniFrac over the tree's branches. The raw form sums
// l_b * |p_i(b) - p_j(b)|; the normalized form (default) divides by
// sum l_b * (p_i(b) + p_j(b)).
DistanceMatrix weighted_unifrac(const AbundanceTable& table, const PhyloTree& tree,
                                bool normalized = true);

}  // namespace fmds
