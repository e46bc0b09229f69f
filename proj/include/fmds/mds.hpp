#pragma once

#include <cstdint>

#include "fmds/core.hpp"

namespace fmds {

struct MdsConfig {
  int max_iter = 300;
  double stress_tol = 1e-6;  // relative stress decrease threshold
  bool random_init = false;
  std::uint64_t random_init_seed = 0;
};

// (1/2) sum over ordered pairs of (d_ij - ||z_i - z_j||)^2.
double raw_stress(const DistanceMatrix& d, const Embedding& z);

// Classical (Torgerson) scaling: top-2 eigenpairs of the double-centered
// Gram matrix. Negative eigenvalues clamp their coordinate column to zero.
Embedding classical_init(const DistanceMatrix& d);

// Metric MDS by stress majorization. Each sweep applies the Guttman
// transform point by point (later points see fresh neighbors); raw stress
// never increases between sweeps.
Embedding smacof_fit(const DistanceMatrix& d, const MdsConfig& cfg = {});

namespace detail {

// One majorization sweep over all points, in place. Terms with coincident
// points (norm < 1e-12) are skipped, which preserves the majorization bound.
void guttman_sweep(Eigen::MatrixXd& z, const Eigen::MatrixXd& d);

}  // namespace detail

}  // namespace fmds
