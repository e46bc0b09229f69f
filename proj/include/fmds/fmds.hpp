#pragma once

#include <cstdint>
#include <vector>

#include "fmds/core.hpp"
#include "fmds/mds.hpp"
#include "fmds/rng.hpp"

namespace fmds {

struct FmdsConfig {
  double lambda = 1.0;          // confirmatory weight, in [0, 1]
  int map_permutations = 999;   // draws per mapping-function build
  int pvalue_permutations = 999;
  double p_tol = 0.01;          // stop when |p_z - p_x| < p_tol
  int max_outer_iter = 100;
  std::uint64_t seed = 0;
  bool remap_every_point = false;  // rebuild the mapping inside the point loop
  MdsConfig init;               // metric-MDS initialization settings
};

// Monotone quantile map between permuted pseudo-F distributions of the
// original and embedded spaces: rank-paired sorted samples, piecewise-linear
// interpolation, linear extrapolation beyond the sampled range.
struct MappingFunction {
  std::vector<double> sorted_fx;
  std::vector<double> sorted_fz;

  double operator()(double fx) const;
};

// Draws k independent permutation pairs (one for the distance matrix, one
// for the embedding), computes both pseudo-F samples and rank-pairs them.
MappingFunction build_mapping(const DistanceMatrix& d, const Embedding& z,
                              const LabelVector& labels, int k, const SeededRng& rng);

struct FmdsObjective {
  double objective = 0.0;            // stress sum + lambda * |confirmatory|
  double confirmatory_signed = 0.0;  // inner sum before the absolute value
};

// Objective over ordered pairs:
//   sum (d_ij - ||z_i - z_j||)^2
//   + lambda * | sum [1 - 2 eps_ij (1 + fz_fx/(N-2))] ||z_i - z_j||^2 |
FmdsObjective fmds_objective(const DistanceMatrix& d, const Embedding& z,
                             const LabelVector& labels, double fz_fx, double lambda);

// Sign of the confirmatory sum; exact zero maps to +1.
inline int delta_sign(double confirmatory_signed) {
  return confirmatory_signed < 0.0 ? -1 : 1;
}

// Quadratic coefficient of the per-point majorizer for g balanced groups:
//   C_g = N + lambda*delta*(N - (2N/g) * (1 + fz_fx/(N-2))).
// At g = 2 this equals the binary-design coefficient N - N*lambda*delta*fz_fx/(N-2).
double generalized_coefficient(int n, int groups, double lambda, int delta, double fz_fx);

// In-place update of point k. Requires balanced labels; throws when the
// quadratic coefficient is not positive (reduce lambda).
void majorization_update(Eigen::MatrixXd& z, const DistanceMatrix& d,
                         const LabelVector& labels, double fz_fx, int delta,
                         double lambda, int k);

struct FmdsIteration {
  double raw_stress = 0.0;
  double confirmatory_signed = 0.0;  // approximated form (objective numerator)
  double confirmatory_exact = 0.0;   // pre-approximation ratio form
  double objective = 0.0;
  double p_z = 0.0;
  double fz_fx = 0.0;
  // Objective with the sweep's fixed mapping value and sign, before/after
  // the sweep; majorization makes `after <= before`.
  double linearized_before = 0.0;
  double linearized_after = 0.0;
  double seconds = 0.0;
  int delta = 1;
};

struct FmdsTrace {
  double p_x = 0.0;
  double f_x = 0.0;
  std::vector<FmdsIteration> iterations;
};

struct FmdsResult {
  Embedding embedding;
  FmdsTrace trace;
  bool converged = true;
};

class MaxIterationsError : public Error {
 public:
  MaxIterationsError(std::string message, Embedding embedding, FmdsTrace trace)
      : Error(errc::max_iterations_exceeded, message),
        embedding(std::move(embedding)),
        trace(std::move(trace)) {}

  Embedding embedding;
  FmdsTrace trace;
};

// Full fit: metric-MDS initialization, p_x once, then outer iterations of
// (rebuild mapping, fix delta, sweep all points, track p_z) until
// |p_z - p_x| < p_tol. Throws MaxIterationsError (carrying the final state)
// when the budget runs out.
FmdsResult fmds_fit(const DistanceMatrix& d, const LabelVector& labels,
                    const FmdsConfig& cfg);

// SuperMDS baseline: (1-alpha) * raw stress
//   + alpha * sum_{y_j > y_i} (y_j - y_i) * sum_s (d_ij/sqrt(2) - (z_js - z_is))^2.
double smds_objective(const DistanceMatrix& d, const Embedding& z,
                      const LabelVector& labels, double alpha);

Embedding smds_fit(const DistanceMatrix& d, const LabelVector& labels, double alpha,
                   const MdsConfig& cfg = {});

}  // namespace fmds
