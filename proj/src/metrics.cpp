#include "fmds/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fmds/dist.hpp"
#include "fmds/parallel.hpp"
#include "fmds/permanova.hpp"

namespace fmds {

namespace {

// ranks(i, j): 1-based rank of j among i's neighbors by distance, ties
// broken by ascending index; ranks(i, i) = 0.
Eigen::MatrixXi neighbor_ranks(const Eigen::MatrixXd& dist) {
  const Eigen::Index n = dist.rows();
  Eigen::MatrixXi ranks = Eigen::MatrixXi::Zero(n, n);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    order.clear();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) order.push_back(static_cast<int>(j));
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double da = dist(i, a);
      double db = dist(i, b);
      return da != db ? da < db : a < b;
    });
    for (std::size_t r = 0; r < order.size(); ++r) {
      ranks(i, order[r]) = static_cast<int>(r) + 1;
    }
  }
  return ranks;
}

double rank_metric(const Eigen::MatrixXi& ranks_penalty, const Eigen::MatrixXi& ranks_select,
                   int k, bool force_k) {
  const Eigen::Index n = ranks_penalty.rows();
  if (k < 1 || k >= n) {
    throw_error(errc::invalid_k, "k must satisfy 1 <= k < N");
  }
  if (!force_k && 2 * k >= n) {
    throw_error(errc::invalid_k,
                "k = " + std::to_string(k) + " exceeds N/2; the normalizer is only valid "
                "below it (use the force option to compute the literal formula)");
  }
  // Penalize points inside the selected space's k-neighborhood but outside
  // the penalty space's, by how far down the penalty-space ranking they sit.
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      if (ranks_select(i, j) <= k && ranks_penalty(i, j) > k) {
        acc += ranks_penalty(i, j) - k;
      }
    }
  }
  const double nn = static_cast<double>(n);
  const double kk = static_cast<double>(k);
  double normalizer = 2.0 / (nn * kk * (2.0 * nn - 3.0 * kk - 1.0));
  return 1.0 - normalizer * acc;
}

}  // namespace

double trustworthiness(const DistanceMatrix& d, const Embedding& z, int k, bool force_k) {
  require_same_ids(d.sample_ids, z.sample_ids, "trustworthiness");
  Eigen::MatrixXi ranks_x = neighbor_ranks(d.d);
  Eigen::MatrixXi ranks_z = neighbor_ranks(pairwise_euclidean_rows(z.z));
  return rank_metric(ranks_x, ranks_z, k, force_k);
}

double continuity(const DistanceMatrix& d, const Embedding& z, int k, bool force_k) {
  require_same_ids(d.sample_ids, z.sample_ids, "continuity");
  Eigen::MatrixXi ranks_x = neighbor_ranks(d.d);
  Eigen::MatrixXi ranks_z = neighbor_ranks(pairwise_euclidean_rows(z.z));
  return rank_metric(ranks_z, ranks_x, k, force_k);
}

double stress1(const DistanceMatrix& d, const Embedding& z, bool kruskal_root) {
  require_same_ids(d.sample_ids, z.sample_ids, "Stress-1");
  const Eigen::Index n = d.d.rows();
  double num = 0.0;
  double den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double dz = (z.z.row(i) - z.z.row(j)).norm();
      double gap = d.d(i, j) - dz;
      num += gap * gap;
      den += dz * dz;
    }
  }
  if (den <= 0.0) {
    throw_error(errc::degenerate_embedding, "all embedded points coincide");
  }
  double value = num / den;
  return kruskal_root ? std::sqrt(value) : value;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw_error(errc::invalid_spec, "Pearson correlation needs two equal-length samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) {
    throw_error(errc::zero_variance, "Pearson correlation of a constant sample");
  }
  if (x == y) return 1.0;
  return std::clamp(sxy / (std::sqrt(sxx) * std::sqrt(syy)), -1.0, 1.0);
}

ShepardResult shepard(const DistanceMatrix& d, const Embedding& z) {
  require_same_ids(d.sample_ids, z.sample_ids, "Shepard diagram");
  const Eigen::Index n = d.d.rows();
  if (n < 3) {
    throw_error(errc::too_few_samples, "Shepard diagram needs at least 3 samples");
  }
  Eigen::MatrixXd dz = pairwise_euclidean_rows(z.z);
  ShepardResult result;
  std::vector<double> xs, ys;
  xs.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  ys.reserve(xs.capacity());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      result.pairs.emplace_back(d.d(i, j), dz(i, j));
      xs.push_back(d.d(i, j));
      ys.push_back(dz(i, j));
    }
  }
  result.pearson_r = pearson(xs, ys);
  return result;
}

namespace {

// Shared permutation batch for the two F metrics: permutation i scores BOTH
// spaces with the same shuffled labels.
struct FBatch {
  double fx_obs = 0.0;
  double fz_obs = 0.0;
  std::vector<double> fx;
  std::vector<double> fz;
};

FBatch f_stat_batch(const DistanceMatrix& d, const Embedding& z, const LabelVector& labels,
                    int k, const SeededRng& rng) {
  require_same_ids(d.sample_ids, z.sample_ids, "F metrics");
  require_same_ids(d.sample_ids, labels.sample_ids, "F metrics");
  if (k < 3) {
    throw_error(errc::invalid_spec, "F metrics need at least 3 permutations");
  }
  detail::check_labels_for_test(labels);
  const Eigen::MatrixXd sqx = detail::squared_distances(d);
  const Eigen::MatrixXd sqz = detail::squared_distances(z);
  FBatch batch;
  batch.fx_obs = detail::pseudo_f_squared(sqx, labels.y);
  batch.fz_obs = detail::pseudo_f_squared(sqz, labels.y);
  batch.fx.resize(static_cast<std::size_t>(k));
  batch.fz.resize(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t i) {
    Rng stream = rng.stream(static_cast<std::uint64_t>(i));
    std::vector<int> shuffled = labels.y;
    stream.shuffle(shuffled);
    batch.fx[i] = detail::pseudo_f_squared(sqx, shuffled);
    batch.fz[i] = detail::pseudo_f_squared(sqz, shuffled);
  });
  return batch;
}

double rank_ratio_of(const FBatch& batch) {
  std::size_t below_x = 0;
  std::size_t below_z = 0;
  for (std::size_t i = 0; i < batch.fx.size(); ++i) {
    if (batch.fx[i] < batch.fx_obs) ++below_x;
    if (batch.fz[i] < batch.fz_obs) ++below_z;
  }
  if (below_x == 0) {
    throw_error(errc::degenerate_denominator,
                "no permuted F below the observed one in the original space (p_x = 1)");
  }
  return static_cast<double>(below_z) / static_cast<double>(below_x);
}

}  // namespace

FStatMetrics f_stat_metrics(const DistanceMatrix& d, const Embedding& z,
                            const LabelVector& labels, int k, const SeededRng& rng) {
  FBatch batch = f_stat_batch(d, z, labels, k, rng);
  FStatMetrics out;
  out.f_rank_ratio = rank_ratio_of(batch);
  out.f_correlation = pearson(batch.fx, batch.fz);
  return out;
}

double f_correlation(const DistanceMatrix& d, const Embedding& z, const LabelVector& labels,
                     int k, const SeededRng& rng) {
  FBatch batch = f_stat_batch(d, z, labels, k, rng);
  return pearson(batch.fx, batch.fz);
}

double f_rank_ratio(const DistanceMatrix& d, const Embedding& z, const LabelVector& labels,
                    int k, const SeededRng& rng) {
  return rank_ratio_of(f_stat_batch(d, z, labels, k, rng));
}

ClusterGeometry cluster_geometry(const Embedding& z, const LabelVector& labels) {
  require_same_ids(z.sample_ids, labels.sample_ids, "cluster geometry");
  auto groups = group_members(labels.y);
  ClusterGeometry out;
  for (const auto& members : groups) {
    if (members.size() < 3) {
      throw_error(errc::group_too_small,
                  "group with " + std::to_string(members.size()) +
                      " samples; need at least 3 for covariance");
    }
    GroupGeometry gg;
    gg.label = labels.y[static_cast<std::size_t>(members.front())];
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (int idx : members) mean += z.z.row(idx).transpose();
    mean /= static_cast<double>(members.size());
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (int idx : members) {
      Eigen::Vector2d c = z.z.row(idx).transpose() - mean;
      cov += c * c.transpose();
    }
    cov /= static_cast<double>(members.size() - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(cov);
    if (solver.info() != Eigen::Success) {
      throw_error(errc::eigen_failure, "covariance eigendecomposition failed");
    }
    gg.centroid = mean;
    gg.covariance = cov;
    gg.long_axis_variance = solver.eigenvalues()(1);
    gg.short_axis_variance = solver.eigenvalues()(0);
    out.groups.push_back(gg);
  }
  const Eigen::Index g = static_cast<Eigen::Index>(out.groups.size());
  out.centroid_distances = Eigen::MatrixXd::Zero(g, g);
  for (Eigen::Index a = 0; a < g; ++a) {
    for (Eigen::Index b = a + 1; b < g; ++b) {
      double v = (out.groups[static_cast<std::size_t>(a)].centroid -
                  out.groups[static_cast<std::size_t>(b)].centroid)
                     .norm();
      out.centroid_distances(a, b) = v;
      out.centroid_distances(b, a) = v;
    }
  }
  return out;
}

Ellipse confidence_ellipse(const Eigen::Vector2d& centroid, const Eigen::Matrix2d& covariance,
                           double level) {
  if (level < 0.0 || level >= 1.0) {
    throw_error(errc::invalid_spec, "confidence level must lie in [0, 1)");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(covariance);
  if (solver.info() != Eigen::Success) {
    throw_error(errc::eigen_failure, "covariance eigendecomposition failed");
  }
  const double lo = solver.eigenvalues()(0);
  const double hi = solver.eigenvalues()(1);
  if (lo < -1e-12 * std::max(1.0, std::abs(hi))) {
    throw_error(errc::non_psd_covariance, "covariance has a negative eigenvalue");
  }
  const double q = -2.0 * std::log(1.0 - level);  // chi-square(2) quantile
  Ellipse e;
  e.center = centroid;
  e.semi_major = std::sqrt(std::max(hi, 0.0) * q);
  e.semi_minor = std::sqrt(std::max(lo, 0.0) * q);
  Eigen::Vector2d major = solver.eigenvectors().col(1);
  e.rotation_radians = std::atan2(major(1), major(0));
  return e;
}

QualityReport evaluate_quality(const DistanceMatrix& d, const Embedding& z,
                               const LabelVector& labels, int k_local, int k_global,
                               int permutations, const SeededRng& rng, bool force_k,
                               bool kruskal_root) {
  QualityReport report;
  report.k_local = k_local;
  report.k_global = k_global;
  report.k_global_valid = 2 * k_global < d.n();
  report.permutations = permutations;
  report.seed = rng.master_key();
  report.trustworthiness_local = trustworthiness(d, z, k_local, force_k);
  report.trustworthiness_global = trustworthiness(d, z, k_global, force_k);
  report.continuity_local = continuity(d, z, k_local, force_k);
  report.continuity_global = continuity(d, z, k_global, force_k);
  report.stress1 = stress1(d, z, kruskal_root);
  report.shepard_r = shepard(d, z).pearson_r;
  FStatMetrics fm = f_stat_metrics(d, z, labels, permutations, rng);
  report.f_correlation = fm.f_correlation;
  report.f_rank_ratio = fm.f_rank_ratio;
  return report;
}

}  // namespace fmds
