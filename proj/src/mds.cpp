#include "fmds/mds.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace fmds {

double raw_stress(const DistanceMatrix& d, const Embedding& z) {
  require_same_ids(d.sample_ids, z.sample_ids, "raw stress");
  const Eigen::Index n = d.d.rows();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double gap = d.d(i, j) - (z.z.row(i) - z.z.row(j)).norm();
      acc += gap * gap;
    }
  }
  return acc;  // ordered-pair sum halved == unordered sum
}

Embedding classical_init(const DistanceMatrix& d) {
  const Eigen::Index n = d.d.rows();
  if (n < 3) {
    throw_error(errc::too_few_samples, "classical scaling needs at least 3 samples");
  }
  Eigen::MatrixXd sq = d.d.array().square();
  Eigen::MatrixXd centering =
      Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd gram = -0.5 * centering * sq * centering;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    throw_error(errc::eigen_failure, "eigendecomposition of the Gram matrix failed");
  }
  // Eigenvalues come back ascending; the last two are the leading pair.
  Eigen::MatrixXd z(n, 2);
  for (int s = 0; s < 2; ++s) {
    Eigen::Index idx = n - 1 - s;
    double lambda = solver.eigenvalues()(idx);
    if (lambda > 0.0) {
      z.col(s) = solver.eigenvectors().col(idx) * std::sqrt(lambda);
    } else {
      z.col(s).setZero();
    }
  }
  return Embedding{d.sample_ids, std::move(z)};
}

namespace detail {

void guttman_sweep(Eigen::MatrixXd& z, const Eigen::MatrixXd& d) {
  const Eigen::Index n = z.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::RowVector2d zk = z.row(k);
    Eigen::RowVector2d acc = Eigen::RowVector2d::Zero();
    for (Eigen::Index j = 0; j < n; ++j) {
      acc += z.row(j);
      if (j == k) continue;
      Eigen::RowVector2d diff = zk - z.row(j);
      double norm = diff.norm();
      if (norm >= 1e-12) {
        acc += (d(j, k) / norm) * diff;
      }
    }
    z.row(k) = acc / static_cast<double>(n);
  }
}

}  // namespace detail

Embedding smacof_fit(const DistanceMatrix& d, const MdsConfig& cfg) {
  if (cfg.max_iter < 1 || !(cfg.stress_tol > 0.0)) {
    throw_error(errc::invalid_spec, "max_iter must be >= 1 and stress_tol > 0");
  }
  Embedding emb = [&] {
    if (!cfg.random_init) return classical_init(d);
    const Eigen::Index n = d.d.rows();
    if (n < 3) throw_error(errc::too_few_samples, "MDS needs at least 3 samples");
    double scale = n > 1 ? d.d.sum() / static_cast<double>(n * (n - 1)) : 1.0;
    Rng rng = SeededRng(cfg.random_init_seed).stream(0);
    Eigen::MatrixXd z(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      z(i, 0) = rng.next_normal() * 0.5 * scale;
      z(i, 1) = rng.next_normal() * 0.5 * scale;
    }
    return Embedding{d.sample_ids, std::move(z)};
  }();

  double stress = raw_stress(d, emb);
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    detail::guttman_sweep(emb.z, d.d);
    double next = raw_stress(d, emb);
    if (stress <= 0.0) break;  // already at a perfect configuration
    double rel = (stress - next) / stress;
    stress = next;
    if (rel < cfg.stress_tol) break;
  }
  return emb;
}

}  // namespace fmds
