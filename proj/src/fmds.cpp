#include "fmds/fmds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fmds/dist.hpp"
#include "fmds/permanova.hpp"

namespace fmds {

namespace {

// Stream tags for deterministic substream derivation within a fit.
constexpr std::uint64_t kTagPx = 1;
constexpr std::uint64_t kTagMapX = 2;
constexpr std::uint64_t kTagMapZ = 3;
constexpr std::uint64_t kTagPz = 4;

double fraction_at_least(const std::vector<double>& values, double threshold) {
  std::size_t count = 0;
  for (double v : values) {
    if (v >= threshold) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(values.size());
}

// Ordered-pair stress sum, i.e. 2x raw_stress.
double stress_pair_sum(const Eigen::MatrixXd& d, const Eigen::MatrixXd& z) {
  const Eigen::Index n = d.rows();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double gap = d(i, j) - (z.row(i) - z.row(j)).norm();
      acc += gap * gap;
    }
  }
  return 2.0 * acc;
}

// Confirmatory inner sum over ordered pairs for a fixed mapped target.
double confirmatory_sum(const Eigen::MatrixXd& sqz, const std::vector<int>& y,
                        double fz_fx) {
  const double n = static_cast<double>(y.size());
  const double scale = 1.0 + fz_fx / (n - 2.0);
  const double total = sqz.sum();
  const double within = detail::within_group_sum(sqz, y);
  return total - 2.0 * scale * within;
}

}  // namespace

double MappingFunction::operator()(double fx) const {
  const auto& xs = sorted_fx;
  const auto& ys = sorted_fz;
  const std::size_t n = xs.size();
  if (n == 0) return fx;
  if (n == 1 || xs.front() == xs.back()) {
    return 0.5 * (ys.front() + ys.back());
  }
  if (fx <= xs.front()) {
    // Extrapolate from the lowest segment with nonzero width.
    std::size_t m = 1;
    while (m + 1 < n && xs[m] == xs.front()) ++m;
    double slope = (ys[m] - ys.front()) / (xs[m] - xs.front());
    return ys.front() + slope * (fx - xs.front());
  }
  if (fx >= xs.back()) {
    std::size_t m = n - 2;
    while (m > 0 && xs[m] == xs.back()) --m;
    double slope = (ys.back() - ys[m]) / (xs.back() - xs[m]);
    return ys.back() + slope * (fx - xs.back());
  }
  auto hi_it = std::upper_bound(xs.begin(), xs.end(), fx);
  std::size_t hi = static_cast<std::size_t>(hi_it - xs.begin());
  std::size_t lo = hi - 1;
  double t = (fx - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + t * (ys[hi] - ys[lo]);
}

MappingFunction build_mapping(const DistanceMatrix& d, const Embedding& z,
                              const LabelVector& labels, int k, const SeededRng& rng) {
  if (k < 1) {
    throw_error(errc::invalid_spec, "mapping needs at least 1 permutation");
  }
  const Eigen::MatrixXd sqx = detail::squared_distances(d);
  const Eigen::MatrixXd sqz = detail::squared_distances(z);
  MappingFunction map;
  map.sorted_fx = detail::permuted_f_batch(sqx, labels, k, rng.derive(0));
  map.sorted_fz = detail::permuted_f_batch(sqz, labels, k, rng.derive(1));
  std::sort(map.sorted_fx.begin(), map.sorted_fx.end());
  std::sort(map.sorted_fz.begin(), map.sorted_fz.end());
  return map;
}

FmdsObjective fmds_objective(const DistanceMatrix& d, const Embedding& z,
                             const LabelVector& labels, double fz_fx, double lambda) {
  require_same_ids(d.sample_ids, z.sample_ids, "F-MDS objective");
  require_same_ids(d.sample_ids, labels.sample_ids, "F-MDS objective");
  const Eigen::MatrixXd sqz = detail::squared_distances(z);
  FmdsObjective result;
  result.confirmatory_signed = confirmatory_sum(sqz, labels.y, fz_fx);
  result.objective =
      stress_pair_sum(d.d, z.z) + lambda * std::abs(result.confirmatory_signed);
  return result;
}

double generalized_coefficient(int n, int groups, double lambda, int delta, double fz_fx) {
  const double nn = static_cast<double>(n);
  const double scale = 1.0 + fz_fx / (nn - 2.0);
  return nn + lambda * static_cast<double>(delta) *
                  (nn - (2.0 * nn / static_cast<double>(groups)) * scale);
}

namespace {

void update_point(Eigen::MatrixXd& z, const Eigen::MatrixXd& d, const std::vector<int>& y,
                  int groups, double fz_fx, int delta, double lambda, int k) {
  const Eigen::Index n = z.rows();
  const double nn = static_cast<double>(n);
  const double scale = 1.0 + fz_fx / (nn - 2.0);
  const double coeff = generalized_coefficient(static_cast<int>(n), groups, lambda, delta, fz_fx);
  if (!(coeff > 0.0)) {
    throw_error(errc::non_positive_quadratic_coefficient,
                "majorizer coefficient " + std::to_string(coeff) +
                    " is not positive; use a smaller lambda");
  }
  const double ld = lambda * static_cast<double>(delta);
  const double w_between = 1.0 + ld;
  const double w_within = 1.0 + ld * (1.0 - 2.0 * scale);
  const int yk = y[static_cast<std::size_t>(k)];
  Eigen::RowVector2d zk = z.row(k);
  Eigen::RowVector2d acc = Eigen::RowVector2d::Zero();
  for (Eigen::Index j = 0; j < n; ++j) {
    double w = y[static_cast<std::size_t>(j)] == yk ? w_within : w_between;
    acc += w * z.row(j);
    if (j == k) continue;
    Eigen::RowVector2d diff = zk - z.row(j);
    double norm = diff.norm();
    if (norm >= 1e-12) {
      acc += (d(j, k) / norm) * diff;
    }
  }
  z.row(k) = acc / coeff;
}

void require_balanced(const LabelVector& labels, const std::string& what) {
  if (labels.distinct_groups() < 2 || !labels.balanced()) {
    throw_error(errc::unbalanced_design,
                what + " requires a balanced design with at least 2 equally sized groups; "
                       "for unbalanced data run metric MDS and PERMANOVA instead");
  }
}

}  // namespace

void majorization_update(Eigen::MatrixXd& z, const DistanceMatrix& d,
                         const LabelVector& labels, double fz_fx, int delta,
                         double lambda, int k) {
  require_balanced(labels, "the majorization update");
  if (z.rows() != d.d.rows() || k < 0 || k >= z.rows()) {
    throw_error(errc::invalid_spec, "majorization update index out of range");
  }
  update_point(z, d.d, labels.y, labels.distinct_groups(), fz_fx, delta, lambda, k);
}

FmdsResult fmds_fit(const DistanceMatrix& d, const LabelVector& labels,
                    const FmdsConfig& cfg) {
  require_same_ids(d.sample_ids, labels.sample_ids, "F-MDS");
  if (cfg.lambda < 0.0 || cfg.lambda > 1.0) {
    throw_error(errc::invalid_spec, "lambda must lie in [0,1]");
  }
  if (!(cfg.p_tol > 0.0) || cfg.map_permutations < 1 || cfg.pvalue_permutations < 1 ||
      cfg.max_outer_iter < 1) {
    throw_error(errc::invalid_spec, "invalid F-MDS configuration");
  }
  detail::check_labels_for_test(labels);
  require_balanced(labels, "F-MDS");

  const SeededRng root(cfg.seed);
  const int n = d.n();
  const int groups = labels.distinct_groups();

  Embedding emb = smacof_fit(d, cfg.init);

  const Eigen::MatrixXd sqx = detail::squared_distances(d);
  const double f_x = detail::pseudo_f_squared(sqx, labels.y);
  const auto fx_perm =
      detail::permuted_f_batch(sqx, labels, cfg.pvalue_permutations, root.derive(kTagPx));
  const double p_x = fraction_at_least(fx_perm, f_x);

  FmdsTrace trace;
  trace.p_x = p_x;
  trace.f_x = f_x;

  Eigen::MatrixXd sqz = detail::squared_distances(emb);
  double f_z = detail::pseudo_f_squared(sqz, labels.y);
  {
    auto fz_perm =
        detail::permuted_f_batch(sqz, labels, cfg.pvalue_permutations, root.derive(kTagPz, 0));
    double p_z = fraction_at_least(fz_perm, f_z);
    if (std::abs(p_z - p_x) < cfg.p_tol) {
      return FmdsResult{std::move(emb), std::move(trace), true};
    }
  }

  for (int iter = 1; iter <= cfg.max_outer_iter; ++iter) {
    auto started = std::chrono::steady_clock::now();

    MappingFunction map;
    std::vector<double> fz_list;  // pre-sweep permuted F_z, reusable for p_z
    double fz_fx = 0.0;
    int delta = 1;
    if (!cfg.remap_every_point) {
      map.sorted_fx = detail::permuted_f_batch(
          sqx, labels, cfg.map_permutations,
          root.derive(kTagMapX, static_cast<std::uint64_t>(iter)));
      map.sorted_fz = detail::permuted_f_batch(
          sqz, labels, cfg.map_permutations,
          root.derive(kTagMapZ, static_cast<std::uint64_t>(iter)));
      fz_list = map.sorted_fz;
      std::sort(map.sorted_fx.begin(), map.sorted_fx.end());
      std::sort(map.sorted_fz.begin(), map.sorted_fz.end());
      fz_fx = map(f_x);
      delta = delta_sign(confirmatory_sum(sqz, labels.y, fz_fx));
    }

    double lin_before = 0.0;
    if (!cfg.remap_every_point) {
      lin_before = stress_pair_sum(d.d, emb.z) +
                   cfg.lambda * delta * confirmatory_sum(sqz, labels.y, fz_fx);
    }

    for (int k = 0; k < n; ++k) {
      if (cfg.remap_every_point) {
        // Literal per-point rebuild: fresh permutation batches on the
        // current configuration before every single update.
        Eigen::MatrixXd sq_now = detail::squared_distances(emb);
        MappingFunction local;
        local.sorted_fx = detail::permuted_f_batch(
            sqx, labels, cfg.map_permutations,
            root.derive(kTagMapX, static_cast<std::uint64_t>(iter),
                        static_cast<std::uint64_t>(k)));
        local.sorted_fz = detail::permuted_f_batch(
            sq_now, labels, cfg.map_permutations,
            root.derive(kTagMapZ, static_cast<std::uint64_t>(iter),
                        static_cast<std::uint64_t>(k)));
        std::sort(local.sorted_fx.begin(), local.sorted_fx.end());
        std::sort(local.sorted_fz.begin(), local.sorted_fz.end());
        fz_fx = local(f_x);
        delta = delta_sign(confirmatory_sum(sq_now, labels.y, fz_fx));
      }
      update_point(emb.z, d.d, labels.y, groups, fz_fx, delta, cfg.lambda, k);
    }

    sqz = detail::squared_distances(emb);
    f_z = detail::pseudo_f_squared(sqz, labels.y);

    double p_z;
    if (!cfg.remap_every_point && cfg.pvalue_permutations == cfg.map_permutations) {
      p_z = fraction_at_least(fz_list, f_z);
    } else {
      auto fz_perm = detail::permuted_f_batch(
          sqz, labels, cfg.pvalue_permutations,
          root.derive(kTagPz, static_cast<std::uint64_t>(iter)));
      p_z = fraction_at_least(fz_perm, f_z);
    }

    const double signed_after = confirmatory_sum(sqz, labels.y, fz_fx);
    const double stress_after = stress_pair_sum(d.d, emb.z);
    const double within_z = detail::within_group_sum(sqz, labels.y);

    FmdsIteration record;
    record.raw_stress = 0.5 * stress_after;
    record.confirmatory_signed = signed_after;
    record.confirmatory_exact = within_z > 0.0 ? signed_after / (2.0 * within_z) : 0.0;
    record.objective = stress_after + cfg.lambda * std::abs(signed_after);
    record.p_z = p_z;
    record.fz_fx = fz_fx;
    record.linearized_before = lin_before;
    record.linearized_after = stress_after + cfg.lambda * delta * signed_after;
    record.delta = delta;
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    trace.iterations.push_back(record);

    if (std::abs(p_z - p_x) < cfg.p_tol) {
      return FmdsResult{std::move(emb), std::move(trace), true};
    }
  }

  throw MaxIterationsError(
      "F-MDS did not reach |p_z - p_x| < " + std::to_string(cfg.p_tol) + " within " +
          std::to_string(cfg.max_outer_iter) + " iterations (p_x=" + std::to_string(p_x) +
          ")",
      std::move(emb), std::move(trace));
}

double smds_objective(const DistanceMatrix& d, const Embedding& z,
                      const LabelVector& labels, double alpha) {
  require_same_ids(d.sample_ids, z.sample_ids, "SuperMDS objective");
  require_same_ids(d.sample_ids, labels.sample_ids, "SuperMDS objective");
  if (alpha < 0.0 || alpha > 1.0) {
    throw_error(errc::invalid_spec, "alpha must lie in [0,1]");
  }
  const Eigen::Index n = d.d.rows();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  double confirmatory = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      int dy = labels.y[static_cast<std::size_t>(j)] - labels.y[static_cast<std::size_t>(i)];
      if (dy <= 0) continue;
      double target = d.d(i, j) * inv_sqrt2;
      for (int s = 0; s < 2; ++s) {
        double gap = target - (z.z(j, s) - z.z(i, s));
        confirmatory += static_cast<double>(dy) * gap * gap;
      }
    }
  }
  return (1.0 - alpha) * raw_stress(d, z) + alpha * confirmatory;
}

Embedding smds_fit(const DistanceMatrix& d, const LabelVector& labels, double alpha,
                   const MdsConfig& cfg) {
  require_same_ids(d.sample_ids, labels.sample_ids, "SuperMDS");
  if (alpha < 0.0 || alpha > 1.0) {
    throw_error(errc::invalid_spec, "alpha must lie in [0,1]");
  }
  if (cfg.max_iter < 1 || !(cfg.stress_tol > 0.0)) {
    throw_error(errc::invalid_spec, "max_iter must be >= 1 and stress_tol > 0");
  }
  Embedding emb = classical_init(d);
  const Eigen::Index n = emb.z.rows();
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  double objective = smds_objective(d, emb, labels, alpha);
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    for (Eigen::Index k = 0; k < n; ++k) {
      const int yk = labels.y[static_cast<std::size_t>(k)];
      Eigen::RowVector2d zk = emb.z.row(k);
      Eigen::RowVector2d acc = Eigen::RowVector2d::Zero();
      double denom = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        // Stress part of the majorizer, with the same self proximal term as
        // the plain Guttman sweep so alpha = 0 reduces to it.
        acc += (1.0 - alpha) * emb.z.row(j);
        denom += 1.0 - alpha;
        if (j == k) continue;
        Eigen::RowVector2d diff = zk - emb.z.row(j);
        double norm = diff.norm();
        if (norm >= 1e-12) {
          acc += (1.0 - alpha) * (d.d(j, k) / norm) * diff;
        }
        // Confirmatory part; k may sit on either side of the pair.
        int dy = yk - labels.y[static_cast<std::size_t>(j)];
        if (dy != 0) {
          double w = alpha * static_cast<double>(dy > 0 ? dy : -dy);
          double offset = (dy > 0 ? 1.0 : -1.0) * d.d(j, k) * inv_sqrt2;
          acc += w * (emb.z.row(j) + Eigen::RowVector2d::Constant(offset));
          denom += w;
        }
      }
      if (denom > 0.0) {
        emb.z.row(k) = acc / denom;
      }
    }
    double next = smds_objective(d, emb, labels, alpha);
    if (objective <= 0.0) break;
    double rel = (objective - next) / objective;
    objective = next;
    if (rel < cfg.stress_tol) break;
  }
  return emb;
}

}  // namespace fmds
