#include "fmds/simulate.hpp"

#include <cmath>

#include "fmds/parallel.hpp"

namespace fmds {

namespace {

constexpr std::uint64_t kTagBinary = 101;
constexpr std::uint64_t kTagTernary = 102;
constexpr double kMinAcceptance = 1e-6;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<std::string> numbered_ids(const std::string& prefix, int count) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(count));
  int width = count >= 100 ? 3 : 2;
  for (int i = 1; i <= count; ++i) {
    std::string num = std::to_string(i);
    while (static_cast<int>(num.size()) < width) num.insert(num.begin(), '0');
    ids.push_back(prefix + num);
  }
  return ids;
}

}  // namespace

Eigen::MatrixXd sample_truncated_normal(const Eigen::VectorXd& mean,
                                        const Eigen::VectorXd& variance_diag, int n,
                                        const SeededRng& rng) {
  const Eigen::Index dim = mean.size();
  if (variance_diag.size() != dim || (variance_diag.array() <= 0.0).any()) {
    throw_error(errc::invalid_spec, "covariance diagonal must be positive");
  }
  Eigen::VectorXd sd = variance_diag.array().sqrt();
  for (Eigen::Index c = 0; c < dim; ++c) {
    double acceptance = normal_cdf(mean(c) / sd(c));
    if (acceptance < kMinAcceptance) {
      throw_error(errc::truncation_mass_too_small,
                  "coordinate " + std::to_string(c) + " keeps only " +
                      std::to_string(acceptance) + " of its mass above zero");
    }
  }
  Eigen::MatrixXd out(n, dim);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    Rng stream = rng.stream(static_cast<std::uint64_t>(i));
    for (Eigen::Index c = 0; c < dim; ++c) {
      double v;
      do {
        v = mean(c) + sd(c) * stream.next_normal();
      } while (v < 0.0);
      out(static_cast<Eigen::Index>(i), c) = v;
    }
  });
  return out;
}

AbundanceTable total_sum_scale(const Eigen::MatrixXd& w, std::vector<std::string> sample_ids,
                               std::vector<std::string> feature_ids) {
  Eigen::MatrixXd x = w;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    double s = x.row(i).sum();
    if (!(s > 0.0)) {
      throw_error(errc::zero_row_sum, "row " + std::to_string(i) + " sums to zero");
    }
    x.row(i) /= s;
  }
  return make_abundance_table(std::move(sample_ids), std::move(feature_ids), std::move(x),
                              /*compositional=*/true);
}

SimulatedDataset simulate_binary(const SimSpec& spec) {
  if (spec.n_per_group < 2) {
    throw_error(errc::invalid_spec, "need at least 2 samples per group");
  }
  // The group shift sits on the two low-variance coordinates; the two
  // high-variance coordinates dominate the 2D projection and hide it.
  Eigen::VectorXd mu(4), delta(4), var(4);
  mu << 0.25, 0.25, 0.25, 0.25;
  const double d = 1.0 / (20.0 * std::sqrt(2.0));
  delta << d, -d, 0.0, 0.0;
  var << 0.01 / 100.0, 1.0 / 100.0, 4.0 / 100.0, 4.0 / 100.0;

  const SeededRng root =
      SeededRng(spec.seed).derive(kTagBinary, static_cast<std::uint64_t>(spec.replicate));
  Eigen::MatrixXd plus = sample_truncated_normal(mu + delta, var, spec.n_per_group, root.derive(0));
  Eigen::MatrixXd minus = sample_truncated_normal(mu - delta, var, spec.n_per_group, root.derive(1));

  const int n = 2 * spec.n_per_group;
  Eigen::MatrixXd w(n, 4);
  w.topRows(spec.n_per_group) = plus;
  w.bottomRows(spec.n_per_group) = minus;

  auto sample_ids = numbered_ids("s", n);
  std::vector<std::string> feature_ids = {"f1", "f2", "f3", "f4"};
  std::vector<int> y(static_cast<std::size_t>(n), 0);
  for (int i = spec.n_per_group; i < n; ++i) y[static_cast<std::size_t>(i)] = 1;

  SimulatedDataset out{total_sum_scale(w, sample_ids, feature_ids),
                       make_label_vector(sample_ids, std::move(y))};
  return out;
}

SimulatedDataset simulate_ternary(const SimSpec& spec) {
  if (spec.n_per_group < 2) {
    throw_error(errc::invalid_spec, "need at least 2 samples per group");
  }
  std::vector<Eigen::Vector4d> means = {
      Eigen::Vector4d(0.0, 0.0, 0.0, 0.0),
      Eigen::Vector4d(0.0, 0.0, 2.0, 0.0),
      Eigen::Vector4d(0.0, 0.0, 1.0, std::sqrt(3.0)),
  };
  Eigen::Vector4d sd = Eigen::Vector4d(5.0, 5.0, 1.0, 1.0).array().sqrt();

  const SeededRng root =
      SeededRng(spec.seed).derive(kTagTernary, static_cast<std::uint64_t>(spec.replicate));
  const int n = 3 * spec.n_per_group;
  Eigen::MatrixXd x(n, 4);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    Rng stream = root.stream(static_cast<std::uint64_t>(i));
    const auto& mean = means[i / static_cast<std::size_t>(spec.n_per_group)];
    for (Eigen::Index c = 0; c < 4; ++c) {
      x(static_cast<Eigen::Index>(i), c) = mean(c) + sd(c) * stream.next_normal();
    }
  });

  auto sample_ids = numbered_ids("s", n);
  std::vector<std::string> feature_ids = {"f1", "f2", "f3", "f4"};
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = i / spec.n_per_group;

  SimulatedDataset out{
      make_abundance_table(sample_ids, feature_ids, std::move(x), /*compositional=*/false),
      make_label_vector(sample_ids, std::move(y))};
  return out;
}

}  // namespace fmds
