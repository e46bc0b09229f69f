#include "fmds/permanova.hpp"

#include "fmds/dist.hpp"
#include "fmds/parallel.hpp"

namespace fmds {

namespace detail {

void check_labels_for_test(const LabelVector& labels) {
  if (labels.n() <= 2) {
    throw_error(errc::too_few_samples, "pseudo-F needs more than 2 samples");
  }
  if (labels.distinct_groups() < 2) {
    throw_error(errc::single_group, "pseudo-F needs at least 2 groups");
  }
}

Eigen::MatrixXd squared_distances(const DistanceMatrix& d) {
  return d.d.array().square().matrix();
}

Eigen::MatrixXd squared_distances(const Embedding& z) {
  return pairwise_euclidean_rows(z.z).array().square().matrix();
}

double within_group_sum(const Eigen::MatrixXd& sq, const std::vector<int>& y) {
  // Hot path of every permutation batch: bucket indices by label via a
  // counting sort into thread-local workspaces, no per-call allocation
  // after warmup.
  thread_local std::vector<int> counts;
  thread_local std::vector<int> offsets;
  thread_local std::vector<int> order;
  const int n = static_cast<int>(y.size());
  int max_label = 0;
  for (int v : y) max_label = std::max(max_label, v);
  counts.assign(static_cast<std::size_t>(max_label + 1), 0);
  for (int v : y) ++counts[static_cast<std::size_t>(v)];
  offsets.assign(counts.size() + 1, 0);
  for (std::size_t g = 0; g < counts.size(); ++g) offsets[g + 1] = offsets[g] + counts[g];
  order.resize(static_cast<std::size_t>(n));
  {
    thread_local std::vector<int> cursor;
    cursor.assign(offsets.begin(), offsets.end() - 1);
    for (int i = 0; i < n; ++i) {
      order[static_cast<std::size_t>(cursor[static_cast<std::size_t>(y[static_cast<std::size_t>(i)])]++)] = i;
    }
  }
  double within = 0.0;
  for (std::size_t g = 0; g < counts.size(); ++g) {
    const int* begin = order.data() + offsets[g];
    const int* end = order.data() + offsets[g + 1];
    for (const int* ip = begin; ip != end; ++ip) {
      // Column *ip equals row *ip (sq is symmetric) and is contiguous.
      const double* col = sq.data() + static_cast<std::ptrdiff_t>(*ip) * sq.rows();
      double acc = 0.0;
      for (const int* jp = begin; jp != end; ++jp) acc += col[*jp];
      within += acc;
    }
  }
  return within;
}

double pseudo_f_squared(const Eigen::MatrixXd& sq, const std::vector<int>& y) {
  const double total = sq.sum();
  const double within2 = 2.0 * within_group_sum(sq, y);
  if (within2 <= 0.0) {
    throw_error(errc::degenerate_within_group,
                "within-group squared distances sum to zero");
  }
  const double n = static_cast<double>(y.size());
  return (total - within2) / within2 * (n - 2.0);
}

std::vector<double> permuted_f_batch(const Eigen::MatrixXd& sq, const LabelVector& labels,
                                     int k, const SeededRng& rng) {
  std::vector<double> out(static_cast<std::size_t>(k));
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t i) {
    Rng stream = rng.stream(static_cast<std::uint64_t>(i));
    thread_local std::vector<int> shuffled;
    shuffled = labels.y;
    stream.shuffle(shuffled);
    try {
      out[i] = pseudo_f_squared(sq, shuffled);
    } catch (const Error& e) {
      throw Error(e.code(), "permutation " + std::to_string(i) + ": " + e.what());
    }
  });
  return out;
}

}  // namespace detail

double pseudo_f(const DistanceMatrix& d, const LabelVector& labels) {
  require_same_ids(d.sample_ids, labels.sample_ids, "pseudo-F");
  detail::check_labels_for_test(labels);
  return detail::pseudo_f_squared(detail::squared_distances(d), labels.y);
}

double pseudo_f_embedding(const Embedding& z, const LabelVector& labels) {
  require_same_ids(z.sample_ids, labels.sample_ids, "pseudo-F");
  detail::check_labels_for_test(labels);
  return detail::pseudo_f_squared(detail::squared_distances(z), labels.y);
}

double p_value(const PermutationDistribution& dist) {
  if (dist.permuted_f.empty()) {
    throw_error(errc::invalid_spec, "empty permutation distribution");
  }
  std::size_t count = 0;
  for (double f : dist.permuted_f) {
    if (f >= dist.observed_f) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(dist.permuted_f.size());
}

double p_value_conservative(const PermutationDistribution& dist) {
  if (dist.permuted_f.empty()) {
    throw_error(errc::invalid_spec, "empty permutation distribution");
  }
  std::size_t count = 0;
  for (double f : dist.permuted_f) {
    if (f >= dist.observed_f) ++count;
  }
  return static_cast<double>(count + 1) / static_cast<double>(dist.permuted_f.size() + 1);
}

namespace {

PermutationDistribution distribution_from_squared(const Eigen::MatrixXd& sq,
                                                  const LabelVector& labels, int k,
                                                  const SeededRng& rng) {
  if (k < 1) {
    throw_error(errc::invalid_spec, "permutation count must be at least 1");
  }
  detail::check_labels_for_test(labels);
  PermutationDistribution dist;
  dist.observed_f = detail::pseudo_f_squared(sq, labels.y);
  dist.permuted_f = detail::permuted_f_batch(sq, labels, k, rng);
  dist.seed = rng.master_key();
  return dist;
}

}  // namespace

PermutationDistribution permutation_distribution(const DistanceMatrix& d,
                                                 const LabelVector& labels, int k,
                                                 const SeededRng& rng) {
  require_same_ids(d.sample_ids, labels.sample_ids, "PERMANOVA");
  return distribution_from_squared(detail::squared_distances(d), labels, k, rng);
}

PermutationDistribution permutation_distribution(const Embedding& z,
                                                 const LabelVector& labels, int k,
                                                 const SeededRng& rng) {
  require_same_ids(z.sample_ids, labels.sample_ids, "PERMANOVA");
  return distribution_from_squared(detail::squared_distances(z), labels, k, rng);
}

}  // namespace fmds
