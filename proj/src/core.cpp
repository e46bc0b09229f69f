#include "fmds/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "fmds/parallel.hpp"

namespace fmds {

namespace {

constexpr double kSymmetryTol = 1e-9;
constexpr double kCompositionalTol = 1e-9;

std::string list_ids(const std::vector<std::string>& ids, std::size_t limit = 5) {
  std::ostringstream os;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
    if (i > 0) os << ", ";
    os << ids[i];
  }
  if (ids.size() > limit) os << ", ... (" << ids.size() << " total)";
  return os.str();
}

}  // namespace

error_category category_of(errc code) {
  switch (code) {
    case errc::degenerate_within_group:
    case errc::eigen_failure:
    case errc::non_positive_quadratic_coefficient:
    case errc::degenerate_embedding:
    case errc::zero_variance:
    case errc::degenerate_denominator:
    case errc::non_psd_covariance:
    case errc::truncation_mass_too_small:
      return error_category::numerical;
    case errc::max_iterations_exceeded:
      return error_category::convergence;
    default:
      return error_category::validation;
  }
}

const char* errc_name(errc code) {
  switch (code) {
    case errc::asymmetric_matrix: return "AsymmetricMatrix";
    case errc::negative_entry: return "NegativeEntry";
    case errc::non_zero_diagonal: return "NonZeroDiagonal";
    case errc::non_finite: return "NonFinite";
    case errc::id_mismatch: return "IdMismatch";
    case errc::unbalanced_design: return "UnbalancedDesign";
    case errc::duplicate_leaf_name: return "DuplicateLeafName";
    case errc::unknown_leaf: return "UnknownLeaf";
    case errc::zero_total_weight: return "ZeroTotalWeight";
    case errc::zero_denominator_pair: return "ZeroDenominatorPair";
    case errc::zero_row_sum: return "ZeroRowSum";
    case errc::single_group: return "SingleGroup";
    case errc::too_few_samples: return "TooFewSamples";
    case errc::group_too_small: return "GroupTooSmall";
    case errc::invalid_k: return "InvalidK";
    case errc::negative_branch_length: return "NegativeBranchLength";
    case errc::unbalanced_parenthesis: return "UnbalancedParenthesis";
    case errc::unexpected_token: return "UnexpectedToken";
    case errc::missing_terminator: return "MissingTerminator";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::io_error: return "IoError";
    case errc::degenerate_within_group: return "DegenerateWithinGroup";
    case errc::eigen_failure: return "EigenFailure";
    case errc::non_positive_quadratic_coefficient: return "NonPositiveQuadraticCoefficient";
    case errc::degenerate_embedding: return "DegenerateEmbedding";
    case errc::zero_variance: return "ZeroVariance";
    case errc::degenerate_denominator: return "DegenerateDenominator";
    case errc::non_psd_covariance: return "NonPSDCovariance";
    case errc::truncation_mass_too_small: return "TruncationMassTooSmall";
    case errc::max_iterations_exceeded: return "MaxIterationsExceeded";
  }
  return "UnknownError";
}

std::uint64_t Rng::next_below(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection below the largest multiple of n keeps the draw unbiased.
  std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % n;
}

double Rng::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = 1.0 - next_double();  // (0, 1]
  double u2 = next_double();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(theta);
  has_cached_normal_ = true;
  return r * std::cos(theta);
}

std::size_t max_threads() {
  static const std::size_t cached = [] {
    if (const char* env = std::getenv("FMDS_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v >= 1) return static_cast<std::size_t>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return static_cast<std::size_t>(hw == 0 ? 1 : hw);
  }();
  return cached;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = std::min(max_threads(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      std::size_t begin = n * w / workers;
      std::size_t end = n * (w + 1) / workers;
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

AbundanceTable make_abundance_table(std::vector<std::string> sample_ids,
                                    std::vector<std::string> feature_ids,
                                    Eigen::MatrixXd values, bool compositional) {
  if (static_cast<std::size_t>(values.rows()) != sample_ids.size() ||
      static_cast<std::size_t>(values.cols()) != feature_ids.size()) {
    throw_error(errc::invalid_spec, "abundance table dimensions do not match ID lists");
  }
  if (!values.allFinite()) {
    throw_error(errc::non_finite, "abundance table contains non-finite values");
  }
  if (compositional) {
    if ((values.array() < 0.0).any()) {
      throw_error(errc::negative_entry, "compositional table contains negative values");
    }
    for (int i = 0; i < values.rows(); ++i) {
      double s = values.row(i).sum();
      if (std::abs(s - 1.0) > kCompositionalTol) {
        throw_error(errc::invalid_spec,
                    "compositional row '" + sample_ids[i] + "' sums to " + std::to_string(s));
      }
    }
  }
  return AbundanceTable{std::move(sample_ids), std::move(feature_ids), std::move(values),
                        compositional};
}

DistanceMatrix validate_distance_matrix(Eigen::MatrixXd m,
                                        std::vector<std::string> sample_ids) {
  const auto n = m.rows();
  if (m.cols() != n) {
    throw_error(errc::invalid_spec, "distance matrix is not square");
  }
  if (static_cast<std::size_t>(n) != sample_ids.size()) {
    throw_error(errc::invalid_spec, "distance matrix size does not match ID list");
  }
  if (!m.allFinite()) {
    throw_error(errc::non_finite, "distance matrix contains non-finite entries");
  }
  if ((m.array() < 0.0).any()) {
    throw_error(errc::negative_entry, "distance matrix contains negative entries");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(m(i, i)) >= kSymmetryTol) {
      throw_error(errc::non_zero_diagonal,
                  "nonzero diagonal at sample '" + sample_ids[i] + "'");
    }
    m(i, i) = 0.0;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double gap = std::abs(m(i, j) - m(j, i));
      if (gap >= kSymmetryTol) {
        throw_error(errc::asymmetric_matrix,
                    "asymmetry of " + std::to_string(gap) + " between '" + sample_ids[i] +
                        "' and '" + sample_ids[j] + "'");
      }
      double v = 0.5 * (m(i, j) + m(j, i));
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return DistanceMatrix{std::move(sample_ids), std::move(m)};
}

Embedding make_embedding(std::vector<std::string> sample_ids, Eigen::MatrixXd z) {
  if (z.cols() != 2) {
    throw_error(errc::invalid_spec, "embedding must have exactly 2 coordinates");
  }
  if (static_cast<std::size_t>(z.rows()) != sample_ids.size()) {
    throw_error(errc::invalid_spec, "embedding row count does not match ID list");
  }
  if (!z.allFinite()) {
    throw_error(errc::non_finite, "embedding contains non-finite coordinates");
  }
  return Embedding{std::move(sample_ids), std::move(z)};
}

int LabelVector::distinct_groups() const {
  int g = 0;
  for (int s : group_sizes) {
    if (s > 0) ++g;
  }
  return g;
}

bool LabelVector::balanced() const {
  int size = -1;
  for (int s : group_sizes) {
    if (s == 0) continue;
    if (size < 0) {
      size = s;
    } else if (s != size) {
      return false;
    }
  }
  return size > 0;
}

LabelVector make_label_vector(std::vector<std::string> sample_ids, std::vector<int> y) {
  if (sample_ids.size() != y.size()) {
    throw_error(errc::invalid_spec, "label count does not match ID list");
  }
  int max_label = -1;
  for (int v : y) {
    if (v < 0) throw_error(errc::invalid_spec, "labels must be nonnegative integers");
    max_label = std::max(max_label, v);
  }
  std::vector<int> sizes(static_cast<std::size_t>(max_label + 1), 0);
  for (int v : y) ++sizes[static_cast<std::size_t>(v)];
  return LabelVector{std::move(sample_ids), std::move(y), std::move(sizes)};
}

Eigen::MatrixXi indicator_same_group(const LabelVector& labels) {
  const int n = labels.n();
  Eigen::MatrixXi eps(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      eps(i, j) = labels.y[i] == labels.y[j] ? 1 : 0;
    }
  }
  return eps;
}

std::vector<std::vector<int>> group_members(const std::vector<int>& y) {
  int max_label = -1;
  for (int v : y) max_label = std::max(max_label, v);
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(max_label + 1));
  for (std::size_t i = 0; i < y.size(); ++i) {
    groups[static_cast<std::size_t>(y[i])].push_back(static_cast<int>(i));
  }
  std::erase_if(groups, [](const std::vector<int>& g) { return g.empty(); });
  return groups;
}

namespace {

std::vector<int> match_rows(const std::vector<std::string>& source_ids,
                            const std::vector<std::string>& target_ids,
                            const std::string& context) {
  std::unordered_map<std::string, int> index;
  index.reserve(source_ids.size());
  for (std::size_t i = 0; i < source_ids.size(); ++i) {
    index.emplace(source_ids[i], static_cast<int>(i));
  }
  std::vector<int> rows;
  rows.reserve(target_ids.size());
  std::vector<std::string> missing;
  for (const auto& id : target_ids) {
    auto it = index.find(id);
    if (it == index.end()) {
      missing.push_back(id);
    } else {
      rows.push_back(it->second);
    }
  }
  if (!missing.empty()) {
    throw_error(errc::id_mismatch, context + ": missing sample IDs: " + list_ids(missing));
  }
  if (source_ids.size() != target_ids.size()) {
    throw_error(errc::id_mismatch,
                context + ": sample counts differ (" + std::to_string(source_ids.size()) +
                    " vs " + std::to_string(target_ids.size()) + ")");
  }
  return rows;
}

}  // namespace

LabelVector align_labels(const LabelVector& labels, const std::vector<std::string>& ids) {
  auto rows = match_rows(labels.sample_ids, ids, "labels");
  std::vector<int> y(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) y[i] = labels.y[static_cast<std::size_t>(rows[i])];
  return make_label_vector(ids, std::move(y));
}

Embedding align_embedding(const Embedding& emb, const std::vector<std::string>& ids) {
  auto rows = match_rows(emb.sample_ids, ids, "embedding");
  Eigen::MatrixXd z(static_cast<Eigen::Index>(ids.size()), 2);
  for (std::size_t i = 0; i < ids.size(); ++i) z.row(static_cast<Eigen::Index>(i)) = emb.z.row(rows[i]);
  return make_embedding(ids, std::move(z));
}

void require_same_ids(const std::vector<std::string>& a, const std::vector<std::string>& b,
                      const std::string& context) {
  if (a != b) {
    throw_error(errc::id_mismatch, context + ": sample ID lists do not match");
  }
}

}  // namespace fmds
