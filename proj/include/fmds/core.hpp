#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fmds/error.hpp"
#include "fmds/rng.hpp"

namespace fmds {

// Samples x features matrix of abundances. Rows of a compositional table
// sum to one. All core types are immutable by convention after validation
// and safe to share across threads.
struct AbundanceTable {
  std::vector<std::string> sample_ids;
  std::vector<std::string> feature_ids;
  Eigen::MatrixXd values;  // N x S
  bool compositional = false;

  int n_samples() const { return static_cast<int>(values.rows()); }
  int n_features() const { return static_cast<int>(values.cols()); }
};

AbundanceTable make_abundance_table(std::vector<std::string> sample_ids,
                                    std::vector<std::string> feature_ids,
                                    Eigen::MatrixXd values,
                                    bool compositional = false);

// Symmetric pairwise dissimilarities with zero diagonal.
struct DistanceMatrix {
  std::vector<std::string> sample_ids;
  Eigen::MatrixXd d;  // N x N

  int n() const { return static_cast<int>(d.rows()); }
};

// Validates and returns a DistanceMatrix. Asymmetries below 1e-9 are
// averaged away (CSV round-trip noise); larger ones are rejected.
DistanceMatrix validate_distance_matrix(Eigen::MatrixXd m,
                                        std::vector<std::string> sample_ids);

// 2D configuration Z.
struct Embedding {
  std::vector<std::string> sample_ids;
  Eigen::MatrixXd z;  // N x 2

  int n() const { return static_cast<int>(z.rows()); }
};

Embedding make_embedding(std::vector<std::string> sample_ids, Eigen::MatrixXd z);

// Per-sample discrete group labels in {0..r}.
struct LabelVector {
  std::vector<std::string> sample_ids;
  std::vector<int> y;
  std::vector<int> group_sizes;  // indexed by label value; absent labels are 0

  int n() const { return static_cast<int>(y.size()); }
  int distinct_groups() const;
  bool balanced() const;
};

LabelVector make_label_vector(std::vector<std::string> sample_ids, std::vector<int> y);

// epsilon[i][j] = 1 iff y_i == y_j (self-pairs included).
Eigen::MatrixXi indicator_same_group(const LabelVector& labels);

// Indices of samples per present label value, in ascending label order.
std::vector<std::vector<int>> group_members(const std::vector<int>& y);

// ID-based joins: reorder rows of the right-hand structure to match `ids`.
// Missing or extra IDs raise id_mismatch naming the offenders.
LabelVector align_labels(const LabelVector& labels, const std::vector<std::string>& ids);
Embedding align_embedding(const Embedding& emb, const std::vector<std::string>& ids);

void require_same_ids(const std::vector<std::string>& a, const std::vector<std::string>& b,
                      const std::string& context);

}  // namespace fmds
