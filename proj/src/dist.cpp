#include "fmds/dist.hpp"

#include <cmath>

#include "fmds/parallel.hpp"

namespace fmds {

Eigen::MatrixXd pairwise_euclidean_rows(const Eigen::MatrixXd& rows) {
  const Eigen::Index n = rows.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    for (Eigen::Index j = static_cast<Eigen::Index>(i) + 1; j < n; ++j) {
      double v = (rows.row(static_cast<Eigen::Index>(i)) - rows.row(j)).norm();
      d(static_cast<Eigen::Index>(i), j) = v;
      d(j, static_cast<Eigen::Index>(i)) = v;
    }
  });
  return d;
}

DistanceMatrix euclidean(const AbundanceTable& table) {
  return DistanceMatrix{table.sample_ids, pairwise_euclidean_rows(table.values)};
}

DistanceMatrix bray_curtis(const AbundanceTable& table) {
  if ((table.values.array() < 0.0).any()) {
    throw_error(errc::negative_entry, "Bray-Curtis requires nonnegative abundances");
  }
  const Eigen::Index n = table.values.rows();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double num = (table.values.row(i) - table.values.row(j)).cwiseAbs().sum();
      double den = (table.values.row(i) + table.values.row(j)).sum();
      if (den <= 0.0) {
        throw_error(errc::zero_denominator_pair,
                    "Bray-Curtis undefined for all-zero pair ('" + table.sample_ids[i] +
                        "', '" + table.sample_ids[j] + "')");
      }
      double v = num / den;
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return DistanceMatrix{table.sample_ids, std::move(d)};
}

DistanceMatrix weighted_unifrac(const AbundanceTable& table, const PhyloTree& tree,
                                bool normalized) {
  if ((table.values.array() < 0.0).any()) {
    throw_error(errc::negative_entry, "weighted UniFrac requires nonnegative abundances");
  }
  const Eigen::Index n = table.values.rows();
  const int nodes = tree.n_nodes();

  // Per-sample normalized branch masses, computed once.
  Eigen::MatrixXd mass(nodes, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    std::unordered_map<std::string, double> weights;
    weights.reserve(table.feature_ids.size());
    for (std::size_t f = 0; f < table.feature_ids.size(); ++f) {
      weights.emplace(table.feature_ids[f], table.values(s, static_cast<Eigen::Index>(f)));
    }
    std::vector<double> m;
    try {
      m = branch_descendant_mass(tree, weights);
    } catch (const Error& e) {
      if (e.code() == errc::zero_total_weight) {
        throw_error(errc::zero_total_weight,
                    "sample '" + table.sample_ids[s] + "' has zero total abundance");
      }
      throw;
    }
    for (int b = 0; b < nodes; ++b) mass(b, s) = m[static_cast<std::size_t>(b)];
  }

  Eigen::VectorXd lengths(nodes);
  for (int b = 0; b < nodes; ++b) {
    lengths(b) = b == tree.root ? 0.0 : tree.nodes[static_cast<std::size_t>(b)].branch_length;
  }

  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t i) {
    for (Eigen::Index j = static_cast<Eigen::Index>(i) + 1; j < n; ++j) {
      double num = 0.0;
      double den = 0.0;
      for (int b = 0; b < nodes; ++b) {
        double pi = mass(b, static_cast<Eigen::Index>(i));
        double pj = mass(b, j);
        num += lengths(b) * std::abs(pi - pj);
        den += lengths(b) * (pi + pj);
      }
      double v = normalized ? (den > 0.0 ? num / den : 0.0) : num;
      d(static_cast<Eigen::Index>(i), j) = v;
      d(j, static_cast<Eigen::Index>(i)) = v;
    }
  });
  return DistanceMatrix{table.sample_ids, std::move(d)};
}

}  // namespace fmds
