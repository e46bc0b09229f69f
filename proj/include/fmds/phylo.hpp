#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fmds/error.hpp"

namespace fmds {

// Rooted phylogenetic tree stored as a node arena. branch_length is the
// length of the edge to the parent; the root's is 0. Immutable after
// parsing.
struct PhyloTree {
  struct Node {
    int parent = -1;
    std::vector<int> children;
    double branch_length = 0.0;
    std::string name;  // empty for unnamed internal nodes
  };

  std::vector<Node> nodes;
  int root = 0;
  std::unordered_map<std::string, int> leaf_index;

  int n_nodes() const { return static_cast<int>(nodes.size()); }
  bool is_leaf(int i) const { return nodes[static_cast<std::size_t>(i)].children.empty(); }
};

// Parses a single Newick statement ("(A:1,B:2);"). Names are unquoted
// alphanumerics plus '_', '.', '-'; quoted labels and bracket comments are
// rejected. Missing branch lengths default to 0.
PhyloTree parse_newick(const std::string& text);

// Canonical Newick: children in stored order, shortest round-trip decimals.
// parse_newick(serialize_newick(t)) is structurally equal to t.
std::string serialize_newick(const PhyloTree& tree);

bool trees_structurally_equal(const PhyloTree& a, const PhyloTree& b);

// For each node, the total leaf weight descending through its parent edge,
// normalized by the total weight. Unlisted leaves carry weight 0.
std::vector<double> branch_descendant_mass(
    const PhyloTree& tree, const std::unordered_map<std::string, double>& leaf_weights);

}  // namespace fmds
