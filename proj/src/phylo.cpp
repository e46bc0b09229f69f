#include "fmds/phylo.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "fmds/io.hpp"

namespace fmds {

namespace {

bool is_name_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '_' || c == '.' || c == '-';
}

class NewickParser {
 public:
  explicit NewickParser(const std::string& text) : text_(text) {}

  PhyloTree parse() {
    skip_space();
    int root = parse_clade(-1);
    tree_.root = root;
    skip_space();
    if (pos_ >= text_.size() || text_[pos_] != ';') {
      throw_error(errc::missing_terminator, "Newick statement must end with ';'");
    }
    ++pos_;
    skip_space();
    if (pos_ != text_.size()) {
      fail("trailing characters after ';'");
    }
    return std::move(tree_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    throw_error(errc::unexpected_token,
                "unexpected token at position " + std::to_string(pos_) + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
            text_[pos_] == '\r')) {
      ++pos_;
    }
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  int parse_clade(int parent) {
    skip_space();
    int node = new_node(parent);
    if (peek() == '(') {
      ++pos_;
      while (true) {
        int child = parse_clade(node);
        tree_.nodes[static_cast<std::size_t>(node)].children.push_back(child);
        skip_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == ')') {
          ++pos_;
          break;
        }
        throw_error(errc::unbalanced_parenthesis,
                    "unbalanced parenthesis at position " + std::to_string(pos_));
      }
    }
    skip_space();
    if (peek() == '\'' || peek() == '"' || peek() == '[') {
      fail("quoted labels and bracket comments are not supported");
    }
    if (is_name_char(peek())) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
      tree_.nodes[static_cast<std::size_t>(node)].name = text_.substr(start, pos_ - start);
    }
    skip_space();
    if (peek() == ':') {
      ++pos_;
      skip_space();
      tree_.nodes[static_cast<std::size_t>(node)].branch_length = parse_length();
    }
    return node;
  }

  double parse_length() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if ((c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.' || c == 'e' || c == 'E') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected branch length after ':'");
    double value = 0.0;
    auto result = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (result.ec != std::errc{} || result.ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed branch length");
    }
    if (value < 0.0) {
      throw_error(errc::negative_branch_length,
                  "negative branch length at position " + std::to_string(start));
    }
    return value;
  }

  int new_node(int parent) {
    tree_.nodes.push_back(PhyloTree::Node{parent, {}, 0.0, {}});
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  PhyloTree tree_;
};

void serialize_node(const PhyloTree& tree, int node, std::string& out) {
  const auto& n = tree.nodes[static_cast<std::size_t>(node)];
  if (!n.children.empty()) {
    out += '(';
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i > 0) out += ',';
      serialize_node(tree, n.children[i], out);
    }
    out += ')';
  }
  out += n.name;
  if (node != tree.root) {
    out += ':';
    out += format_double(n.branch_length);
  }
}

}  // namespace

PhyloTree parse_newick(const std::string& text) {
  PhyloTree tree = NewickParser(text).parse();
  tree.nodes[static_cast<std::size_t>(tree.root)].branch_length = 0.0;
  for (int i = 0; i < tree.n_nodes(); ++i) {
    const auto& node = tree.nodes[static_cast<std::size_t>(i)];
    if (!node.children.empty()) continue;
    if (node.name.empty()) {
      throw_error(errc::unexpected_token, "leaf without a name");
    }
    if (!tree.leaf_index.emplace(node.name, i).second) {
      throw_error(errc::duplicate_leaf_name, "duplicate leaf name '" + node.name + "'");
    }
  }
  return tree;
}

std::string serialize_newick(const PhyloTree& tree) {
  std::string out;
  serialize_node(tree, tree.root, out);
  out += ';';
  return out;
}

namespace {

bool nodes_equal(const PhyloTree& a, int na, const PhyloTree& b, int nb) {
  const auto& x = a.nodes[static_cast<std::size_t>(na)];
  const auto& y = b.nodes[static_cast<std::size_t>(nb)];
  if (x.name != y.name || x.children.size() != y.children.size()) return false;
  if (x.branch_length != y.branch_length) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i) {
    if (!nodes_equal(a, x.children[i], b, y.children[i])) return false;
  }
  return true;
}

}  // namespace

bool trees_structurally_equal(const PhyloTree& a, const PhyloTree& b) {
  if (a.n_nodes() != b.n_nodes()) return false;
  return nodes_equal(a, a.root, b, b.root);
}

std::vector<double> branch_descendant_mass(
    const PhyloTree& tree, const std::unordered_map<std::string, double>& leaf_weights) {
  std::vector<double> mass(static_cast<std::size_t>(tree.n_nodes()), 0.0);
  double total = 0.0;
  for (const auto& [name, weight] : leaf_weights) {
    auto it = tree.leaf_index.find(name);
    if (it == tree.leaf_index.end()) {
      throw_error(errc::unknown_leaf, "leaf '" + name + "' not present in tree");
    }
    mass[static_cast<std::size_t>(it->second)] = weight;
    total += weight;
  }
  if (!(total > 0.0)) {
    throw_error(errc::zero_total_weight, "leaf weights sum to zero");
  }
  // Parsing allocates parents before children, so a reverse index sweep
  // accumulates leaf masses rootward.
  for (int i = tree.n_nodes() - 1; i >= 0; --i) {
    const auto& node = tree.nodes[static_cast<std::size_t>(i)];
    if (node.parent >= 0) {
      mass[static_cast<std::size_t>(node.parent)] += mass[static_cast<std::size_t>(i)];
    }
  }
  for (double& m : mass) m /= total;
  return mass;
}

}  // namespace fmds
