#include "paraeval/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

#include "paraeval/error.hpp"
#include "syntax_internal.hpp"

namespace paraeval::syntax {

std::size_t ParseTree::node_count() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

std::size_t ParseTree::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth());
  return d + 1;
}

BracketError::BracketError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

namespace {

class BracketParser {
 public:
  explicit BracketParser(std::string_view text) : text_(text) {}

  ParseTree parse() {
    skip_ws();
    if (at_end()) throw BracketError("empty input", pos_);
    ParseTree tree = parse_node();
    skip_ws();
    if (!at_end()) {
      throw BracketError(text_[pos_] == ')' ? "unbalanced: unexpected ')'" : "trailing characters",
                         pos_);
    }
    return tree;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  static bool is_ws(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
  void skip_ws() {
    while (!at_end() && is_ws(text_[pos_])) ++pos_;
  }

  std::string read_atom() {
    const std::size_t start = pos_;
    while (!at_end() && !is_ws(text_[pos_]) && text_[pos_] != '(' && text_[pos_] != ')') ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  ParseTree parse_node() {
    if (text_[pos_] == ')') throw BracketError("unbalanced: unexpected ')'", pos_);
    if (text_[pos_] != '(') return ParseTree::leaf(read_atom());

    const std::size_t open_at = pos_++;
    skip_ws();
    ParseTree node = ParseTree::node(read_atom());
    while (true) {
      skip_ws();
      if (at_end()) throw BracketError("unbalanced: missing ')'", pos_);
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      node.children.push_back(parse_node());
    }
    if (node.label.empty()) {
      if (node.children.size() == 1 && !node.children.front().token)
        return std::move(node.children.front());
      throw BracketError("empty label", open_at);
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void append_bracket(const ParseTree& t, std::string& out) {
  if (t.token) {
    out += t.label;
    return;
  }
  out += '(';
  out += t.label;
  for (const auto& c : t.children) {
    out += ' ';
    append_bracket(c, out);
  }
  out += ')';
}

ParseTree truncate_at(const ParseTree& t, std::size_t depth, std::size_t max_depth) {
  ParseTree out{t.label, {}, t.token};
  if (depth < max_depth) {
    out.children.reserve(t.children.size());
    for (const auto& c : t.children) out.children.push_back(truncate_at(c, depth + 1, max_depth));
  }
  return out;
}

// Returns the canonical string of `t` and records every subtree with its size.
std::string collect_subtrees(const ParseTree& t, std::size_t& size,
                             std::vector<std::pair<std::string, std::size_t>>& out) {
  if (t.token) {
    size = 1;
    out.emplace_back(t.label, 1);
    return t.label;
  }
  std::string s = "(" + t.label;
  size = 1;
  for (const auto& c : t.children) {
    std::size_t child_size = 0;
    s += ' ';
    s += collect_subtrees(c, child_size, out);
    size += child_size;
  }
  s += ')';
  out.emplace_back(s, size);
  return s;
}

template <typename Set>
double jaccard_diversity(const Set& a, const Set& b, double both_empty) {
  if (a.empty() && b.empty()) return both_empty;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::vector<std::pair<std::string, std::size_t>> subtrees_with_size(const ParseTree& tree) {
  std::vector<std::pair<std::string, std::size_t>> out;
  std::size_t size = 0;
  collect_subtrees(tree, size, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ParseTree parse_bracket(std::string_view text) { return BracketParser(text).parse(); }

std::string to_bracket(const ParseTree& tree) {
  std::string out;
  append_bracket(tree, out);
  return out;
}

ParseTree truncate(const ParseTree& tree, std::size_t max_depth) {
  if (max_depth == 0) throw usage_error("depth limit must be >= 1");
  return truncate_at(tree, 1, max_depth);
}

ParseTree strip_leaves(const ParseTree& tree) {
  ParseTree out{tree.label, {}, tree.token};
  for (const auto& c : tree.children)
    if (!c.token) out.children.push_back(strip_leaves(c));
  return out;
}

std::set<std::string> subtree_set(const ParseTree& tree) {
  std::set<std::string> out;
  for (auto& [s, size] : subtrees_with_size(tree)) out.insert(std::move(s));
  return out;
}

double subtree_kernel_diversity(const ParseTree& a, const ParseTree& b) {
  return jaccard_diversity(subtree_set(a), subtree_set(b), 0.0);
}

std::set<std::pair<std::string, std::string>> node_pairs(const ParseTree& tree, NodePairMode mode) {
  std::set<std::pair<std::string, std::string>> out;
  std::vector<const std::string*> ancestors;
  std::function<void(const ParseTree&)> visit = [&](const ParseTree& t) {
    if (mode == NodePairMode::Dominance) {
      for (const auto* a : ancestors) out.emplace(*a, t.label);
    } else if (!ancestors.empty()) {
      out.emplace(*ancestors.back(), t.label);
    }
    ancestors.push_back(&t.label);
    for (const auto& c : t.children) visit(c);
    ancestors.pop_back();
  };
  visit(tree);
  return out;
}

double node_pair_kernel_diversity(const ParseTree& a, const ParseTree& b, NodePairMode mode) {
  return jaccard_diversity(node_pairs(a, mode), node_pairs(b, mode), 0.0);
}

SyntacticScores score_trees(const ParseTree& source, const ParseTree& paraphrase,
                            const SyntaxOptions& options) {
  const ParseTree a = options.strip_leaves ? strip_leaves(source) : source;
  const ParseTree b = options.strip_leaves ? strip_leaves(paraphrase) : paraphrase;

  SyntacticScores s;
  s.ted_f = static_cast<double>(tree_edit_distance(a, b));
  s.ted_3 = static_cast<double>(tree_edit_distance(a, b, 3));
  if (options.normalize_by_nodes) {
    s.ted_f /= static_cast<double>(a.node_count() + b.node_count());
    s.ted_3 /= static_cast<double>(truncate(a, 3).node_count() + truncate(b, 3).node_count());
  }
  s.kermit = kermit_diversity(a, b, options.kermit_dim, options.kermit_lambda);
  s.subtree_k = subtree_kernel_diversity(a, b);
  s.node_pair_k = node_pair_kernel_diversity(a, b, options.node_pairs);
  return s;
}

}  // namespace paraeval::syntax
