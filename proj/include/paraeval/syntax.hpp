#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "paraeval/embedding.hpp"

namespace paraeval::syntax {

/// Ordered, labeled constituency tree. `token` marks leaves that were bare
/// words in bracket notation; they serialize without parentheses.
struct ParseTree {
  std::string label;
  std::vector<ParseTree> children;
  bool token = false;

  static ParseTree leaf(std::string word) { return {std::move(word), {}, true}; }
  static ParseTree node(std::string label, std::vector<ParseTree> children = {}) {
    return {std::move(label), std::move(children), false};
  }

  std::size_t node_count() const;
  std::size_t depth() const;  // root depth is 1

  friend bool operator==(const ParseTree&, const ParseTree&) = default;
};

/// Thrown by parse_bracket with the byte offset of the problem.
class BracketError : public std::runtime_error {
 public:
  BracketError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Penn-style `(LABEL child ...)`; bare tokens are leaves. A label-less
/// wrapper `( (S ...) )` around a single tree is unwrapped.
ParseTree parse_bracket(std::string_view text);

/// Canonical bracket string: `(LABEL child child)`, bare tokens as-is.
std::string to_bracket(const ParseTree& tree);

/// Keeps nodes of depth <= max_depth.
ParseTree truncate(const ParseTree& tree, std::size_t max_depth);

/// Drops token leaves; phrase nodes stay even if left childless.
ParseTree strip_leaves(const ParseTree& tree);

/// Unit-cost ordered tree edit distance (Zhang-Shasha). With a depth limit
/// both trees are first truncated to that many levels.
std::uint64_t tree_edit_distance(const ParseTree& a, const ParseTree& b,
                                 std::optional<std::size_t> depth_limit = std::nullopt);

/// Canonical strings of every node-rooted complete subtree (set semantics).
std::set<std::string> subtree_set(const ParseTree& tree);

double subtree_kernel_diversity(const ParseTree& a, const ParseTree& b);

enum class NodePairMode { Dominance, ParentChild };

/// (ancestor label, descendant label) features.
std::set<std::pair<std::string, std::string>> node_pairs(const ParseTree& tree,
                                                         NodePairMode mode = NodePairMode::Dominance);

/// 1 - Jaccard over node-pair features; two empty feature sets give 0.
double node_pair_kernel_diversity(const ParseTree& a, const ParseTree& b,
                                  NodePairMode mode = NodePairMode::Dominance);

inline constexpr std::size_t kKermitDim = 4096;
inline constexpr double kKermitLambda = 0.4;
inline constexpr std::uint64_t kKermitSeed = 0x6b65726d69742a31ULL;  // "kermit*1"

/// Sum over unique subtrees of lambda^(subtree node count) times a
/// pseudo-random unit vector seeded by the subtree's canonical string. Entries
/// are +-1/sqrt(dim), generated by splitmix64, so the result is identical on
/// every platform.
EmbeddingVector distributed_tree_embedding(const ParseTree& tree, std::size_t dim = kKermitDim,
                                           double lambda = kKermitLambda);

/// 1 - cosine of the two embeddings, clamped to [0, 1].
double kermit_diversity(const ParseTree& a, const ParseTree& b, std::size_t dim = kKermitDim,
                        double lambda = kKermitLambda);

std::uint64_t stable_hash(std::string_view s);

struct SyntaxOptions {
  bool strip_leaves = false;
  bool normalize_by_nodes = false;
  NodePairMode node_pairs = NodePairMode::Dominance;
  std::size_t kermit_dim = kKermitDim;
  double kermit_lambda = kKermitLambda;
};

struct SyntacticScores {
  double ted_f = 0;  // integer unless normalize_by_nodes
  double ted_3 = 0;
  double kermit = 0;
  double subtree_k = 0;
  double node_pair_k = 0;
};

SyntacticScores score_trees(const ParseTree& source, const ParseTree& paraphrase,
                            const SyntaxOptions& options = {});

}  // namespace paraeval::syntax
