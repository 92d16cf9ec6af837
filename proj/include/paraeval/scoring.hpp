#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "paraeval/corpus.hpp"
#include "paraeval/report.hpp"
#include "paraeval/semantic.hpp"
#include "paraeval/syntax.hpp"
#include "paraeval/text.hpp"

/// Whole-corpus scoring: every requested metric for every pair, then the
/// per-system summary.
namespace paraeval::scoring {

struct TreePair {
  syntax::ParseTree source;
  syntax::ParseTree paraphrase;
};

/// Keyed by pair id.
using TreeTable = std::unordered_map<std::string, TreePair>;

/// JSONL {"id", "source_tree", "paraphrase_tree"} in bracket notation.
TreeTable parse_trees(std::string_view jsonl);
TreeTable load_trees(const std::string& path);

struct ScoreOptions {
  bool lexical = true;
  bool syntax = false;
  bool semantic = false;
  text::Scheme tokenizer = text::Scheme::UnicodeWords;
  syntax::SyntaxOptions syntax_options;
  std::size_t threads = 1;
  std::string system = "system";
};

/// Parses "lexical,syntax,semantic" into the three switches.
void set_metric_groups(ScoreOptions& options, std::string_view list);

struct ScoreRun {
  std::vector<report::PairScores> pairs;  // corpus order
  std::vector<report::MetricReport> reports;
};

class CorpusScorer {
 public:
  explicit CorpusScorer(ScoreOptions options);

  void add_provider(std::unique_ptr<EmbeddingProvider> provider);
  void set_trees(TreeTable trees);
  const ScoreOptions& options() const noexcept { return options_; }

  /// Output does not depend on `threads`.
  ScoreRun run(const Corpus& corpus);

 private:
  report::PairScores score_one(const ParaphrasePair& pair);

  ScoreOptions options_;
  std::vector<std::unique_ptr<EmbeddingProvider>> providers_;
  EmbeddingCache cache_;
  TreeTable trees_;
};

/// One pair_to_json line per pair.
std::string pairs_jsonl(const std::vector<report::PairScores>& pairs);

}  // namespace paraeval::scoring
