#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace paraeval {

/// Lowercase surface form -> canonical casing; keys may span several words.
class CasingLexicon {
 public:
  CasingLexicon() = default;

  /// Throws a data error unless `key` is lowercase and `value` differs from
  /// it only in letter case.
  void add(std::string key, std::string value);

  /// TSV rows of (lowercase_key, cased_value).
  static CasingLexicon load_tsv(const std::string& path);
  static CasingLexicon parse_tsv(std::string_view content);

  const std::map<std::u32string, std::u32string>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::u32string, std::u32string> entries_;
};

/// Restores casing of lowercased model output: copies the casing of words
/// that also occur in `source` (first occurrence wins), applies lexicon
/// entries longest-first, then uppercases the first letter of each sentence
/// (sentences end at . ! or ? followed by whitespace). Only letter case
/// ever changes.
std::string restore_case(std::string_view source, std::string_view generated_lower,
                         const CasingLexicon* lexicon = nullptr);

/// Order-preserving removal of candidates that normalize equal.
std::vector<std::string> dedup_outputs(const std::vector<std::string>& candidates);

struct PostprocessResult {
  std::size_t records = 0;
  std::size_t outputs = 0;
  std::size_t duplicates_removed = 0;
};

/// Input lines {"source", "outputs": [...]} (or "paraphrase": str). Writes
/// the same records with cleaned outputs, or one pair per output when
/// `as_pairs` is set.
PostprocessResult postprocess_jsonl(std::string_view input, std::string& output,
                                    const CasingLexicon* lexicon, bool as_pairs);

}  // namespace paraeval
