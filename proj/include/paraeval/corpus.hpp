#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

namespace paraeval {

/// NFC, lowercase, whitespace runs collapsed to one space, trimmed.
std::string normalize(std::string_view text);

enum class Origin { Dataset, Generated };

std::string_view to_string(Origin origin);
Origin origin_from_string(std::string_view name);

struct ParaphrasePair {
  std::string id;
  std::string source;
  std::string paraphrase;
  Origin origin = Origin::Dataset;
  std::string corpus_tag;

  friend bool operator==(const ParaphrasePair&, const ParaphrasePair&) = default;
};

enum class CorpusFormat { Tsv, Jsonl };

CorpusFormat corpus_format_from_string(std::string_view name);

/// A record that did not make it into a corpus, with the reason it was
/// turned away. Written to the `.rejects.jsonl` sidecar.
struct Rejection {
  std::string id;
  std::size_t line = 0;
  std::string reason;
  std::string detail;
};

/// Ordered, duplicate-free collection of pairs. Uniqueness is judged on the
/// normalized (source, paraphrase) tuple; ids are unique too.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::string name) : name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }
  const std::vector<ParaphrasePair>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const ParaphrasePair& operator[](std::size_t i) const { return pairs_[i]; }
  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }

  /// Adds the pair unless its normalized text duplicates an existing one.
  /// Returns false on a duplicate. Throws on an empty side or a reused id.
  bool add(ParaphrasePair pair);

 private:
  std::string name_;
  std::vector<ParaphrasePair> pairs_;
  std::unordered_set<std::string> keys_;
  std::unordered_set<std::string> ids_;
};

struct LoadOptions {
  CorpusFormat format = CorpusFormat::Jsonl;
  bool tsv_header = false;
  std::string name;  // defaults to the file stem
};

struct LoadResult {
  Corpus corpus;
  std::size_t dropped = 0;
  std::vector<Rejection> duplicates;
};

/// Reads a pair file. Duplicates are dropped and counted; malformed rows throw
/// a data error naming the 1-based line. Missing ids are assigned as the
/// 1-based ordinal of the kept pair.
LoadResult load_corpus(const std::string& path, const LoadOptions& options = {});
LoadResult parse_corpus(std::string_view content, const LoadOptions& options);

std::string serialize_corpus(const Corpus& corpus, CorpusFormat format);
void save_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format);

/// `foo/bar.jsonl` -> `foo/bar.rejects.jsonl`.
std::string rejects_sidecar_path(const std::string& path);
void write_rejects(const std::string& path, const std::vector<Rejection>& rejects);

// ---------------------------------------------------------------------------
// LLM augmentation responses

enum class RejectReason { NonEnglish, Unparseable };

std::string_view to_string(RejectReason reason);

struct ListRejection {
  RejectReason reason;
};

/// Items of a numbered list ("1." or "1)" markers), or a rejection when the
/// body is the "Error" sentinel or carries no numbered item.
std::variant<std::vector<std::string>, ListRejection> parse_llm_list(std::string_view response);

/// A source with its distinct paraphrases. Construction enforces that no two
/// paraphrases normalize equal and none normalizes equal to the source.
class ParaphrasePool {
 public:
  ParaphrasePool(std::string source, std::vector<std::string> paraphrases);

  struct Dropped {
    std::string text;
    std::string reason;  // "duplicate" or "equals_source"
  };

  /// Keeps the first of each normalized duplicate and drops items equal to
  /// the source; dropped items are appended to `dropped` when given.
  static ParaphrasePool filtered(std::string source, std::vector<std::string> candidates,
                                 std::vector<Dropped>* dropped = nullptr);

  const std::string& source() const noexcept { return source_; }
  const std::vector<std::string>& paraphrases() const noexcept { return paraphrases_; }

 private:
  std::string source_;
  std::vector<std::string> paraphrases_;
};

enum class PairMode { SourceToEach, AllUnique };

PairMode pair_mode_from_string(std::string_view name);

/// Pairs are ids `<id_prefix>-<k>` (k from 1), origin Generated.
std::vector<ParaphrasePair> build_pairs(const ParaphrasePool& pool, PairMode mode,
                                        std::string_view id_prefix = "p",
                                        std::string_view corpus_tag = {});

/// Pluggable rejection hook (e.g. a moderation filter). Returns a reason to
/// reject the pair or nullopt to keep it.
using PairFilter = std::function<std::optional<std::string>(const ParaphrasePair&)>;

struct PairsFromResponsesOptions {
  PairMode mode = PairMode::SourceToEach;
  PairFilter filter;
};

struct PairsFromResponsesResult {
  Corpus corpus;
  std::vector<Rejection> rejects;
  std::size_t responses = 0;
};

/// Input lines are JSON objects {"source", "response"[, "id", "corpus_tag"]}.
PairsFromResponsesResult pairs_from_responses(std::string_view jsonl,
                                              const PairsFromResponsesOptions& options);

}  // namespace paraeval
