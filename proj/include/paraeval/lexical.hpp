#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "paraeval/text.hpp"

/// Lexical-diversity metrics. Every "diversity" value is 1 - similarity and
/// lies in [0, 1]; TER, WER and CharacTER are raw error rates (>= 0, may
/// exceed 1). The original sentence is always the reference and the
/// paraphrase the hypothesis.
namespace paraeval::lexical {

using text::TokenSequence;

/// Zero-numerator floor used by the smoothed BLEU modes.
inline constexpr double kBleuSmoothingEpsilon = 0.1;
inline constexpr int kBleuMaxOrder = 4;
/// Longest hypothesis span a TER shift may move.
inline constexpr std::size_t kTerMaxShiftSpan = 10;

double bow_overlap_diversity(const TokenSequence& original, const TokenSequence& paraphrase);
double token_jaccard_diversity(const TokenSequence& original, const TokenSequence& paraphrase);

/// Sufficient statistics for BLEU-4; they add commutatively across pairs.
struct BleuStats {
  std::array<std::uint64_t, kBleuMaxOrder> matches{};
  std::array<std::uint64_t, kBleuMaxOrder> totals{};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& other);
  friend bool operator==(const BleuStats&, const BleuStats&) = default;
};

BleuStats bleu_stats(const TokenSequence& original, const TokenSequence& paraphrase);

/// BLEU in [0, 1]. Unsmoothed: any zero match count gives 0. Smoothed: a zero
/// numerator becomes epsilon over max(1, total).
double bleu_from_stats(const BleuStats& stats, bool smoothed);

enum class BleuMode { Corpus, CorpusSmoothed, Sentence };

struct TokenPair {
  TokenSequence original;
  TokenSequence paraphrase;
};

double bleu_diversity(std::span<const TokenPair> pairs, BleuMode mode);

double google_bleu_diversity(const TokenSequence& original, const TokenSequence& paraphrase);

struct MeteorAlignment {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  std::size_t exact_matches = 0;
};

/// Exact stage then Porter-stem stage, each a maximum matching chosen to
/// minimise the chunk count.
MeteorAlignment meteor_align(const TokenSequence& original, const TokenSequence& paraphrase);
double meteor_score(const TokenSequence& original, const TokenSequence& paraphrase);
double meteor_diversity(const TokenSequence& original, const TokenSequence& paraphrase);

enum class RougeVariant { R1, R2, RL };

double rouge_diversity(const TokenSequence& original, const TokenSequence& paraphrase,
                       RougeVariant variant);

/// Word-level Levenshtein from paraphrase to original, divided by |original|.
double wer(const TokenSequence& original, const TokenSequence& paraphrase);

struct TerAlignment {
  std::size_t shifts = 0;
  std::size_t edits = 0;
  std::vector<std::string> shifted_hypothesis;
};

/// Greedy shift phase: repeatedly applies the single span move (span length
/// <= kTerMaxShiftSpan, any destination) that lowers the word edit distance
/// the most, first in (start, length, destination) order on ties, until no
/// move lowers it.
TerAlignment ter_align(const TokenSequence& original, const TokenSequence& paraphrase);
double ter(const TokenSequence& original, const TokenSequence& paraphrase);

/// Character Levenshtein between the TER-shifted hypothesis and the
/// reference (tokens joined by single spaces), over hypothesis characters.
double character_rate(const TokenSequence& original, const TokenSequence& paraphrase);

struct LexicalScores {
  double bow_overlap = 0;
  double token_jaccard = 0;
  double corpus_bleu = 0;
  double corpus_bleu2 = 0;
  double sentence_bleu = 0;
  double google_bleu = 0;
  double meteor = 0;
  double rouge1 = 0;
  double rouge2 = 0;
  double rougeL = 0;
  double ter = 0;
  double wer = 0;
  double character = 0;
};

/// Everything for one pair from a single tokenization. corpus_bleu and
/// corpus_bleu2 here are the one-pair corpus values; corpus-level figures
/// come from summing `bleu`.
struct PairLexical {
  LexicalScores scores;
  BleuStats bleu;
};

PairLexical score_pair(const TokenSequence& original, const TokenSequence& paraphrase);

/// Porter (1980) suffix stripping on a lowercase ASCII word; other input is
/// returned unchanged.
std::string porter_stem(std::string_view word);

}  // namespace paraeval::lexical
