#pragma once

// Id-level kernels behind the public lexical metrics. Tokens of one pair are
// interned into dense ids so n-grams pack into 64-bit keys and the edit
// distances can run bit-parallel.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "paraeval/lexical.hpp"

namespace paraeval::lexical::detail {

using Ids = std::vector<std::uint32_t>;

struct InternedPair {
  Ids original;
  Ids paraphrase;
  std::vector<std::string_view> vocab;  // id -> token
};

InternedPair intern(const TokenSequence& original, const TokenSequence& paraphrase);

/// Clipped match count and per-side totals for n-grams of one order.
struct NGramOverlap {
  std::uint64_t matches = 0;
  std::uint64_t hyp_total = 0;
  std::uint64_t ref_total = 0;
};

NGramOverlap ngram_overlap(const Ids& ref, const Ids& hyp, std::size_t n);

std::size_t lcs_length(const Ids& a, const Ids& b);

/// Levenshtein distance with unit costs.
std::size_t edit_distance(std::span<const std::uint32_t> ref, std::span<const std::uint32_t> hyp);
std::size_t edit_distance(std::u32string_view ref, std::u32string_view hyp);

/// Reference-side state for many distance queries against one reference.
class ReferenceMatcher {
 public:
  ReferenceMatcher(std::span<const std::uint32_t> ref, std::size_t vocab_size);
  std::size_t distance(std::span<const std::uint32_t> hyp) const;

 private:
  std::span<const std::uint32_t> ref_;
  std::vector<std::uint64_t> peq_;
  bool bit_parallel_;
};

struct TerIds {
  std::size_t shifts = 0;
  std::size_t edits = 0;
  Ids shifted;
};

TerIds ter_shift(const Ids& ref, const Ids& hyp, std::size_t vocab_size);

MeteorAlignment meteor_align_ids(const Ids& ref, const Ids& hyp, const Ids& ref_stems,
                                 const Ids& hyp_stems);

double f1(double precision, double recall);

}  // namespace paraeval::lexical::detail
