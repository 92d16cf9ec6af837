#include <algorithm>
#include <numeric>

#include "lexical_internal.hpp"
#include "paraeval/error.hpp"

namespace paraeval::lexical {

namespace detail {

template <typename Seq>
std::size_t dp_distance(const Seq& ref, const Seq& hyp) {
  std::vector<std::size_t> row(ref.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= hyp.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= ref.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (hyp[i - 1] == ref[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[ref.size()];
}

std::size_t edit_distance(std::span<const std::uint32_t> ref, std::span<const std::uint32_t> hyp) {
  return dp_distance(ref, hyp);
}

std::size_t edit_distance(std::u32string_view ref, std::u32string_view hyp) {
  return dp_distance(ref, hyp);
}

ReferenceMatcher::ReferenceMatcher(std::span<const std::uint32_t> ref, std::size_t vocab_size)
    : ref_(ref), bit_parallel_(!ref.empty() && ref.size() <= 64) {
  if (!bit_parallel_) return;
  peq_.assign(vocab_size, 0);
  for (std::size_t i = 0; i < ref.size(); ++i) peq_[ref[i]] |= std::uint64_t{1} << i;
}

// Hyyro's bit-vector Levenshtein: the reference is the pattern (<= 64 words)
// and each hypothesis word advances one column.
std::size_t ReferenceMatcher::distance(std::span<const std::uint32_t> hyp) const {
  if (!bit_parallel_) return dp_distance(ref_, hyp);
  const std::uint64_t last = std::uint64_t{1} << (ref_.size() - 1);
  std::uint64_t pv = ~std::uint64_t{0};
  std::uint64_t mv = 0;
  std::size_t score = ref_.size();
  for (auto word : hyp) {
    const std::uint64_t eq = word < peq_.size() ? peq_[word] : 0;
    const std::uint64_t xv = eq | mv;
    const std::uint64_t xh = (((eq & pv) + pv) ^ pv) | eq;
    std::uint64_t ph = mv | ~(xh | pv);
    std::uint64_t mh = pv & xh;
    if (ph & last) ++score;
    else if (mh & last) --score;
    ph = (ph << 1) | 1;
    mh <<= 1;
    pv = mh | ~(xv | ph);
    mv = ph & xv;
  }
  return score;
}

TerIds ter_shift(const Ids& ref, const Ids& hyp, std::size_t vocab_size) {
  ReferenceMatcher matcher(ref, vocab_size);
  TerIds out;
  out.shifted = hyp;
  std::size_t current = matcher.distance(out.shifted);
  Ids candidate;
  Ids best;

  while (current > 0) {
    const Ids& h = out.shifted;
    const std::size_t n = h.size();
    std::size_t best_distance = current;
    for (std::size_t start = 0; start < n; ++start) {
      const std::size_t max_len = std::min(kTerMaxShiftSpan, n - start);
      for (std::size_t len = 1; len <= max_len; ++len) {
        // `dest` indexes the sequence with the span removed.
        for (std::size_t dest = 0; dest + len <= n; ++dest) {
          if (dest == start) continue;
          candidate.clear();
          auto rest = [&](std::size_t k) { return k < start ? h[k] : h[k + len]; };
          for (std::size_t k = 0; k < dest; ++k) candidate.push_back(rest(k));
          candidate.insert(candidate.end(), h.begin() + static_cast<std::ptrdiff_t>(start),
                           h.begin() + static_cast<std::ptrdiff_t>(start + len));
          for (std::size_t k = dest; k + len < n; ++k) candidate.push_back(rest(k));
          const std::size_t d = matcher.distance(candidate);
          if (d < best_distance) {
            best_distance = d;
            best = candidate;
          }
        }
      }
    }
    if (best_distance >= current) break;
    out.shifted.swap(best);
    current = best_distance;
    ++out.shifts;
  }
  out.edits = current;
  return out;
}

}  // namespace detail

namespace {

void require_reference(const TokenSequence& original) {
  if (original.empty()) throw data_error("empty reference");
}

}  // namespace

double wer(const TokenSequence& original, const TokenSequence& paraphrase) {
  require_reference(original);
  const auto ids = detail::intern(original, paraphrase);
  detail::ReferenceMatcher matcher(ids.original, ids.vocab.size());
  return static_cast<double>(matcher.distance(ids.paraphrase)) /
         static_cast<double>(original.size());
}

TerAlignment ter_align(const TokenSequence& original, const TokenSequence& paraphrase) {
  require_reference(original);
  const auto ids = detail::intern(original, paraphrase);
  const auto shifted = detail::ter_shift(ids.original, ids.paraphrase, ids.vocab.size());
  TerAlignment out;
  out.shifts = shifted.shifts;
  out.edits = shifted.edits;
  for (auto id : shifted.shifted) out.shifted_hypothesis.emplace_back(ids.vocab[id]);
  return out;
}

double ter(const TokenSequence& original, const TokenSequence& paraphrase) {
  const auto a = ter_align(original, paraphrase);
  return static_cast<double>(a.shifts + a.edits) / static_cast<double>(original.size());
}

double character_rate(const TokenSequence& original, const TokenSequence& paraphrase) {
  if (original.empty() || paraphrase.empty()) throw data_error("empty input");
  const auto a = ter_align(original, paraphrase);
  auto join = [](const std::vector<std::string>& tokens) {
    std::u32string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (i) out.push_back(U' ');
      out += text::to_code_points(tokens[i]);
    }
    return out;
  };
  const std::u32string ref = join(original.tokens);
  const std::u32string hyp = join(a.shifted_hypothesis);
  return static_cast<double>(detail::edit_distance(ref, hyp)) / static_cast<double>(hyp.size());
}

}  // namespace paraeval::lexical
