#include "paraeval/lexical.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "lexical_internal.hpp"
#include "paraeval/error.hpp"

namespace paraeval::lexical {

namespace detail {

InternedPair intern(const TokenSequence& original, const TokenSequence& paraphrase) {
  InternedPair out;
  std::unordered_map<std::string_view, std::uint32_t> ids;
  ids.reserve(original.size() + paraphrase.size());
  auto map = [&](const TokenSequence& seq, Ids& dst) {
    dst.reserve(seq.size());
    for (const auto& tok : seq.tokens) {
      auto [it, inserted] = ids.try_emplace(tok, static_cast<std::uint32_t>(out.vocab.size()));
      if (inserted) out.vocab.push_back(tok);
      dst.push_back(it->second);
    }
  };
  map(original, out.original);
  map(paraphrase, out.paraphrase);
  if (out.vocab.size() > 0xFFFF)
    throw data_error("sentence pair has more than 65535 distinct tokens");
  return out;
}

namespace {

void collect_keys(const Ids& seq, std::size_t n, std::vector<std::uint64_t>& keys) {
  keys.clear();
  if (seq.size() < n) return;
  keys.reserve(seq.size() - n + 1);
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < n; ++k) key |= static_cast<std::uint64_t>(seq[i + k]) << (16 * k);
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
}

}  // namespace

NGramOverlap ngram_overlap(const Ids& ref, const Ids& hyp, std::size_t n) {
  thread_local std::vector<std::uint64_t> rk, hk;
  collect_keys(ref, n, rk);
  collect_keys(hyp, n, hk);

  NGramOverlap out;
  out.ref_total = rk.size();
  out.hyp_total = hk.size();
  std::size_t i = 0, j = 0;
  while (i < rk.size() && j < hk.size()) {
    if (rk[i] < hk[j]) {
      ++i;
    } else if (hk[j] < rk[i]) {
      ++j;
    } else {
      const std::uint64_t key = rk[i];
      std::size_t cr = 0, ch = 0;
      while (i < rk.size() && rk[i] == key) ++i, ++cr;
      while (j < hk.size() && hk[j] == key) ++j, ++ch;
      out.matches += std::min(cr, ch);
    }
  }
  return out;
}

std::size_t lcs_length(const Ids& a, const Ids& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double f1(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

}  // namespace detail

namespace {

using namespace detail;

void require_non_empty(const TokenSequence& a, const TokenSequence& b) {
  if (a.empty() || b.empty()) throw data_error("empty input");
}

double ratio(std::uint64_t num, std::uint64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double jaccard_ids(const Ids& o, const Ids& p, std::size_t vocab) {
  std::vector<std::uint8_t> seen(vocab, 0);
  for (auto id : o) seen[id] |= 1;
  for (auto id : p) seen[id] |= 2;
  std::size_t inter = 0, uni = 0;
  for (auto s : seen) {
    inter += s == 3;
    uni += s != 0;
  }
  return 1.0 - ratio(inter, uni);
}

BleuStats stats_from(const Ids& ref, const Ids& hyp, std::array<NGramOverlap, kBleuMaxOrder>* out) {
  BleuStats s;
  s.hyp_len = hyp.size();
  s.ref_len = ref.size();
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    NGramOverlap ov = ngram_overlap(ref, hyp, static_cast<std::size_t>(n + 1));
    s.matches[n] = ov.matches;
    s.totals[n] = ov.hyp_total;
    if (out) (*out)[n] = ov;
  }
  return s;
}

double rouge_from(const NGramOverlap& ov) {
  return 1.0 - f1(ratio(ov.matches, ov.hyp_total), ratio(ov.matches, ov.ref_total));
}

double rouge_l(const Ids& ref, const Ids& hyp) {
  const std::size_t lcs = lcs_length(ref, hyp);
  return 1.0 - f1(ratio(lcs, hyp.size()), ratio(lcs, ref.size()));
}

double gleu_from(const std::array<NGramOverlap, kBleuMaxOrder>& ov) {
  std::uint64_t m = 0, hyp = 0, ref = 0;
  for (const auto& o : ov) {
    m += o.matches;
    hyp += o.hyp_total;
    ref += o.ref_total;
  }
  return 1.0 - std::min(ratio(m, hyp), ratio(m, ref));
}

}  // namespace

BleuStats& BleuStats::operator+=(const BleuStats& other) {
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    matches[n] += other.matches[n];
    totals[n] += other.totals[n];
  }
  hyp_len += other.hyp_len;
  ref_len += other.ref_len;
  return *this;
}

double bow_overlap_diversity(const TokenSequence& original, const TokenSequence& paraphrase) {
  require_non_empty(original, paraphrase);
  const auto ids = intern(original, paraphrase);
  const auto ov = ngram_overlap(ids.original, ids.paraphrase, 1);
  return 1.0 - ratio(2 * ov.matches, original.size() + paraphrase.size());
}

double token_jaccard_diversity(const TokenSequence& original, const TokenSequence& paraphrase) {
  require_non_empty(original, paraphrase);
  const auto ids = intern(original, paraphrase);
  return jaccard_ids(ids.original, ids.paraphrase, ids.vocab.size());
}

BleuStats bleu_stats(const TokenSequence& original, const TokenSequence& paraphrase) {
  require_non_empty(original, paraphrase);
  const auto ids = intern(original, paraphrase);
  return stats_from(ids.original, ids.paraphrase, nullptr);
}

double bleu_from_stats(const BleuStats& stats, bool smoothed) {
  if (stats.hyp_len == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 0; n < kBleuMaxOrder; ++n) {
    const double den = static_cast<double>(std::max<std::uint64_t>(1, stats.totals[n]));
    double precision;
    if (stats.matches[n] == 0) {
      if (!smoothed) return 0.0;
      precision = kBleuSmoothingEpsilon / den;
    } else {
      precision = static_cast<double>(stats.matches[n]) / den;
    }
    log_sum += std::log(precision);
  }
  const double c = static_cast<double>(stats.hyp_len);
  const double r = static_cast<double>(stats.ref_len);
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return bp * std::exp(log_sum / kBleuMaxOrder);
}

double bleu_diversity(std::span<const TokenPair> pairs, BleuMode mode) {
  if (pairs.empty()) throw data_error("empty pair list");
  if (mode == BleuMode::Sentence) {
    double sum = 0.0;
    for (const auto& p : pairs) sum += bleu_from_stats(bleu_stats(p.original, p.paraphrase), true);
    return 1.0 - sum / static_cast<double>(pairs.size());
  }
  BleuStats total;
  for (const auto& p : pairs) total += bleu_stats(p.original, p.paraphrase);
  return 1.0 - bleu_from_stats(total, mode == BleuMode::CorpusSmoothed);
}

double google_bleu_diversity(const TokenSequence& original, const TokenSequence& paraphrase) {
  require_non_empty(original, paraphrase);
  const auto ids = intern(original, paraphrase);
  std::array<NGramOverlap, kBleuMaxOrder> ov;
  stats_from(ids.original, ids.paraphrase, &ov);
  return gleu_from(ov);
}

double rouge_diversity(const TokenSequence& original, const TokenSequence& paraphrase,
                       RougeVariant variant) {
  require_non_empty(original, paraphrase);
  const auto ids = intern(original, paraphrase);
  switch (variant) {
    case RougeVariant::R1:
      return rouge_from(ngram_overlap(ids.original, ids.paraphrase, 1));
    case RougeVariant::R2:
      return rouge_from(ngram_overlap(ids.original, ids.paraphrase, 2));
    case RougeVariant::RL:
      return rouge_l(ids.original, ids.paraphrase);
  }
  return 1.0;
}

namespace {

Ids stem_ids(const Ids& ids, const std::vector<std::string_view>& vocab,
             std::unordered_map<std::string, std::uint32_t>& stems) {
  Ids out;
  out.reserve(ids.size());
  for (auto id : ids) {
    auto [it, inserted] =
        stems.try_emplace(porter_stem(vocab[id]), static_cast<std::uint32_t>(stems.size()));
    out.push_back(it->second);
  }
  return out;
}

MeteorAlignment align(const InternedPair& ids) {
  std::unordered_map<std::string, std::uint32_t> stems;
  const Ids ref_stems = stem_ids(ids.original, ids.vocab, stems);
  const Ids hyp_stems = stem_ids(ids.paraphrase, ids.vocab, stems);
  return meteor_align_ids(ids.original, ids.paraphrase, ref_stems, hyp_stems);
}

double meteor_from(const MeteorAlignment& a, std::size_t ref_len, std::size_t hyp_len) {
  if (a.matches == 0) return 0.0;
  const double m = static_cast<double>(a.matches);
  const double precision = m / static_cast<double>(hyp_len);
  const double recall = m / static_cast<double>(ref_len);
  const double fmean = 10.0 * precision * recall / (recall + 9.0 * precision);
  const double frag = static_cast<double>(a.chunks) / m;
  const double penalty = 0.5 * frag * frag * frag;
  return fmean * (1.0 - penalty);
}

}  // namespace

MeteorAlignment meteor_align(const TokenSequence& original, const TokenSequence& paraphrase) {
  require_non_empty(original, paraphrase);
  return align(intern(original, paraphrase));
}

double meteor_score(const TokenSequence& original, const TokenSequence& paraphrase) {
  return meteor_from(meteor_align(original, paraphrase), original.size(), paraphrase.size());
}

double meteor_diversity(const TokenSequence& original, const TokenSequence& paraphrase) {
  return 1.0 - meteor_score(original, paraphrase);
}

PairLexical score_pair(const TokenSequence& original, const TokenSequence& paraphrase) {
  require_non_empty(original, paraphrase);
  const auto ids = intern(original, paraphrase);
  const Ids& ref = ids.original;
  const Ids& hyp = ids.paraphrase;

  PairLexical out;
  std::array<NGramOverlap, kBleuMaxOrder> ov;
  out.bleu = stats_from(ref, hyp, &ov);

  LexicalScores& s = out.scores;
  s.bow_overlap = 1.0 - ratio(2 * ov[0].matches, ref.size() + hyp.size());
  s.token_jaccard = jaccard_ids(ref, hyp, ids.vocab.size());
  s.corpus_bleu = 1.0 - bleu_from_stats(out.bleu, false);
  s.corpus_bleu2 = 1.0 - bleu_from_stats(out.bleu, true);
  s.sentence_bleu = s.corpus_bleu2;
  s.google_bleu = gleu_from(ov);
  s.meteor = 1.0 - meteor_from(align(ids), ref.size(), hyp.size());
  s.rouge1 = rouge_from(ov[0]);
  s.rouge2 = rouge_from(ov[1]);
  s.rougeL = rouge_l(ref, hyp);

  const double ref_len = static_cast<double>(ref.size());
  ReferenceMatcher matcher(ref, ids.vocab.size());
  s.wer = static_cast<double>(matcher.distance(hyp)) / ref_len;

  const TerIds shifted = ter_shift(ref, hyp, ids.vocab.size());
  s.ter = static_cast<double>(shifted.shifts + shifted.edits) / ref_len;

  auto join = [&](const Ids& seq) {
    std::u32string out_cps;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out_cps.push_back(U' ');
      out_cps += text::to_code_points(ids.vocab[seq[i]]);
    }
    return out_cps;
  };
  const std::u32string ref_chars = join(ref);
  const std::u32string hyp_chars = join(shifted.shifted);
  s.character = static_cast<double>(edit_distance(ref_chars, hyp_chars)) /
                static_cast<double>(hyp_chars.size());
  return out;
}

}  // namespace paraeval::lexical
