#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "paraeval/error.hpp"
#include "paraeval/lexical.hpp"

using namespace paraeval;
using namespace paraeval::lexical;

namespace {

TokenSequence T(std::vector<std::string> t) { return TokenSequence{std::move(t)}; }

}  // namespace

TEST_CASE("bow overlap") {
  CHECK(bow_overlap_diversity(T({"x", "y"}), T({"x", "y"})) == 0.0);
  CHECK(bow_overlap_diversity(T({"a", "b", "b"}), T({"b", "c"})) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(bow_overlap_diversity(T({"a"}), T({"b"})) == 1.0);
  CHECK_THROWS_AS(bow_overlap_diversity(T({}), T({"b"})), Error);
}

TEST_CASE("token jaccard") {
  CHECK(token_jaccard_diversity(T({"a", "b", "a"}), T({"b", "a"})) == 0.0);
  CHECK(token_jaccard_diversity(T({"a", "b"}), T({"b", "c"})) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(token_jaccard_diversity(T({"a"}), T({"b"})) == 1.0);
  CHECK_THROWS_AS(token_jaccard_diversity(T({"a"}), T({})), Error);
}

TEST_CASE("bleu") {
  const std::vector<TokenPair> same{{T({"a", "b", "c", "d"}), T({"a", "b", "c", "d"})},
                                    {T({"x", "y", "z", "w", "v"}), T({"x", "y", "z", "w", "v"})}};
  CHECK(bleu_diversity(same, BleuMode::Corpus) == 0.0);
  CHECK(bleu_diversity(same, BleuMode::CorpusSmoothed) == 0.0);
  CHECK(bleu_diversity(same, BleuMode::Sentence) == 0.0);

  const std::vector<TokenPair> no4{{T({"a", "b", "c", "d"}), T({"a", "b", "d", "c"})}};
  CHECK(bleu_diversity(no4, BleuMode::Corpus) == 1.0);

  const std::vector<TokenPair> shorter{{T({"the", "cat", "sat", "down"}), T({"the", "cat", "sat"})}};
  const double expected = oracle::bleu({{{"the", "cat", "sat", "down"}, {"the", "cat", "sat"}}}, true);
  CHECK(1.0 - bleu_diversity(shorter, BleuMode::CorpusSmoothed) == doctest::Approx(expected).epsilon(1e-12));
  // 3/3, 2/2, 1/1, 0.1/1, brevity exp(1 - 4/3)
  CHECK(expected == doctest::Approx(std::exp(1.0 - 4.0 / 3.0) * std::pow(0.1, 0.25)).epsilon(1e-12));

  CHECK_THROWS_AS(bleu_diversity(std::vector<TokenPair>{}, BleuMode::Corpus), Error);

  SUBCASE("corpus statistics add") {
    BleuStats s = bleu_stats(same[0].original, same[0].paraphrase);
    s += bleu_stats(shorter[0].original, shorter[0].paraphrase);
    CHECK(s.hyp_len == 7);
    CHECK(s.ref_len == 8);
    CHECK(s.matches[0] == 7);
    CHECK(s.totals[3] == 1);
  }
}

TEST_CASE("google bleu") {
  CHECK(google_bleu_diversity(T({"a", "b", "c", "d"}), T({"a", "b", "c", "d"})) == 0.0);
  CHECK(google_bleu_diversity(T({"a", "b"}), T({"c", "d"})) == 1.0);
  // 1..3-grams of abc and abd: 6 each; shared a, b, ab.
  CHECK(google_bleu_diversity(T({"a", "b", "c"}), T({"a", "b", "d"})) == doctest::Approx(0.5).epsilon(1e-15));
  // ref 6 n-grams, hyp 3; shared a, b, ab: P = 1, R = 0.5
  CHECK(google_bleu_diversity(T({"a", "b", "c"}), T({"a", "b"})) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("meteor") {
  const auto ten = T({"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"});
  CHECK(meteor_diversity(ten, ten) == doctest::Approx(0.0005).epsilon(1e-12));
  CHECK(meteor_diversity(T({"a"}), T({"b"})) == 1.0);
  CHECK(meteor_diversity(T({"a"}), T({"a"})) == doctest::Approx(0.5).epsilon(1e-15));

  SUBCASE("stem stage") {
    const auto al = meteor_align(T({"the", "cats", "running"}), T({"cat", "runs", "the"}));
    CHECK(al.matches == 3);
    CHECK(al.exact_matches == 1);
  }
  SUBCASE("fewest chunks among maximum matchings") {
    // "a b" can align as one chunk even though the first "a" comes earlier.
    const auto al = meteor_align(T({"a", "x", "a", "b"}), T({"a", "b"}));
    CHECK(al.matches == 2);
    CHECK(al.chunks == 1);
  }
  SUBCASE("fragmentation penalty") {
    // m = 2, chunks = 2, P = R = 1
    const double score = meteor_score(T({"a", "b"}), T({"b", "a"}));
    CHECK(score == doctest::Approx(1.0 - 0.5).epsilon(1e-15));
  }
}

TEST_CASE("rouge") {
  const auto s = T({"x", "y", "z"});
  for (auto v : {RougeVariant::R1, RougeVariant::R2, RougeVariant::RL}) CHECK(rouge_diversity(s, s, v) == 0.0);
  CHECK(rouge_diversity(T({"the", "cat"}), T({"the", "dog"}), RougeVariant::R1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rouge_diversity(T({"a", "b", "c"}), T({"a", "c"}), RougeVariant::RL) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(rouge_diversity(T({"a"}), T({"a"}), RougeVariant::R2) == 1.0);
  CHECK(rouge_diversity(T({"a", "b"}), T({"c", "d"}), RougeVariant::R2) == 1.0);
}

TEST_CASE("wer") {
  const auto s = T({"the", "cat", "sat", "on", "the", "mat"});
  CHECK(wer(s, s) == 0.0);
  CHECK(wer(s, T({"the", "cat", "sat"})) == 0.5);
  CHECK(wer(T({"a"}), T({"b", "c"})) == 2.0);
  CHECK_THROWS_AS(wer(T({}), T({"a"})), Error);
  CHECK(wer(T({"a", "b"}), T({})) == 1.0);
}

TEST_CASE("ter") {
  CHECK(ter(T({"a", "b"}), T({"a", "b"})) == 0.0);
  CHECK(ter(T({"a", "b", "c", "d"}), T({"c", "d", "a", "b"})) == 0.25);
  CHECK(ter(T({"a", "b", "c"}), T({"x", "y", "z"})) == 1.0);
  const auto al = ter_align(T({"a", "b", "c", "d"}), T({"c", "d", "a", "b"}));
  CHECK(al.shifts == 1);
  CHECK(al.edits == 0);
  CHECK(al.shifted_hypothesis == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK_THROWS_AS(ter(T({}), T({"a"})), Error);
}

TEST_CASE("character rate") {
  CHECK(character_rate(T({"a", "b"}), T({"a", "b"})) == 0.0);
  CHECK(character_rate(T({"abc"}), T({"abd"})) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(character_rate(T({"a", "b"}), T({"b", "a"})) == 0.0);
  CHECK(character_rate(T({"ab"}), T({"añ"})) == 0.5);
  CHECK_THROWS_AS(character_rate(T({"a"}), T({})), Error);
}

TEST_CASE("porter stemmer") {
  CHECK(porter_stem("caresses") == "caress");
  CHECK(porter_stem("ponies") == "poni");
  CHECK(porter_stem("cats") == "cat");
  CHECK(porter_stem("agreed") == "agre");
  CHECK(porter_stem("plastered") == "plaster");
  CHECK(porter_stem("motoring") == "motor");
  CHECK(porter_stem("sing") == "sing");
  CHECK(porter_stem("hopping") == "hop");
  CHECK(porter_stem("filing") == "file");
  CHECK(porter_stem("happy") == "happi");
  CHECK(porter_stem("relational") == "relat");
  CHECK(porter_stem("conditional") == "condit");
  CHECK(porter_stem("generalization") == "gener");
  CHECK(porter_stem("triplicate") == "triplic");
  CHECK(porter_stem("revival") == "reviv");
  CHECK(porter_stem("adoption") == "adopt");
  CHECK(porter_stem("controlling") == "control");
  CHECK(porter_stem("rolling") == "roll");
  CHECK(porter_stem("probate") == "probat");
  CHECK(porter_stem("is") == "is");
  CHECK(porter_stem("café") == "café");
}

TEST_CASE("score_pair agrees with the individual metrics") {
  const auto o = T({"the", "quick", "brown", "fox", "jumps", "over", "the", "lazy", "dog"});
  const auto p = T({"a", "fast", "brown", "fox", "leaps", "over", "a", "lazy", "dog", "."});
  const auto s = score_pair(o, p).scores;
  CHECK(s.bow_overlap == bow_overlap_diversity(o, p));
  CHECK(s.token_jaccard == token_jaccard_diversity(o, p));
  CHECK(s.google_bleu == google_bleu_diversity(o, p));
  CHECK(s.meteor == meteor_diversity(o, p));
  CHECK(s.rouge1 == rouge_diversity(o, p, RougeVariant::R1));
  CHECK(s.rouge2 == rouge_diversity(o, p, RougeVariant::R2));
  CHECK(s.rougeL == rouge_diversity(o, p, RougeVariant::RL));
  CHECK(s.wer == wer(o, p));
  CHECK(s.ter == ter(o, p));
  CHECK(s.character == character_rate(o, p));
  const std::vector<TokenPair> one{{o, p}};
  CHECK(s.corpus_bleu == bleu_diversity(one, BleuMode::Corpus));
  CHECK(s.corpus_bleu2 == bleu_diversity(one, BleuMode::CorpusSmoothed));
  CHECK(s.sentence_bleu == bleu_diversity(one, BleuMode::Sentence));
}
