#include <doctest.h>

#include <algorithm>
#include <variant>

#include "paraeval/corpus.hpp"
#include "paraeval/error.hpp"

using namespace paraeval;

namespace {

LoadResult parse_tsv(std::string_view content) {
  LoadOptions o;
  o.format = CorpusFormat::Tsv;
  return parse_corpus(content, o);
}

LoadResult parse_jsonl(std::string_view content) { return parse_corpus(content, {}); }

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("normalize") {
  CHECK(normalize("The  Cat ") == "the cat");
  CHECK(normalize("Café") == "café");
  CHECK(normalize("") == "");
  CHECK(normalize("Café") == "café");  // decomposed input composes
  CHECK(normalize("\tA  b\n") == "a b");
  CHECK(normalize("İSTANBUL") == normalize(normalize("İSTANBUL")));
}

TEST_CASE("load_corpus drops duplicates and keeps file order") {
  auto r = parse_tsv("A cat\tA feline\nA cat\tA feline\n");
  CHECK(r.corpus.size() == 1);
  CHECK(r.dropped == 1);
  REQUIRE(r.duplicates.size() == 1);
  CHECK(r.duplicates[0].line == 2);

  r = parse_tsv("a\tb\nc\td\te-tag\nf\tg\n");
  REQUIRE(r.corpus.size() == 3);
  CHECK(r.corpus[0].source == "a");
  CHECK(r.corpus[1].corpus_tag == "e-tag");
  CHECK(r.corpus[2].paraphrase == "g");
  CHECK(r.corpus[2].id == "3");

  SUBCASE("duplicates judged on normalized text") {
    r = parse_tsv("The Cat\tA  dog\nthe cat \ta dog\n");
    CHECK(r.corpus.size() == 1);
  }
  SUBCASE("empty file") {
    CHECK(parse_tsv("").corpus.empty());
    CHECK(parse_jsonl("\n\n").corpus.empty());
  }
  SUBCASE("header row") {
    LoadOptions o;
    o.format = CorpusFormat::Tsv;
    o.tsv_header = true;
    CHECK(parse_corpus("source\tparaphrase\nx\ty\n", o).corpus.size() == 1);
  }
}

TEST_CASE("malformed rows name their line") {
  CHECK(error_of([] { parse_jsonl("{\"source\":\"a\",\"paraphrase\":\"b\"}\n{\"source\":\"c\"}\n"); })
            .rfind("line 2:", 0) == 0);
  CHECK(error_of([] { parse_tsv("a\tb\nonly-one-column\n"); }).rfind("line 2:", 0) == 0);
  CHECK(error_of([] { parse_jsonl("not json\n"); }).rfind("line 1:", 0) == 0);
  CHECK(error_of([] { parse_tsv("a\t  \n"); }).rfind("line 1:", 0) == 0);
}

TEST_CASE("jsonl round trip is a fixed point") {
  const std::string src =
      "{\"id\":\"x1\",\"source\":\"Tab\\there\",\"paraphrase\":\"B \\\"q\\\"\",\"corpus_tag\":\"mrpc\","
      "\"origin\":\"generated\"}\n"
      "{\"source\":\"Ünïcödé\",\"paraphrase\":\"ok\"}\n";
  const auto first = parse_jsonl(src).corpus;
  const std::string once = serialize_corpus(first, CorpusFormat::Jsonl);
  const auto second = parse_jsonl(once).corpus;
  CHECK(second.pairs() == first.pairs());
  CHECK(serialize_corpus(second, CorpusFormat::Jsonl) == once);
  CHECK(first[0].origin == Origin::Generated);
  CHECK(first[1].id == "2");
}

TEST_CASE("rejects sidecar path") {
  CHECK(rejects_sidecar_path("out/corpus.jsonl") == "out/corpus.rejects.jsonl");
  CHECK(rejects_sidecar_path("a.b/corpus") == "a.b/corpus.rejects.jsonl");
}

TEST_CASE("parse_llm_list") {
  auto items = std::get<std::vector<std::string>>(parse_llm_list("1. foo\n2. bar"));
  CHECK(items == std::vector<std::string>{"foo", "bar"});
  items = std::get<std::vector<std::string>>(parse_llm_list("Here you go:\n 1) one \n2.\n3. three\n"));
  CHECK(items == std::vector<std::string>{"one", "three"});
  CHECK(std::get<ListRejection>(parse_llm_list("Error")).reason == RejectReason::NonEnglish);
  CHECK(std::get<ListRejection>(parse_llm_list("  error \n")).reason == RejectReason::NonEnglish);
  CHECK(std::get<ListRejection>(parse_llm_list("no list here")).reason == RejectReason::Unparseable);
}

TEST_CASE("paraphrase pools and pairing") {
  const ParaphrasePool pool("s", {"a", "b"});
  auto pairs = build_pairs(pool, PairMode::SourceToEach);
  REQUIRE(pairs.size() == 2);
  CHECK((pairs[0].source == "s" && pairs[0].paraphrase == "a"));
  CHECK((pairs[1].source == "s" && pairs[1].paraphrase == "b"));
  CHECK(pairs[0].origin == Origin::Generated);

  pairs = build_pairs(pool, PairMode::AllUnique);
  REQUIRE(pairs.size() == 3);
  CHECK((pairs[2].source == "a" && pairs[2].paraphrase == "b"));

  CHECK_THROWS_AS(ParaphrasePool("s", {"a", "A "}), Error);
  CHECK_THROWS_AS(ParaphrasePool("s", {"S"}), Error);
  CHECK(build_pairs(ParaphrasePool("s", {}), PairMode::AllUnique).empty());

  std::vector<ParaphrasePool::Dropped> dropped;
  const auto f = ParaphrasePool::filtered("Src", {"x", "X", "src", "y"}, &dropped);
  CHECK(f.paraphrases() == std::vector<std::string>{"x", "y"});
  REQUIRE(dropped.size() == 2);
  CHECK(dropped[0].reason == "duplicate");
  CHECK(dropped[1].reason == "equals_source");
}

TEST_CASE("pairs_from_responses") {
  const std::string input =
      "{\"source\":\"It is cold.\",\"response\":\"1. It's chilly.\\n2. it's CHILLY.\\n3. The weather is cold.\"}\n"
      "{\"source\":\"Bonjour\",\"response\":\"Error\"}\n"
      "{\"source\":\"Hi\",\"response\":\"hello\"}\n";
  PairsFromResponsesOptions o;
  auto r = pairs_from_responses(input, o);
  CHECK(r.responses == 3);
  CHECK(r.corpus.size() == 2);
  REQUIRE(r.rejects.size() == 3);
  CHECK(r.rejects[0].reason == "duplicate");
  CHECK(r.rejects[1].reason == "non_english");
  CHECK(r.rejects[2].reason == "unparseable");

  o.filter = [](const ParaphrasePair& p) -> std::optional<std::string> {
    if (p.paraphrase.find("weather") != std::string::npos) return "moderation";
    return std::nullopt;
  };
  r = pairs_from_responses(input, o);
  CHECK(r.corpus.size() == 1);
  CHECK(std::count_if(r.rejects.begin(), r.rejects.end(), [](const Rejection& x) { return x.reason == "filtered" && x.detail == "moderation"; }) == 1);
}
