// Exercises the shared library through its C interface only.
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "paraeval/paraeval.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("paraeval_capi_" + std::to_string(std::rand()) + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name, const std::string& content = {}) const {
    const auto p = (path / name).string();
    if (!content.empty()) std::ofstream(p, std::ios::binary) << content;
    return p;
  }
};

std::string take(char* s) {
  std::string out = s ? s : "";
  pe_free_string(s);
  return out;
}

}  // namespace

TEST_CASE("version and errors") {
  CHECK(std::string(pe_version()).size() > 0);
  pe_lexical_scores s;
  CHECK(pe_lexical_pair(nullptr, "x", nullptr, &s) == PE_ERR_USAGE);
  CHECK(std::string(pe_last_error()).size() > 0);
  CHECK(pe_lexical_pair("a", "b", "morphemes", &s) == PE_ERR_USAGE);
}

TEST_CASE("normalize and lexical metrics") {
  char* out = nullptr;
  REQUIRE(pe_normalize("  A\tb  ", &out) == PE_OK);
  CHECK(take(out) == "a b");

  pe_lexical_scores same;
  REQUIRE(pe_lexical_pair("The cat sat on the mat.", "The cat sat on the mat.", nullptr, &same) == PE_OK);
  CHECK(same.bow_overlap == 0.0);
  CHECK(same.corpus_bleu == 0.0);
  CHECK(same.meteor == doctest::Approx(0.5 / 343.0));
  CHECK(same.ter == 0.0);
  CHECK(same.wer == 0.0);
  CHECK(same.character == 0.0);

  pe_lexical_scores apart;
  REQUIRE(pe_lexical_pair("alpha beta gamma", "delta epsilon zeta", "whitespace", &apart) == PE_OK);
  CHECK(apart.bow_overlap == 1.0);
  CHECK(apart.token_jaccard == 1.0);
  CHECK(apart.corpus_bleu == 1.0);
  CHECK(apart.wer == 1.0);
}

TEST_CASE("syntax") {
  pe_syntax_options o;
  pe_syntax_options_init(&o);
  CHECK(o.kermit_dim == 4096);
  CHECK(o.kermit_lambda == 0.4);
  pe_syntactic_scores s;
  REQUIRE(pe_syntactic_pair("(S (NP a) (VP b))", "(S (NP a) (VP b))", &o, &s) == PE_OK);
  CHECK(s.ted_f == 0.0);
  CHECK(s.kermit == doctest::Approx(0.0));
  unsigned long long d = 0;
  REQUIRE(pe_tree_edit_distance("(A (B) (C))", "(A (B) (D))", 0, &d) == PE_OK);
  CHECK(d == 1);
  CHECK(pe_tree_edit_distance("(A (B", "(A)", 0, &d) == PE_ERR_DATA);
  CHECK(std::string(pe_last_error()).find("offset") != std::string::npos);
}

TEST_CASE("corpus, scoring and report") {
  TempDir dir;
  const auto in = dir.file("pairs.jsonl",
                           R"({"id":"1","source":"The cat sat on the mat.","paraphrase":"A cat was sitting on the mat."})"
                           "\n"
                           R"({"id":"2","source":"He left early.","paraphrase":"He departed early."})"
                           "\n"
                           R"({"id":"3","source":"He  left early.","paraphrase":"He departed early."})"
                           "\n");
  pe_load_options lo;
  pe_load_options_init(&lo);
  pe_corpus* corpus = nullptr;
  REQUIRE(pe_corpus_load(in.c_str(), &lo, &corpus) == PE_OK);
  CHECK(pe_corpus_size(corpus) == 2);
  CHECK(pe_corpus_rejected(corpus) == 1);
  pe_pair_view v;
  REQUIRE(pe_corpus_pair(corpus, 1, &v) == PE_OK);
  CHECK(std::string(v.id) == "2");
  CHECK(std::string(v.origin) == "dataset");
  CHECK(pe_corpus_pair(corpus, 5, &v) == PE_ERR_USAGE);

  pe_score_options so;
  pe_score_options_init(&so);
  so.metrics = "lexical,semantic";
  so.system = "sys";
  pe_scorer* scorer = nullptr;
  REQUIRE(pe_scorer_create(&so, &scorer) == PE_OK);
  REQUIRE(pe_scorer_add_provider(scorer, "bow=test_hash:") == PE_OK);
  CHECK(pe_scorer_add_provider(scorer, "nonsense") == PE_ERR_USAGE);
  char* jsonl = nullptr;
  REQUIRE(pe_scorer_run(scorer, corpus, &jsonl) == PE_OK);
  const auto scores = take(jsonl);
  CHECK(scores.find("\"semantic:bow\"") != std::string::npos);

  pe_report_options ro;
  pe_report_options_init(&ro);
  ro.table = "lexical";
  char* table = nullptr;
  REQUIRE(pe_report_render_text(scores.c_str(), &ro, &table) == PE_OK);
  const auto md = take(table);
  CHECK(md.rfind("| Model | BOW Overlap Score (↑)", 0) == 0);
  CHECK(md.find("| sys |") != std::string::npos);

  const auto scores_path = dir.file("scores.jsonl", scores);
  const char* paths[] = {scores_path.c_str()};
  ro.table = "semantic";
  ro.format = "csv";
  REQUIRE(pe_report_render_files(paths, 1, &ro, &table) == PE_OK);
  CHECK(take(table).rfind("Model,bow Score (↑)\nsys,", 0) == 0);
  ro.format = "pdf";
  CHECK(pe_report_render_files(paths, 1, &ro, &table) == PE_ERR_USAGE);
  const char* missing[] = {"/nonexistent/scores.jsonl"};
  ro.format = "md";
  CHECK(pe_report_render_files(missing, 1, &ro, &table) == PE_ERR_IO);

  pe_scorer_free(scorer);
  pe_corpus_free(corpus);
}

TEST_CASE("judge offline") {
  TempDir dir;
  const auto in = dir.file("pairs.jsonl", R"({"id":"a","source":"s1","paraphrase":"p1"})"
                                          "\n"
                                          R"({"id":"b","source":"s2","paraphrase":"p2"})"
                                          "\n");
  const auto fixtures = dir.file(
      "responses.jsonl",
      R"({"pair_id":"a","response":"{\"Semantic Similarity\": 4, \"Lexical Diversity\": 3, \"Syntactic Diversity\": 3, \"Grammatical Correctness\": 5}"})"
      "\n"
      R"({"pair_id":"b","response":"{\"Semantic Similarity\": 2, \"Lexical Diversity\": 3, \"Syntactic Diversity\": 3, \"Grammatical Correctness\": 5}"})"
      "\n");
  pe_load_options lo;
  pe_load_options_init(&lo);
  pe_corpus* corpus = nullptr;
  REQUIRE(pe_corpus_load(in.c_str(), &lo, &corpus) == PE_OK);
  pe_judge_options jo;
  pe_judge_options_init(&jo);
  jo.offline_path = fixtures.c_str();
  pe_judge* judge = nullptr;
  REQUIRE(pe_judge_create(&jo, &judge) == PE_OK);
  char* results = nullptr;
  pe_judge_summary summary;
  REQUIRE(pe_judge_run(judge, corpus, &results, &summary) == PE_OK);
  CHECK(take(results).find("\"pair_id\":\"a\"") != std::string::npos);
  CHECK(summary.semantic == 3.0);
  CHECK(summary.lexical == 3.0);
  CHECK(summary.syntactic == 3.0);
  CHECK(summary.grammatical == 5.0);
  CHECK(summary.success_count == 2);
  pe_judge_free(judge);
  pe_corpus_free(corpus);

  int r[4];
  const char* failure = nullptr;
  CHECK(pe_parse_rating(R"({"Semantic Similarity": 4, "Lexical Diversity": 3, "Syntactic Diversity": 6, "Grammatical Correctness": 5})", r, &failure) ==
        PE_ERR_DATA);
  CHECK(std::string(failure) == "out_of_range");
  char* prompt = nullptr;
  REQUIRE(pe_build_prompt("s", "p", &prompt) == PE_OK);
  CHECK(take(prompt).rfind("Source Text: s\n\nParaphrase: p\n", 0) == 0);
}

TEST_CASE("postprocessing") {
  char* out = nullptr;
  REQUIRE(pe_restore_case("Alice met Bob in Paris.", "alice met bob in paris. they talked.", nullptr, &out) == PE_OK);
  CHECK(take(out) == "Alice met Bob in Paris. They talked.");
  char* items = nullptr;
  REQUIRE(pe_parse_llm_list("1. First one.\n2. Second one.", &items) == PE_OK);
  CHECK(take(items).find("Second one.") != std::string::npos);
}
