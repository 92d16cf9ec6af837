// Acceptance checks. One line per criterion; exit status 1 if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "paraeval/judge.hpp"
#include "paraeval/lexical.hpp"
#include "paraeval/report.hpp"
#include "paraeval/scoring.hpp"
#include "paraeval/semantic.hpp"
#include "paraeval/syntax.hpp"
#include "synth.hpp"

using namespace paraeval;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fixed(double v, int digits = 2) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << std::fixed << v;
  return ss.str();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t worker_count() { return std::max<std::size_t>(4, std::thread::hardware_concurrency()); }

const std::vector<std::string> kVocab = {"a", "b", "c", "d", "e", "f"};

text::TokenSequence seq(const oracle::Tokens& t) { return {t, text::Casing::Lower}; }

scoring::ScoreRun score(const synth::Fixture& f, bool semantic, std::size_t threads) {
  scoring::ScoreOptions o;
  o.syntax = true;
  o.semantic = semantic;
  o.threads = threads;
  scoring::CorpusScorer scorer(o);
  if (semantic) scorer.add_provider(make_provider("bow=test_hash:"));
  scorer.set_trees(f.trees);
  return scorer.run(f.corpus);
}

// ---------------------------------------------------------------------------

Outcome identity_suite() {
  Outcome out;
  const auto t0 = Clock::now();
  const auto base = synth::make(50, 101);
  synth::Fixture f;
  for (const auto& p : base.corpus) {
    f.corpus.add({p.id, p.source, p.source});
    f.trees[p.id] = {base.trees.at(p.id).source, base.trees.at(p.id).source};
  }
  const auto run = score(f, true, 1);
  for (const auto& pair : run.pairs) {
    for (const auto& [id, value] : pair.metrics) {
      if (id == "meteor") continue;
      const double expected = id == "semantic:bow" ? 1.0 : 0.0;
      if (value != expected) out.fail(pair.id + " " + id + " = " + std::to_string(value));
    }
  }
  // METEOR on identity: Fmean is 1 and one chunk covers all m matches.
  for (std::size_t i = 0; i < f.corpus.size(); ++i) {
    const double m = static_cast<double>(text::lexical_tokens(f.corpus[i].source).size());
    const double expected = 1.0 - (1.0 - 0.5 * std::pow(1.0 / m, 3));
    const double got = run.pairs[i].metrics.at("meteor");
    if (std::abs(got - expected) > 1e-12) out.fail(run.pairs[i].id + " meteor = " + std::to_string(got));
  }
  for (const auto& [id, value] : run.reports.at(0).means) {
    if (id != "meteor" && value != (id == "semantic:bow" ? 1.0 : 0.0)) out.fail("mean " + id + " = " + std::to_string(value));
  }
  const double secs = seconds_since(t0);
  if (secs >= 5.0) out.fail("took " + fixed(secs) + " s");
  if (out.pass) out.detail = std::to_string(run.pairs.size()) + " pairs in " + fixed(secs, 3) + " s";
  return out;
}

Outcome disjoint_suite() {
  Outcome out;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  const std::vector<std::string> left = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta"};
  const std::vector<std::string> right = {"one", "two", "three", "four", "five", "six", "seven", "eight"};
  std::vector<lexical::TokenPair> pairs;
  for (int i = 0; i < 50; ++i)
    pairs.push_back({seq(oracle::random_tokens(rng, 1, 12, left)), seq(oracle::random_tokens(rng, 1, 12, right))});
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [o, p] = pairs[i];
    const std::pair<const char*, double> checks[] = {
        {"bow_overlap", lexical::bow_overlap_diversity(o, p)},
        {"token_jaccard", lexical::token_jaccard_diversity(o, p)},
        {"rouge1", lexical::rouge_diversity(o, p, lexical::RougeVariant::R1)},
        {"rouge2", lexical::rouge_diversity(o, p, lexical::RougeVariant::R2)},
        {"rougeL", lexical::rouge_diversity(o, p, lexical::RougeVariant::RL)},
        {"google_bleu", lexical::google_bleu_diversity(o, p)}};
    for (const auto& [name, value] : checks)
      if (value != 1.0) out.fail("pair " + std::to_string(i) + " " + name + " = " + std::to_string(value));
  }
  const double corpus = lexical::bleu_diversity(pairs, lexical::BleuMode::Corpus);
  if (corpus != 1.0) out.fail("corpus_bleu = " + std::to_string(corpus));
  const double secs = seconds_since(t0);
  if (secs >= 5.0) out.fail("took " + fixed(secs) + " s");
  if (out.pass) out.detail = "50 pairs in " + fixed(secs, 3) + " s";
  return out;
}

Outcome edit_rate_oracle() {
  Outcome out;
  std::mt19937_64 rng(303);
  std::size_t shifted = 0;
  for (int i = 0; i < 200; ++i) {
    const auto ref = oracle::random_tokens(rng, 1, 8, kVocab);
    const auto hyp = oracle::random_tokens(rng, 1, 8, kVocab);
    const double w = lexical::wer(seq(ref), seq(hyp));
    const double w_expected = static_cast<double>(oracle::levenshtein(ref, hyp)) / static_cast<double>(ref.size());
    if (w != w_expected) out.fail("wer pair " + std::to_string(i));
    const auto got = lexical::ter_align(seq(ref), seq(hyp));
    const auto expected = oracle::ter(ref, hyp);
    if (got.shifts != expected.shifts || got.edits != expected.edits)
      out.fail("ter pair " + std::to_string(i) + ": " + std::to_string(got.shifts) + "+" + std::to_string(got.edits) +
               " vs " + std::to_string(expected.shifts) + "+" + std::to_string(expected.edits));
    const double t_expected =
        static_cast<double>(expected.shifts + expected.edits) / static_cast<double>(ref.size());
    if (lexical::ter(seq(ref), seq(hyp)) != t_expected) out.fail("ter value pair " + std::to_string(i));
    shifted += expected.shifts > 0;
  }
  if (out.pass) out.detail = "200 pairs exact, " + std::to_string(shifted) + " with shifts";
  return out;
}

Outcome ted_oracle() {
  Outcome out;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(404);
  const std::vector<std::string> labels = {"S", "NP", "VP", "PP"};
  std::vector<syntax::ParseTree> trees;
  for (int i = 0; i < 600; ++i) trees.push_back(oracle::random_tree(rng, 8, labels));
  std::vector<std::uint64_t> d(300);
  for (std::size_t i = 0; i < 300; ++i) {
    const auto& a = trees[2 * i];
    const auto& b = trees[2 * i + 1];
    d[i] = syntax::tree_edit_distance(a, b);
    if (d[i] != oracle::ted_by_mapping(a, b)) out.fail("pair " + std::to_string(i));
    if (d[i] != syntax::tree_edit_distance(b, a)) out.fail("asymmetric pair " + std::to_string(i));
    if (syntax::tree_edit_distance(a, a) != 0) out.fail("identity pair " + std::to_string(i));
    if ((d[i] == 0) != (a == b)) out.fail("zero distance on distinct trees, pair " + std::to_string(i));
  }
  // Triangle inequality over consecutive triples of the suite's trees.
  for (std::size_t i = 0; i + 2 < trees.size(); i += 3) {
    const auto ab = syntax::tree_edit_distance(trees[i], trees[i + 1]);
    const auto bc = syntax::tree_edit_distance(trees[i + 1], trees[i + 2]);
    const auto ac = syntax::tree_edit_distance(trees[i], trees[i + 2]);
    if (ac > ab + bc || ab > ac + bc || bc > ab + ac) out.fail("triangle at " + std::to_string(i));
  }
  const double secs = seconds_since(t0);
  if (secs >= 60.0) out.fail("took " + fixed(secs) + " s");
  if (out.pass) out.detail = "300 pairs in " + fixed(secs, 2) + " s";
  return out;
}

Outcome bleu_cross_check() {
  Outcome out;
  using T = oracle::Tokens;
  const std::vector<std::pair<T, T>> pairs = {
      {{"the", "cat", "sat", "on", "the", "mat"}, {"the", "cat", "sat", "on", "the", "mat"}},
      {{"the", "cat", "sat", "on", "the", "mat"}, {"a", "cat", "was", "sitting", "on", "the", "mat"}},
      {{"he", "left", "early"}, {"he", "departed", "early"}},
      {{"it", "is", "raining"}, {"it", "rains"}},
      {{"a", "b", "c", "d", "e"}, {"e", "d", "c", "b", "a"}},
      {{"one"}, {"one"}},
      {{"one", "two"}, {"two", "one", "two"}},
      {{"the", "quick", "brown", "fox", "jumps"}, {"the", "quick", "fox", "jumps"}},
      {{"we", "will", "meet", "tomorrow", "at", "noon"}, {"tomorrow", "at", "noon", "we", "will", "meet"}},
      {{"x", "y"}, {"z"}},
      {{"prices", "rose", "sharply", "last", "year"}, {"last", "year", "prices", "rose", "sharply"}},
      {{"she", "plays", "the", "violin"}, {"she", "plays", "violin"}},
      {{"a", "a", "a", "a"}, {"a", "a", "a", "a", "a", "a"}},
      {{"the", "the", "the"}, {"the", "cat"}},
      {{"red", "green", "blue", "red", "green", "blue"}, {"red", "green", "blue"}},
      {{"i", "think", "so"}, {"i", "do", "think", "so", "too"}},
      {{"snow", "delayed", "the", "train"}, {"the", "train", "was", "delayed", "by", "snow"}},
      {{"good", "morning", "to", "you", "all"}, {"good", "morning", "all"}},
      {{"p", "q", "r", "s", "t", "u", "v"}, {"p", "q", "r", "s", "t", "u", "w"}},
      {{"hello", "world"}, {"hello", "there", "world"}}};
  std::vector<lexical::TokenPair> tp;
  for (const auto& [o, p] : pairs) tp.push_back({seq(o), seq(p)});

  auto rel = [](double got, double expected) {
    return expected == 0.0 ? std::abs(got) : std::abs(got - expected) / std::abs(expected);
  };
  double worst = 0.0;
  auto check = [&](const std::string& what, double got, double expected) {
    const double r = rel(got, expected);
    worst = std::max(worst, r);
    if (r > 1e-9) out.fail(what + ": " + std::to_string(got) + " vs " + std::to_string(expected));
  };
  check("corpus", 1.0 - lexical::bleu_diversity(tp, lexical::BleuMode::Corpus), oracle::bleu(pairs, false));
  check("corpus smoothed", 1.0 - lexical::bleu_diversity(tp, lexical::BleuMode::CorpusSmoothed), oracle::bleu(pairs, true));
  double mean = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double single = oracle::bleu({pairs[i]}, true);
    mean += single;
    check("sentence " + std::to_string(i), lexical::bleu_from_stats(lexical::bleu_stats(tp[i].original, tp[i].paraphrase), true),
          single);
  }
  check("sentence mean", 1.0 - lexical::bleu_diversity(tp, lexical::BleuMode::Sentence), mean / pairs.size());
  if (out.pass) {
    std::ostringstream ss;
    ss << "max relative error " << worst;
    out.detail = ss.str();
  }
  return out;
}

Outcome kermit_fidelity() {
  Outcome out;
  std::mt19937_64 rng(505);
  const std::vector<std::string> labels = {"S", "NP", "VP"};
  const std::vector<std::string> words = {"a", "b"};
  std::size_t within = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto a = oracle::random_tree(rng, 10, labels, words);
    const auto b = oracle::random_tree(rng, 10, labels, words);
    const double exact = oracle::subtree_kernel_cosine_diversity(a, b, syntax::kKermitLambda);
    const double approx = syntax::kermit_diversity(a, b);
    const double err = std::abs(exact - approx);
    worst = std::max(worst, err);
    within += err <= 0.05;
  }
  if (within < 95) out.fail(std::to_string(within) + "/100 within 0.05");
  else out.detail = std::to_string(within) + "/100 within 0.05, max error " + fixed(worst, 4);
  return out;
}

Outcome determinism() {
  Outcome out;
  const auto f = synth::make(1000, 606);
  const std::size_t n = worker_count();
  const auto a = score(f, true, 1);
  const auto b = score(f, true, n);
  if (scoring::pairs_jsonl(a.pairs) != scoring::pairs_jsonl(b.pairs)) out.fail("pair JSONL differs");
  for (auto fmt : {report::Format::Markdown, report::Format::Csv, report::Format::Json}) {
    if (report::render_all(report::build_all(a.reports), fmt) != report::render_all(report::build_all(b.reports), fmt))
      out.fail("tables differ");
  }
  if (out.pass) out.detail = "1000 pairs, 1 vs " + std::to_string(n) + " threads byte-identical";
  return out;
}

Outcome throughput() {
  Outcome out;
  const auto f = synth::make(100000, 707, 40);
  std::size_t largest = 0;
  for (const auto& [_, t] : f.trees) largest = std::max({largest, t.source.node_count(), t.paraphrase.node_count()});
  const std::size_t threads = worker_count();
  const auto t0 = Clock::now();
  const auto run = score(f, false, threads);
  const double secs = seconds_since(t0);
  if (run.pairs.size() != 100000) out.fail("scored " + std::to_string(run.pairs.size()) + " pairs");
  if (largest > 40) out.fail("tree with " + std::to_string(largest) + " nodes");
  if (secs >= 600.0) out.fail("took " + fixed(secs, 1) + " s");
  const std::string where = std::to_string(std::thread::hardware_concurrency()) + " core(s), " +
                            std::to_string(threads) + " threads";
  out.detail = (out.pass ? "" : out.detail + "; ") + "100000 pairs in " + fixed(secs, 1) + " s on " + where;
  return out;
}

class RecordingClient final : public judge::ChatClient {
 public:
  std::vector<std::pair<std::string, std::string>> prompts;
  std::string complete(const std::string& pair_id, const std::string& prompt, int) override {
    prompts.emplace_back(pair_id, prompt);
    return "{\"Semantic Similarity\": 5, \"Lexical Diversity\": 5, \"Syntactic Diversity\": 5, "
           "\"Grammatical Correctness\": 5}";
  }
};

Outcome judge_offline() {
  Outcome out;
  const std::string data = PARAEVAL_SOURCE_DIR "/tests/data/";
  if (judge::prompt_template() != slurp(PARAEVAL_SOURCE_DIR "/resources/judge_prompt_v1.txt"))
    out.fail("template differs from the stored resource");

  Corpus golden;
  golden.add({"g", "The cat sat on the mat.", "A cat was sitting on the mat."});
  RecordingClient rec;
  judge::RetryPolicy one;
  one.parallelism = 1;
  judge::judge_corpus(golden, rec, one);
  if (rec.prompts.size() != 1 || rec.prompts[0].second != slurp(data + "judge_prompt_golden.txt"))
    out.fail("sent prompt differs from the golden file");

  const fs::path results = fs::temp_directory_path() / ("paraeval_accept_" + std::to_string(::getpid()) + ".jsonl");
  const std::string cmd = std::string(PARAEVAL_CLI) + " judge --in " + data + "judge_pairs.jsonl --offline " + data +
                          "judge_responses.jsonl --out " + results.string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    out.fail("judge command failed");
    return out;
  }
  std::vector<judge::JudgeResult> parsed;
  std::istringstream lines(slurp(results.string()));
  for (std::string line; std::getline(lines, line);)
    if (!line.empty()) parsed.push_back(judge::result_from_json(line));
  fs::remove(results);
  const auto agg = judge::aggregate(parsed);
  const std::array<double, 4> expected{3.5, 3.0, 3.0, 4.75};
  if (agg.means != expected || agg.success_count != 4 || agg.total != 5) {
    std::ostringstream ss;
    ss << "means " << agg.means[0] << "," << agg.means[1] << "," << agg.means[2] << "," << agg.means[3] << " over "
       << agg.success_count << "/" << agg.total;
    out.fail(ss.str());
  }
  if (out.pass) out.detail = "means 3.50/3.00/3.00/4.75 over 4 of 5, prompt bytes match";
  return out;
}

Outcome report_fixture() {
  Outcome out;
  report::MetricReport row;
  row.system = "ChatGPT";
  row.pair_count = 1;
  row.means = {{"semantic:ADA", 0.9560},
               {"semantic:SimCSE", 0.9125},
               {"semantic:PromCSE", 0.9941},
               {"semantic:Roberta", 0.8823},
               {"semantic:Mpnet", 0.8703}};
  const auto matrix = report::build_matrix(report::TableKind::Semantic, {row});
  const auto md = report::render(matrix, report::Format::Markdown);
  if (md != slurp(PARAEVAL_SOURCE_DIR "/tests/data/table1_chatgpt.md")) out.fail("markdown differs:\n" + md);
  if (report::render(report::parse_matrix_json(report::render(matrix, report::Format::Json)), report::Format::Markdown) != md)
    out.fail("json round trip changes the table");
  if (out.pass) out.detail = "95.60% | 91.25% | 99.41% | 88.23% | 87.03%";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"identity suite", identity_suite},
      {"disjoint suite", disjoint_suite},
      {"edit-rate oracle", edit_rate_oracle},
      {"tree edit distance oracle", ted_oracle},
      {"BLEU cross-check", bleu_cross_check},
      {"kermit* fidelity", kermit_fidelity},
      {"determinism", determinism},
      {"throughput", throughput},
      {"judge offline", judge_offline},
      {"report fixture", report_fixture},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    if (!only.empty() && name.find(only) == std::string::npos) continue;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failed ? 1 : 0;
}
