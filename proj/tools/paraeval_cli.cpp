// paraeval command-line front end. Talks to the library only through the C API.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "paraeval/paraeval.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitExternal = 3;

struct Failure {
  int code;
};

int exit_code(pe_status status) {
  switch (status) {
    case PE_OK: return kExitOk;
    case PE_ERR_USAGE: return kExitUsage;
    case PE_ERR_EXTERNAL: return kExitExternal;
    default: return kExitData;
  }
}

void check(pe_status status) {
  if (status == PE_OK) return;
  std::cerr << "paraeval: " << pe_last_error() << "\n";
  throw Failure{exit_code(status)};
}

// Owns a char* returned by the library.
struct Text {
  char* p = nullptr;
  ~Text() { pe_free_string(p); }
  char** out() { return &p; }
  std::string str() const { return p ? p : ""; }
};

struct CorpusHandle {
  pe_corpus* p = nullptr;
  ~CorpusHandle() { pe_corpus_free(p); }
};

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << content)) {
    std::cerr << "paraeval: cannot write '" << path << "'\n";
    throw Failure{kExitData};
  }
}

void load(CorpusHandle& corpus, const std::string& path, const std::string& format, bool header) {
  pe_load_options lo;
  pe_load_options_init(&lo);
  lo.format = format.c_str();
  lo.tsv_header = header;
  check(pe_corpus_load(path.c_str(), &lo, &corpus.p));
}

std::string rejects_path(const std::string& out) {
  const auto slash = out.find_last_of('/');
  const auto dot = out.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return out + ".rejects.jsonl";
  return out.substr(0, dot) + ".rejects.jsonl";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Paraphrase evaluation toolkit"};
  app.set_config("--config", "", "TOML file with option defaults; flags win");
  app.set_version_flag("--version", std::string(pe_version()));
  app.require_subcommand(1);

  // ingest
  std::string in, out, format = "jsonl", name;
  bool header = false;
  auto* ingest = app.add_subcommand("ingest", "Load a TSV/JSONL pair file, drop duplicates, write canonical JSONL");
  ingest->add_option("--in", in, "Input pair file")->required();
  ingest->add_option("--format", format, "Input format")->check(CLI::IsMember({"tsv", "jsonl"}));
  ingest->add_flag("--header", header, "TSV has a header row");
  ingest->add_option("--out", out, "Output corpus (JSONL)")->required();
  ingest->add_option("--name", name, "Corpus name");

  // pairs
  std::string mode = "source_to_each";
  auto* pairs = app.add_subcommand("pairs", "Build pairs from numbered-list LLM responses");
  pairs->add_option("--in", in, "Responses JSONL {source, response}")->required();
  pairs->add_option("--out", out, "Output corpus (JSONL)")->required();
  pairs->add_option("--mode", mode, "Pairing mode")->check(CLI::IsMember({"source_to_each", "all_unique"}));

  // postprocess
  std::string lexicon;
  bool as_pairs = false;
  auto* post = app.add_subcommand("postprocess", "Restore casing and remove duplicate outputs");
  post->add_option("--in", in, "JSONL {source, outputs}")->required();
  post->add_option("--out", out, "Output JSONL")->required();
  post->add_option("--lexicon", lexicon, "Casing lexicon TSV");
  post->add_flag("--as-pairs", as_pairs, "Write one pair per output");

  // score
  std::string metrics = "lexical", trees, tables, system = "system", tokenizer = "unicode_words",
              node_pairs = "dominance", table_format = "md", group_by;
  std::vector<std::string> providers;
  std::size_t threads = 1, kermit_dim = 0;
  double kermit_lambda = 0;
  bool strip_leaves = false, by_nodes = false;
  auto* score = app.add_subcommand("score", "Score every pair of a corpus");
  score->add_option("--in", in, "Corpus file")->required();
  score->add_option("--format", format, "Corpus format")->check(CLI::IsMember({"tsv", "jsonl"}));
  score->add_flag("--header", header, "TSV has a header row");
  score->add_option("--metrics", metrics, "Comma list of lexical, syntax, semantic");
  score->add_option("--trees", trees, "Parse trees JSONL {id, source_tree, paraphrase_tree}");
  score->add_option("--provider", providers, "Embedding provider name=kind:location[;key=value]");
  score->add_option("--out", out, "Pair-level scores JSONL")->required();
  score->add_option("--tables", tables, "Also write summary tables here");
  score->add_option("--table-format", table_format, "Table format")->check(CLI::IsMember({"md", "csv", "json"}));
  score->add_option("--group-by", group_by, "Split rows by corpus tag")->check(CLI::IsMember({"corpus_tag"}));
  score->add_option("--threads", threads, "Worker threads (0 = all cores)");
  score->add_option("--system", system, "System name for the rows");
  score->add_option("--tokenizer", tokenizer, "Tokenizer")->check(CLI::IsMember({"unicode_words", "whitespace"}));
  score->add_flag("--strip-leaves", strip_leaves, "Drop leaf tokens before tree metrics");
  score->add_flag("--normalize-by-nodes", by_nodes, "Divide tree edit distances by total node count");
  score->add_option("--node-pairs", node_pairs, "Node-pair features")->check(CLI::IsMember({"dominance", "parent-child"}));
  score->add_option("--kermit-dim", kermit_dim, "Distributed tree dimension");
  score->add_option("--kermit-lambda", kermit_lambda, "Distributed tree decay");

  // judge
  std::string endpoint, model, api_key_env, offline;
  int retries = 2, timeout = 120;
  std::size_t parallel = 4;
  auto* judge = app.add_subcommand("judge", "Rate pairs with a chat-completion model");
  judge->add_option("--in", in, "Corpus file")->required();
  judge->add_option("--format", format, "Corpus format")->check(CLI::IsMember({"tsv", "jsonl"}));
  judge->add_flag("--header", header, "TSV has a header row");
  judge->add_option("--endpoint", endpoint, "Chat completions URL");
  judge->add_option("--model", model, "Model name");
  judge->add_option("--api-key-env", api_key_env, "Environment variable holding the API key");
  judge->add_option("--offline", offline, "Canned responses JSONL {pair_id, response}");
  judge->add_option("--retries", retries, "Extra attempts per pair")->check(CLI::NonNegativeNumber);
  judge->add_option("--parallel", parallel, "Concurrent requests")->check(CLI::PositiveNumber);
  judge->add_option("--timeout", timeout, "Request timeout in seconds")->check(CLI::PositiveNumber);
  judge->add_option("--out", out, "Results JSONL (stdout if omitted)");
  judge->add_option("--system", system, "System name for the results");

  // report
  std::vector<std::string> inputs;
  std::string table = "all";
  auto* rep = app.add_subcommand("report", "Render tables from score and judge files");
  rep->add_option("--in", inputs, "Score/judge JSONL or JSON report files")->required();
  rep->add_option("--table", table, "Table")->check(
      CLI::IsMember({"semantic", "syntactic", "lexical", "likert", "all"}));
  rep->add_option("--format", table_format, "Output format")->check(CLI::IsMember({"md", "csv", "json"}));
  rep->add_option("--group-by", group_by, "Split rows by corpus tag")->check(CLI::IsMember({"corpus_tag"}));
  rep->add_option("--out", out, "Output file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      CorpusHandle corpus;
      pe_load_options lo;
      pe_load_options_init(&lo);
      lo.format = format.c_str();
      lo.tsv_header = header;
      lo.name = name.empty() ? nullptr : name.c_str();
      check(pe_corpus_load(in.c_str(), &lo, &corpus.p));
      check(pe_corpus_save(corpus.p, out.c_str(), "jsonl"));
      check(pe_corpus_save_rejects(corpus.p, rejects_path(out).c_str()));
      std::cerr << "ingested " << pe_corpus_size(corpus.p) << " pairs, dropped "
                << pe_corpus_rejected(corpus.p) << " duplicates\n";
    } else if (pairs->parsed()) {
      pe_pairs_summary s{};
      check(pe_pairs_from_responses(in.c_str(), out.c_str(), mode.c_str(), &s));
      std::cerr << "built " << s.pairs << " pairs from " << s.responses << " responses, " << s.rejected
                << " rejects\n";
    } else if (post->parsed()) {
      pe_postprocess_summary s{};
      check(pe_postprocess_file(in.c_str(), out.c_str(), lexicon.empty() ? nullptr : lexicon.c_str(), as_pairs,
                                &s));
      std::cerr << "postprocessed " << s.records << " records, " << s.outputs << " outputs kept, "
                << s.duplicates_removed << " duplicates removed\n";
    } else if (score->parsed()) {
      CorpusHandle corpus;
      load(corpus, in, format, header);
      pe_score_options so;
      pe_score_options_init(&so);
      so.metrics = metrics.c_str();
      so.tokenizer = tokenizer.c_str();
      so.system = system.c_str();
      so.threads = threads;
      so.syntax.strip_leaves = strip_leaves;
      so.syntax.normalize_by_nodes = by_nodes;
      so.syntax.parent_child_pairs = node_pairs == "parent-child";
      if (kermit_dim) so.syntax.kermit_dim = kermit_dim;
      if (score->count("--kermit-lambda")) so.syntax.kermit_lambda = kermit_lambda;
      pe_scorer* raw = nullptr;
      check(pe_scorer_create(&so, &raw));
      std::unique_ptr<pe_scorer, void (*)(pe_scorer*)> scorer(raw, pe_scorer_free);
      for (const auto& spec : providers) check(pe_scorer_add_provider(scorer.get(), spec.c_str()));
      if (!trees.empty()) check(pe_scorer_load_trees(scorer.get(), trees.c_str()));
      Text jsonl;
      check(pe_scorer_run(scorer.get(), corpus.p, jsonl.out()));
      write_output(out, jsonl.str());
      if (!tables.empty()) {
        pe_report_options ro;
        pe_report_options_init(&ro);
        ro.format = table_format.c_str();
        ro.group_by_tag = !group_by.empty();
        Text rendered;
        check(pe_report_render_text(jsonl.str().c_str(), &ro, rendered.out()));
        write_output(tables, rendered.str());
      }
      std::cerr << "scored " << pe_corpus_size(corpus.p) << " pairs\n";
    } else if (judge->parsed()) {
      CorpusHandle corpus;
      load(corpus, in, format, header);
      pe_judge_options jo;
      pe_judge_options_init(&jo);
      if (!endpoint.empty()) jo.endpoint = endpoint.c_str();
      if (!model.empty()) jo.model = model.c_str();
      if (!api_key_env.empty()) jo.api_key_env = api_key_env.c_str();
      if (!offline.empty()) jo.offline_path = offline.c_str();
      jo.retries = retries;
      jo.parallel = parallel;
      jo.timeout_seconds = timeout;
      jo.system = system.c_str();
      pe_judge* raw = nullptr;
      check(pe_judge_create(&jo, &raw));
      std::unique_ptr<pe_judge, void (*)(pe_judge*)> client(raw, pe_judge_free);
      Text results;
      pe_judge_summary s{};
      check(pe_judge_run(client.get(), corpus.p, results.out(), &s));
      write_output(out, results.str());
      char line[256];
      std::snprintf(line, sizeof line,
                    "rated %zu/%zu pairs: semantic %.2f, lexical %.2f, syntactic %.2f, grammatical %.2f\n",
                    s.success_count, s.total, s.semantic, s.lexical, s.syntactic, s.grammatical);
      std::cerr << line;
    } else if (rep->parsed()) {
      std::vector<const char*> paths;
      for (const auto& p : inputs) paths.push_back(p.c_str());
      pe_report_options ro;
      pe_report_options_init(&ro);
      ro.table = table.c_str();
      ro.format = table_format.c_str();
      ro.group_by_tag = !group_by.empty();
      Text rendered;
      check(pe_report_render_files(paths.data(), paths.size(), &ro, rendered.out()));
      write_output(out, rendered.str());
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitOk;
}
