#include "paraeval/paraeval.h"

#include <cstdlib>
#include <cstring>
#include <json.hpp>
#include <memory>
#include <new>
#include <string>
#include <variant>

#include "file_io.hpp"
#include "paraeval/corpus.hpp"
#include "paraeval/error.hpp"
#include "paraeval/judge.hpp"
#include "paraeval/lexical.hpp"
#include "paraeval/postproc.hpp"
#include "paraeval/report.hpp"
#include "paraeval/scoring.hpp"
#include "paraeval/syntax.hpp"
#include "paraeval/text.hpp"

using namespace paraeval;

struct pe_corpus {
  Corpus corpus;
  std::vector<Rejection> rejects;
  std::vector<std::string> origins;
};

struct pe_scorer {
  explicit pe_scorer(scoring::ScoreOptions options) : scorer(std::move(options)) {}
  scoring::CorpusScorer scorer;
};

struct pe_judge {
  std::unique_ptr<judge::ChatClient> client;
  judge::RetryPolicy policy;
  std::string system;
};

namespace {

thread_local std::string g_last_error;

pe_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return PE_ERR_USAGE;
    case ErrorKind::Data: return PE_ERR_DATA;
    case ErrorKind::External: return PE_ERR_EXTERNAL;
    case ErrorKind::Io: return PE_ERR_IO;
  }
  return PE_ERR_INTERNAL;
}

template <typename Fn>
pe_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return PE_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const syntax::BracketError& e) {
    g_last_error = e.what();
    return PE_ERR_DATA;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return PE_ERR_DATA;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PE_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PE_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw usage_error(std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

text::Scheme scheme_or_default(const char* name) {
  return name && *name ? text::scheme_from_string(name) : text::Scheme::UnicodeWords;
}

syntax::SyntaxOptions to_syntax(const pe_syntax_options* o) {
  syntax::SyntaxOptions s;
  if (!o) return s;
  s.strip_leaves = o->strip_leaves != 0;
  s.normalize_by_nodes = o->normalize_by_nodes != 0;
  s.node_pairs = o->parent_child_pairs ? syntax::NodePairMode::ParentChild : syntax::NodePairMode::Dominance;
  if (o->kermit_dim == 0) throw usage_error("kermit_dim must be positive");
  if (!(o->kermit_lambda > 0.0 && o->kermit_lambda <= 1.0)) throw usage_error("kermit_lambda must be in (0, 1]");
  s.kermit_dim = o->kermit_dim;
  s.kermit_lambda = o->kermit_lambda;
  return s;
}

std::optional<CasingLexicon> load_lexicon(const char* path) {
  if (!path || !*path) return std::nullopt;
  return CasingLexicon::load_tsv(path);
}

report::Format report_format(const pe_report_options* o) {
  return report::format_from_string(o && o->format ? o->format : "md");
}

std::string render_inputs(const report::Inputs& inputs, const pe_report_options* o) {
  const bool group = o && o->group_by_tag;
  const auto reports = report::collect_reports(inputs, group);
  const std::string table = o && o->table ? o->table : "all";
  const auto format = report_format(o);
  if (table == "all") return report::render_all(report::build_all(reports, group), format);
  return report::render(report::build_matrix(report::table_kind_from_string(table), reports, group), format);
}

}  // namespace

extern "C" {

const char* pe_version(void) { return "0.1.0"; }

const char* pe_last_error(void) { return g_last_error.c_str(); }

void pe_free_string(char* s) { std::free(s); }

pe_status pe_normalize(const char* text, char** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = dup_string(normalize(text));
  });
}

pe_status pe_lexical_pair(const char* source, const char* paraphrase, const char* tokenizer,
                          pe_lexical_scores* out) {
  return guarded([&] {
    require(source, "source");
    require(paraphrase, "paraphrase");
    require(out, "out");
    const auto scheme = scheme_or_default(tokenizer);
    const auto o = text::lexical_tokens(source, scheme);
    const auto p = text::lexical_tokens(paraphrase, scheme);
    if (o.empty() || p.empty()) throw data_error("source and paraphrase must have tokens");
    const auto s = lexical::score_pair(o, p).scores;
    *out = {s.bow_overlap, s.token_jaccard, s.corpus_bleu, s.corpus_bleu2, s.sentence_bleu,
            s.google_bleu, s.meteor,        s.rouge1,      s.rouge2,       s.rougeL,
            s.ter,         s.wer,           s.character};
  });
}

void pe_syntax_options_init(pe_syntax_options* options) {
  if (!options) return;
  const syntax::SyntaxOptions d;
  options->strip_leaves = 0;
  options->normalize_by_nodes = 0;
  options->parent_child_pairs = 0;
  options->kermit_dim = d.kermit_dim;
  options->kermit_lambda = d.kermit_lambda;
}

pe_status pe_syntactic_pair(const char* source_tree, const char* paraphrase_tree,
                            const pe_syntax_options* options, pe_syntactic_scores* out) {
  return guarded([&] {
    require(source_tree, "source_tree");
    require(paraphrase_tree, "paraphrase_tree");
    require(out, "out");
    const auto s = syntax::score_trees(syntax::parse_bracket(source_tree), syntax::parse_bracket(paraphrase_tree),
                                       to_syntax(options));
    *out = {s.ted_f, s.ted_3, s.kermit, s.subtree_k, s.node_pair_k};
  });
}

pe_status pe_tree_edit_distance(const char* a, const char* b, size_t max_depth, unsigned long long* out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    std::optional<std::size_t> depth;
    if (max_depth) depth = max_depth;
    *out = syntax::tree_edit_distance(syntax::parse_bracket(a), syntax::parse_bracket(b), depth);
  });
}

void pe_load_options_init(pe_load_options* options) {
  if (!options) return;
  options->format = "jsonl";
  options->tsv_header = 0;
  options->name = nullptr;
}

pe_status pe_corpus_load(const char* path, const pe_load_options* options, pe_corpus** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    LoadOptions lo;
    if (options) {
      if (options->format) lo.format = corpus_format_from_string(options->format);
      lo.tsv_header = options->tsv_header != 0;
      if (options->name) lo.name = options->name;
    }
    auto result = load_corpus(path, lo);
    auto handle = std::make_unique<pe_corpus>();
    handle->corpus = std::move(result.corpus);
    handle->rejects = std::move(result.duplicates);
    for (const auto& p : handle->corpus) handle->origins.emplace_back(to_string(p.origin));
    *out = handle.release();
  });
}

pe_status pe_corpus_save(const pe_corpus* corpus, const char* path, const char* format) {
  return guarded([&] {
    require(corpus, "corpus");
    require(path, "path");
    save_corpus(corpus->corpus, path, corpus_format_from_string(format ? format : "jsonl"));
  });
}

size_t pe_corpus_size(const pe_corpus* corpus) { return corpus ? corpus->corpus.size() : 0; }

size_t pe_corpus_rejected(const pe_corpus* corpus) { return corpus ? corpus->rejects.size() : 0; }

pe_status pe_corpus_save_rejects(const pe_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus, "corpus");
    require(path, "path");
    write_rejects(path, corpus->rejects);
  });
}

pe_status pe_corpus_pair(const pe_corpus* corpus, size_t index, pe_pair_view* out) {
  return guarded([&] {
    require(corpus, "corpus");
    require(out, "out");
    if (index >= corpus->corpus.size())
      throw usage_error("pair index " + std::to_string(index) + " out of range");
    const auto& p = corpus->corpus[index];
    *out = {p.id.c_str(), p.source.c_str(), p.paraphrase.c_str(), p.corpus_tag.c_str(),
            corpus->origins[index].c_str()};
  });
}

void pe_corpus_free(pe_corpus* corpus) { delete corpus; }

pe_status pe_parse_llm_list(const char* response, char** json_out) {
  return guarded([&] {
    require(response, "response");
    require(json_out, "json_out");
    nlohmann::json doc;
    auto parsed = parse_llm_list(response);
    if (auto* items = std::get_if<std::vector<std::string>>(&parsed)) doc["items"] = *items;
    else doc["rejected"] = std::string(to_string(std::get<ListRejection>(parsed).reason));
    *json_out = dup_string(doc.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
  });
}

pe_status pe_pairs_from_responses(const char* in_path, const char* out_path, const char* mode,
                                  pe_pairs_summary* summary) {
  return guarded([&] {
    require(in_path, "in_path");
    require(out_path, "out_path");
    PairsFromResponsesOptions options;
    if (mode && *mode) options.mode = pair_mode_from_string(mode);
    const auto result = pairs_from_responses(detail::read_file(in_path), options);
    save_corpus(result.corpus, out_path, CorpusFormat::Jsonl);
    write_rejects(rejects_sidecar_path(out_path), result.rejects);
    if (summary) *summary = {result.responses, result.corpus.size(), result.rejects.size()};
  });
}

pe_status pe_restore_case(const char* source, const char* paraphrase, const char* lexicon_path, char** out) {
  return guarded([&] {
    require(source, "source");
    require(paraphrase, "paraphrase");
    require(out, "out");
    const auto lexicon = load_lexicon(lexicon_path);
    *out = dup_string(restore_case(source, paraphrase, lexicon ? &*lexicon : nullptr));
  });
}

pe_status pe_postprocess_file(const char* in_path, const char* out_path, const char* lexicon_path, int as_pairs,
                              pe_postprocess_summary* summary) {
  return guarded([&] {
    require(in_path, "in_path");
    require(out_path, "out_path");
    const auto lexicon = load_lexicon(lexicon_path);
    std::string output;
    const auto r = postprocess_jsonl(detail::read_file(in_path), output, lexicon ? &*lexicon : nullptr,
                                     as_pairs != 0);
    detail::write_file(out_path, output);
    if (summary) *summary = {r.records, r.outputs, r.duplicates_removed};
  });
}

void pe_score_options_init(pe_score_options* options) {
  if (!options) return;
  options->metrics = "lexical";
  options->tokenizer = nullptr;
  options->system = "system";
  options->threads = 1;
  pe_syntax_options_init(&options->syntax);
}

pe_status pe_scorer_create(const pe_score_options* options, pe_scorer** out) {
  return guarded([&] {
    require(options, "options");
    require(out, "out");
    *out = nullptr;
    scoring::ScoreOptions so;
    scoring::set_metric_groups(so, options->metrics ? options->metrics : "lexical");
    so.tokenizer = scheme_or_default(options->tokenizer);
    so.syntax_options = to_syntax(&options->syntax);
    so.threads = options->threads;
    if (options->system) so.system = options->system;
    *out = new pe_scorer(std::move(so));
  });
}

pe_status pe_scorer_add_provider(pe_scorer* scorer, const char* spec) {
  return guarded([&] {
    require(scorer, "scorer");
    require(spec, "spec");
    scorer->scorer.add_provider(make_provider(spec));
  });
}

pe_status pe_scorer_load_trees(pe_scorer* scorer, const char* path) {
  return guarded([&] {
    require(scorer, "scorer");
    require(path, "path");
    scorer->scorer.set_trees(scoring::load_trees(path));
  });
}

pe_status pe_scorer_run(pe_scorer* scorer, const pe_corpus* corpus, char** pairs_jsonl) {
  return guarded([&] {
    require(scorer, "scorer");
    require(corpus, "corpus");
    require(pairs_jsonl, "pairs_jsonl");
    const auto run = scorer->scorer.run(corpus->corpus);
    *pairs_jsonl = dup_string(scoring::pairs_jsonl(run.pairs));
  });
}

void pe_scorer_free(pe_scorer* scorer) { delete scorer; }

void pe_judge_options_init(pe_judge_options* options) {
  if (!options) return;
  static const judge::EndpointConfig defaults;
  options->endpoint = defaults.url.c_str();
  options->model = defaults.model.c_str();
  options->api_key_env = defaults.api_key_env.c_str();
  options->offline_path = nullptr;
  options->retries = judge::RetryPolicy{}.retries;
  options->parallel = judge::RetryPolicy{}.parallelism;
  options->timeout_seconds = defaults.timeout_seconds;
  options->system = "system";
}

pe_status pe_judge_create(const pe_judge_options* options, pe_judge** out) {
  return guarded([&] {
    require(options, "options");
    require(out, "out");
    *out = nullptr;
    if (options->retries < 0) throw usage_error("retries must be >= 0");
    auto handle = std::make_unique<pe_judge>();
    if (options->offline_path && *options->offline_path) {
      handle->client = std::make_unique<judge::OfflineChatClient>(judge::OfflineChatClient::load(options->offline_path));
    } else {
      judge::EndpointConfig config;
      if (options->endpoint) config.url = options->endpoint;
      if (options->model) config.model = options->model;
      if (options->api_key_env) config.api_key_env = options->api_key_env;
      if (options->timeout_seconds > 0) config.timeout_seconds = options->timeout_seconds;
      handle->client = std::make_unique<judge::HttpChatClient>(std::move(config));
    }
    handle->policy.retries = options->retries;
    handle->policy.parallelism = options->parallel ? options->parallel : 1;
    handle->system = options->system ? options->system : "";
    *out = handle.release();
  });
}

pe_status pe_judge_run(pe_judge* judge, const pe_corpus* corpus, char** results_jsonl, pe_judge_summary* summary) {
  return guarded([&] {
    require(judge, "judge");
    require(corpus, "corpus");
    const auto run = judge::judge_corpus(corpus->corpus, *judge->client, judge->policy);
    if (results_jsonl) {
      std::string out;
      for (const auto& r : run.results) out += judge::result_to_json(r, judge->system) + "\n";
      *results_jsonl = dup_string(out);
    }
    if (summary) {
      const auto& a = run.aggregate;
      *summary = {a.means[0], a.means[1], a.means[2], a.means[3], a.success_count, a.total};
    }
  });
}

void pe_judge_free(pe_judge* judge) { delete judge; }

pe_status pe_build_prompt(const char* source, const char* paraphrase, char** out) {
  return guarded([&] {
    require(source, "source");
    require(paraphrase, "paraphrase");
    require(out, "out");
    ParaphrasePair pair;
    pair.source = source;
    pair.paraphrase = paraphrase;
    *out = dup_string(judge::build_prompt(pair));
  });
}

pe_status pe_parse_rating(const char* response, int ratings[4], const char** failure) {
  if (failure) *failure = nullptr;
  return guarded([&] {
    require(response, "response");
    require(ratings, "ratings");
    const auto parsed = judge::parse_rating(response);
    if (!parsed.ok()) {
      if (failure) *failure = judge::to_string(parsed.failure).data();
      throw data_error(std::string(judge::to_string(parsed.failure)) + ": " + parsed.detail);
    }
    const auto& r = *parsed.rating;
    ratings[0] = r.semantic;
    ratings[1] = r.lexical;
    ratings[2] = r.syntactic;
    ratings[3] = r.grammatical;
  });
}

void pe_report_options_init(pe_report_options* options) {
  if (!options) return;
  options->table = "all";
  options->format = "md";
  options->group_by_tag = 0;
}

pe_status pe_report_render_files(const char* const* paths, size_t count, const pe_report_options* options,
                                 char** out) {
  return guarded([&] {
    require(out, "out");
    if (count) require(paths, "paths");
    std::vector<std::string> list;
    for (size_t i = 0; i < count; ++i) {
      require(paths[i], "path");
      list.emplace_back(paths[i]);
    }
    if (list.empty()) throw usage_error("no report inputs");
    *out = dup_string(render_inputs(report::load_inputs(list), options));
  });
}

pe_status pe_report_render_text(const char* content, const pe_report_options* options, char** out) {
  return guarded([&] {
    require(content, "content");
    require(out, "out");
    report::Inputs inputs;
    report::read_inputs(content, "input", inputs);
    *out = dup_string(render_inputs(inputs, options));
  });
}

}  // extern "C"
