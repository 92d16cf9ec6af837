#include "paraeval/scoring.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "file_io.hpp"
#include "paraeval/error.hpp"
#include "paraeval/lexical.hpp"

namespace paraeval::scoring {

using json = nlohmann::json;

TreeTable parse_trees(std::string_view jsonl) {
  TreeTable table;
  detail::for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
    if (detail::is_blank(line)) return;
    const std::string where = "trees line " + std::to_string(line_no);
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) throw data_error(where + ": not a JSON object");
    for (const char* key : {"id", "source_tree", "paraphrase_tree"})
      if (!rec.contains(key) || !rec[key].is_string())
        throw data_error(where + ": missing string \"" + key + "\"");
    TreePair trees;
    for (auto [key, slot] : {std::pair{"source_tree", &trees.source}, std::pair{"paraphrase_tree", &trees.paraphrase}}) {
      try {
        *slot = syntax::parse_bracket(rec[key].get<std::string>());
      } catch (const syntax::BracketError& e) {
        throw data_error(where + ": " + key + ": " + e.what());
      }
    }
    const auto id = rec["id"].get<std::string>();
    if (!table.emplace(id, std::move(trees)).second)
      throw data_error(where + ": duplicate id \"" + id + "\"");
  });
  return table;
}

TreeTable load_trees(const std::string& path) { return parse_trees(detail::read_file(path)); }

void set_metric_groups(ScoreOptions& options, std::string_view list) {
  options.lexical = options.syntax = options.semantic = false;
  std::size_t pos = 0;
  while (pos <= list.size()) {
    std::size_t end = list.find(',', pos);
    if (end == std::string_view::npos) end = list.size();
    std::string_view item = list.substr(pos, end - pos);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (item == "lexical") options.lexical = true;
    else if (item == "syntax" || item == "syntactic") options.syntax = true;
    else if (item == "semantic") options.semantic = true;
    else if (!item.empty())
      throw usage_error("unknown metric group '" + std::string(item) + "' (lexical, syntax, semantic)");
    pos = end + 1;
  }
  if (!options.lexical && !options.syntax && !options.semantic)
    throw usage_error("no metric group selected");
}

CorpusScorer::CorpusScorer(ScoreOptions options) : options_(std::move(options)) {
  if (options_.threads == 0) options_.threads = std::max(1u, std::thread::hardware_concurrency());
}

void CorpusScorer::add_provider(std::unique_ptr<EmbeddingProvider> provider) {
  if (!provider) throw usage_error("null embedding provider");
  for (const auto& p : providers_)
    if (p->name() == provider->name())
      throw usage_error("duplicate provider name '" + provider->name() + "'");
  providers_.push_back(std::move(provider));
}

void CorpusScorer::set_trees(TreeTable trees) { trees_ = std::move(trees); }

report::PairScores CorpusScorer::score_one(const ParaphrasePair& pair) {
  report::PairScores out;
  out.id = pair.id;
  out.system = options_.system;
  out.corpus_tag = pair.corpus_tag;
  auto& m = out.metrics;

  if (options_.lexical) {
    const auto o = text::lexical_tokens(pair.source, options_.tokenizer);
    const auto p = text::lexical_tokens(pair.paraphrase, options_.tokenizer);
    if (o.empty() || p.empty()) throw data_error("pair \"" + pair.id + "\" has no tokens on one side");
    const auto lex = lexical::score_pair(o, p);
    const auto& s = lex.scores;
    m["bow_overlap"] = s.bow_overlap;
    m["token_jaccard"] = s.token_jaccard;
    m["corpus_bleu"] = s.corpus_bleu;
    m["corpus_bleu2"] = s.corpus_bleu2;
    m["sentence_bleu"] = s.sentence_bleu;
    m["google_bleu"] = s.google_bleu;
    m["meteor"] = s.meteor;
    m["rouge1"] = s.rouge1;
    m["rouge2"] = s.rouge2;
    m["rougeL"] = s.rougeL;
    m["ter"] = s.ter;
    m["wer"] = s.wer;
    m["character"] = s.character;
    out.bleu = lex.bleu;
  }

  if (options_.syntax) {
    const auto& t = trees_.at(pair.id);
    const auto s = syntax::score_trees(t.source, t.paraphrase, options_.syntax_options);
    m["ted_f"] = s.ted_f;
    m["ted_3"] = s.ted_3;
    m["kermit"] = s.kermit;
    m["subtree_k"] = s.subtree_k;
    m["node_pair_k"] = s.node_pair_k;
  }

  if (options_.semantic)
    for (const auto& provider : providers_)
      m["semantic:" + provider->name()] = semantic_score(pair, *provider, &cache_);
  return out;
}

ScoreRun CorpusScorer::run(const Corpus& corpus) {
  if (options_.semantic && providers_.empty())
    throw usage_error("semantic metrics need at least one --provider");
  if (options_.syntax) {
    std::vector<std::string> missing;
    for (const auto& p : corpus)
      if (!trees_.count(p.id)) missing.push_back(p.id);
    if (!missing.empty())
      throw data_error("no parse trees for " + std::to_string(missing.size()) + " pair(s), first \"" +
                       missing.front() + "\"");
  }
  if (options_.semantic) {
    std::vector<std::string> sentences;
    sentences.reserve(corpus.size() * 2);
    for (const auto& p : corpus) {
      sentences.push_back(p.source);
      sentences.push_back(p.paraphrase);
    }
    for (const auto& provider : providers_) cache_.prefetch(*provider, sentences);
  }

  ScoreRun run;
  run.pairs.resize(corpus.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::mutex error_mutex;
  std::size_t error_index = corpus.size();
  std::exception_ptr error;
  auto worker = [&] {
    for (std::size_t i = next++; i < corpus.size() && !stop; i = next++) {
      try {
        run.pairs[i] = score_one(corpus[i]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        stop = true;
      }
    }
  };
  const std::size_t width = std::min(options_.threads, std::max<std::size_t>(corpus.size(), 1));
  if (width <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(width);
    for (std::size_t t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  if (!run.pairs.empty()) run.reports = report::aggregate_groups(run.pairs, true);
  return run;
}

std::string pairs_jsonl(const std::vector<report::PairScores>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += report::pair_to_json(p);
    out += '\n';
  }
  return out;
}

}  // namespace paraeval::scoring
