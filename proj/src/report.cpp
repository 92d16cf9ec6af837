#include "paraeval/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <json.hpp>
#include <utility>

#include "file_io.hpp"
#include "paraeval/error.hpp"
#include "paraeval/judge.hpp"

namespace paraeval::report {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kSemanticPrefix = "semantic:";

constexpr std::array<std::string_view, 13> kLexicalIds = {
    "bow_overlap", "corpus_bleu", "corpus_bleu2", "meteor",    "rouge1",    "rouge2",        "rougeL",
    "token_jaccard", "ter",       "wer",          "character", "google_bleu", "sentence_bleu"};
constexpr std::array<std::string_view, 5> kSyntaxIds = {"ted_f", "ted_3", "kermit", "subtree_k",
                                                        "node_pair_k"};
constexpr std::array<std::string_view, 2> kCorpusLevelIds = {"corpus_bleu", "corpus_bleu2"};

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& ids, std::string_view id) {
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::string_view style_name(Style style) {
  switch (style) {
    case Style::Percent: return "percent";
    case Style::Rate: return "rate";
    case Style::Plain: return "plain";
  }
  return "plain";
}

Style style_from_string(std::string_view name) {
  for (Style s : {Style::Percent, Style::Rate, Style::Plain})
    if (style_name(s) == name) return s;
  throw data_error("unknown column style '" + std::string(name) + "'");
}

std::string label(const MetricReport& row, bool show_tag) {
  if (!show_tag || row.corpus_tag.empty()) return row.system;
  return row.system + " [" + row.corpus_tag + "]";
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

bool is_registered_metric(std::string_view id) {
  if (starts_with(id, kSemanticPrefix)) return id.size() > kSemanticPrefix.size();
  return contains(kLexicalIds, id) || contains(kSyntaxIds, id) || contains(judge::kRatingIds, id);
}

// ---------------------------------------------------------------------------
// Pair records

std::string pair_to_json(const PairScores& pair) {
  ojson rec;
  rec["id"] = pair.id;
  rec["system"] = pair.system;
  rec["corpus_tag"] = pair.corpus_tag;
  ojson metrics = ojson::object();
  for (const auto& [k, v] : pair.metrics) metrics[k] = v;
  rec["metrics"] = std::move(metrics);
  if (pair.bleu) {
    const auto& b = *pair.bleu;
    rec["bleu_stats"] = {{"matches", b.matches},
                         {"totals", b.totals},
                         {"hyp_len", b.hyp_len},
                         {"ref_len", b.ref_len}};
  }
  return rec.dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

PairScores pair_from_object(const json& rec, const std::string& where) {
  PairScores p;
  p.id = rec.value("id", "");
  p.system = rec.value("system", "");
  p.corpus_tag = rec.value("corpus_tag", "");
  const json& metrics = rec.at("metrics");
  if (!metrics.is_object()) throw data_error(where + ": \"metrics\" must be an object");
  for (const auto& [k, v] : metrics.items()) {
    if (!is_registered_metric(k)) throw data_error(where + ": unknown metric \"" + k + "\"");
    if (!v.is_number()) throw data_error(where + ": metric \"" + k + "\" is not a number");
    p.metrics[k] = v.get<double>();
  }
  if (auto it = rec.find("bleu_stats"); it != rec.end() && !it->is_null()) {
    lexical::BleuStats b;
    const auto matches = it->at("matches").get<std::vector<std::uint64_t>>();
    const auto totals = it->at("totals").get<std::vector<std::uint64_t>>();
    if (matches.size() != b.matches.size() || totals.size() != b.totals.size())
      throw data_error(where + ": bleu_stats needs " + std::to_string(b.matches.size()) +
                       " matches and totals");
    std::copy(matches.begin(), matches.end(), b.matches.begin());
    std::copy(totals.begin(), totals.end(), b.totals.begin());
    b.hyp_len = it->at("hyp_len").get<std::uint64_t>();
    b.ref_len = it->at("ref_len").get<std::uint64_t>();
    p.bleu = b;
  }
  return p;
}

}  // namespace

PairScores pair_from_json(std::string_view line) {
  const json rec = json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object() || !rec.contains("metrics"))
    throw data_error("score record is not a JSON object with \"metrics\"");
  try {
    return pair_from_object(rec, "score record");
  } catch (const json::exception& e) {
    throw data_error(std::string("score record: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Aggregation

MetricReport aggregate(const std::vector<PairScores>& pairs) {
  if (pairs.empty()) throw data_error("cannot aggregate an empty set of scored pairs");
  MetricReport report;
  report.system = pairs.front().system;
  report.corpus_tag = pairs.front().corpus_tag;
  report.pair_count = pairs.size();

  std::map<std::string, std::pair<double, std::size_t>> sums;
  for (const auto& p : pairs)
    for (const auto& [k, v] : p.metrics) {
      auto& [sum, n] = sums[k];
      sum += v;
      ++n;
    }
  for (const auto& [k, acc] : sums) {
    if (contains(kCorpusLevelIds, k)) continue;
    if (acc.second != pairs.size())
      throw data_error("metric \"" + k + "\" is present on " + std::to_string(acc.second) + " of " +
                       std::to_string(pairs.size()) + " pairs");
    report.means[k] = acc.first / static_cast<double>(pairs.size());
  }

  const bool wants_bleu = std::any_of(kCorpusLevelIds.begin(), kCorpusLevelIds.end(),
                                      [&](std::string_view id) { return sums.count(std::string(id)); });
  if (wants_bleu) {
    lexical::BleuStats total;
    for (const auto& p : pairs) {
      if (!p.bleu) throw data_error("pair \"" + p.id + "\" has corpus BLEU but no bleu_stats");
      total += *p.bleu;
    }
    report.means["corpus_bleu"] = 1.0 - lexical::bleu_from_stats(total, false);
    report.means["corpus_bleu2"] = 1.0 - lexical::bleu_from_stats(total, true);
    report.corpus_level = {"corpus_bleu", "corpus_bleu2"};
  }
  return report;
}

std::vector<MetricReport> aggregate_groups(const std::vector<PairScores>& pairs, bool group_by_tag) {
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<PairScores>> groups;
  std::map<std::string, std::string> first_tag;
  for (const auto& p : pairs) {
    if (!group_by_tag) {
      auto [it, fresh] = first_tag.emplace(p.system, p.corpus_tag);
      if (!fresh && it->second != p.corpus_tag)
        throw usage_error("ambiguous grouping: system \"" + p.system + "\" spans corpus tags \"" +
                          it->second + "\" and \"" + p.corpus_tag + "\"; use --group-by corpus_tag");
    }
    const auto key = std::make_pair(p.system, p.corpus_tag);
    auto& bucket = groups[key];
    if (bucket.empty()) order.push_back(key);
    bucket.push_back(p);
  }
  std::vector<MetricReport> out;
  out.reserve(order.size());
  for (const auto& key : order) out.push_back(aggregate(groups[key]));
  return out;
}

// ---------------------------------------------------------------------------
// Schemas

TableKind table_kind_from_string(std::string_view name) {
  for (TableKind k : {TableKind::Semantic, TableKind::Syntactic, TableKind::Lexical, TableKind::Likert})
    if (to_string(k) == name) return k;
  throw usage_error("unknown table '" + std::string(name) + "' (semantic, syntactic, lexical, likert)");
}

std::string_view to_string(TableKind kind) {
  switch (kind) {
    case TableKind::Semantic: return "semantic";
    case TableKind::Syntactic: return "syntactic";
    case TableKind::Lexical: return "lexical";
    case TableKind::Likert: return "likert";
  }
  return "unknown";
}

Format format_from_string(std::string_view name) {
  if (name == "md" || name == "markdown") return Format::Markdown;
  if (name == "csv") return Format::Csv;
  if (name == "json") return Format::Json;
  throw usage_error("unknown report format '" + std::string(name) + "' (md, csv, json)");
}

std::vector<Column> table_columns(TableKind kind, const std::vector<std::string>& providers) {
  switch (kind) {
    case TableKind::Semantic: {
      std::vector<Column> cols;
      for (const auto& p : providers)
        cols.push_back({std::string(kSemanticPrefix) + p, p + " Score (↑)", Style::Percent});
      return cols;
    }
    case TableKind::Syntactic:
      return {{"ted_f", "Ted-F (↑)", Style::Plain},
              {"ted_3", "Ted-3 (↑)", Style::Plain},
              {"kermit", "Kermit* Score (↑)", Style::Percent},
              {"subtree_k", "Subtree K Score (↑)", Style::Percent},
              {"node_pair_k", "Node Pair K Score (↑)", Style::Percent}};
    case TableKind::Lexical:
      return {{"bow_overlap", "BOW Overlap Score (↑)", Style::Percent},
              {"corpus_bleu", "Corpus BLEU Score (↑)", Style::Percent},
              {"corpus_bleu2", "Corpus BLEU2 Score (↑)", Style::Percent},
              {"meteor", "METEOR (exact+stem) Score (↑)", Style::Percent},
              {"rouge1", "ROUGE 1 Score (↑)", Style::Percent},
              {"rouge2", "ROUGE 2 Score (↑)", Style::Percent},
              {"rougeL", "ROUGE L Score (↑)", Style::Percent},
              {"token_jaccard", "Token ∩/∪ Score (↑)", Style::Percent},
              {"ter", "TER Score (↑)", Style::Rate},
              {"wer", "WER Score (↑)", Style::Rate},
              {"character", "CharacTER Score (↑)", Style::Rate},
              {"google_bleu", "Google BLEU Score (↑)", Style::Percent},
              {"sentence_bleu", "Sentence BLEU Score (↑)", Style::Percent}};
    case TableKind::Likert:
      return {{"semantic_similarity", "Semantic Similarity (↑)", Style::Plain},
              {"lexical_diversity", "Lexical Diversity (↑)", Style::Plain},
              {"syntactic_diversity", "Syntactic Diversity (↑)", Style::Plain},
              {"grammatical_correctness", "Grammatical Correctness (↑)", Style::Plain}};
  }
  return {};
}

ScoreMatrix build_matrix(TableKind kind, const std::vector<MetricReport>& reports, bool show_corpus_tag) {
  ScoreMatrix m;
  m.kind = kind;
  m.show_corpus_tag = show_corpus_tag;
  if (kind == TableKind::Semantic) {
    std::vector<std::string> providers;
    for (const auto& r : reports)
      for (const auto& [k, _] : r.means)
        if (starts_with(k, kSemanticPrefix)) {
          std::string name = k.substr(kSemanticPrefix.size());
          if (std::find(providers.begin(), providers.end(), name) == providers.end())
            providers.push_back(std::move(name));
        }
    // Known providers take their customary column slots; others follow.
    auto rank = [](const std::string& name) {
      static constexpr std::array<std::string_view, 5> kKnown = {"ada", "simcse", "promcse", "roberta", "mpnet"};
      std::string lower = name;
      for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      return static_cast<std::size_t>(std::find(kKnown.begin(), kKnown.end(), lower) - kKnown.begin());
    };
    std::stable_sort(providers.begin(), providers.end(),
                     [&](const std::string& a, const std::string& b) { return rank(a) < rank(b); });
    m.columns = table_columns(kind, providers);
  } else {
    m.columns = table_columns(kind);
  }
  for (const auto& r : reports) {
    std::size_t present = 0;
    for (const auto& c : m.columns) present += r.means.count(c.metric_id);
    if (present == 0) continue;
    if (present != m.columns.size()) {
      for (const auto& c : m.columns)
        if (!r.means.count(c.metric_id))
          throw data_error("row \"" + label(r, true) + "\" lacks metric \"" + c.metric_id + "\" for the " +
                           std::string(to_string(kind)) + " table");
    }
    m.rows.push_back(r);
  }
  return m;
}

std::vector<ScoreMatrix> build_all(const std::vector<MetricReport>& reports, bool show_corpus_tag) {
  std::vector<ScoreMatrix> out;
  for (TableKind k : {TableKind::Semantic, TableKind::Syntactic, TableKind::Lexical, TableKind::Likert}) {
    ScoreMatrix m = build_matrix(k, reports, show_corpus_tag);
    if (!m.rows.empty()) out.push_back(std::move(m));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rendering

std::string format_fixed2(double value, int shift) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : (value > 0 ? "inf" : "-inf");
  const bool negative = std::signbit(value);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, std::fabs(value), std::chars_format::scientific);
  const std::string_view sci(buf, static_cast<std::size_t>(res.ptr - buf));
  const std::size_t e = sci.find('e');
  std::string digits;
  for (char c : sci.substr(0, e))
    if (c != '.') digits += c;
  int exponent = 0;
  std::from_chars(sci.data() + e + 1 + (sci[e + 1] == '+'), sci.data() + sci.size(), exponent);

  // digits[0..point) is the integer part.
  long point = 1L + exponent + shift;
  if (point < 0) {
    digits.insert(0, static_cast<std::size_t>(-point), '0');
    point = 0;
  }
  const std::size_t keep = static_cast<std::size_t>(point) + 2;
  const bool round_up = digits.size() > keep && digits[keep] >= '5';
  if (digits.size() < keep) digits.append(keep - digits.size(), '0');
  digits.resize(keep);
  if (round_up) {
    std::size_t i = digits.size();
    while (i > 0 && digits[i - 1] == '9') digits[--i] = '0';
    if (i == 0) digits.insert(0, "1");
    else ++digits[i - 1];
  }
  std::string integer = digits.substr(0, digits.size() - 2);
  const std::string fraction = digits.substr(digits.size() - 2);
  const std::size_t nz = integer.find_first_not_of('0');
  integer = nz == std::string::npos ? "0" : integer.substr(nz);
  const bool zero = integer == "0" && fraction == "00";
  return (negative && !zero ? "-" : "") + integer + "." + fraction;
}

std::string format_cell(double value, Style style) {
  switch (style) {
    case Style::Percent: return format_fixed2(value, 2) + "%";
    case Style::Rate: return format_fixed2(value, 2);
    case Style::Plain: return format_fixed2(value, 0);
  }
  return format_fixed2(value, 0);
}

namespace {

std::vector<std::string> header_cells(const ScoreMatrix& m) {
  std::vector<std::string> cells{"Model"};
  for (const auto& c : m.columns) cells.push_back(c.header);
  return cells;
}

std::vector<std::string> row_cells(const ScoreMatrix& m, const MetricReport& r) {
  std::vector<std::string> cells{label(r, m.show_corpus_tag)};
  for (const auto& c : m.columns) cells.push_back(format_cell(r.means.at(c.metric_id), c.style));
  return cells;
}

std::string render_markdown(const ScoreMatrix& m) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) out += " " + md_cell(c) + " |";
    return out + "\n";
  };
  const auto header = header_cells(m);
  std::string out = line(header);
  out += "|";
  for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? " :--- |" : " ---: |";
  out += "\n";
  for (const auto& r : m.rows) out += line(row_cells(m, r));
  return out;
}

std::string render_csv(const ScoreMatrix& m) {
  auto line = [](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_cell(cells[i]);
    return out + "\n";
  };
  std::string out = line(header_cells(m));
  for (const auto& r : m.rows) out += line(row_cells(m, r));
  return out;
}

ojson matrix_to_json(const ScoreMatrix& m) {
  ojson doc;
  doc["table"] = std::string(to_string(m.kind));
  doc["show_corpus_tag"] = m.show_corpus_tag;
  doc["columns"] = ojson::array();
  for (const auto& c : m.columns)
    doc["columns"].push_back(
        {{"metric", c.metric_id}, {"header", c.header}, {"style", std::string(style_name(c.style))}});
  doc["rows"] = ojson::array();
  for (const auto& r : m.rows) {
    ojson row;
    row["system"] = r.system;
    row["corpus_tag"] = r.corpus_tag;
    row["pair_count"] = r.pair_count;
    row["means"] = ojson::object();
    for (const auto& [k, v] : r.means) row["means"][k] = v;
    row["corpus_level"] = ojson::array();
    for (const auto& k : r.corpus_level) row["corpus_level"].push_back(k);
    doc["rows"].push_back(std::move(row));
  }
  return doc;
}

ScoreMatrix matrix_from_json(const json& doc) {
  ScoreMatrix m;
  m.kind = table_kind_from_string(doc.at("table").get<std::string>());
  m.show_corpus_tag = doc.value("show_corpus_tag", false);
  for (const auto& c : doc.at("columns"))
    m.columns.push_back({c.at("metric").get<std::string>(), c.at("header").get<std::string>(),
                         style_from_string(c.at("style").get<std::string>())});
  for (const auto& row : doc.at("rows")) {
    MetricReport r;
    r.system = row.at("system").get<std::string>();
    r.corpus_tag = row.value("corpus_tag", "");
    r.pair_count = row.at("pair_count").get<std::size_t>();
    for (const auto& [k, v] : row.at("means").items()) {
      if (!is_registered_metric(k)) throw data_error("unknown metric \"" + k + "\" in report");
      r.means[k] = v.get<double>();
    }
    for (const auto& k : row.value("corpus_level", json::array())) r.corpus_level.insert(k.get<std::string>());
    if (r.pair_count == 0) throw data_error("report row \"" + r.system + "\" has pair_count 0");
    m.rows.push_back(std::move(r));
  }
  return m;
}

}  // namespace

std::string render(const ScoreMatrix& matrix, Format format) {
  switch (format) {
    case Format::Markdown: return render_markdown(matrix);
    case Format::Csv: return render_csv(matrix);
    case Format::Json: return matrix_to_json(matrix).dump(2, ' ', false, json::error_handler_t::replace) + "\n";
  }
  return {};
}

std::string render_all(const std::vector<ScoreMatrix>& matrices, Format format) {
  if (format == Format::Json) {
    ojson doc = ojson::array();
    for (const auto& m : matrices) doc.push_back(matrix_to_json(m));
    return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
  }
  std::string out;
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    if (i) out += "\n";
    if (format == Format::Markdown) out += "### " + std::string(to_string(matrices[i].kind)) + "\n\n";
    else out += "# " + std::string(to_string(matrices[i].kind)) + "\n";
    out += render(matrices[i], format);
  }
  return out;
}

ScoreMatrix parse_matrix_json(std::string_view json_text) {
  const json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw data_error("report JSON is not an object");
  try {
    return matrix_from_json(doc);
  } catch (const json::exception& e) {
    throw data_error(std::string("report JSON: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Inputs

void read_inputs(std::string_view content, const std::string& origin, Inputs& into) {
  std::size_t first = content.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return;
  // A rendered matrix (or array of them) spans several lines.
  if (content[first] == '[' || (content[first] == '{' && content.find("\"rows\"") != std::string_view::npos &&
                                content.find("\"table\"") != std::string_view::npos)) {
    const json doc = json::parse(content, nullptr, false);
    if (!doc.is_discarded() && (doc.is_array() || doc.contains("rows"))) {
      try {
        if (doc.is_array())
          for (const auto& m : doc)
            for (auto& r : matrix_from_json(m).rows) into.reports.push_back(std::move(r));
        else
          for (auto& r : matrix_from_json(doc).rows) into.reports.push_back(std::move(r));
      } catch (const json::exception& e) {
        throw data_error(origin + ": " + e.what());
      }
      return;
    }
  }
  detail::for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    if (detail::is_blank(line)) return;
    const std::string where = origin + ": line " + std::to_string(line_no);
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) throw data_error(where + ": not a JSON object");
    try {
      if (rec.contains("metrics")) {
        into.pairs.push_back(pair_from_object(rec, where));
      } else if (rec.contains("pair_id")) {
        const judge::JudgeResult r = judge::result_from_json(line);
        if (!r.rating) return;
        PairScores p;
        p.id = r.pair_id;
        p.system = rec.value("system", "");
        p.corpus_tag = rec.value("corpus_tag", "");
        p.metrics[std::string(judge::kRatingIds[0])] = r.rating->semantic;
        p.metrics[std::string(judge::kRatingIds[1])] = r.rating->lexical;
        p.metrics[std::string(judge::kRatingIds[2])] = r.rating->syntactic;
        p.metrics[std::string(judge::kRatingIds[3])] = r.rating->grammatical;
        into.ratings.push_back(std::move(p));
      } else {
        throw data_error(where + ": neither a score record nor a judge record");
      }
    } catch (const json::exception& e) {
      throw data_error(where + ": " + e.what());
    } catch (const Error& e) {
      if (std::string_view(e.what()).find(origin) == 0) throw;
      throw Error(e.kind(), where + ": " + e.what());
    }
  });
}

Inputs load_inputs(const std::vector<std::string>& paths) {
  Inputs inputs;
  for (const auto& path : paths) read_inputs(detail::read_file(path), path, inputs);
  return inputs;
}

std::vector<MetricReport> collect_reports(const Inputs& inputs, bool group_by_tag) {
  std::vector<MetricReport> out;
  if (!inputs.pairs.empty()) out = aggregate_groups(inputs.pairs, group_by_tag);
  if (!inputs.ratings.empty())
    for (auto& r : aggregate_groups(inputs.ratings, group_by_tag)) out.push_back(std::move(r));
  out.insert(out.end(), inputs.reports.begin(), inputs.reports.end());
  return out;
}

}  // namespace paraeval::report
