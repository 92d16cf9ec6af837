#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "paraeval/lexical.hpp"

/// Corpus-level aggregation and table rendering.
namespace paraeval::report {

/// Per-pair metric values as written by the scorer (diversities in [0, 1],
/// error rates raw, tree edit distances in nodes).
struct PairScores {
  std::string id;
  std::string system;
  std::string corpus_tag;
  std::map<std::string, double> metrics;
  std::optional<lexical::BleuStats> bleu;
};

struct MetricReport {
  std::string system;
  std::string corpus_tag;
  std::map<std::string, double> means;
  std::set<std::string> corpus_level;  // ids computed over the corpus, not averaged
  std::size_t pair_count = 0;

  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

/// {"id", "system", "corpus_tag", "metrics": {...}, "bleu_stats": {...}};
/// doubles keep full precision.
std::string pair_to_json(const PairScores& pair);
PairScores pair_from_json(std::string_view line);

/// Metric ids a report may carry: the lexical, syntactic and Likert ids plus
/// any "semantic:<provider>".
bool is_registered_metric(std::string_view id);

/// Means over `pairs`; corpus_bleu and corpus_bleu2 come from the summed
/// BLEU statistics. Throws on empty input.
MetricReport aggregate(const std::vector<PairScores>& pairs);

/// One report per system (per system and corpus_tag with `group_by_tag`), in
/// first-seen order. A system spanning several corpus tags without
/// `group_by_tag` is an ambiguous-grouping error.
std::vector<MetricReport> aggregate_groups(const std::vector<PairScores>& pairs, bool group_by_tag);

enum class TableKind { Semantic, Syntactic, Lexical, Likert };
enum class Format { Markdown, Csv, Json };

TableKind table_kind_from_string(std::string_view name);
std::string_view to_string(TableKind kind);
Format format_from_string(std::string_view name);

enum class Style {
  Percent,  // x100, two decimals, "%"
  Rate,     // x100, two decimals
  Plain,    // two decimals
};

struct Column {
  std::string metric_id;
  std::string header;
  Style style = Style::Percent;

  friend bool operator==(const Column&, const Column&) = default;
};

/// Fixed column order per table. The semantic table gets one column per
/// provider, in the order given.
std::vector<Column> table_columns(TableKind kind, const std::vector<std::string>& providers = {});

struct ScoreMatrix {
  TableKind kind = TableKind::Semantic;
  std::vector<Column> columns;
  std::vector<MetricReport> rows;
  bool show_corpus_tag = false;

  friend bool operator==(const ScoreMatrix&, const ScoreMatrix&) = default;
};

/// Rows that carry any column of the table; each must carry all of them.
/// Semantic providers are discovered from "semantic:<name>" ids; ADA,
/// SimCSE, PromCSE, Roberta and Mpnet come first in that order.
ScoreMatrix build_matrix(TableKind kind, const std::vector<MetricReport>& reports,
                         bool show_corpus_tag = false);

/// Tables whose metrics appear in `reports`, in schema order.
std::vector<ScoreMatrix> build_all(const std::vector<MetricReport>& reports, bool show_corpus_tag = false);

std::string render(const ScoreMatrix& matrix, Format format);
std::string render_all(const std::vector<ScoreMatrix>& matrices, Format format);

/// Inverse of render(matrix, Format::Json).
ScoreMatrix parse_matrix_json(std::string_view json_text);

/// `value` rounded half-up to two decimals from its shortest decimal form,
/// after scaling by 10^shift.
std::string format_fixed2(double value, int shift = 0);
std::string format_cell(double value, Style style);

/// Reader for report inputs: scorer JSONL records ({"metrics": ...}), judge
/// JSONL records ({"pair_id", "rating"}; failures skipped) and rendered JSON
/// matrices (their rows pass through unchanged).
struct Inputs {
  std::vector<PairScores> pairs;
  std::vector<PairScores> ratings;  // judge records, aggregated into their own rows
  std::vector<MetricReport> reports;
};

void read_inputs(std::string_view content, const std::string& origin, Inputs& into);
Inputs load_inputs(const std::vector<std::string>& paths);

/// Aggregates scores, then ratings, then appends the pass-through reports.
std::vector<MetricReport> collect_reports(const Inputs& inputs, bool group_by_tag);

}  // namespace paraeval::report
