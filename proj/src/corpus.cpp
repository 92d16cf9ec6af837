#include "paraeval/corpus.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <cctype>
#include <filesystem>
#include <json.hpp>

#include "file_io.hpp"
#include "paraeval/error.hpp"
#include "paraeval/text.hpp"

namespace paraeval {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string normalize(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorKind::Io, "ICU NFC normalizer unavailable");

  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u = nfc->normalize(u, status);
  u.toLower(icu::Locale::getRoot());
  // Full lowercase mapping can leave decomposed sequences behind.
  u = nfc->normalize(u, status);
  if (U_FAILURE(status)) throw data_error("text could not be normalized");

  icu::UnicodeString collapsed;
  bool pending_space = false;
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = !collapsed.isEmpty();
      continue;
    }
    if (pending_space) collapsed.append(static_cast<UChar>(u' '));
    pending_space = false;
    collapsed.append(c);
  }
  std::string out;
  collapsed.toUTF8String(out);
  return out;
}

std::string_view to_string(Origin origin) {
  return origin == Origin::Generated ? "generated" : "dataset";
}

Origin origin_from_string(std::string_view name) {
  if (name == "dataset") return Origin::Dataset;
  if (name == "generated") return Origin::Generated;
  throw data_error("unknown origin '" + std::string(name) + "'");
}

CorpusFormat corpus_format_from_string(std::string_view name) {
  if (name == "tsv") return CorpusFormat::Tsv;
  if (name == "jsonl") return CorpusFormat::Jsonl;
  throw usage_error("unknown corpus format '" + std::string(name) + "'");
}

namespace {

using detail::for_each_line;
using detail::is_blank;
using detail::read_file;
using detail::write_file;

std::string pair_key(std::string_view source, std::string_view paraphrase) {
  std::string key = normalize(source);
  key.push_back('\0');
  key += normalize(paraphrase);
  return key;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::string string_field(const json& obj, const char* key, std::size_t line, bool required) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw data_error(line_error(line, std::string("missing key \"") + key + "\""));
    return {};
  }
  if (!it->is_string())
    throw data_error(line_error(line, std::string("key \"") + key + "\" must be a string"));
  return it->get<std::string>();
}

}  // namespace

bool Corpus::add(ParaphrasePair pair) {
  if (normalize(pair.source).empty() || normalize(pair.paraphrase).empty())
    throw data_error("pair '" + pair.id + "' has an empty side");
  std::string key = pair_key(pair.source, pair.paraphrase);
  if (keys_.contains(key)) return false;
  if (pair.id.empty()) pair.id = std::to_string(pairs_.size() + 1);
  if (!ids_.insert(pair.id).second) throw data_error("duplicate pair id '" + pair.id + "'");
  keys_.insert(std::move(key));
  pairs_.push_back(std::move(pair));
  return true;
}

LoadResult parse_corpus(std::string_view content, const LoadOptions& options) {
  LoadResult result{Corpus(options.name), 0, {}};
  bool header_pending = options.format == CorpusFormat::Tsv && options.tsv_header;

  for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    if (header_pending) {
      header_pending = false;
      return;
    }
    if (is_blank(line)) return;

    ParaphrasePair pair;
    if (options.format == CorpusFormat::Tsv) {
      std::vector<std::string_view> cols;
      std::size_t pos = 0;
      while (true) {
        std::size_t tab = line.find('\t', pos);
        cols.push_back(line.substr(pos, tab == std::string_view::npos ? tab : tab - pos));
        if (tab == std::string_view::npos) break;
        pos = tab + 1;
      }
      if (cols.size() < 2 || cols.size() > 3)
        throw data_error(line_error(line_no, "expected 2 or 3 tab-separated columns, got " +
                                                 std::to_string(cols.size())));
      pair.source = std::string(trim(cols[0]));
      pair.paraphrase = std::string(trim(cols[1]));
      if (cols.size() == 3) pair.corpus_tag = std::string(trim(cols[2]));
    } else {
      json obj;
      try {
        obj = json::parse(line);
      } catch (const json::parse_error& e) {
        throw data_error(line_error(line_no, std::string("invalid JSON: ") + e.what()));
      }
      if (!obj.is_object()) throw data_error(line_error(line_no, "expected a JSON object"));
      pair.source = string_field(obj, "source", line_no, true);
      pair.paraphrase = string_field(obj, "paraphrase", line_no, true);
      pair.id = string_field(obj, "id", line_no, false);
      pair.corpus_tag = string_field(obj, "corpus_tag", line_no, false);
      std::string origin = string_field(obj, "origin", line_no, false);
      if (!origin.empty()) {
        try {
          pair.origin = origin_from_string(origin);
        } catch (const Error& e) {
          throw data_error(line_error(line_no, e.what()));
        }
      }
    }

    if (normalize(pair.source).empty() || normalize(pair.paraphrase).empty())
      throw data_error(line_error(line_no, "source and paraphrase must be non-empty"));

    std::string id = pair.id;
    bool added = false;
    try {
      added = result.corpus.add(std::move(pair));
    } catch (const Error& e) {
      throw data_error(line_error(line_no, e.what()));
    }
    if (!added) {
      ++result.dropped;
      result.duplicates.push_back({id, line_no, "duplicate", "normalized pair already present"});
    }
  });
  return result;
}

LoadResult load_corpus(const std::string& path, const LoadOptions& options) {
  LoadOptions opts = options;
  if (opts.name.empty()) opts.name = std::filesystem::path(path).stem().string();
  return parse_corpus(read_file(path), opts);
}

std::string serialize_corpus(const Corpus& corpus, CorpusFormat format) {
  std::string out;
  for (const auto& pair : corpus) {
    if (format == CorpusFormat::Tsv) {
      for (const std::string* field : {&pair.source, &pair.paraphrase, &pair.corpus_tag}) {
        if (field->find_first_of("\t\n\r") != std::string::npos)
          throw data_error("pair '" + pair.id + "' contains a tab or newline; use jsonl");
      }
      out += pair.source;
      out += '\t';
      out += pair.paraphrase;
      if (!pair.corpus_tag.empty()) {
        out += '\t';
        out += pair.corpus_tag;
      }
    } else {
      ordered_json obj;
      obj["id"] = pair.id;
      obj["source"] = pair.source;
      obj["paraphrase"] = pair.paraphrase;
      obj["corpus_tag"] = pair.corpus_tag;
      obj["origin"] = to_string(pair.origin);
      out += obj.dump();
    }
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::string& path, CorpusFormat format) {
  write_file(path, serialize_corpus(corpus, format));
}

std::string rejects_sidecar_path(const std::string& path) {
  std::filesystem::path p(path);
  p.replace_extension(".rejects.jsonl");
  return p.string();
}

void write_rejects(const std::string& path, const std::vector<Rejection>& rejects) {
  std::string out;
  for (const auto& r : rejects) {
    ordered_json obj;
    obj["id"] = r.id;
    obj["line"] = r.line;
    obj["reason"] = r.reason;
    if (!r.detail.empty()) obj["detail"] = r.detail;
    out += obj.dump();
    out += '\n';
  }
  write_file(path, out);
}

// ---------------------------------------------------------------------------

std::string_view to_string(RejectReason reason) {
  return reason == RejectReason::NonEnglish ? "non_english" : "unparseable";
}

namespace {

// Matches ^\s*\d+[.)]\s* and returns the remainder of the line.
std::optional<std::string_view> strip_list_marker(std::string_view line) {
  std::size_t i = 0;
  while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
  const std::size_t digits = i;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == digits || i >= line.size()) return std::nullopt;
  if (line[i] != '.' && line[i] != ')') return std::nullopt;
  return trim(line.substr(i + 1));
}

bool equals_ignore_ascii_case(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

}  // namespace

std::variant<std::vector<std::string>, ListRejection> parse_llm_list(std::string_view response) {
  if (equals_ignore_ascii_case(trim(response), "error")) return ListRejection{RejectReason::NonEnglish};

  std::vector<std::string> items;
  bool saw_marker = false;
  for_each_line(response, [&](std::size_t, std::string_view line) {
    auto item = strip_list_marker(line);
    if (!item) return;
    saw_marker = true;
    if (!item->empty()) items.emplace_back(*item);
  });
  if (!saw_marker || items.empty()) return ListRejection{RejectReason::Unparseable};
  return items;
}

ParaphrasePool::ParaphrasePool(std::string source, std::vector<std::string> paraphrases)
    : source_(std::move(source)), paraphrases_(std::move(paraphrases)) {
  const std::string source_key = normalize(source_);
  std::unordered_set<std::string> seen;
  for (const auto& p : paraphrases_) {
    std::string key = normalize(p);
    if (key.empty()) throw data_error("paraphrase pool contains an empty paraphrase");
    if (key == source_key) throw data_error("paraphrase pool item equals the source: '" + p + "'");
    if (!seen.insert(std::move(key)).second)
      throw data_error("paraphrase pool contains a duplicate: '" + p + "'");
  }
}

ParaphrasePool ParaphrasePool::filtered(std::string source, std::vector<std::string> candidates,
                                        std::vector<Dropped>* dropped) {
  const std::string source_key = normalize(source);
  std::unordered_set<std::string> seen;
  std::vector<std::string> kept;
  for (auto& c : candidates) {
    std::string key = normalize(c);
    const char* reason = nullptr;
    if (key.empty()) reason = "empty";
    else if (key == source_key) reason = "equals_source";
    else if (!seen.insert(key).second) reason = "duplicate";
    if (reason) {
      if (dropped) dropped->push_back({std::move(c), reason});
      continue;
    }
    kept.push_back(std::move(c));
  }
  return ParaphrasePool(std::move(source), std::move(kept));
}

PairMode pair_mode_from_string(std::string_view name) {
  if (name == "source_to_each") return PairMode::SourceToEach;
  if (name == "all_unique") return PairMode::AllUnique;
  throw usage_error("unknown pair mode '" + std::string(name) + "'");
}

std::vector<ParaphrasePair> build_pairs(const ParaphrasePool& pool, PairMode mode,
                                        std::string_view id_prefix, std::string_view corpus_tag) {
  std::vector<ParaphrasePair> out;
  std::unordered_set<std::string> seen;
  auto emit = [&](const std::string& a, const std::string& b) {
    if (!seen.insert(pair_key(a, b)).second) return;
    ParaphrasePair pair;
    pair.id = std::string(id_prefix) + "-" + std::to_string(out.size() + 1);
    pair.source = a;
    pair.paraphrase = b;
    pair.origin = Origin::Generated;
    pair.corpus_tag = std::string(corpus_tag);
    out.push_back(std::move(pair));
  };

  const auto& items = pool.paraphrases();
  for (const auto& p : items) emit(pool.source(), p);
  if (mode == PairMode::AllUnique) {
    for (std::size_t i = 0; i < items.size(); ++i)
      for (std::size_t j = i + 1; j < items.size(); ++j) emit(items[i], items[j]);
  }
  return out;
}

PairsFromResponsesResult pairs_from_responses(std::string_view jsonl,
                                              const PairsFromResponsesOptions& options) {
  PairsFromResponsesResult result;
  result.corpus = Corpus("pairs");

  for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
    if (is_blank(line)) return;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw data_error(line_error(line_no, std::string("invalid JSON: ") + e.what()));
    }
    if (!obj.is_object()) throw data_error(line_error(line_no, "expected a JSON object"));
    ++result.responses;

    std::string source = string_field(obj, "source", line_no, true);
    std::string response = string_field(obj, "response", line_no, true);
    std::string id = string_field(obj, "id", line_no, false);
    if (id.empty()) id = "r" + std::to_string(line_no);
    std::string tag = string_field(obj, "corpus_tag", line_no, false);

    if (normalize(source).empty()) {
      result.rejects.push_back({id, line_no, "empty_source", {}});
      return;
    }

    auto parsed = parse_llm_list(response);
    if (auto* rejection = std::get_if<ListRejection>(&parsed)) {
      result.rejects.push_back({id, line_no, std::string(to_string(rejection->reason)), {}});
      return;
    }

    std::vector<ParaphrasePool::Dropped> dropped;
    ParaphrasePool pool = ParaphrasePool::filtered(
        source, std::move(std::get<std::vector<std::string>>(parsed)), &dropped);
    for (auto& d : dropped) result.rejects.push_back({id, line_no, d.reason, d.text});

    for (auto& pair : build_pairs(pool, options.mode, id, tag)) {
      if (options.filter) {
        if (auto reason = options.filter(pair)) {
          result.rejects.push_back({pair.id, line_no, "filtered", *reason});
          continue;
        }
      }
      std::string pair_id = pair.id;
      if (!result.corpus.add(std::move(pair)))
        result.rejects.push_back({pair_id, line_no, "duplicate", "normalized pair already present"});
    }
  });
  return result;
}

}  // namespace paraeval
