#include "paraeval/postproc.hpp"

#include <unicode/uchar.h>

#include <json.hpp>
#include <unordered_map>
#include <unordered_set>

#include "file_io.hpp"
#include "paraeval/corpus.hpp"
#include "paraeval/error.hpp"
#include "paraeval/text.hpp"

namespace paraeval {

namespace {

bool is_word_char(char32_t c) {
  const auto u = static_cast<UChar32>(c);
  if (u_isalnum(u)) return true;
  const auto t = u_charType(u);
  return t == U_NON_SPACING_MARK || t == U_ENCLOSING_MARK || t == U_COMBINING_SPACING_MARK;
}

char32_t lower_cp(char32_t c) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))); }

std::u32string lower_cps(std::u32string_view s) {
  std::u32string out(s);
  for (auto& c : out) c = lower_cp(c);
  return out;
}

// True when swapping `from` for `to` keeps the normalized text unchanged.
bool case_variant(char32_t from, char32_t to) {
  if (from == to) return true;
  if (lower_cp(from) != lower_cp(to)) return false;
  const std::u32string a(1, from), b(1, to);
  return text::lowercase(text::to_utf8(a)) == text::lowercase(text::to_utf8(b));
}

void apply_casing(std::u32string& text, std::size_t at, std::u32string_view cased) {
  for (std::size_t k = 0; k < cased.size(); ++k)
    if (case_variant(text[at + k], cased[k])) text[at + k] = cased[k];
}


}  // namespace

void CasingLexicon::add(std::string key, std::string value) {
  const std::u32string k = text::to_code_points(key);
  const std::u32string v = text::to_code_points(value);
  if (k.empty()) throw data_error("lexicon key is empty");
  if (text::lowercase(key) != key) throw data_error("lexicon key '" + key + "' is not lowercase");
  if (k.size() != v.size() || lower_cps(v) != lower_cps(k))
    throw data_error("lexicon value '" + value + "' differs from '" + key + "' beyond case");
  entries_.insert_or_assign(k, v);
}

CasingLexicon CasingLexicon::parse_tsv(std::string_view content) {
  CasingLexicon lex;
  detail::for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    if (line.empty()) return;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos)
      throw data_error("lexicon line " + std::to_string(line_no) + ": expected two columns");
    try {
      lex.add(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
    } catch (const Error& e) {
      throw data_error("lexicon line " + std::to_string(line_no) + ": " + e.what());
    }
  });
  return lex;
}

CasingLexicon CasingLexicon::load_tsv(const std::string& path) { return parse_tsv(detail::read_file(path)); }

std::string restore_case(std::string_view source, std::string_view generated_lower,
                         const CasingLexicon* lexicon) {
  std::u32string out = text::to_code_points(generated_lower);
  const std::u32string src = text::to_code_points(source);

  // 1. Words that also appear in the source take the source casing.
  std::unordered_map<std::u32string, std::u32string> source_words;
  for (std::size_t i = 0; i < src.size();) {
    if (!is_word_char(src[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < src.size() && is_word_char(src[j])) ++j;
    std::u32string word = src.substr(i, j - i);
    source_words.try_emplace(lower_cps(word), std::move(word));
    i = j;
  }
  for (std::size_t i = 0; i < out.size();) {
    if (!is_word_char(out[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < out.size() && is_word_char(out[j])) ++j;
    if (auto it = source_words.find(lower_cps(std::u32string_view(out).substr(i, j - i)));
        it != source_words.end())
      apply_casing(out, i, it->second);
    i = j;
  }

  // 2. Lexicon entries, longest match first, anchored on word boundaries.
  if (lexicon && !lexicon->empty()) {
    std::vector<const std::pair<const std::u32string, std::u32string>*> by_length;
    for (const auto& e : lexicon->entries()) by_length.push_back(&e);
    std::stable_sort(by_length.begin(), by_length.end(),
                     [](auto* a, auto* b) { return a->first.size() > b->first.size(); });
    std::size_t i = 0;
    while (i < out.size()) {
      const bool word_start = is_word_char(out[i]) && (i == 0 || !is_word_char(out[i - 1]));
      std::size_t advance = 1;
      if (word_start) {
        for (const auto* e : by_length) {
          const std::size_t len = e->first.size();
          if (i + len > out.size()) continue;
          if (i + len < out.size() && is_word_char(out[i + len]) && is_word_char(out[i + len - 1]))
            continue;
          if (lower_cps(std::u32string_view(out).substr(i, len)) != e->first) continue;
          apply_casing(out, i, e->second);
          advance = len;
          break;
        }
      }
      i += advance;
    }
  }

  // 3. Sentence-initial capitalisation.
  bool sentence_start = true;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const char32_t c = out[i];
    if (sentence_start && u_isalpha(static_cast<UChar32>(c))) {
      const auto upper = static_cast<char32_t>(u_toupper(static_cast<UChar32>(c)));
      if (case_variant(c, upper)) out[i] = upper;
      sentence_start = false;
    }
    if ((c == U'.' || c == U'!' || c == U'?') && i + 1 < out.size() &&
        u_isUWhiteSpace(static_cast<UChar32>(out[i + 1])))
      sentence_start = true;
  }
  return text::to_utf8(out);
}

std::vector<std::string> dedup_outputs(const std::vector<std::string>& candidates) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& c : candidates)
    if (seen.insert(normalize(c)).second) out.push_back(c);
  return out;
}

PostprocessResult postprocess_jsonl(std::string_view input, std::string& output,
                                    const CasingLexicon* lexicon, bool as_pairs) {
  using json = nlohmann::ordered_json;
  PostprocessResult result;
  detail::for_each_line(input, [&](std::size_t line_no, std::string_view line) {
    if (detail::is_blank(line)) return;

    const std::string where = "line " + std::to_string(line_no);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw data_error(where + ": invalid JSON: " + e.what());
    }
    if (!rec.is_object() || !rec.contains("source") || !rec["source"].is_string())
      throw data_error(where + ": missing string key \"source\"");
    std::vector<std::string> outputs;
    if (rec.contains("outputs")) {
      if (!rec["outputs"].is_array()) throw data_error(where + ": \"outputs\" must be an array");
      for (const auto& o : rec["outputs"]) {
        if (!o.is_string()) throw data_error(where + ": outputs must be strings");
        outputs.push_back(o.get<std::string>());
      }
    } else if (rec.contains("paraphrase") && rec["paraphrase"].is_string()) {
      outputs.push_back(rec["paraphrase"].get<std::string>());
    } else {
      throw data_error(where + ": expected \"outputs\" or \"paraphrase\"");
    }

    const std::string source = rec["source"].get<std::string>();
    std::vector<std::string> restored;
    for (const auto& o : outputs) restored.push_back(restore_case(source, text::lowercase(o), lexicon));
    std::vector<std::string> kept = dedup_outputs(restored);
    ++result.records;
    result.outputs += kept.size();
    result.duplicates_removed += restored.size() - kept.size();

    std::string id = rec.contains("id") && rec["id"].is_string() ? rec["id"].get<std::string>()
                                                                   : std::to_string(line_no);
    if (as_pairs) {
      std::size_t k = 0;
      for (const auto& p : kept) {
        json pair;
        pair["id"] = id + "-" + std::to_string(++k);
        pair["source"] = source;
        pair["paraphrase"] = p;
        pair["corpus_tag"] = rec.value("corpus_tag", "");
        pair["origin"] = "generated";
        output += pair.dump();
        output += '\n';
      }
    } else {
      rec["outputs"] = kept;
      rec.erase("paraphrase");
      output += rec.dump();
      output += '\n';
    }
  });
  return result;
}

}  // namespace paraeval
