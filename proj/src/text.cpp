#include "paraeval/text.hpp"

#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>
#include <unicode/utf8.h>

#include "paraeval/corpus.hpp"
#include "paraeval/error.hpp"

namespace paraeval::text {

namespace {

bool is_word_char(UChar32 c) {
  if (u_isalnum(c)) return true;
  switch (u_charType(c)) {
    case U_NON_SPACING_MARK:
    case U_ENCLOSING_MARK:
    case U_COMBINING_SPACING_MARK:
      return true;
    default:
      return false;
  }
}

template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto length = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0) c = 0xFFFD;
    fn(c, static_cast<std::size_t>(start), static_cast<std::size_t>(i - start));
  }
}

}  // namespace

Scheme scheme_from_string(std::string_view name) {
  if (name == "whitespace") return Scheme::Whitespace;
  if (name == "unicode_words") return Scheme::UnicodeWords;
  throw usage_error("unknown tokenizer scheme '" + std::string(name) + "'");
}

TokenSequence tokenize(std::string_view input, Scheme scheme, Casing casing) {
  std::string lowered;
  std::string_view text = input;
  if (casing == Casing::Lower) {
    lowered = lowercase(input);
    text = lowered;
  }

  TokenSequence out;
  out.casing = casing;
  std::size_t run_start = 0;
  std::size_t run_len = 0;
  auto flush = [&] {
    if (run_len > 0) out.tokens.emplace_back(text.substr(run_start, run_len));
    run_len = 0;
  };

  for_each_code_point(text, [&](UChar32 c, std::size_t at, std::size_t width) {
    if (u_isUWhiteSpace(c)) {
      flush();
      return;
    }
    if (scheme == Scheme::UnicodeWords && !is_word_char(c)) {
      flush();
      out.tokens.emplace_back(text.substr(at, width));
      return;
    }
    if (run_len == 0) run_start = at;
    run_len += width;
  });
  flush();
  return out;
}

TokenSequence lexical_tokens(std::string_view text, Scheme scheme) {
  // normalize() already lowercases, so the casing tag is Lower.
  TokenSequence seq = tokenize(normalize(text), scheme, Casing::Raw);
  seq.casing = Casing::Lower;
  return seq;
}

std::size_t NGramBag::total() const {
  std::size_t sum = 0;
  for (const auto& [gram, count] : counts) sum += count;
  return sum;
}

NGramBag ngrams(const TokenSequence& seq, std::size_t n) {
  if (n == 0) throw usage_error("n-gram order must be >= 1");
  NGramBag bag;
  bag.order = n;
  if (seq.size() < n) return bag;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    NGram gram(seq.tokens.begin() + static_cast<std::ptrdiff_t>(i),
               seq.tokens.begin() + static_cast<std::ptrdiff_t>(i + n));
    ++bag.counts[std::move(gram)];
  }
  return bag;
}

std::u32string to_code_points(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  for_each_code_point(utf8, [&](UChar32 c, std::size_t, std::size_t) {
    out.push_back(static_cast<char32_t>(c));
  });
  return out;
}

std::string to_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t c : cps) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(buf, len, U8_MAX_LENGTH, static_cast<UChar32>(c), error);
    if (error) {
      len = 0;
      U8_APPEND_UNSAFE(buf, len, 0xFFFD);
    }
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(len));
  }
  return out;
}

std::string lowercase(std::string_view utf8) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

}  // namespace paraeval::text
