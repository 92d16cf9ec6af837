#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace paraeval::text {

enum class Scheme { Whitespace, UnicodeWords };
enum class Casing { Raw, Lower };

Scheme scheme_from_string(std::string_view name);

struct TokenSequence {
  std::vector<std::string> tokens;
  Casing casing = Casing::Raw;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
};

/// `Whitespace` splits on Unicode whitespace runs. `UnicodeWords` keeps runs
/// of letters, digits and combining marks together and emits every other
/// non-space code point as its own token.
TokenSequence tokenize(std::string_view text, Scheme scheme, Casing casing = Casing::Raw);

/// Shared default for the lexical metrics: unicode_words over normalize(text).
TokenSequence lexical_tokens(std::string_view text, Scheme scheme = Scheme::UnicodeWords);

using NGram = std::vector<std::string>;

struct NGramBag {
  std::size_t order = 1;
  std::map<NGram, std::size_t> counts;

  std::size_t total() const;
};

/// All contiguous n-grams with multiplicity. n == 0 is a usage error.
NGramBag ngrams(const TokenSequence& seq, std::size_t n);

// UTF-8 helpers shared across modules.
std::u32string to_code_points(std::string_view utf8);
std::string to_utf8(std::u32string_view cps);
std::string lowercase(std::string_view utf8);

}  // namespace paraeval::text
