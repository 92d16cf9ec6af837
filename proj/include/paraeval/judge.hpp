#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "paraeval/corpus.hpp"

/// LLM-as-judge protocol: fixed rating prompt, chat-completion call, JSON
/// Likert parsing and per-dimension means.
namespace paraeval::judge {

inline constexpr std::string_view kPromptVersion = "v1";

/// The rating prompt with `$source_text` and `$paraphrase` placeholders.
std::string_view prompt_template();

/// Single-pass substitution; `$` inside the pair text is left alone.
std::string build_prompt(const ParaphrasePair& pair);

struct LikertRating {
  int semantic = 0;
  int lexical = 0;
  int syntactic = 0;
  int grammatical = 0;

  friend bool operator==(const LikertRating&, const LikertRating&) = default;
};

inline constexpr std::array<std::string_view, 4> kRatingKeys = {
    "Semantic Similarity", "Lexical Diversity", "Syntactic Diversity", "Grammatical Correctness"};

enum class Failure { MalformedJson, MissingKey, OutOfRange, Transport };

std::string_view to_string(Failure failure);
Failure failure_from_string(std::string_view name);

struct RatingParse {
  std::optional<LikertRating> rating;
  Failure failure = Failure::MalformedJson;
  std::string detail;

  bool ok() const { return rating.has_value(); }
};

/// Reads the first JSON object in `response`; it must hold exactly the four
/// rating keys with integer values 1-5.
RatingParse parse_rating(std::string_view response);

/// The first balanced {...} span that parses as a JSON object.
std::optional<std::string_view> first_json_object(std::string_view text);

struct JudgeResult {
  std::string pair_id;
  std::optional<LikertRating> rating;
  std::optional<Failure> failure;
  std::string detail;
  std::string raw_response;
  int attempts = 0;
};

struct Aggregate {
  std::array<double, 4> means{};  // semantic, lexical, syntactic, grammatical
  std::size_t success_count = 0;
  std::size_t total = 0;
};

/// Means over successful ratings only.
Aggregate aggregate(const std::vector<JudgeResult>& results);

/// Chat endpoint abstraction. `attempt` counts from 1.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  /// Returns the completion text; throws an external error on transport
  /// failure.
  virtual std::string complete(const std::string& pair_id, const std::string& prompt, int attempt) = 0;
};

struct EndpointConfig {
  std::string url = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4";
  std::string api_key_env = "OPENAI_API_KEY";
  int timeout_seconds = 120;
};

/// POST {"model", "messages": [{"role": "user", "content": prompt}],
/// "temperature": 0}; reply text is choices[0].message.content.
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(EndpointConfig config);
  std::string complete(const std::string& pair_id, const std::string& prompt, int attempt) override;

  static std::string request_body(const std::string& model, const std::string& prompt);

 private:
  EndpointConfig config_;
};

/// Canned responses from JSONL {"pair_id", "response"} or
/// {"pair_id", "responses": [...]} (one per attempt; the last repeats).
class OfflineChatClient final : public ChatClient {
 public:
  static OfflineChatClient load(const std::string& path);
  static OfflineChatClient parse(std::string_view jsonl);

  std::string complete(const std::string& pair_id, const std::string& prompt, int attempt) override;

 private:
  std::unordered_map<std::string, std::vector<std::string>> responses_;
};

struct RetryPolicy {
  int retries = 2;  // extra attempts after the first
  std::size_t parallelism = 4;
};

struct JudgeRun {
  std::vector<JudgeResult> results;  // sorted by pair_id
  Aggregate aggregate;
};

/// One request per pair, retried on malformed output or transport errors.
/// A failing pair never aborts the run.
JudgeRun judge_corpus(const Corpus& corpus, ChatClient& client, const RetryPolicy& policy = {});

/// Snake-case ids used in result records and the Likert table.
inline constexpr std::array<std::string_view, 4> kRatingIds = {
    "semantic_similarity", "lexical_diversity", "syntactic_diversity", "grammatical_correctness"};

/// One JSONL record: {"pair_id", "system", "rating" | null, "failure" | null,
/// "detail", "raw_response", "attempts", "prompt_version"}.
std::string result_to_json(const JudgeResult& result, std::string_view system = {});
JudgeResult result_from_json(std::string_view line);

}  // namespace paraeval::judge
