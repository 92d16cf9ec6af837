#include "paraeval/judge.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <thread>

#include "file_io.hpp"
#include "http.hpp"
#include "paraeval/error.hpp"

namespace paraeval::judge {

using json = nlohmann::json;

namespace {

constexpr std::string_view kSourcePlaceholder = "$source_text";
constexpr std::string_view kParaphrasePlaceholder = "$paraphrase";

// End of the balanced object opening at `open`, or npos.
std::size_t balanced_end(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i;
  }
  return std::string_view::npos;
}

RatingParse fail(Failure failure, std::string detail) {
  RatingParse r;
  r.failure = failure;
  r.detail = std::move(detail);
  return r;
}

}  // namespace

std::string build_prompt(const ParaphrasePair& pair) {
  const std::string_view tpl = prompt_template();
  std::string out;
  out.reserve(tpl.size() + pair.source.size() + pair.paraphrase.size());
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    const std::size_t dollar = tpl.find('$', pos);
    if (dollar == std::string_view::npos) {
      out.append(tpl.substr(pos));
      break;
    }
    out.append(tpl.substr(pos, dollar - pos));
    const std::string_view rest = tpl.substr(dollar);
    if (rest.substr(0, kSourcePlaceholder.size()) == kSourcePlaceholder) {
      out += pair.source;
      pos = dollar + kSourcePlaceholder.size();
    } else if (rest.substr(0, kParaphrasePlaceholder.size()) == kParaphrasePlaceholder) {
      out += pair.paraphrase;
      pos = dollar + kParaphrasePlaceholder.size();
    } else {
      out += '$';
      pos = dollar + 1;
    }
  }
  return out;
}

std::string_view to_string(Failure failure) {
  switch (failure) {
    case Failure::MalformedJson: return "malformed_json";
    case Failure::MissingKey: return "missing_key";
    case Failure::OutOfRange: return "out_of_range";
    case Failure::Transport: return "transport";
  }
  return "unknown";
}

Failure failure_from_string(std::string_view name) {
  for (Failure f : {Failure::MalformedJson, Failure::MissingKey, Failure::OutOfRange, Failure::Transport})
    if (to_string(f) == name) return f;
  throw data_error("unknown judge failure '" + std::string(name) + "'");
}

std::optional<std::string_view> first_json_object(std::string_view text) {
  for (std::size_t open = text.find('{'); open != std::string_view::npos;
       open = text.find('{', open + 1)) {
    const std::size_t close = balanced_end(text, open);
    if (close == std::string_view::npos) continue;
    const std::string_view span = text.substr(open, close - open + 1);
    if (json::accept(span)) return span;
  }
  return std::nullopt;
}

RatingParse parse_rating(std::string_view response) {
  const auto span = first_json_object(response);
  if (!span) return fail(Failure::MalformedJson, "no JSON object in response");
  const json obj = json::parse(*span);

  for (std::string_view key : kRatingKeys)
    if (!obj.contains(key)) return fail(Failure::MissingKey, std::string(key));
  for (const auto& [key, _] : obj.items())
    if (std::find(kRatingKeys.begin(), kRatingKeys.end(), key) == kRatingKeys.end())
      return fail(Failure::MalformedJson, "unexpected key \"" + key + "\"");

  std::array<int, 4> values{};
  for (std::size_t k = 0; k < kRatingKeys.size(); ++k) {
    const json& v = obj.at(std::string(kRatingKeys[k]));
    const std::string name(kRatingKeys[k]);
    if (!v.is_number_integer()) return fail(Failure::OutOfRange, name + "=" + v.dump());
    const auto n = v.get<long long>();
    if (n < 1 || n > 5) return fail(Failure::OutOfRange, name + "=" + std::to_string(n));
    values[k] = static_cast<int>(n);
  }
  RatingParse r;
  r.rating = LikertRating{values[0], values[1], values[2], values[3]};
  return r;
}

Aggregate aggregate(const std::vector<JudgeResult>& results) {
  Aggregate agg;
  agg.total = results.size();
  std::array<long long, 4> sums{};
  for (const auto& r : results) {
    if (!r.rating) continue;
    ++agg.success_count;
    sums[0] += r.rating->semantic;
    sums[1] += r.rating->lexical;
    sums[2] += r.rating->syntactic;
    sums[3] += r.rating->grammatical;
  }
  if (agg.success_count)
    for (std::size_t k = 0; k < 4; ++k)
      agg.means[k] = static_cast<double>(sums[k]) / static_cast<double>(agg.success_count);
  return agg;
}

HttpChatClient::HttpChatClient(EndpointConfig config) : config_(std::move(config)) {
  if (config_.url.empty()) throw usage_error("judge endpoint URL is empty");
}

std::string HttpChatClient::request_body(const std::string& model, const std::string& prompt) {
  json body = json::object();
  body["model"] = model;
  body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = 0;
  return body.dump();
}

std::string HttpChatClient::complete(const std::string&, const std::string& prompt, int) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (!config_.api_key_env.empty())
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
      headers.emplace_back("Authorization", std::string("Bearer ") + key);
  const auto res = http::post_json(config_.url, request_body(config_.model, prompt), headers,
                                   config_.timeout_seconds);
  if (res.status < 200 || res.status >= 300)
    throw external_error("judge endpoint returned HTTP " + std::to_string(res.status));
  const json reply = json::parse(res.body, nullptr, false);
  if (reply.is_discarded()) throw external_error("judge endpoint returned invalid JSON");
  const json* content = nullptr;
  if (reply.contains("choices") && reply["choices"].is_array() && !reply["choices"].empty()) {
    const json& first = reply["choices"][0];
    if (first.contains("message") && first["message"].contains("content"))
      content = &first["message"]["content"];
  }
  if (!content || !content->is_string())
    throw external_error("judge reply has no choices[0].message.content");
  return content->get<std::string>();
}

OfflineChatClient OfflineChatClient::load(const std::string& path) {
  return parse(detail::read_file(path));
}

OfflineChatClient OfflineChatClient::parse(std::string_view jsonl) {
  OfflineChatClient client;
  detail::for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
    if (detail::is_blank(line)) return;
    const auto where = "fixtures line " + std::to_string(line_no);
    const json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) throw data_error(where + ": not a JSON object");
    if (!rec.contains("pair_id") || !rec["pair_id"].is_string())
      throw data_error(where + ": missing string \"pair_id\"");
    std::vector<std::string> responses;
    if (rec.contains("responses")) {
      if (!rec["responses"].is_array() || rec["responses"].empty())
        throw data_error(where + ": \"responses\" must be a non-empty array");
      for (const auto& r : rec["responses"]) {
        if (!r.is_string()) throw data_error(where + ": responses must be strings");
        responses.push_back(r.get<std::string>());
      }
    } else if (rec.contains("response") && rec["response"].is_string()) {
      responses.push_back(rec["response"].get<std::string>());
    } else {
      throw data_error(where + ": needs \"response\" or \"responses\"");
    }
    const auto id = rec["pair_id"].get<std::string>();
    if (!client.responses_.emplace(id, std::move(responses)).second)
      throw data_error(where + ": duplicate pair_id \"" + id + "\"");
  });
  return client;
}

std::string OfflineChatClient::complete(const std::string& pair_id, const std::string&, int attempt) {
  const auto it = responses_.find(pair_id);
  if (it == responses_.end()) throw external_error("no offline response for pair \"" + pair_id + "\"");
  const auto& list = it->second;
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(attempt, 1)) - 1,
                                               list.size() - 1);
  return list[k];
}

namespace {

JudgeResult judge_pair(const ParaphrasePair& pair, ChatClient& client, int retries) {
  JudgeResult result;
  result.pair_id = pair.id;
  const std::string prompt = build_prompt(pair);
  const int max_attempts = 1 + std::max(retries, 0);
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    result.attempts = attempt;
    try {
      result.raw_response = client.complete(pair.id, prompt, attempt);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::External) throw;
      result.raw_response.clear();
      result.failure = Failure::Transport;
      result.detail = e.what();
      continue;
    } catch (const std::exception& e) {
      result.raw_response.clear();
      result.failure = Failure::Transport;
      result.detail = e.what();
      continue;
    }
    RatingParse parsed = parse_rating(result.raw_response);
    if (parsed.ok()) {
      result.rating = parsed.rating;
      result.failure.reset();
      result.detail.clear();
      return result;
    }
    result.failure = parsed.failure;
    result.detail = std::move(parsed.detail);
  }
  return result;
}

}  // namespace

JudgeRun judge_corpus(const Corpus& corpus, ChatClient& client, const RetryPolicy& policy) {
  JudgeRun run;
  run.results.resize(corpus.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < corpus.size() && !failed; i = next++) {
      try {
        run.results[i] = judge_pair(corpus[i], client, policy.retries);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    }
  };
  const std::size_t width = std::clamp<std::size_t>(policy.parallelism, 1, std::max<std::size_t>(corpus.size(), 1));
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(width);
    for (std::size_t t = 0; t < width; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (error) std::rethrow_exception(error);
  std::sort(run.results.begin(), run.results.end(),
            [](const JudgeResult& a, const JudgeResult& b) { return a.pair_id < b.pair_id; });
  run.aggregate = aggregate(run.results);
  return run;
}

std::string result_to_json(const JudgeResult& result, std::string_view system) {
  nlohmann::ordered_json rec;
  rec["pair_id"] = result.pair_id;
  rec["system"] = std::string(system);
  if (result.rating) {
    const auto& r = *result.rating;
    rec["rating"] = {{kRatingIds[0], r.semantic},
                     {kRatingIds[1], r.lexical},
                     {kRatingIds[2], r.syntactic},
                     {kRatingIds[3], r.grammatical}};
    rec["failure"] = nullptr;
  } else {
    rec["rating"] = nullptr;
    rec["failure"] = result.failure ? std::string(to_string(*result.failure)) : "transport";
  }
  rec["detail"] = result.detail;
  rec["raw_response"] = result.raw_response;
  rec["attempts"] = result.attempts;
  rec["prompt_version"] = std::string(kPromptVersion);
  return rec.dump(-1, ' ', false, json::error_handler_t::replace);
}

JudgeResult result_from_json(std::string_view line) {
  const json rec = json::parse(line, nullptr, false);
  if (rec.is_discarded() || !rec.is_object()) throw data_error("judge record is not a JSON object");
  JudgeResult r;
  r.pair_id = rec.value("pair_id", "");
  r.attempts = rec.value("attempts", 1);
  r.raw_response = rec.value("raw_response", "");
  r.detail = rec.value("detail", "");
  if (rec.contains("rating") && rec["rating"].is_object()) {
    std::array<int, 4> v{};
    for (std::size_t k = 0; k < 4; ++k) {
      const std::string id(kRatingIds[k]);
      if (!rec["rating"].contains(id) || !rec["rating"][id].is_number_integer())
        throw data_error("judge record \"" + r.pair_id + "\" lacks integer rating \"" + id + "\"");
      v[k] = rec["rating"][id].get<int>();
      if (v[k] < 1 || v[k] > 5)
        throw data_error("judge record \"" + r.pair_id + "\" has " + id + " outside 1-5");
    }
    r.rating = LikertRating{v[0], v[1], v[2], v[3]};
  } else {
    const auto f = rec.find("failure");
    r.failure = f != rec.end() && f->is_string() ? failure_from_string(f->get<std::string>())
                                                 : Failure::Transport;
  }
  return r;
}

}  // namespace paraeval::judge
