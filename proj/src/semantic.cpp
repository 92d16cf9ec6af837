#include "paraeval/semantic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <json.hpp>
#include <mutex>

#include "file_io.hpp"
#include "http.hpp"
#include "paraeval/error.hpp"
#include "paraeval/syntax.hpp"
#include "paraeval/text.hpp"

namespace paraeval {

using json = nlohmann::json;

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim())
    throw data_error("cosine of vectors with different dimensions (" + std::to_string(a.dim()) +
                     " vs " + std::to_string(b.dim()) + ")");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw data_error("cosine of a zero vector");
  // sqrt(na * nb) rather than sqrt(na) * sqrt(nb): exact 1 for a == b.
  return std::clamp(dot / std::sqrt(na * nb), -1.0, 1.0);
}

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::File: return "file";
    case ProviderKind::Http: return "http";
    case ProviderKind::TestHash: return "test_hash";
  }
  return "unknown";
}

namespace {

std::vector<double> parse_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw data_error(where + ": vector must be a non-empty array");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) {
    if (!x.is_number()) throw data_error(where + ": vector entries must be numbers");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw data_error(where + ": vector entries must be finite");
    out.push_back(d);
  }
  return out;
}

std::string missing_list(const std::vector<std::string>& missing) {
  std::string out;
  const std::size_t shown = std::min<std::size_t>(missing.size(), 5);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) out += ", ";
    out += "\"" + missing[i] + "\"";
  }
  if (missing.size() > shown) out += ", ... (" + std::to_string(missing.size()) + " total)";
  return out;
}

}  // namespace

FileEmbeddingProvider::FileEmbeddingProvider(std::string name,
                                             std::unordered_map<std::string, std::vector<double>> t)
    : name_(std::move(name)), table_(std::move(t)) {}

FileEmbeddingProvider::FileEmbeddingProvider(std::string name, const std::string& path)
    : name_(std::move(name)) {
  table_ = from_jsonl(name_, detail::read_file(path)).table_;
}

FileEmbeddingProvider FileEmbeddingProvider::from_jsonl(std::string name, std::string_view content) {
  std::unordered_map<std::string, std::vector<double>> table;
  std::size_t dim = 0;
  detail::for_each_line(content, [&](std::size_t line_no, std::string_view line) {
    if (detail::is_blank(line)) return;
    const std::string where = "embedding file line " + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw data_error(where + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object() || !obj.contains("text") || !obj["text"].is_string() ||
        !obj.contains("vector"))
      throw data_error(where + ": expected {\"text\": str, \"vector\": [...]}");
    auto vec = parse_vector(obj["vector"], where);
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim)
      throw data_error(where + ": dimension " + std::to_string(vec.size()) + " differs from " +
                       std::to_string(dim));
    table.insert_or_assign(obj["text"].get<std::string>(), std::move(vec));
  });
  return FileEmbeddingProvider(std::move(name), std::move(table));
}

std::vector<EmbeddingVector> FileEmbeddingProvider::embed(std::span<const std::string> sentences) {
  std::vector<EmbeddingVector> out;
  std::vector<std::string> missing;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    auto it = table_.find(s);
    if (it == table_.end()) {
      missing.push_back(s);
      continue;
    }
    out.push_back({it->second, name_});
  }
  if (!missing.empty())
    throw data_error("provider '" + name_ + "': no vector for " + missing_list(missing));
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(std::string name, HttpProviderConfig config)
    : name_(std::move(name)), config_(std::move(config)) {
  if (config_.url.empty()) throw usage_error("http provider '" + name_ + "' needs a URL");
  if (config_.batch_size == 0) config_.batch_size = 1;
}

std::vector<EmbeddingVector> HttpEmbeddingProvider::embed(std::span<const std::string> sentences) {
  std::vector<std::pair<std::string, std::string>> headers;
  if (const char* token = std::getenv(config_.token_env.c_str()); token && *token)
    headers.emplace_back("Authorization", std::string("Bearer ") + token);

  std::vector<EmbeddingVector> out;
  out.reserve(sentences.size());
  std::optional<std::size_t> dim = config_.dim;
  for (std::size_t start = 0; start < sentences.size(); start += config_.batch_size) {
    const auto batch = sentences.subspan(start, std::min(config_.batch_size, sentences.size() - start));
    json request;
    request["inputs"] = json::array();
    for (const auto& s : batch) request["inputs"].push_back(s);

    const auto res = http::post_json(config_.url, request.dump(), headers, config_.timeout_seconds);
    if (res.status < 200 || res.status >= 300)
      throw external_error("provider '" + name_ + "': HTTP " + std::to_string(res.status));
    json body;
    try {
      body = json::parse(res.body);
    } catch (const json::parse_error&) {
      throw external_error("provider '" + name_ + "': response is not JSON");
    }
    if (!body.is_object() || !body.contains("vectors") || !body["vectors"].is_array())
      throw external_error("provider '" + name_ + "': response lacks \"vectors\"");
    const auto& vectors = body["vectors"];
    if (vectors.size() != batch.size())
      throw external_error("provider '" + name_ + "': got " + std::to_string(vectors.size()) +
                           " vectors for " + std::to_string(batch.size()) + " inputs");
    for (const auto& v : vectors) {
      std::vector<double> values;
      try {
        values = parse_vector(v, "provider '" + name_ + "'");
      } catch (const Error& e) {
        throw external_error(e.what());
      }
      if (!dim) dim = values.size();
      if (values.size() != *dim)
        throw external_error("provider '" + name_ + "': dimension mismatch (expected " +
                             std::to_string(*dim) + ", got " + std::to_string(values.size()) + ")");
      out.push_back({std::move(values), name_});
    }
  }
  return out;
}

HashEmbeddingProvider::HashEmbeddingProvider(std::string name, std::size_t dim)
    : name_(std::move(name)), dim_(dim) {
  if (dim_ == 0) throw usage_error("test_hash dimension must be >= 1");
}

std::size_t HashEmbeddingProvider::bucket(std::string_view token, std::size_t dim) {
  return static_cast<std::size_t>(syntax::stable_hash(token) % dim);
}

std::vector<EmbeddingVector> HashEmbeddingProvider::embed(std::span<const std::string> sentences) {
  std::vector<EmbeddingVector> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    EmbeddingVector v{std::vector<double>(dim_, 0.0), name_};
    for (const auto& tok : text::lexical_tokens(s).tokens) v.values[bucket(tok, dim_)] += 1.0;
    out.push_back(std::move(v));
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(std::string_view spec) {
  const auto eq = spec.find('=');
  const auto colon = spec.find(':', eq == std::string_view::npos ? 0 : eq);
  if (eq == std::string_view::npos || eq == 0 || colon == std::string_view::npos)
    throw usage_error("provider spec must look like name=kind:location, got '" +
                      std::string(spec) + "'");
  const std::string name(spec.substr(0, eq));
  const std::string kind(spec.substr(eq + 1, colon - eq - 1));
  std::string_view rest = spec.substr(colon + 1);

  std::string location(rest.substr(0, rest.find(';')));
  std::unordered_map<std::string, std::string> params;
  for (auto semi = rest.find(';'); semi != std::string_view::npos;) {
    const auto next = rest.find(';', semi + 1);
    std::string_view kv = rest.substr(semi + 1, next == std::string_view::npos ? next : next - semi - 1);
    const auto k = kv.find('=');
    if (k == std::string_view::npos) throw usage_error("provider option '" + std::string(kv) + "' needs key=value");
    params.emplace(std::string(kv.substr(0, k)), std::string(kv.substr(k + 1)));
    semi = next;
  }
  auto size_param = [&](const char* key) -> std::optional<std::size_t> {
    auto it = params.find(key);
    if (it == params.end()) return std::nullopt;
    try {
      return static_cast<std::size_t>(std::stoul(it->second));
    } catch (const std::exception&) {
      throw usage_error(std::string("provider option ") + key + " must be an integer");
    }
  };

  if (kind == "file") {
    if (location.empty()) throw usage_error("file provider '" + name + "' needs a path");
    return std::make_unique<FileEmbeddingProvider>(name, location);
  }
  if (kind == "http") {
    HttpProviderConfig cfg;
    cfg.url = location;
    cfg.dim = size_param("dim");
    if (auto it = params.find("token_env"); it != params.end()) cfg.token_env = it->second;
    if (auto b = size_param("batch")) cfg.batch_size = *b;
    return std::make_unique<HttpEmbeddingProvider>(name, cfg);
  }
  if (kind == "test_hash") {
    return std::make_unique<HashEmbeddingProvider>(
        name, size_param("dim").value_or(HashEmbeddingProvider::kDefaultDim));
  }
  throw usage_error("unknown provider kind '" + kind + "'");
}

std::string EmbeddingCache::key(const EmbeddingProvider& provider, std::string_view sentence) {
  std::string k = provider.name();
  k.push_back('\0');
  k += sentence;
  return k;
}

void EmbeddingCache::prefetch(EmbeddingProvider& provider, std::span<const std::string> sentences,
                              std::size_t batch_size) {
  std::vector<std::string> todo;
  {
    std::shared_lock lock(mutex_);
    std::unordered_map<std::string_view, bool> queued;
    for (const auto& s : sentences) {
      if (entries_.contains(key(provider, s)) || queued.contains(s)) continue;
      queued.emplace(s, true);
      todo.push_back(s);
    }
  }
  for (std::size_t start = 0; start < todo.size(); start += batch_size) {
    std::span<const std::string> batch(todo.data() + start, std::min(batch_size, todo.size() - start));
    auto vectors = provider.embed(batch);
    std::unique_lock lock(mutex_);
    for (std::size_t i = 0; i < batch.size(); ++i)
      entries_.insert_or_assign(key(provider, batch[i]), std::move(vectors[i]));
  }
}

EmbeddingVector EmbeddingCache::get(EmbeddingProvider& provider, const std::string& sentence) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key(provider, sentence)); it != entries_.end()) return it->second;
  }
  auto v = provider.embed(std::span<const std::string>(&sentence, 1));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.try_emplace(key(provider, sentence), std::move(v.front()));
  return it->second;
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

double semantic_score(const ParaphrasePair& pair, EmbeddingProvider& provider, EmbeddingCache* cache) {
  if (cache) return cosine(cache->get(provider, pair.source), cache->get(provider, pair.paraphrase));
  const std::string both[2] = {pair.source, pair.paraphrase};
  auto v = provider.embed(both);
  return cosine(v[0], v[1]);
}

}  // namespace paraeval
