#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "paraeval/corpus.hpp"
#include "paraeval/embedding.hpp"

namespace paraeval {

enum class ProviderKind { File, Http, TestHash };

std::string_view to_string(ProviderKind kind);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual const std::string& name() const = 0;
  virtual ProviderKind kind() const = 0;
  /// One vector per sentence, same order. Never zero-fills a miss.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> sentences) = 0;
};

/// Looks up precomputed vectors from JSONL {"text", "vector"} by exact text.
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  FileEmbeddingProvider(std::string name, const std::string& path);
  static FileEmbeddingProvider from_jsonl(std::string name, std::string_view content);

  const std::string& name() const override { return name_; }
  ProviderKind kind() const override { return ProviderKind::File; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> sentences) override;
  std::size_t size() const { return table_.size(); }

 private:
  FileEmbeddingProvider(std::string name, std::unordered_map<std::string, std::vector<double>> t);
  std::string name_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

struct HttpProviderConfig {
  std::string url;                     // e.g. http://localhost:8080/embed
  std::optional<std::size_t> dim;      // checked against every response
  std::string token_env = "PARAEVAL_EMBED_TOKEN";
  std::size_t batch_size = 64;
  int timeout_seconds = 60;
};

/// POST {"inputs": [...]} -> {"vectors": [[...], ...]}.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  HttpEmbeddingProvider(std::string name, HttpProviderConfig config);

  const std::string& name() const override { return name_; }
  ProviderKind kind() const override { return ProviderKind::Http; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> sentences) override;

 private:
  std::string name_;
  HttpProviderConfig config_;
};

/// Deterministic sparse bag of words for tests: each lexical token hashes to
/// one of `dim` coordinates and adds 1.
class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashEmbeddingProvider(std::string name, std::size_t dim = kDefaultDim);

  static constexpr std::size_t kDefaultDim = 2048;
  static std::size_t bucket(std::string_view token, std::size_t dim);

  const std::string& name() const override { return name_; }
  ProviderKind kind() const override { return ProviderKind::TestHash; }
  std::vector<EmbeddingVector> embed(std::span<const std::string> sentences) override;

 private:
  std::string name_;
  std::size_t dim_;
};

/// Parses `name=kind:location[;key=value...]`, e.g. `ada=file:emb.jsonl`,
/// `local=http:http://host:8080/embed;dim=768`, `bow=test_hash:`.
std::unique_ptr<EmbeddingProvider> make_provider(std::string_view spec);

/// In-run cache keyed by (provider, sentence); safe for concurrent use.
class EmbeddingCache {
 public:
  /// Embeds every sentence not yet cached for `provider`, in batches.
  void prefetch(EmbeddingProvider& provider, std::span<const std::string> sentences,
                std::size_t batch_size = 64);
  /// Returns the cached vector, embedding it on a miss.
  EmbeddingVector get(EmbeddingProvider& provider, const std::string& sentence);
  std::size_t size() const;

 private:
  static std::string key(const EmbeddingProvider& provider, std::string_view sentence);
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, EmbeddingVector> entries_;
};

/// cos(embed(source), embed(paraphrase)); similarity, not diversity.
double semantic_score(const ParaphrasePair& pair, EmbeddingProvider& provider,
                      EmbeddingCache* cache = nullptr);

}  // namespace paraeval
