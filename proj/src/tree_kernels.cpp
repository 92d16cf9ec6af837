#include <cmath>

#include "paraeval/error.hpp"
#include "paraeval/syntax.hpp"
#include "syntax_internal.hpp"

namespace paraeval::syntax {

std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

EmbeddingVector distributed_tree_embedding(const ParseTree& tree, std::size_t dim, double lambda) {
  if (dim < 64) throw usage_error("distributed tree dimension must be >= 64");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw usage_error("lambda must be in (0, 1]");

  EmbeddingVector out;
  out.provider = "kermit*";
  out.values.assign(dim, 0.0);
  for (const auto& [canonical, size] : subtrees_with_size(tree)) {
    const double w = std::pow(lambda, static_cast<double>(size));
    std::uint64_t state = stable_hash(canonical) ^ kKermitSeed;
    for (std::size_t base = 0; base < dim; base += 64) {
      const std::uint64_t bits = splitmix64(state);
      const std::size_t end = std::min<std::size_t>(64, dim - base);
      for (std::size_t k = 0; k < end; ++k)
        out.values[base + k] += ((bits >> k) & 1) ? -w : w;
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& v : out.values) v *= scale;
  return out;
}

double kermit_diversity(const ParseTree& a, const ParseTree& b, std::size_t dim, double lambda) {
  const double c = cosine(distributed_tree_embedding(a, dim, lambda),
                          distributed_tree_embedding(b, dim, lambda));
  return std::clamp(1.0 - c, 0.0, 1.0);
}

}  // namespace paraeval::syntax
