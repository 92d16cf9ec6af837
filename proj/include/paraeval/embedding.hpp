#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace paraeval {

struct EmbeddingVector {
  std::vector<double> values;
  std::string provider;

  std::size_t dim() const noexcept { return values.size(); }
};

/// Sum(a_i b_i) / (|a| |b|), clamped to [-1, 1]. Dimension mismatch and zero
/// vectors are data errors.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

}  // namespace paraeval
