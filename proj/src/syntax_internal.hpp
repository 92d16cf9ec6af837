#pragma once

#include <string>
#include <utility>
#include <vector>

#include "paraeval/syntax.hpp"

namespace paraeval::syntax {

/// Unique (canonical string, node count) for every node-rooted subtree,
/// sorted by string.
std::vector<std::pair<std::string, std::size_t>> subtrees_with_size(const ParseTree& tree);

}  // namespace paraeval::syntax
