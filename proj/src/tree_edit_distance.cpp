#include <algorithm>
#include <unordered_map>
#include <vector>

#include "paraeval/syntax.hpp"

namespace paraeval::syntax {

namespace {

// Postorder view of a tree, 1-based: label ids, leftmost leaf descendants
// and keyroots.
struct Postorder {
  std::vector<int> label{0};
  std::vector<std::size_t> leftmost{0};
  std::vector<std::size_t> keyroots;

  Postorder(const ParseTree& tree, std::unordered_map<std::string_view, int>& ids) {
    visit(tree, ids);
    const std::size_t n = label.size() - 1;
    // A keyroot is the highest node for its leftmost leaf.
    std::vector<bool> seen(n + 1, false);
    for (std::size_t i = n; i >= 1; --i) {
      if (!seen[leftmost[i]]) {
        seen[leftmost[i]] = true;
        keyroots.push_back(i);
      }
    }
    std::sort(keyroots.begin(), keyroots.end());
  }

  std::size_t size() const { return label.size() - 1; }

 private:
  std::size_t visit(const ParseTree& t, std::unordered_map<std::string_view, int>& ids) {
    std::size_t first_leaf = 0;
    for (const auto& c : t.children) {
      const std::size_t l = visit(c, ids);
      if (first_leaf == 0) first_leaf = l;
    }
    auto [it, inserted] = ids.try_emplace(t.label, static_cast<int>(ids.size()));
    label.push_back(it->second);
    if (first_leaf == 0) first_leaf = label.size() - 1;
    leftmost.push_back(first_leaf);
    return first_leaf;
  }
};

std::uint64_t zhang_shasha(const ParseTree& a, const ParseTree& b) {
  std::unordered_map<std::string_view, int> ids;
  const Postorder A(a, ids);
  const Postorder B(b, ids);
  const std::size_t n = A.size();
  const std::size_t m = B.size();

  std::vector<std::uint32_t> td((n + 1) * (m + 1), 0);
  std::vector<std::uint32_t> fd((n + 1) * (m + 1), 0);
  auto T = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return td[i * (m + 1) + j]; };
  auto F = [&](std::size_t i, std::size_t j) -> std::uint32_t& { return fd[i * (m + 1) + j]; };

  for (std::size_t i : A.keyroots) {
    for (std::size_t j : B.keyroots) {
      const std::size_t li = A.leftmost[i];
      const std::size_t lj = B.leftmost[j];
      F(li - 1, lj - 1) = 0;
      for (std::size_t di = li; di <= i; ++di) F(di, lj - 1) = F(di - 1, lj - 1) + 1;
      for (std::size_t dj = lj; dj <= j; ++dj) F(li - 1, dj) = F(li - 1, dj - 1) + 1;
      for (std::size_t di = li; di <= i; ++di) {
        for (std::size_t dj = lj; dj <= j; ++dj) {
          const std::uint32_t del = F(di - 1, dj) + 1;
          const std::uint32_t ins = F(di, dj - 1) + 1;
          if (A.leftmost[di] == li && B.leftmost[dj] == lj) {
            const std::uint32_t ren = F(di - 1, dj - 1) + (A.label[di] == B.label[dj] ? 0 : 1);
            F(di, dj) = std::min({del, ins, ren});
            T(di, dj) = F(di, dj);
          } else {
            const std::uint32_t sub = F(A.leftmost[di] - 1, B.leftmost[dj] - 1) + T(di, dj);
            F(di, dj) = std::min({del, ins, sub});
          }
        }
      }
    }
  }
  return T(n, m);
}

}  // namespace

std::uint64_t tree_edit_distance(const ParseTree& a, const ParseTree& b,
                                 std::optional<std::size_t> depth_limit) {
  if (depth_limit) return zhang_shasha(truncate(a, *depth_limit), truncate(b, *depth_limit));
  return zhang_shasha(a, b);
}

}  // namespace paraeval::syntax
