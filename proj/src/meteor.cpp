#include <algorithm>
#include <limits>

#include "lexical_internal.hpp"

namespace paraeval::lexical::detail {

namespace {

// Search-node cap per stage; on exhaustion the best alignment found so far
// (the first one is the greedy left-to-right matching) is kept.
constexpr std::size_t kSearchBudget = 200000;

class StageSearch {
 public:
  StageSearch(std::vector<int>& hyp_to_ref, std::vector<char>& ref_used, const Ids& hyp_class,
              const Ids& ref_class)
      : hyp_to_ref_(hyp_to_ref), ref_used_(ref_used), hyp_class_(hyp_class) {
    std::uint32_t classes = 0;
    for (auto c : hyp_class) classes = std::max(classes, c + 1);
    for (auto c : ref_class) classes = std::max(classes, c + 1);
    refs_by_class_.resize(classes);
    hyp_left_.assign(classes, 0);
    quota_.assign(classes, 0);

    for (std::size_t r = 0; r < ref_class.size(); ++r)
      if (!ref_used_[r]) refs_by_class_[ref_class[r]].push_back(static_cast<int>(r));
    for (std::size_t h = 0; h < hyp_class.size(); ++h)
      if (hyp_to_ref_[h] < 0) ++hyp_left_[hyp_class[h]];
    for (std::size_t c = 0; c < classes; ++c)
      quota_[c] = std::min(hyp_left_[c], refs_by_class_[c].size());
  }

  void run() {
    std::size_t total = 0;
    for (auto q : quota_) total += q;
    if (total == 0) return;
    work_ = hyp_to_ref_;
    dfs(0, 0, -1);
    hyp_to_ref_ = best_;
    std::fill(ref_used_.begin(), ref_used_.end(), 0);
    for (int r : hyp_to_ref_)
      if (r >= 0) ref_used_[static_cast<std::size_t>(r)] = 1;
  }

 private:
  void dfs(std::size_t i, std::size_t chunks, int prev) {
    if (chunks >= best_chunks_) return;
    if (nodes_ >= kSearchBudget && !best_.empty()) return;
    ++nodes_;
    if (i == work_.size()) {
      best_chunks_ = chunks;
      best_ = work_;
      return;
    }
    auto step = [&](int r) { return (prev >= 0 && r == prev + 1) ? chunks : chunks + 1; };

    if (work_[i] >= 0) {  // fixed by an earlier stage
      dfs(i + 1, step(work_[i]), work_[i]);
      return;
    }
    const auto c = hyp_class_[i];
    --hyp_left_[c];
    if (quota_[c] > 0) {
      auto& refs = refs_by_class_[c];
      auto try_ref = [&](std::size_t k) {
        const int r = refs[k];
        if (r < 0 || ref_used_[static_cast<std::size_t>(r)]) return;
        ref_used_[static_cast<std::size_t>(r)] = 1;
        work_[i] = r;
        --quota_[c];
        dfs(i + 1, step(r), r);
        ++quota_[c];
        work_[i] = -1;
        ref_used_[static_cast<std::size_t>(r)] = 0;
      };
      // Continuing the current chunk first finds good bounds early.
      std::size_t continue_at = refs.size();
      for (std::size_t k = 0; k < refs.size(); ++k)
        if (prev >= 0 && refs[k] == prev + 1) continue_at = k;
      if (continue_at < refs.size()) try_ref(continue_at);
      for (std::size_t k = 0; k < refs.size(); ++k)
        if (k != continue_at) try_ref(k);
    }
    if (hyp_left_[c] >= quota_[c]) dfs(i + 1, chunks, -1);
    ++hyp_left_[c];
  }

  std::vector<int>& hyp_to_ref_;
  std::vector<char>& ref_used_;
  const Ids& hyp_class_;
  std::vector<std::vector<int>> refs_by_class_;
  std::vector<std::size_t> hyp_left_;
  std::vector<std::size_t> quota_;
  std::vector<int> work_;
  std::vector<int> best_;
  std::size_t best_chunks_ = std::numeric_limits<std::size_t>::max();
  std::size_t nodes_ = 0;
};

}  // namespace

MeteorAlignment meteor_align_ids(const Ids& ref, const Ids& hyp, const Ids& ref_stems,
                                 const Ids& hyp_stems) {
  std::vector<int> hyp_to_ref(hyp.size(), -1);
  std::vector<char> ref_used(ref.size(), 0);

  StageSearch(hyp_to_ref, ref_used, hyp, ref).run();
  MeteorAlignment out;
  for (int r : hyp_to_ref) out.exact_matches += r >= 0;

  StageSearch(hyp_to_ref, ref_used, hyp_stems, ref_stems).run();
  int prev = -1;
  for (int r : hyp_to_ref) {
    if (r >= 0) {
      ++out.matches;
      if (prev < 0 || r != prev + 1) ++out.chunks;
    }
    prev = r;
  }
  return out;
}

}  // namespace paraeval::lexical::detail
