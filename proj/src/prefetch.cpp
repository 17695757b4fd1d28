#include "tkc/prefetch.hpp"

#include <cstdlib>

namespace tkc {

PrefetchResult assign_prefetch(std::vector<PrefetchCandidate>& candidates, const std::vector<PrefetchRequest>& requests) {
  PrefetchResult r;
  std::vector<bool> used(candidates.size(), false);
  for (const auto& q : requests) {
    int best = -1;
    for (size_t i = 0; i < candidates.size(); ++i) {
      if (used[i]) continue;
      if (best < 0 || std::labs(candidates[i].capability - q.bytes) < std::labs(candidates[best].capability - q.bytes))
        best = static_cast<int>(i);
    }
    if (best < 0) {
      r.diags.push_back({"UnmatchedPrefetch", "no node left to prefetch " + q.tensor, 0, 0});
      continue;
    }
    used[best] = true;
    candidates[best].node->prefetch = q.tensor;
    r.matches.push_back({q.tensor, q.bytes, candidates[best].capability, best});
  }
  return r;
}

}  // namespace tkc
