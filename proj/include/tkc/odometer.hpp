#pragma once

#include <array>
#include <vector>

namespace tkc {

// Walks all multi-indices of `ext` (first index fastest) while keeping
// N linear offsets in sync; offsets advance by stride[n][d] per step in d.
template <size_t N, class F>
void odometer(const std::vector<int>& ext, const std::array<std::vector<long>, N>& stride,
              std::array<long, N> base, F&& f) {
  const size_t d = ext.size();
  for (int e : ext)
    if (e <= 0) return;
  std::vector<int> idx(d, 0);
  std::array<long, N> off = base;
  for (;;) {
    f(idx, off);
    size_t k = 0;
    for (; k < d; ++k) {
      ++idx[k];
      for (size_t n = 0; n < N; ++n) off[n] += stride[n][k];
      if (idx[k] < ext[k]) break;
      for (size_t n = 0; n < N; ++n) off[n] -= stride[n][k] * ext[k];
      idx[k] = 0;
    }
    if (k == d) return;
  }
}

}  // namespace tkc
