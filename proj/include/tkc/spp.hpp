#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tkc {

using Extents = std::vector<int>;
using MultiIndex = std::vector<int>;

long volume(const Extents& e);
// Column-major linear offset of idx within extents e.
long linear_index(const Extents& e, const MultiIndex& idx);
MultiIndex unlinear_index(const Extents& e, long lin);
// Permute extents: result dim k has extent e[perm[k]].
Extents permute_extents(const Extents& e, const std::vector<int>& perm);

// Boolean tensor over the index set of a tensor, stored column-major.
class SparsityPattern {
public:
  SparsityPattern() = default;
  explicit SparsityPattern(Extents ext, bool fill = false);

  static SparsityPattern dense(const Extents& ext) { return SparsityPattern(ext, true); }
  static SparsityPattern zeros(const Extents& ext) { return SparsityPattern(ext, false); }

  int rank() const { return static_cast<int>(ext_.size()); }
  const Extents& extents() const { return ext_; }
  long size() const { return static_cast<long>(bits_.size()); }
  long nnz() const;

  bool at(const MultiIndex& idx) const { return bits_[linear_index(ext_, idx)] != 0; }
  void set(const MultiIndex& idx, bool v = true) { bits_[linear_index(ext_, idx)] = v ? 1 : 0; }
  bool lin(long i) const { return bits_[i] != 0; }
  void set_lin(long i, bool v) { bits_[i] = v ? 1 : 0; }
  const std::vector<uint8_t>& bits() const { return bits_; }
  std::vector<uint8_t>& bits() { return bits_; }

  // Elementwise ops; extents must agree.
  SparsityPattern operator&(const SparsityPattern& o) const;
  SparsityPattern operator|(const SparsityPattern& o) const;
  bool subset_of(const SparsityPattern& o) const;
  // Result dim k is this dim perm[k].
  SparsityPattern permuted(const std::vector<int>& perm) const;

  bool operator==(const SparsityPattern& o) const { return ext_ == o.ext_ && bits_ == o.bits_; }
  bool operator!=(const SparsityPattern& o) const { return !(*this == o); }

private:
  Extents ext_;
  std::vector<uint8_t> bits_;
};

struct Interval {
  int lo = 0;
  int hi = 0;
  int size() const { return hi > lo ? hi - lo : 0; }
  bool empty() const { return hi <= lo; }
  bool operator==(const Interval& o) const { return lo == o.lo && hi == o.hi; }
};

Interval intersect(Interval a, Interval b);

// Tightest box around the nonzeros; all-zero yields [0,0) per axis.
std::vector<Interval> bounding_box(const SparsityPattern& p);

}  // namespace tkc
