#include <algorithm>

#include "tkc/diag.hpp"
#include "tkc/spp.hpp"

namespace tkc {

long volume(const Extents& e) {
  long v = 1;
  for (int x : e) v *= x;
  return v;
}

long linear_index(const Extents& e, const MultiIndex& idx) {
  long off = 0, s = 1;
  for (size_t k = 0; k < e.size(); ++k) {
    off += idx[k] * s;
    s *= e[k];
  }
  return off;
}

MultiIndex unlinear_index(const Extents& e, long lin) {
  MultiIndex r(e.size());
  for (size_t k = 0; k < e.size(); ++k) {
    r[k] = static_cast<int>(lin % e[k]);
    lin /= e[k];
  }
  return r;
}

Extents permute_extents(const Extents& e, const std::vector<int>& perm) {
  Extents r(perm.size());
  for (size_t k = 0; k < perm.size(); ++k) r[k] = e[perm[k]];
  return r;
}

SparsityPattern::SparsityPattern(Extents ext, bool fill)
    : ext_(std::move(ext)), bits_(volume(ext_), fill ? 1 : 0) {}

long SparsityPattern::nnz() const { return std::count(bits_.begin(), bits_.end(), uint8_t(1)); }

SparsityPattern SparsityPattern::operator&(const SparsityPattern& o) const {
  if (ext_ != o.ext_) throw Error("ExtentMismatch", "pattern extents differ");
  SparsityPattern r(ext_);
  for (size_t i = 0; i < bits_.size(); ++i) r.bits_[i] = bits_[i] & o.bits_[i];
  return r;
}

SparsityPattern SparsityPattern::operator|(const SparsityPattern& o) const {
  if (ext_ != o.ext_) throw Error("ExtentMismatch", "pattern extents differ");
  SparsityPattern r(ext_);
  for (size_t i = 0; i < bits_.size(); ++i) r.bits_[i] = bits_[i] | o.bits_[i];
  return r;
}

bool SparsityPattern::subset_of(const SparsityPattern& o) const {
  if (ext_ != o.ext_) return false;
  for (size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !o.bits_[i]) return false;
  return true;
}

SparsityPattern SparsityPattern::permuted(const std::vector<int>& perm) const {
  SparsityPattern r(permute_extents(ext_, perm));
  MultiIndex src(ext_.size());
  for (long i = 0; i < r.size(); ++i) {
    MultiIndex dst = unlinear_index(r.ext_, i);
    for (size_t k = 0; k < perm.size(); ++k) src[perm[k]] = dst[k];
    r.bits_[i] = bits_[linear_index(ext_, src)];
  }
  return r;
}

Interval intersect(Interval a, Interval b) {
  Interval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (r.hi < r.lo) r.hi = r.lo;
  return r;
}

std::vector<Interval> bounding_box(const SparsityPattern& p) {
  const int d = p.rank();
  std::vector<Interval> box(d);
  std::vector<int> lo(d, 1 << 30), hi(d, -1);
  bool any = false;
  for (long i = 0; i < p.size(); ++i) {
    if (!p.lin(i)) continue;
    any = true;
    MultiIndex m = unlinear_index(p.extents(), i);
    for (int k = 0; k < d; ++k) {
      lo[k] = std::min(lo[k], m[k]);
      hi[k] = std::max(hi[k], m[k]);
    }
  }
  if (!any) return box;
  for (int k = 0; k < d; ++k) box[k] = Interval{lo[k], hi[k] + 1};
  return box;
}

}  // namespace tkc
