#include "tkc/layout.hpp"

#include <algorithm>

#include "tkc/diag.hpp"

namespace tkc {

const char* layout_kind_name(LayoutKind k) {
  switch (k) {
    case LayoutKind::Dense: return "dense";
    case LayoutKind::BBox: return "bbox";
    case LayoutKind::Csc: return "csc";
  }
  return "?";
}

long MemoryLayout::stored() const {
  if (kind == LayoutKind::Csc) return static_cast<long>(rowidx.size());
  long v = 1;
  for (const auto& iv : box) v *= iv.size();
  return v;
}

bool MemoryLayout::contains(const MultiIndex& i) const {
  if (static_cast<int>(i.size()) != rank()) return false;
  if (kind == LayoutKind::Csc) {
    if (i[1] < 0 || i[1] >= shape[1]) return false;
    for (int p = colptr[i[1]]; p < colptr[i[1] + 1]; ++p)
      if (rowidx[p] == i[0]) return true;
    return false;
  }
  for (int k = 0; k < rank(); ++k)
    if (i[k] < box[k].lo || i[k] >= box[k].hi) return false;
  return true;
}

long MemoryLayout::address(const MultiIndex& i) const {
  if (!contains(i)) {
    std::string s;
    for (size_t k = 0; k < i.size(); ++k) s += (k ? "," : "") + std::to_string(i[k]);
    throw Error("OutOfBox", "index (" + s + ") is not stored");
  }
  if (kind == LayoutKind::Csc) {
    for (int p = colptr[i[1]]; p < colptr[i[1] + 1]; ++p)
      if (rowidx[p] == i[0]) return p;
  }
  long off = 0;
  for (int k = 0; k < rank(); ++k) off += (i[k] - box[k].lo) * stride[k];
  return off;
}

Interval align_interval(Interval iv, int v) {
  if (v <= 1) return iv;
  return Interval{iv.lo - iv.lo % v, iv.hi + (v - iv.hi % v) % v};
}

MemoryLayout box_layout(const Extents& shape, std::vector<Interval> box, int align) {
  MemoryLayout l;
  l.kind = LayoutKind::BBox;
  l.shape = shape;
  l.align = align;
  for (auto& iv : box)
    if (iv.empty()) iv = Interval{0, 1};
  l.box = std::move(box);
  long s = 1;
  for (const auto& iv : l.box) {
    l.stride.push_back(s);
    s *= iv.size();
  }
  return l;
}

MemoryLayout assign_layout(const Extents& shape, const SparsityPattern& spp, LayoutPolicy policy, int v) {
  if (policy == LayoutPolicy::Csc) {
    if (shape.size() != 2) throw Error("CscRankError", "csc layout needs a rank-2 tensor");
    MemoryLayout l;
    l.kind = LayoutKind::Csc;
    l.shape = shape;
    l.colptr.push_back(0);
    for (int j = 0; j < shape[1]; ++j) {
      for (int i = 0; i < shape[0]; ++i)
        if (spp.at({i, j})) l.rowidx.push_back(i);
      l.colptr.push_back(static_cast<int>(l.rowidx.size()));
    }
    return l;
  }
  if (policy == LayoutPolicy::Dense) {
    std::vector<Interval> box;
    for (int n : shape) box.push_back(Interval{0, n});
    MemoryLayout l = box_layout(shape, box);
    l.kind = LayoutKind::Dense;
    return l;
  }
  std::vector<Interval> box = bounding_box(spp);
  bool empty = std::any_of(box.begin(), box.end(), [](const Interval& iv) { return iv.empty(); });
  if (empty)
    for (auto& iv : box) iv = Interval{0, 1};
  int a = policy == LayoutPolicy::BBox ? 1 : v;
  if (!box.empty()) box[0] = align_interval(box[0], a);
  return box_layout(shape, box, a);
}

MemoryLayout assign_layout(const Tensor& t, LayoutPolicy policy, int v) { return assign_layout(t.shape, t.spp, policy, v); }

bool can_fuse(const MemoryLayout& l, int a, int b) {
  if (l.kind == LayoutKind::Csc) return a == b;
  for (int i = a; i < b; ++i)
    if (l.stride[i + 1] != static_cast<long>(l.shape[i]) * l.stride[i]) return false;
  return true;
}

std::vector<double> pack(const MemoryLayout& l, const Grid<double>& g) {
  std::vector<double> out(l.stored(), 0.0);
  for (long i = 0; i < volume(l.shape); ++i) {
    MultiIndex m = unlinear_index(l.shape, i);
    if (l.contains(m)) out[l.address(m)] = g[i];
  }
  return out;
}

Grid<double> unpack(const MemoryLayout& l, const std::vector<double>& data) {
  Grid<double> g(l.shape);
  for (long i = 0; i < volume(l.shape); ++i) {
    MultiIndex m = unlinear_index(l.shape, i);
    if (l.contains(m)) g[i] = data[l.address(m)];
  }
  return g;
}

}  // namespace tkc
