#pragma once

#include <string>
#include <vector>

#include "tkc/spp.hpp"
#include "tkc/tensor.hpp"

namespace tkc {

enum class LayoutKind { Dense, BBox, Csc };

const char* layout_kind_name(LayoutKind k);

struct MemoryLayout {
  LayoutKind kind = LayoutKind::Dense;
  Extents shape;
  std::vector<Interval> box;  // stored interval per dimension
  std::vector<long> stride;
  int align = 1;
  // Csc only: column pointers and row indices of the stored entries.
  std::vector<int> colptr;
  std::vector<int> rowidx;

  int rank() const { return static_cast<int>(shape.size()); }
  long stored() const;  // number of storage slots
  bool contains(const MultiIndex& i) const;
  // Errors: OutOfBox.
  long address(const MultiIndex& i) const;
};

// [b - b mod v, B + (v - B mod v) mod v)
Interval align_interval(Interval iv, int v);

// Box-shaped layout from explicit intervals; strides are products of the
// interval sizes.
MemoryLayout box_layout(const Extents& shape, std::vector<Interval> box, int align = 1);

// Layout for a pattern under a policy.  Auto is treated as Aligned here;
// callers resolve Auto beforehand.  Errors: CscRankError.
MemoryLayout assign_layout(const Extents& shape, const SparsityPattern& spp, LayoutPolicy policy, int v = 1);
MemoryLayout assign_layout(const Tensor& t, LayoutPolicy policy, int v = 1);

// Dims a..b (0-based, inclusive) may be flattened iff t_{i+1} = n_i t_i.
bool can_fuse(const MemoryLayout& l, int a, int b);

// Copies a dense grid into storage order; padded slots are zero.
std::vector<double> pack(const MemoryLayout& l, const Grid<double>& g);
Grid<double> unpack(const MemoryLayout& l, const std::vector<double>& data);

}  // namespace tkc
