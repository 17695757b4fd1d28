#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tkc/grid.hpp"
#include "tkc/spp.hpp"

namespace tkc {

enum class LayoutPolicy { Auto, Dense, BBox, Aligned, Csc };

const char* policy_name(LayoutPolicy p);

struct Tensor {
  std::string name;
  Extents shape;
  SparsityPattern spp;
  std::optional<Grid<double>> values;  // compile-time constant when set
  LayoutPolicy policy = LayoutPolicy::Auto;

  int rank() const { return static_cast<int>(shape.size()); }
  bool is_constant() const { return values.has_value(); }
};

bool valid_identifier(const std::string& s);

// Throws on invariant violations (bad name, extents, spp/values mismatch).
Tensor make_tensor(std::string name, Extents shape, std::optional<SparsityPattern> spp = std::nullopt,
                   std::optional<Grid<double>> values = std::nullopt,
                   LayoutPolicy policy = LayoutPolicy::Auto);

struct Scalar {
  std::string name;
  std::optional<double> value;  // literal when set
};

struct IndexSpace {
  std::string letters;  // ordered a..z, A..Z
  std::array<int, 52> sizes{};

  int size_of(char c) const;
  int position(char c) const;
  Extents extents() const;
  Extents extents_of(const std::string& s) const;
  long volume() const;
};

using IndexedShape = std::pair<Extents, std::string>;

// Errors: DuplicateIndexInTensor, RankMismatch, SizeMismatch.
IndexSpace build_index_space(const std::vector<IndexedShape>& tensors);

// Maps a global multi-index (over IndexSpace::letters) to a tensor multi-index.
struct Projection {
  std::vector<int> pos;
  Projection(const IndexSpace& g, const std::string& idx);
  MultiIndex apply(const MultiIndex& global) const;
};

}  // namespace tkc
