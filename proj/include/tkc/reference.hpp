#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tkc/ast.hpp"
#include "tkc/grid.hpp"
#include "tkc/pipeline.hpp"

namespace tkc {

template <class T>
struct Values {
  std::map<std::string, Grid<T>> tensors;
  std::map<std::string, T> scalars;
};

std::set<std::string> tensors_of(const Kernel& k);
std::set<std::string> written_by(const Kernel& k);

// Constant tensors keep their values; all others get seeded random values
// on their pattern.  Symbolic scalars get values in [0.5, 1.5).
Values<double> make_inputs(const Family& fam, const Kernel& k, uint64_t seed);

template <class T>
Values<T> cast_values(const Values<double>& v);

// Statement-by-statement evaluation on dense grids via naive_einsum
// (pairwise contraction for very large index spaces).
template <class T>
void reference_run(const Family& fam, const Kernel& k, Values<T>& v);

// Packs operands by layout, runs the lowered kernel in the interpreter and
// unpacks every declared tensor back.  Returns the tallied flops.
template <class T>
long interpret_run(const FamilyResult& fr, const LoweredKernel& lk, Values<T>& v);

std::vector<double> pack_as(const MemoryLayout& l, const Grid<double>& g);

}  // namespace tkc
