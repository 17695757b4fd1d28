#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tkc/grid.hpp"
#include "tkc/tensor.hpp"

namespace tkc {

template <class T>
using ValueOperand = std::pair<const Grid<T>*, std::string>;
using PatternOperand = std::pair<const SparsityPattern*, std::string>;

// Reference evaluation by direct iteration over the global index set:
// U_i = sum over j in R_U(i) of prod_k T^k[pi_k(j)].
template <class T>
Grid<T> naive_einsum(const std::string& result, const std::vector<ValueOperand<T>>& ops);

// Boolean version of naive_einsum under (or, and).
SparsityPattern spp_of_product(const std::vector<PatternOperand>& ops, const std::string& result);

// Same semantics as the two above, evaluated as a sequence of pairwise
// contractions that sum letters out as soon as possible.  Used wherever
// the global index set is too large for direct iteration.
SparsityPattern contract_patterns(const std::vector<PatternOperand>& ops, const std::string& result);
template <class T>
Grid<T> contract_values(const std::vector<ValueOperand<T>>& ops, const std::string& result);

// Reorders dims: out letters `to` from a tensor indexed by `from`.
template <class T>
Grid<T> transpose(const Grid<T>& g, const std::string& from, const std::string& to);
SparsityPattern transpose(const SparsityPattern& p, const std::string& from, const std::string& to);

}  // namespace tkc
