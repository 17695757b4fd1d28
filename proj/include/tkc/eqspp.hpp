#pragma once

#include <string>
#include <vector>

#include "tkc/einsum.hpp"
#include "tkc/spp.hpp"

namespace tkc {

struct EqsppResult {
  std::vector<SparsityPattern> masks;  // one per operand, same layout as the operand
  SparsityPattern result;              // pattern of the masked operation over the target
};

// Equivalent sparsity patterns of sum over R_U(i) of prod_k T^k.
EqsppResult compute_eqspp(const std::vector<PatternOperand>& ops, const std::string& target);

// Brute-force check that no single mask entry can be dropped without
// changing the result pattern.  Errors: SizeLimitExceeded.
bool check_minimality(const std::vector<PatternOperand>& ops, const std::string& target, const EqsppResult& r,
                      long cap = 1L << 20);

}  // namespace tkc
