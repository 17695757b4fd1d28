#pragma once

#include <map>
#include <string>
#include <vector>

#include "tkc/ast.hpp"
#include "tkc/letters.hpp"
#include "tkc/spp.hpp"

namespace tkc {

struct SrOperand {
  std::string idx;
  SparsityPattern spp;  // over idx, already masked
};

struct Formula {
  bool summation = false;
  int a = -1, b = -1;   // operand ids; leaves are 0..n-1, formula i yields id n+i
  char letter = 0;      // summation letter
  std::string result;   // sorted result letters
  long cost = 0;
};

struct Schedule {
  std::vector<Formula> formulas;
  long cost = 0;
};

// Multiplication: nnz(result).  Summation: nnz(operand) - nnz(result).
long multiplication_cost(const SparsityPattern& result);
long summation_cost(const SparsityPattern& operand, const SparsityPattern& result);

// Memoises patterns of partial products keyed by (leaf set, kept letters).
class TermPatterns {
public:
  explicit TermPatterns(const std::vector<SrOperand>& ops);
  const SparsityPattern& get(unsigned leaves, LetterMask letters);
  long nnz(unsigned leaves, LetterMask letters);
  LetterMask letters_of(unsigned leaves) const;
  const std::vector<SrOperand>& ops() const { return ops_; }

private:
  std::vector<SrOperand> ops_;
  std::map<std::pair<unsigned, LetterMask>, SparsityPattern> cache_;
  std::map<std::pair<unsigned, LetterMask>, long> nnz_;
};

// Minimum-cost schedule over all pairings and summation placements.  Ties:
// fewer formulae, then lexicographically smaller sequence of result strings.
Schedule reduce_schedule(const std::vector<SrOperand>& ops, const std::string& result);

// Direct evaluation cost: one multiply per extra operand plus one
// accumulation for every point of the (nonzero) global index set.
long naive_cost(const std::vector<SrOperand>& ops);

// Rewrites an Einsum whose children carry patterns (leaf eqspp or subtree
// spp) into a binary Product/IndexSum tree.
NodePtr reduce(const NodePtr& einsum, long* cost = nullptr);

// Textual parenthesisation of a reduced tree, e.g. "(A(BC))".
std::string parenthesize(const NodePtr& tree);

}  // namespace tkc
