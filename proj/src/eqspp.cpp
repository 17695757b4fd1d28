#include "tkc/eqspp.hpp"

#include "tkc/diag.hpp"
#include "tkc/letters.hpp"

namespace tkc {

EqsppResult compute_eqspp(const std::vector<PatternOperand>& ops, const std::string& target) {
  if (ops.empty()) throw Error("EmptyEinsum", "no operands");
  EqsppResult r;
  for (size_t k = 0; k < ops.size(); ++k) {
    const SparsityPattern& own = *ops[k].first;
    const std::string& idx = ops[k].second;
    std::vector<PatternOperand> others;
    std::string other_letters;
    for (size_t j = 0; j < ops.size(); ++j)
      if (j != k) {
        others.push_back(ops[j]);
        other_letters += ops[j].second;
      }
    if (others.empty()) {
      r.masks.push_back(own);
      continue;
    }
    // Patterns of everything else, summed down to the letters shared with T^k.
    const std::string shared = letters_in(idx, other_letters);
    SparsityPattern support;
    if (shared.empty()) {
      support = contract_patterns(others, "");
    } else {
      support = contract_patterns(others, shared);
    }
    std::vector<int> where;
    for (char c : shared) where.push_back(static_cast<int>(idx.find(c)));
    SparsityPattern mask(own.extents());
    MultiIndex sub(shared.size());
    for (long i = 0; i < own.size(); ++i) {
      if (!own.lin(i)) continue;
      MultiIndex q = unlinear_index(own.extents(), i);
      for (size_t s = 0; s < where.size(); ++s) sub[s] = q[where[s]];
      if (support.at(sub)) mask.set_lin(i, true);
    }
    r.masks.push_back(std::move(mask));
  }
  std::vector<PatternOperand> masked;
  for (size_t k = 0; k < ops.size(); ++k) masked.emplace_back(&r.masks[k], ops[k].second);
  r.result = contract_patterns(masked, target);
  return r;
}

bool check_minimality(const std::vector<PatternOperand>& ops, const std::string& /*target*/, const EqsppResult& r,
                      long cap) {
  std::vector<IndexedShape> shapes;
  for (const auto& [p, idx] : ops) shapes.emplace_back(p->extents(), idx);
  if (build_index_space(shapes).volume() > cap)
    throw Error("SizeLimitExceeded", "index space too large for the brute-force minimality check");
  // without cancellation a dropped product term changes U, so compare the
  // pattern of the product over the whole index space rather than over the target
  std::string all;
  for (const auto& op : ops)
    for (char c : op.second)
      if (all.find(c) == std::string::npos) all += c;
  std::vector<SparsityPattern> masks = r.masks;
  std::vector<PatternOperand> masked;
  for (size_t k = 0; k < ops.size(); ++k) masked.emplace_back(&masks[k], ops[k].second);
  const SparsityPattern base = spp_of_product(masked, all);
  for (size_t k = 0; k < masks.size(); ++k) {
    for (long i = 0; i < masks[k].size(); ++i) {
      if (!masks[k].lin(i)) continue;
      masks[k].set_lin(i, false);
      const bool changed = spp_of_product(masked, all) != base;
      masks[k].set_lin(i, true);
      if (!changed) return false;
    }
  }
  return true;
}

}  // namespace tkc
