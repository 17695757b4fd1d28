#include "tkc/oracles.hpp"

#include <limits>
#include <map>

#include "tkc/einsum.hpp"
#include "tkc/letters.hpp"

namespace tkc {

namespace {

class SubsetRecursion {
public:
  explicit SubsetRecursion(const std::vector<SrOperand>& ops) : ops_(ops) {}

  LetterMask letters(unsigned s) const {
    LetterMask m = 0;
    for (size_t i = 0; i < ops_.size(); ++i)
      if (s >> i & 1u) m |= letter_mask(ops_[i].idx);
    return m;
  }

  long nnz(unsigned s, LetterMask keep) {
    auto key = std::make_pair(s, keep);
    auto it = nnz_.find(key);
    if (it != nnz_.end()) return it->second;
    std::vector<PatternOperand> po;
    for (size_t i = 0; i < ops_.size(); ++i)
      if (s >> i & 1u) po.emplace_back(&ops_[i].spp, ops_[i].idx);
    long v = contract_patterns(po, mask_letters(keep)).nnz();
    nnz_[key] = v;
    return v;
  }

  long best(unsigned s, LetterMask keep) {
    auto key = std::make_pair(s, keep);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    const long inf = std::numeric_limits<long>::max();
    long b = inf;
    const LetterMask all = letters(s);
    if ((s & (s - 1)) == 0 && keep == all) b = 0;
    // the last formula is a summation over one letter
    for (int r = 0; r < 52; ++r) {
      const LetterMask x = 1ULL << r;
      if (!(all & x) || (keep & x)) continue;
      long sub = best(s, keep | x);
      if (sub == inf) continue;
      b = std::min(b, sub + nnz(s, keep | x) - nnz(s, keep));
    }
    // the last formula is a product of two disjoint subterms
    for (unsigned s1 = (s - 1) & s; s1; s1 = (s1 - 1) & s) {
      const unsigned s2 = s & ~s1;
      if (s1 > s2) continue;
      const LetterMask m1 = letters(s1), m2 = letters(s2);
      const LetterMask shared = m1 & m2;
      if ((shared & ~keep) != 0) continue;
      const LetterMask k1 = m1 & (m2 | keep), k2 = m2 & (m1 | keep);
      if ((k1 | k2) != keep) continue;
      long a = best(s1, k1), c = best(s2, k2);
      if (a == inf || c == inf) continue;
      b = std::min(b, a + c + nnz(s, keep));
    }
    memo_[key] = b;
    return b;
  }

private:
  const std::vector<SrOperand>& ops_;
  std::map<std::pair<unsigned, LetterMask>, long> memo_, nnz_;
};

void collect(const NodePtr& n, std::vector<NodePtr>& out) {
  for (const auto& k : n->kids) collect(k, out);
  out.push_back(n);
}

}  // namespace

long sr_oracle(const std::vector<SrOperand>& ops, const std::string& result) {
  if (ops.empty()) throw Error("EmptyEinsum", "no operands");
  SubsetRecursion r(ops);
  return r.best((1u << ops.size()) - 1, letter_mask(result));
}

CostTuple configuration_oracle(const NodePtr& root, const PermContext& ctx, long cap) {
  std::vector<NodePtr> nodes;
  collect(root, nodes);
  std::vector<std::vector<std::string>> orders;
  for (const auto& n : nodes) {
    orders.push_back(candidate_orders(n));
    // any other order under the assignment is infinite by definition
    if (n->kind == NodeKind::Assign) orders[orders.size() - 2] = {n->kids[0]->idx};
  }
  long combos = 1;
  for (const auto& o : orders) {
    combos *= static_cast<long>(o.size());
    if (combos > cap) throw Error("SizeLimitExceeded", "configuration space too large for enumeration");
  }
  std::vector<size_t> pick(nodes.size(), 0);
  CostTuple best = CostTuple::infinite();
  Configuration c;
  while (true) {
    for (size_t i = 0; i < nodes.size(); ++i) c[nodes[i].get()] = orders[i][pick[i]];
    CostTuple t = configuration_cost(root, c, ctx);
    if (t < best) best = t;
    size_t d = 0;
    while (d < pick.size() && ++pick[d] == orders[d].size()) pick[d++] = 0;
    if (d == pick.size()) break;
  }
  return best;
}

}  // namespace tkc
