#include "tkc/strength.hpp"

#include <algorithm>
#include <limits>

#include "tkc/einsum.hpp"
#include "tkc/letters.hpp"

namespace tkc {

long multiplication_cost(const SparsityPattern& result) { return result.nnz(); }

long summation_cost(const SparsityPattern& operand, const SparsityPattern& result) {
  return operand.nnz() - result.nnz();
}

TermPatterns::TermPatterns(const std::vector<SrOperand>& ops) : ops_(ops) {}

LetterMask TermPatterns::letters_of(unsigned leaves) const {
  LetterMask m = 0;
  for (size_t i = 0; i < ops_.size(); ++i)
    if (leaves >> i & 1u) m |= letter_mask(ops_[i].idx);
  return m;
}

const SparsityPattern& TermPatterns::get(unsigned leaves, LetterMask letters) {
  auto key = std::make_pair(leaves, letters);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  std::vector<PatternOperand> po;
  for (size_t i = 0; i < ops_.size(); ++i)
    if (leaves >> i & 1u) po.emplace_back(&ops_[i].spp, ops_[i].idx);
  return cache_.emplace(key, contract_patterns(po, mask_letters(letters))).first->second;
}

long TermPatterns::nnz(unsigned leaves, LetterMask letters) {
  auto key = std::make_pair(leaves, letters);
  auto it = nnz_.find(key);
  if (it != nnz_.end()) return it->second;
  long v = get(leaves, letters).nnz();
  nnz_[key] = v;
  return v;
}

namespace {

using TermKey = std::pair<unsigned, LetterMask>;
using State = std::vector<TermKey>;

struct Action {
  bool summation = false;
  int i = -1, j = -1;
  char letter = 0;
};

struct Best {
  long cost = std::numeric_limits<long>::max();
  int count = 0;
  std::vector<std::string> seq;
  Action first;
  bool terminal = false;
};

bool seq_less(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  for (size_t k = 0; k < a.size() && k < b.size(); ++k) {
    if (a[k] == b[k]) continue;
    return letters_less(a[k], b[k]);
  }
  return a.size() < b.size();
}

bool better(long c, int n, const std::vector<std::string>& s, const Best& b) {
  if (c != b.cost) return c < b.cost;
  if (n != b.count) return n < b.count;
  return seq_less(s, b.seq);
}

class Search {
public:
  Search(TermPatterns& tp, LetterMask result) : tp_(tp), result_(result) {}

  State apply(const State& s, const Action& a, TermKey* made) const {
    State n;
    TermKey t;
    if (a.summation) {
      t = {s[a.i].first, s[a.i].second & ~(1ULL << letter_rank(a.letter))};
      for (size_t k = 0; k < s.size(); ++k)
        if (static_cast<int>(k) != a.i) n.push_back(s[k]);
    } else {
      t = {s[a.i].first | s[a.j].first, s[a.i].second | s[a.j].second};
      for (size_t k = 0; k < s.size(); ++k)
        if (static_cast<int>(k) != a.i && static_cast<int>(k) != a.j) n.push_back(s[k]);
    }
    n.push_back(t);
    std::sort(n.begin(), n.end());
    if (made) *made = t;
    return n;
  }

  long action_cost(const State& s, const Action& a, const TermKey& made) {
    if (a.summation) return tp_.nnz(s[a.i].first, s[a.i].second) - tp_.nnz(made.first, made.second);
    return tp_.nnz(made.first, made.second);
  }

  std::vector<Action> actions(const State& s) const {
    std::vector<Action> out;
    for (size_t i = 0; i < s.size(); ++i) {
      LetterMask others = result_;
      for (size_t k = 0; k < s.size(); ++k)
        if (k != i) others |= s[k].second;
      LetterMask free = s[i].second & ~others;
      for (int r = 0; r < 52; ++r)
        if (free >> r & 1ULL) {
          Action a;
          a.summation = true;
          a.i = static_cast<int>(i);
          a.letter = mask_letters(1ULL << r)[0];
          out.push_back(a);
        }
    }
    for (size_t i = 0; i < s.size(); ++i)
      for (size_t j = i + 1; j < s.size(); ++j) {
        Action a;
        a.i = static_cast<int>(i);
        a.j = static_cast<int>(j);
        out.push_back(a);
      }
    return out;
  }

  const Best& solve(const State& s) {
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    Best b;
    if (s.size() == 1 && s[0].second == result_) {
      b.cost = 0;
      b.terminal = true;
      return memo_.emplace(s, b).first->second;
    }
    for (const Action& a : actions(s)) {
      TermKey made;
      State n = apply(s, a, &made);
      long c = action_cost(s, a, made);
      const Best& sub = solve(n);
      std::vector<std::string> seq;
      seq.reserve(sub.seq.size() + 1);
      seq.push_back(mask_letters(made.second));
      seq.insert(seq.end(), sub.seq.begin(), sub.seq.end());
      if (better(c + sub.cost, sub.count + 1, seq, b)) {
        b.cost = c + sub.cost;
        b.count = sub.count + 1;
        b.seq = std::move(seq);
        b.first = a;
      }
    }
    return memo_.emplace(s, std::move(b)).first->second;
  }

private:
  TermPatterns& tp_;
  LetterMask result_;
  std::map<State, Best> memo_;
};

}  // namespace

Schedule reduce_schedule(const std::vector<SrOperand>& ops, const std::string& result) {
  if (ops.empty()) throw Error("EmptyEinsum", "no operands");
  if (ops.size() > 31) throw Error("TooManyOperands", "operand limit exceeded");
  TermPatterns tp(ops);
  const LetterMask rm = letter_mask(result);
  Search search(tp, rm);
  State s;
  std::vector<int> ids;
  for (size_t i = 0; i < ops.size(); ++i) s.emplace_back(1u << i, letter_mask(ops[i].idx));
  std::sort(s.begin(), s.end());
  for (const auto& t : s) ids.push_back(__builtin_ctz(t.first));
  Schedule sch;
  const long total = search.solve(s).cost;
  int next = static_cast<int>(ops.size());
  while (true) {
    const Best& b = search.solve(s);
    if (b.terminal) break;
    TermKey made;
    State n = search.apply(s, b.first, &made);
    Formula f;
    f.summation = b.first.summation;
    f.a = ids[b.first.i];
    if (!f.summation) f.b = ids[b.first.j];
    f.letter = b.first.letter;
    f.result = mask_letters(made.second);
    f.cost = search.action_cost(s, b.first, made);
    sch.formulas.push_back(f);
    // Rebuild ids in the sorted order of the new state.
    std::vector<std::pair<TermKey, int>> tagged;
    for (size_t k = 0; k < s.size(); ++k)
      if (static_cast<int>(k) != b.first.i && static_cast<int>(k) != b.first.j) tagged.emplace_back(s[k], ids[k]);
    tagged.emplace_back(made, next++);
    std::sort(tagged.begin(), tagged.end());
    ids.clear();
    for (const auto& t : tagged) ids.push_back(t.second);
    s = std::move(n);
  }
  sch.cost = total;
  return sch;
}

long naive_cost(const std::vector<SrOperand>& ops) {
  std::array<int, 52> size{};
  std::string all;
  for (const auto& o : ops)
    for (size_t d = 0; d < o.idx.size(); ++d) {
      size[letter_rank(o.idx[d])] = o.spp.extents()[d];
      all = letter_union(all, std::string(1, o.idx[d]));
    }
  long v = 1;
  for (char c : all) v *= size[letter_rank(c)];
  return static_cast<long>(ops.size()) * v;
}

NodePtr reduce(const NodePtr& einsum, long* cost) {
  std::vector<SrOperand> ops;
  for (const auto& k : einsum->kids) ops.push_back({k->idx, k->eqspp ? *k->eqspp : k->spp});
  Schedule sch = reduce_schedule(ops, einsum->idx);
  if (cost) *cost = sch.cost;
  TermPatterns tp(ops);
  std::vector<NodePtr> made(einsum->kids.begin(), einsum->kids.end());
  std::vector<unsigned> leaves;
  for (size_t i = 0; i < ops.size(); ++i) leaves.push_back(1u << i);
  for (const Formula& f : sch.formulas) {
    NodePtr n;
    unsigned lv;
    if (f.summation) {
      n = make_node(NodeKind::IndexSum, {made[f.a]}, f.result);
      n->summed = std::string(1, f.letter);
      lv = leaves[f.a];
    } else {
      n = make_node(NodeKind::Product, {made[f.a], made[f.b]}, f.result);
      lv = leaves[f.a] | leaves[f.b];
    }
    n->spp = tp.get(lv, letter_mask(f.result));
    made.push_back(n);
    leaves.push_back(lv);
  }
  NodePtr root = made.back();
  if (root->idx != einsum->idx) {
    if (root->kind == NodeKind::Product || root->kind == NodeKind::IndexSum) {
      root->spp = transpose(root->spp, root->idx, einsum->idx);
      root->idx = einsum->idx;
    } else {
      NodePtr p = make_node(NodeKind::Permute, {root}, einsum->idx);
      p->spp = transpose(root->eqspp ? *root->eqspp : root->spp, root->idx, einsum->idx);
      root = p;
    }
  }
  return root;
}

namespace {

std::string paren(const NodePtr& n, bool top) {
  switch (n->kind) {
    case NodeKind::Indexed:
      return n->tensor;
    case NodeKind::Permute:
    case NodeKind::IndexSum:
      return paren(n->kids[0], top);
    case NodeKind::Product:
    case NodeKind::Contraction:
    case NodeKind::LoG: {
      std::string s;
      for (const auto& k : n->kids) s += paren(k, false);
      return top ? s : "(" + s + ")";
    }
    default: {
      std::string s = kind_name(n->kind);
      s += "[";
      for (size_t i = 0; i < n->kids.size(); ++i) s += (i ? "," : "") + paren(n->kids[i], true);
      return s + "]";
    }
  }
}

}  // namespace

std::string parenthesize(const NodePtr& tree) { return paren(tree, true); }

}  // namespace tkc
