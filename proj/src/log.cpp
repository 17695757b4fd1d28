#include "tkc/log.hpp"

#include <algorithm>

#include "tkc/einsum.hpp"
#include "tkc/letters.hpp"

namespace tkc {

CostTuple CostTuple::operator+(const CostTuple& o) const {
  if (inf || o.inf) return infinite();
  CostTuple c;
  c.s = s + o.s;
  c.l = l + o.l;
  c.r = r + o.r;
  c.f = f + o.f;
  return c;
}

bool CostTuple::operator==(const CostTuple& o) const {
  if (inf || o.inf) return inf == o.inf;
  return s == o.s && l == o.l && r == o.r && f == o.f;
}

std::string CostTuple::str() const {
  if (inf) return "inf";
  return "(" + std::to_string(s) + "," + std::to_string(l) + "," + std::to_string(r) + "," + std::to_string(-f) + ")";
}

bool operator<(const CostTuple& a, const CostTuple& b) {
  if (a.inf || b.inf) return !a.inf && b.inf;
  if (a.s != b.s) return a.s < b.s;
  if (a.l + a.r != b.l + b.r) return a.l + a.r < b.l + b.r;
  if (a.f != b.f) return a.f > b.f;
  return a.l < b.l;
}

std::string LogPlan::str(const std::string& result_idx, const std::string& left_name,
                         const std::string& right_name) const {
  std::string s;
  size_t i = 0;
  while (i < result_idx.size()) {
    char c = result_idx[i];
    if (has_letter(batch, c)) {
      s += std::string("[") + c + "]";
      ++i;
      continue;
    }
    const std::string& g = has_letter(m, c) ? m : n;
    if (g.size() >= 2) {
      s += "(" + g + ")";
      i += g.size();
    } else {
      s += c;
      ++i;
    }
  }
  std::string l = swap ? right_name : left_name;
  std::string r = swap ? left_name : right_name;
  s += " = " + l + (trans_left ? "^T" : "") + " " + r + (trans_right ? "^T" : "");
  if (csc_right) s += " (csc)";
  return s;
}

namespace {

Interval stored_interval(const MemoryLayout& l, int d) {
  if (l.kind == LayoutKind::Csc) return Interval{0, l.shape[d]};
  return l.box[d];
}

int extent_of(const LogOperand& a, const LogOperand& b, const LogOperand& c, char x) {
  for (const LogOperand* o : {&a, &b, &c}) {
    size_t p = o->idx.find(x);
    if (p != std::string::npos) return o->layout->shape[p];
  }
  return 0;
}

}  // namespace

RangeMap effective_ranges(const LogOperand& a, const LogOperand& b, const LogOperand& c, const RangeMap& region) {
  RangeMap out;
  std::string all = letter_union(letter_union(a.idx, b.idx), c.idx);
  for (char x : all) {
    Interval iv{0, extent_of(a, b, c, x)};
    for (const LogOperand* o : {&a, &b, &c}) {
      size_t p = o->idx.find(x);
      if (p != std::string::npos) iv = intersect(iv, stored_interval(*o->layout, static_cast<int>(p)));
    }
    if (has_letter(c.idx, x)) {
      auto it = region.find(x);
      if (it != region.end()) iv = intersect(iv, it->second);
    }
    out[x] = iv;
  }
  return out;
}

RangeMap region_of(const std::string& idx, const SparsityPattern& spp) {
  RangeMap r;
  std::vector<Interval> box = bounding_box(spp);
  for (size_t d = 0; d < idx.size(); ++d) r[idx[d]] = box[d];
  return r;
}

namespace {

NodePtr sum_over(const NodePtr& kid, char x) {
  NodePtr s = make_node(NodeKind::IndexSum, {kid}, letters_not_in(kid->idx, std::string(1, x)));
  s->summed = std::string(1, x);
  s->spp = contract_patterns({{&kid->spp, kid->idx}}, s->idx);
  return s;
}

}  // namespace

NodePtr find_contractions(const NodePtr& tree) {
  if (tree->kind == NodeKind::IndexSum) {
    std::string sums;
    NodePtr base = tree;
    while (base->kind == NodeKind::IndexSum) {
      sums = base->summed + sums;  // bottom-up order
      base = base->kids[0];
    }
    if (base->kind == NodeKind::Product) {
      NodePtr l = find_contractions(base->kids[0]);
      NodePtr r = find_contractions(base->kids[1]);
      std::string k, rest;
      for (char x : sums) (has_letter(l->idx, x) && has_letter(r->idx, x) ? k : rest) += x;
      if (!k.empty()) {
        NodePtr c = make_node(NodeKind::Contraction, {l, r}, letters_not_in(base->idx, k));
        c->summed = sorted_letters(k);
        c->spp = contract_patterns({{&base->spp, base->idx}}, c->idx);
        NodePtr top = c;
        for (char x : rest) top = sum_over(top, x);
        return top;
      }
      base->kids = {l, r};
    }
  }
  for (auto& k : tree->kids) k = find_contractions(k);
  return tree;
}

namespace {

struct Roles {
  const LogOperand* gl;
  const LogOperand* gr;
};

std::string non_batched(const std::string& idx, const std::string& batch) { return letters_not_in(idx, batch); }

bool starts_with(const std::string& s, const std::string& p) { return s.compare(0, p.size(), p) == 0; }
bool ends_with(const std::string& s, const std::string& p) {
  return s.size() >= p.size() && s.compare(s.size() - p.size(), p.size(), p) == 0;
}

}  // namespace

bool fusable_group(const LogOperand& o, const std::string& g, const RangeMap& ranges) {
  if (g.size() < 2) return true;
  size_t p = o.idx.find(g);
  if (p == std::string::npos) return false;
  if (!can_fuse(*o.layout, static_cast<int>(p), static_cast<int>(p + g.size() - 1))) return false;
  for (size_t i = 0; i + 1 < g.size(); ++i) {
    const Interval& iv = ranges.at(g[i]);
    if (iv.lo != 0 || iv.hi != o.layout->shape[p + i]) return false;
  }
  return true;
}

namespace {

bool group_ok(const LogOperand& o, const std::string& g, const RangeMap& ranges) { return fusable_group(o, g, ranges); }

bool leads_batched(const LogOperand& o, char b, const std::string& batch) {
  std::string nb = non_batched(o.idx, batch);
  if (nb.empty()) return false;
  size_t pb = o.idx.find(b);
  return pb != std::string::npos && pb < o.idx.find(nb[0]);
}

std::optional<LogPlan> try_plan(const Roles& ro, const LogOperand& c, const std::string& batch, const std::string& mset,
                                const std::string& nset, const std::string& kset, const RangeMap& ranges, bool swap) {
  const LogOperand& gl = *ro.gl;
  const LogOperand& gr = *ro.gr;
  std::string cs = non_batched(c.idx, batch);
  size_t split = 0;
  while (split < cs.size() && has_letter(mset, cs[split])) ++split;
  std::string m = cs.substr(0, split), n = cs.substr(split);
  for (char x : n)
    if (!has_letter(nset, x)) return std::nullopt;
  LogPlan p;
  p.swap = swap;
  p.m = m;
  p.n = n;
  p.batch = letters_in(c.idx, batch);
  std::string ls = non_batched(gl.idx, batch);
  std::string k;
  if (m.empty()) {
    k = ls;
  } else if (starts_with(ls, m)) {
    k = ls.substr(m.size());
  } else if (ends_with(ls, m)) {
    k = ls.substr(0, ls.size() - m.size());
    p.trans_left = true;
  } else {
    return std::nullopt;
  }
  if (!same_letter_set(k, kset) || k.empty()) return std::nullopt;
  if (p.trans_left && k.empty()) return std::nullopt;
  std::string rs = non_batched(gr.idx, batch);
  if (rs == k + n) {
  } else if (!n.empty() && rs == n + k) {
    p.trans_right = true;
  } else {
    return std::nullopt;
  }
  p.k = k;
  if (gr.layout->kind == LayoutKind::Csc) {
    if (!batch.empty() || p.trans_right || k.size() != 1 || n.size() != 1) return std::nullopt;
    p.csc_right = true;
  }
  if (!group_ok(gl, m, ranges) || !group_ok(c, m, ranges) || !group_ok(gr, n, ranges) || !group_ok(c, n, ranges) ||
      !group_ok(gl, k, ranges) || !group_ok(gr, k, ranges))
    return std::nullopt;
  for (char b : p.batch)
    if (leads_batched(gl, b, batch) || leads_batched(gr, b, batch) || leads_batched(c, b, batch)) ++p.cost.s;
  p.cost.l = p.trans_left;
  p.cost.r = p.trans_right;
  auto fused = [](const std::string& g) { return g.empty() ? 0L : static_cast<long>(g.size()) - 1; };
  p.cost.f = fused(m) + fused(n) + fused(k);
  return p;
}

}  // namespace

std::vector<LogPlan> enumerate_logs(const LogOperand& a, const LogOperand& b, const LogOperand& c,
                                    const std::string& contracted, const RangeMap& region) {
  std::vector<LogPlan> out;
  if (c.layout->kind == LayoutKind::Csc || contracted.empty()) return out;
  RangeMap ranges = effective_ranges(a, b, c, region);
  for (bool swap : {false, true}) {
    Roles ro{swap ? &b : &a, swap ? &a : &b};
    if (ro.gl->layout->kind == LayoutKind::Csc) continue;
    std::string h, mset, nset;
    for (char x : c.idx) {
      bool inl = has_letter(ro.gl->idx, x), inr = has_letter(ro.gr->idx, x);
      if (inl && inr) h += x;
      else if (inl) mset += x;
      else if (inr) nset += x;
    }
    // every operand letter must be free or contracted
    bool ok = true;
    for (const LogOperand* o : {ro.gl, ro.gr})
      for (char x : o->idx)
        if (!has_letter(c.idx, x) && !has_letter(contracted, x)) ok = false;
    if (!ok) continue;
    std::string optional_batch = letters_in(c.idx, mset + nset);
    const unsigned nsub = 1u << optional_batch.size();
    for (unsigned mask = 0; mask < nsub; ++mask) {
      std::string batch = h;
      for (size_t i = 0; i < optional_batch.size(); ++i)
        if (mask >> i & 1u) batch += optional_batch[i];
      std::string ms = letters_not_in(mset, batch), ns = letters_not_in(nset, batch);
      auto p = try_plan(ro, c, batch, ms, ns, contracted, ranges, swap);
      if (p) out.push_back(*p);
    }
  }
  return out;
}

CostTuple min_log(const LogOperand& a, const LogOperand& b, const LogOperand& c, const std::string& contracted,
                  const RangeMap& region, LogPlan* best) {
  CostTuple m = CostTuple::infinite();
  for (const LogPlan& p : enumerate_logs(a, b, c, contracted, region))
    if (p.cost < m) {
      m = p.cost;
      if (best) *best = p;
    }
  return m;
}

}  // namespace tkc
