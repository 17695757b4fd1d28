#include "tkc/lowered.hpp"

#include <algorithm>

#include "tkc/diag.hpp"
#include "tkc/letters.hpp"

namespace tkc {

long instr_flops(const Instr& in) {
  if (const auto* g = std::get_if<GemmInstr>(&in)) {
    long batches = 1;
    for (int c : g->batch_count) batches *= c;
    // A non-unit alpha costs one multiplication per stored result.
    const long scale = g->alpha.is_one() ? 0 : 1;
    if (!g->csc) return (2 * g->M * g->N * g->K + scale * g->M * g->N) * batches;
    long nnz = 0;
    for (int col = g->n_lo; col < g->n_hi; ++col)
      for (int p = g->colptr[col]; p < g->colptr[col + 1]; ++p)
        if (g->rowidx[p] >= g->k_lo && g->rowidx[p] < g->k_hi) ++nnz;
    return 2 * g->M * nnz + scale * g->M * std::max(0, g->n_hi - g->n_lo);
  }
  if (const auto* n = std::get_if<NestInstr>(&in)) {
    long elems = 1;
    for (int c : n->count) elems *= c;
    long per = (n->alpha.is_one() ? 0 : 1) + (n->accumulate ? 1 : 0);
    if (n->kind == NestInstr::Product) per += 1;
    if (n->kind == NestInstr::Sum) per += n->sum_count;
    return elems * per;
  }
  return 0;
}

namespace {

long stride_of(const LogOperand& o, char x) {
  size_t p = o.idx.find(x);
  return p == std::string::npos ? 0 : o.layout->stride[p];
}

long base_of(const LogOperand& o, const RangeMap& r) {
  if (o.layout->kind == LayoutKind::Csc) return 0;
  long b = 0;
  for (size_t d = 0; d < o.idx.size(); ++d) b += (r.at(o.idx[d]).lo - o.layout->box[d].lo) * o.layout->stride[d];
  return b;
}

long group_size(const std::string& g, const RangeMap& r) {
  long s = 1;
  for (char x : g) s *= r.at(x).size();
  return s;
}

long group_stride(const LogOperand& o, const std::string& g) { return g.empty() ? 0 : stride_of(o, g[0]); }

bool covers(const LogOperand& o, const RangeMap& r) {
  for (size_t d = 0; d < o.idx.size(); ++d)
    if (!(r.at(o.idx[d]) == o.layout->box[d])) return false;
  return true;
}

}  // namespace

std::optional<GemmInstr> instantiate_log(const LogPlan& plan, const LogOperand& a, const LogOperand& b,
                                         const LogOperand& c, const RangeMap& region, RangeMap* ranges_out) {
  const LogOperand& gl = plan.swap ? b : a;
  const LogOperand& gr = plan.swap ? a : b;
  if (c.layout->kind == LayoutKind::Csc || gl.layout->kind == LayoutKind::Csc) return std::nullopt;
  if ((gr.layout->kind == LayoutKind::Csc) != plan.csc_right) return std::nullopt;
  std::string ls = letters_not_in(gl.idx, plan.batch), rs = letters_not_in(gr.idx, plan.batch),
              cs = letters_not_in(c.idx, plan.batch);
  if (cs != plan.m + plan.n) return std::nullopt;
  if (ls != (plan.trans_left ? plan.k + plan.m : plan.m + plan.k)) return std::nullopt;
  if (rs != (plan.trans_right ? plan.n + plan.k : plan.k + plan.n)) return std::nullopt;
  for (char x : plan.batch)
    if (!has_letter(c.idx, x)) return std::nullopt;
  RangeMap r = effective_ranges(a, b, c, region);
  if (!fusable_group(gl, plan.m, r) || !fusable_group(c, plan.m, r) || !fusable_group(gr, plan.n, r) ||
      !fusable_group(c, plan.n, r) || !fusable_group(gl, plan.k, r) || !fusable_group(gr, plan.k, r))
    return std::nullopt;
  if (ranges_out) *ranges_out = r;
  GemmInstr g;
  g.M = group_size(plan.m, r);
  g.N = group_size(plan.n, r);
  g.K = group_size(plan.k, r);
  g.a_m = group_stride(gl, plan.m);
  g.a_k = group_stride(gl, plan.k);
  g.c_m = group_stride(c, plan.m);
  g.c_n = group_stride(c, plan.n);
  g.base_a = base_of(gl, r);
  g.base_c = base_of(c, r);
  for (char x : plan.batch) {
    g.batch_count.push_back(r.at(x).size());
    g.batch_a.push_back(stride_of(gl, x));
    g.batch_b.push_back(stride_of(gr, x));
    g.batch_c.push_back(stride_of(c, x));
  }
  if (plan.csc_right) {
    g.csc = true;
    g.colptr = gr.layout->colptr;
    g.rowidx = gr.layout->rowidx;
    g.k_lo = r.at(plan.k[0]).lo;
    g.k_hi = r.at(plan.k[0]).hi;
    g.n_lo = r.at(plan.n[0]).lo;
    g.n_hi = r.at(plan.n[0]).hi;
  } else {
    g.b_k = group_stride(gr, plan.k);
    g.b_n = group_stride(gr, plan.n);
    g.base_b = base_of(gr, r);
  }
  return g;
}

namespace {

LogOperand operand(const CfgProgram& p, const Operand& o) { return {o.idx, &p.vars.at(o.var).layout}; }

RangeMap nest_ranges(const std::vector<LogOperand>& ops, const std::string& letters, const RangeMap* region) {
  RangeMap r;
  for (char x : letters) {
    Interval iv{0, 1 << 30};
    for (const auto& o : ops) {
      size_t p = o.idx.find(x);
      if (p == std::string::npos) continue;
      if (o.layout->kind == LayoutKind::Csc) throw Error("CscUsage", "csc tensors may only be GEMM right operands");
      iv = intersect(iv, intersect(o.layout->box[p], Interval{0, o.layout->shape[p]}));
    }
    if (region && region->count(x)) iv = intersect(iv, region->at(x));
    r[x] = iv;
  }
  return r;
}

}  // namespace

bool log_legal(const CfgProgram& p, const Action& a) {
  if (a.kind != OpKind::Log) return true;
  RangeMap r;
  auto g = instantiate_log(*a.node->plan, operand(p, a.args[0]), operand(p, a.args[1]), operand(p, a.lhs),
                           region_of(a.node->idx, a.node->spp), &r);
  if (!g) return false;
  return !a.ranges || *a.ranges == r;
}

std::vector<Instr> lower_action(const CfgProgram& p, const Action& a) {
  std::vector<Instr> out;
  LogOperand c = operand(p, a.lhs);
  auto zero_if_partial = [&](const RangeMap& r) {
    if (!a.add && !covers(c, r)) out.push_back(ZeroInstr{a.lhs.var});
  };
  if (a.kind == OpKind::Log) {
    RangeMap r;
    auto g = instantiate_log(*a.node->plan, operand(p, a.args[0]), operand(p, a.args[1]), c,
                             region_of(a.node->idx, a.node->spp), &r);
    if (!g) throw Error("Internal", "LoG plan not realisable for " + dump(a));
    const LogPlan& plan = *a.node->plan;
    g->a = (plan.swap ? a.args[1] : a.args[0]).var;
    g->b = (plan.swap ? a.args[0] : a.args[1]).var;
    g->c = a.lhs.var;
    g->alpha = a.alpha;
    g->accumulate = a.add;
    zero_if_partial(r);
    out.push_back(*g);
    return out;
  }
  NestInstr n;
  n.out = a.lhs.var;
  n.alpha = a.alpha;
  n.accumulate = a.add;
  std::vector<LogOperand> ops{c};
  for (const auto& o : a.args) ops.push_back(operand(p, o));
  RangeMap region;
  if (a.node) region = region_of(a.node->idx, a.node->spp);
  std::string all = a.lhs.idx;
  for (const auto& o : a.args) all = letter_union(all, o.idx);
  RangeMap r = nest_ranges(ops, all, a.node ? &region : nullptr);
  n.a = a.args[0].var;
  n.base_out = base_of(c, r);
  n.base_a = base_of(ops[1], r);
  if (a.kind == OpKind::Product) {
    n.kind = NestInstr::Product;
    n.b = a.args[1].var;
    n.base_b = base_of(ops[2], r);
  } else if (a.kind == OpKind::IndexSum) {
    n.kind = NestInstr::Sum;
    char s = a.node->summed[0];
    n.sum_count = r.at(s).size();
    n.sum_a = stride_of(ops[1], s);
  }
  for (char x : a.lhs.idx) {
    n.count.push_back(r.at(x).size());
    n.s_out.push_back(stride_of(c, x));
    n.s_a.push_back(stride_of(ops[1], x));
    n.s_b.push_back(a.kind == OpKind::Product ? stride_of(ops[2], x) : 0);
  }
  zero_if_partial(r);
  out.push_back(n);
  return out;
}

LoweredKernel lower_program(const CfgProgram& p) {
  LoweredKernel k;
  k.name = p.kernel;
  std::map<std::string, std::string> rename;
  for (const auto& [name, v] : p.vars)
    if (!v.temp) {
      k.storage.push_back({name, v.layout.stored(), false});
      rename[name] = name;
    }
  if (!p.buffers.empty()) {
    for (size_t b = 0; b < p.buffers.size(); ++b) {
      std::string bn = "_buf" + std::to_string(b);
      k.storage.push_back({bn, p.buffers[b].elements, true});
      for (const auto& v : p.buffers[b].vars) rename[v] = bn;
    }
  } else {
    for (const auto& [name, v] : p.vars)
      if (v.temp) {
        k.storage.push_back({name, v.layout.stored(), true});
        rename[name] = name;
      }
  }
  auto rn = [&](std::string& s) {
    if (!s.empty()) s = rename.at(s);
  };
  for (const Action& a : p.actions) {
    LoweredAction la;
    la.text = dump(a);
    la.kind = a.kind;
    la.prefetch = a.prefetch;
    la.instrs = lower_action(p, a);
    for (Instr& in : la.instrs) {
      if (auto* z = std::get_if<ZeroInstr>(&in)) rn(z->var);
      if (auto* g = std::get_if<GemmInstr>(&in)) {
        rn(g->a);
        rn(g->b);
        rn(g->c);
      }
      if (auto* n = std::get_if<NestInstr>(&in)) {
        rn(n->out);
        rn(n->a);
        rn(n->b);
      }
      la.flops += instr_flops(in);
    }
    k.hardware_flops += la.flops;
    k.actions.push_back(std::move(la));
  }
  return k;
}

}  // namespace tkc
