#include "tkc/pipeline.hpp"

#include <set>

#include "tkc/einsum.hpp"
#include "tkc/eqspp.hpp"
#include "tkc/permdp.hpp"
#include "tkc/strength.hpp"

namespace tkc {

bool FamilyResult::ok() const {
  if (!diags.empty()) return false;
  for (const auto& k : kernels)
    if (!k.ok) return false;
  return true;
}

const KernelResult& FamilyResult::kernel(const std::string& name) const {
  for (const auto& k : kernels)
    if (k.name == name) return k;
  throw Error("UnknownKernel", "no kernel named " + name);
}

namespace {

NodePtr shape(const Family& fam, NodePtr n, bool eq, std::vector<EinsumInfo>* info, long* nonzero) {
  for (auto& k : n->kids) k = shape(fam, k, eq, info, nonzero);
  switch (n->kind) {
    case NodeKind::Indexed:
      n->spp = fam.tensor(n->tensor).spp;
      return n;
    case NodeKind::Permute:
      n->spp = transpose(n->kids[0]->spp, n->kids[0]->idx, n->idx);
      return n;
    case NodeKind::ScalarMul:
      n->spp = n->kids[0]->spp;
      if (!n->coef.is_one()) *nonzero += n->spp.nnz();
      return n;
    case NodeKind::Assign:
      n->spp = n->kids[1]->spp;
      return n;
    case NodeKind::Add: {
      SparsityPattern s = n->kids[0]->spp;
      long terms = 0;
      for (const auto& k : n->kids) {
        s = s | k->spp;
        terms += k->spp.nnz();
      }
      n->spp = s;
      *nonzero += terms - s.nnz();
      return n;
    }
    case NodeKind::Einsum: {
      std::vector<PatternOperand> ops;
      for (const auto& k : n->kids) ops.emplace_back(&k->spp, k->idx);
      std::vector<SrOperand> sr;
      if (eq) {
        EqsppResult r = compute_eqspp(ops, n->idx);
        for (size_t i = 0; i < n->kids.size(); ++i) n->kids[i]->eqspp = r.masks[i];
        n->spp = r.result;
      } else {
        n->spp = contract_patterns(ops, n->idx);
      }
      for (const auto& k : n->kids) sr.push_back({k->idx, k->eqspp ? *k->eqspp : k->spp});
      EinsumInfo e;
      NodePtr red = reduce(n, &e.cost);
      e.text = parenthesize(red);
      e.naive = naive_cost(sr);
      e.operands = sr;
      e.result = n->idx;
      *nonzero += e.cost;
      if (info) info->push_back(e);
      return red;
    }
    default:
      return n;
  }
}

void collect_uses(const NodePtr& n, std::set<std::string>& written,
                  std::map<std::string, std::vector<const Node*>>& reads) {
  if (n->kind == NodeKind::Assign) {
    written.insert(n->kids[0]->tensor);
    collect_uses(n->kids[1], written, reads);
    return;
  }
  if (n->kind == NodeKind::Indexed) reads[n->tensor].push_back(n.get());
  for (const auto& k : n->kids) collect_uses(k, written, reads);
}

// Leaves feeding a contraction get an explicit copy so that the DP may
// choose their order.
void wrap_leaves(const NodePtr& n, const std::map<std::string, MemoryLayout>& layouts) {
  for (auto& k : n->kids) {
    wrap_leaves(k, layouts);
    if (n->kind == NodeKind::Contraction && k->kind == NodeKind::Indexed &&
        layouts.at(k->tensor).kind != LayoutKind::Csc) {
      NodePtr p = make_node(NodeKind::Permute, {k}, k->idx);
      p->spp = k->eqspp ? *k->eqspp : k->spp;
      k = p;
    }
  }
}

bool uses_tensor(const NodePtr& n, const std::string& t) {
  if (n->kind == NodeKind::Indexed && n->tensor == t) return true;
  for (const auto& k : n->kids)
    if (uses_tensor(k, t)) return true;
  return false;
}

const SparsityPattern& operand_spp(const NodePtr& n) { return n->eqspp ? *n->eqspp : n->spp; }

// Contraction over letters that cannot be fused into one GEMM dimension
// becomes a product followed by index sums, executed as a loop nest.
NodePtr as_product_and_sums(const NodePtr& c) {
  const NodePtr& l = c->kids[0];
  const NodePtr& r = c->kids[1];
  NodePtr top = make_node(NodeKind::Product, {l, r}, letter_union(l->idx, r->idx));
  top->spp = spp_of_product({{&operand_spp(l), l->idx}, {&operand_spp(r), r->idx}}, top->idx);
  for (char x : c->summed) {
    NodePtr s = make_node(NodeKind::IndexSum, {top}, letters_not_in(top->idx, std::string(1, x)));
    s->summed = std::string(1, x);
    s->spp = contract_patterns({{&top->spp, top->idx}}, s->idx);
    top = s;
  }
  return top;
}

bool split_slot(NodePtr& slot, const PermContext& ctx) {
  for (auto& k : slot->kids)
    if (split_slot(k, ctx)) return true;
  if (slot->kind != NodeKind::Contraction) return false;
  if (optimize_permutations(slot, ctx).cost.inf) {
    slot = as_product_and_sums(slot);
    return true;
  }
  return false;
}

NodePtr* outermost_contraction(NodePtr& n) {
  if (n->kind == NodeKind::Contraction) return &n;
  for (auto& k : n->kids)
    if (NodePtr* c = outermost_contraction(k)) return c;
  return nullptr;
}

// Splits one contraction without a realisable plan; when every subtree is
// mappable on its own the fixed target order is to blame, so the outermost
// contraction goes.  Returns false once nothing is left to split.
bool split_unmappable(NodePtr& tree, const PermContext& ctx) {
  for (auto& k : tree->kids)
    if (split_slot(k, ctx)) return true;
  NodePtr* c = outermost_contraction(tree);
  if (!c) return false;
  *c = as_product_and_sums(*c);
  return true;
}

KernelResult plan_kernel(const ShapedKernel& sk, const Kernel& src, const std::map<std::string, MemoryLayout>& layouts,
                         const Options& opt) {
  KernelResult kr;
  kr.name = sk.name;
  kr.einsums = sk.einsums;
  kr.nonzero_flops = sk.nonzero_flops;
  PermContext ctx{&layouts, opt.align};
  Kernel k;
  k.name = sk.name;
  k.prefetch = src.prefetch;
  try {
    for (const auto& t0 : sk.trees) {
      NodePtr t = t0->clone();
      PermResult r = optimize_permutations(t, ctx);
      if (r.cost.inf) {
        wrap_leaves(t, layouts);
        r = optimize_permutations(t, ctx);
      }
      while (r.cost.inf && split_unmappable(t, ctx)) {
        ++kr.loop_fallbacks;
        r = optimize_permutations(t, ctx);
      }
      if (r.cost.inf) {
        kr.diags.push_back({"NoLogPlan", "kernel " + sk.name + ": no realisable Loop-over-GEMM configuration", 0, 0});
        return kr;
      }
      kr.unconfigured.push_back(t->clone());
      apply_configuration(t, r.config, ctx);
      kr.log_cost = kr.log_cost + r.cost;
      kr.trees.push_back(t);
      k.stmts.push_back({t, false});
    }
    std::vector<PrefetchCandidate> cands;
    for (const auto& t : kr.trees)
      visit_postorder(t, [&](const NodePtr& n) {
        if (n->kind == NodeKind::Contraction)
          cands.push_back({n, node_layout(n, n->idx, ctx).stored() * opt.element_bytes()});
      });
    std::vector<PrefetchRequest> reqs;
    for (const auto& name : src.prefetch) {
      auto it = layouts.find(name);
      if (it == layouts.end()) {
        kr.diags.push_back({"UndeclaredTensor", "kernel " + sk.name + ": prefetch of undeclared tensor " + name, 0, 0});
        return kr;
      }
      reqs.push_back({name, it->second.stored() * opt.element_bytes()});
    }
    PrefetchResult pr = assign_prefetch(cands, reqs);
    kr.prefetch = pr.matches;
    kr.initial_cfg = lower(k, layouts, opt.align);
    kr.cfg = run_passes(kr.initial_cfg);
    kr.lowered = lower_program(kr.cfg);
    kr.hardware_flops = kr.lowered.hardware_flops;
    kr.ok = true;
  } catch (const Error& e) {
    kr.diags.push_back(e.diag());
    kr.ok = false;
  }
  return kr;
}

}  // namespace

NodePtr shape_statement(const Family& fam, const Statement& st, bool eqspp, std::vector<EinsumInfo>* info,
                        long* nonzero) {
  Statement s{st.root->clone(), st.accumulate};
  deduce_indices(fam, s);
  long nz = 0;
  NodePtr t = shape(fam, s.root, eqspp, info, &nz);
  if (nonzero) *nonzero += nz;
  return find_contractions(t);
}

FamilyResult run_pipeline(const Family& input, const Options& options) {
  FamilyResult fr;
  fr.opt = options;
  fr.family = input;
  Options& opt = fr.opt;
  Family& fam = fr.family;
  if (opt.dense_baseline) {
    opt.eqspp = false;
    opt.csc = false;
    for (auto& [name, t] : fam.tensors) {
      t.spp = SparsityPattern::dense(t.shape);
      t.policy = LayoutPolicy::Dense;
    }
  }
  for (const auto& b : opt.backend_order)
    if (b != "portable") fr.diags.push_back({"UnknownBackend", "backend " + b + " is not available", 0, 0});

  std::vector<ShapedKernel> shaped;
  std::vector<const Kernel*> sources;
  for (const auto& k : fam.kernels) {
    Diagnostics d = validate_kernel(fam, k, opt.caps);
    if (!d.empty()) {
      fr.diags.insert(fr.diags.end(), d.begin(), d.end());
      continue;
    }
    ShapedKernel sk;
    sk.name = k.name;
    try {
      for (const auto& st : k.stmts) sk.trees.push_back(shape_statement(fam, st, opt.eqspp, &sk.einsums, &sk.nonzero_flops));
    } catch (const Error& e) {
      fr.diags.push_back(e.diag());
      continue;
    }
    shaped.push_back(std::move(sk));
    sources.push_back(&k);
  }
  if (!fr.diags.empty()) return fr;

  std::set<std::string> written;
  std::map<std::string, std::vector<const Node*>> reads;
  for (const auto& sk : shaped)
    for (const auto& t : sk.trees) collect_uses(t, written, reads);
  for (const auto& [name, t] : fam.tensors) {
    SparsityPattern s = t.spp;
    auto it = reads.find(name);
    if (!written.count(name) && it != reads.end()) {
      s = SparsityPattern::zeros(t.shape);
      for (const Node* n : it->second) s = s | (n->eqspp ? *n->eqspp : t.spp);
    }
    fr.storage_spp[name] = s;
  }

  try {
    for (const auto& [name, t] : fam.tensors) {
      LayoutPolicy pol = t.policy == LayoutPolicy::Auto ? LayoutPolicy::Aligned : t.policy;
      fr.layouts[name] = assign_layout(t.shape, fr.storage_spp[name], pol, opt.align);
    }
  } catch (const Error& e) {
    fr.diags.push_back(e.diag());
    return fr;
  }

  if (opt.csc) {
    for (const auto& [name, t] : fam.tensors) {
      const SparsityPattern& s = fr.storage_spp[name];
      if (t.policy != LayoutPolicy::Auto || t.rank() != 2 || !t.is_constant() || written.count(name) ||
          !reads.count(name) || s.nnz() >= opt.csc_density * static_cast<double>(s.size()))
        continue;
      auto trial = fr.layouts;
      trial[name] = assign_layout(t.shape, s, LayoutPolicy::Csc, opt.align);
      bool feasible = true;
      for (size_t i = 0; i < shaped.size() && feasible; ++i) {
        bool uses = false;
        for (const auto& tr : shaped[i].trees) uses = uses || uses_tensor(tr, name);
        if (!uses) continue;
        KernelResult with = plan_kernel(shaped[i], *sources[i], trial, opt);
        feasible = with.ok &&
                   with.loop_fallbacks <= plan_kernel(shaped[i], *sources[i], fr.layouts, opt).loop_fallbacks;
      }
      if (feasible) fr.layouts = std::move(trial);
    }
  }

  for (size_t i = 0; i < shaped.size(); ++i) fr.kernels.push_back(plan_kernel(shaped[i], *sources[i], fr.layouts, opt));
  return fr;
}

}  // namespace tkc
