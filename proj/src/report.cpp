#include "tkc/report.hpp"

#include <json.hpp>

#include "tkc/layout.hpp"

namespace tkc {

namespace {

using nlohmann::json;

json diag_json(const Diagnostic& d) {
  return {{"code", d.code}, {"message", d.message}, {"line", d.line}, {"column", d.col}};
}

json cost_json(const CostTuple& c) {
  if (c.inf) return "inf";
  return {{"slices", c.s}, {"left_transposes", c.l}, {"right_transposes", c.r}, {"fused", c.f}};
}

json layout_json(const MemoryLayout& l) {
  json j = {{"kind", layout_kind_name(l.kind)}, {"shape", l.shape}, {"stored", l.stored()}};
  if (l.kind == LayoutKind::Csc) {
    j["nnz"] = l.rowidx.size();
  } else {
    json box = json::array();
    for (const auto& iv : l.box) box.push_back({iv.lo, iv.hi});
    j["box"] = box;
    j["stride"] = l.stride;
  }
  return j;
}

json gemm_json(const GemmInstr& g) {
  json j = {{"M", g.M},         {"N", g.N},   {"K", g.K},     {"batch", g.batch_count}, {"alpha", g.alpha.str()},
            {"beta", g.accumulate ? 1 : 0}, {"csc", g.csc}, {"a", g.a},
            {"b", g.b},         {"c", g.c}};
  return j;
}

json kernel_json(const KernelResult& k) {
  json j;
  j["name"] = k.name;
  j["ok"] = k.ok;
  j["nonzero_flops"] = k.nonzero_flops;
  j["hardware_flops"] = k.hardware_flops;
  json es = json::array();
  for (const auto& e : k.einsums) es.push_back({{"schedule", e.text}, {"cost", e.cost}, {"naive_cost", e.naive}});
  j["einsums"] = es;
  j["log_cost"] = cost_json(k.log_cost);
  j["loop_fallbacks"] = k.loop_fallbacks;
  json actions = json::array();
  for (const auto& a : k.lowered.actions)
    actions.push_back({{"text", a.text}, {"kind", op_kind_name(a.kind)}, {"hardware_flops", a.flops}});
  j["actions"] = actions;
  json desc = json::array();
  for (const auto& a : k.cfg.actions) {
    if (a.kind != OpKind::Log || !a.node || !a.node->plan) continue;
    const LogPlan& p = *a.node->plan;
    const std::string left = a.args.size() > 0 ? a.args[0].var : "A";
    const std::string right = a.args.size() > 1 ? a.args[1].var : "B";
    desc.push_back({{"plan", p.str(a.lhs.idx, left, right)},
                    {"batch", p.batch},
                    {"m", p.m},
                    {"n", p.n},
                    {"k", p.k},
                    {"trans_left", p.trans_left},
                    {"trans_right", p.trans_right},
                    {"csc_right", p.csc_right},
                    {"cost", cost_json(p.cost)}});
  }
  j["descriptors"] = desc;
  json gemms = json::array();
  for (const auto& a : k.lowered.actions)
    for (const auto& in : a.instrs)
      if (const auto* g = std::get_if<GemmInstr>(&in)) gemms.push_back(gemm_json(*g));
  j["gemm_calls"] = gemms;
  json bufs = json::array();
  for (size_t b = 0; b < k.cfg.buffers.size(); ++b)
    bufs.push_back({{"index", b}, {"elements", k.cfg.buffers[b].elements}, {"temporaries", k.cfg.buffers[b].vars}});
  j["buffers"] = bufs;
  json pf = json::array();
  for (const auto& m : k.prefetch)
    pf.push_back({{"tensor", m.tensor}, {"bytes", m.bytes}, {"capability", m.capability}, {"log", m.candidate}});
  j["prefetch"] = pf;
  json d = json::array();
  for (const auto& x : k.diags) d.push_back(diag_json(x));
  j["diagnostics"] = d;
  return j;
}

}  // namespace

std::string report_json(const FamilyResult& fr) {
  json j;
  j["family"] = fr.family.name;
  j["precision"] = fr.opt.single ? "single" : "double";
  j["align"] = fr.opt.align;
  j["eqspp"] = fr.opt.eqspp;
  j["dense_baseline"] = fr.opt.dense_baseline;
  j["backend_order"] = fr.opt.backend_order;
  j["conventions"] = {
      {"gemm", "2*M*N*K per batch iteration, padded zeros included, plus M*N when alpha is not one"},
      {"csc_gemm", "2*M*(stored entries inside the k range), plus M per column when alpha is not one"},
      {"copyscaleadd", "one flop per scaled or accumulated element, plain copies free"},
      {"loops", "loop-body executions times operations per body"},
      {"nonzero", "sparse strength-reduction cost plus scaling and addition counts"}};
  json lay;
  for (const auto& [name, l] : fr.layouts) lay[name] = layout_json(l);
  j["layouts"] = lay;
  json ks = json::array();
  for (const auto& k : fr.kernels) ks.push_back(kernel_json(k));
  j["kernels"] = ks;
  json d = json::array();
  for (const auto& x : fr.diags) d.push_back(diag_json(x));
  j["diagnostics"] = d;
  return j.dump(2) + "\n";
}

}  // namespace tkc
