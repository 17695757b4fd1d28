#include "tkc/cfg.hpp"

#include <algorithm>
#include <charconv>

#include "tkc/lowered.hpp"
#include "tkc/permdp.hpp"

namespace tkc {

const char* op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::CopyScaleAdd: return "copyscaleadd";
    case OpKind::IndexSum: return "indexsum";
    case OpKind::Product: return "product";
    case OpKind::Log: return "log";
  }
  return "?";
}

bool Action::reads(const std::string& v) const {
  if (add && lhs.var == v) return true;
  for (const auto& a : args)
    if (a.var == v) return true;
  return false;
}

namespace {

class Lowering {
public:
  Lowering(CfgProgram& p, const std::map<std::string, MemoryLayout>& layouts, int align)
      : p_(p), ctx_{&layouts, align} {}

  Operand emit(const NodePtr& n) {
    switch (n->kind) {
      case NodeKind::Indexed:
        declare(n->tensor);
        return {n->tensor, n->idx};
      case NodeKind::Assign: {
        Operand t = emit(n->kids[0]);
        Operand e = emit(n->kids[1]);
        push(copy(t, e, false, Coef{}));
        return t;
      }
      case NodeKind::ScalarMul: {
        Operand e = emit(n->kids[0]);
        Operand t = temp(n);
        push(copy(t, e, false, n->coef));
        return t;
      }
      case NodeKind::Permute: {
        Operand e = emit(n->kids[0]);
        Operand t = temp(n);
        push(copy(t, e, false, Coef{}));
        return t;
      }
      case NodeKind::Add: {
        std::vector<Operand> ops;
        for (const auto& k : n->kids) ops.push_back(emit(k));
        Operand t = temp(n);
        push(copy(t, ops[0], false, Coef{}));
        for (size_t i = 1; i < ops.size(); ++i) push(copy(t, ops[i], true, Coef{}));
        return t;
      }
      case NodeKind::Contraction:
      case NodeKind::Product:
      case NodeKind::IndexSum: {
        Action a;
        for (const auto& k : n->kids) a.args.push_back(emit(k));
        a.lhs = temp(n);
        a.node = n;
        a.kind = n->kind == NodeKind::Contraction ? OpKind::Log
                 : n->kind == NodeKind::Product   ? OpKind::Product
                                                  : OpKind::IndexSum;
        a.prefetch = n->prefetch;
        if (a.kind == OpKind::Log) {
          RangeMap r;
          const auto& vars = p_.vars;
          auto g = instantiate_log(*n->plan, {a.args[0].idx, &vars.at(a.args[0].var).layout},
                                   {a.args[1].idx, &vars.at(a.args[1].var).layout}, {a.lhs.idx, &vars.at(a.lhs.var).layout},
                                   region_of(n->idx, n->spp), &r);
          if (!g) throw Error("Internal", "contraction without a realisable LoG plan");
          a.ranges = r;
        }
        push(a);
        return a.lhs;
      }
      default:
        throw Error("Internal", std::string("cannot lower node ") + kind_name(n->kind));
    }
  }

private:
  void declare(const std::string& t) {
    if (p_.vars.count(t)) return;
    VarInfo v;
    v.name = t;
    v.layout = ctx_.layouts->at(t);
    p_.vars[t] = v;
  }

  Operand temp(const NodePtr& n) {
    VarInfo v;
    v.name = "_tmp" + std::to_string(p_.next_temp++);
    v.temp = true;
    v.layout = node_layout(n, n->idx, ctx_);
    p_.vars[v.name] = v;
    return {v.name, n->idx};
  }

  static Action copy(const Operand& lhs, const Operand& rhs, bool add, const Coef& c) {
    Action a;
    a.lhs = lhs;
    a.args = {rhs};
    a.add = add;
    a.alpha = c;
    return a;
  }

  void push(Action a) { p_.actions.push_back(std::move(a)); }

  CfgProgram& p_;
  PermContext ctx_;
};

bool is_temp(const CfgProgram& p, const std::string& v) { return p.vars.at(v).temp; }

bool references(const Action& a, const std::string& v) { return a.writes(v) || a.reads(v); }

bool plain_copy(const Action& a) {
  return a.kind == OpKind::CopyScaleAdd && !a.add && a.alpha.is_one() && a.args.size() == 1;
}

// An action may read its own target only elementwise with identical order.
bool alias_ok(const Action& a) {
  for (const auto& o : a.args)
    if (o.var == a.lhs.var && (a.kind != OpKind::CopyScaleAdd || o.idx != a.lhs.idx)) return false;
  return true;
}

std::vector<int> refs_after(const CfgProgram& p, size_t i, const std::string& v) {
  std::vector<int> r;
  for (size_t j = i + 1; j < p.actions.size(); ++j)
    if (references(p.actions[j], v)) r.push_back(static_cast<int>(j));
  return r;
}

bool writes_any(const Action& a, const std::vector<Operand>& ops) {
  for (const auto& o : ops)
    if (a.writes(o.var)) return true;
  return false;
}

void rename_in(Action& a, const std::string& from, const Operand& to) {
  if (a.lhs.var == from) a.lhs = to;
  for (auto& o : a.args)
    if (o.var == from) o = to;
}

}  // namespace

CfgProgram lower(const Kernel& k, const std::map<std::string, MemoryLayout>& layouts, int align) {
  CfgProgram p;
  p.kernel = k.name;
  Lowering lw(p, layouts, align);
  for (const auto& st : k.stmts) lw.emit(st.root);
  liveness(p);
  return p;
}

void liveness(CfgProgram& p) {
  p.live.assign(p.actions.size(), {});
  std::set<std::string> cur;
  for (size_t i = p.actions.size(); i-- > 0;) {
    p.live[i] = cur;
    const Action& a = p.actions[i];
    if (!a.add && is_temp(p, a.lhs.var)) cur.erase(a.lhs.var);
    for (const auto& o : a.args)
      if (is_temp(p, o.var)) cur.insert(o.var);
    if (a.add && is_temp(p, a.lhs.var)) cur.insert(a.lhs.var);
  }
}

bool merge_scalar_multiplications(CfgProgram& p) {
  for (size_t i = 0; i < p.actions.size(); ++i) {
    const Action& f = p.actions[i];
    if (f.add || !is_temp(p, f.lhs.var)) continue;
    auto refs = refs_after(p, i, f.lhs.var);
    if (refs.size() != 1) continue;
    const size_t j = refs[0];
    const Action& s = p.actions[j];
    if (s.kind != OpKind::CopyScaleAdd || s.add || s.args.size() != 1 || s.args[0].var != f.lhs.var) continue;
    if (s.args[0].idx != f.lhs.idx) continue;
    if (f.kind != OpKind::CopyScaleAdd && s.lhs.idx != f.lhs.idx) continue;
    if (!f.alpha.is_one() && !s.alpha.is_one()) continue;
    bool clash = false;
    for (size_t m = i + 1; m < j && !clash; ++m)
      clash = writes_any(p.actions[m], f.args) || references(p.actions[m], s.lhs.var);
    if (clash) continue;
    Action merged = f;
    Operand src = merged.lhs;
    merged.lhs = s.lhs;
    merged.alpha = f.alpha * s.alpha;
    if (merged.kind == OpKind::CopyScaleAdd) {
      // keep the copy's own letter order on the source
    } else if (merged.lhs.idx != src.idx) {
      continue;
    }
    if (!alias_ok(merged) || !log_legal(p, merged)) continue;
    p.actions[i] = merged;
    p.actions.erase(p.actions.begin() + j);
    return true;
  }
  return false;
}

bool substitute_forward(CfgProgram& p) {
  for (size_t i = 0; i < p.actions.size(); ++i) {
    const Action& c = p.actions[i];
    if (!plain_copy(c) || !is_temp(p, c.lhs.var)) continue;
    const Operand a = c.lhs, b = c.args[0];
    if (a.var == b.var || a.idx != b.idx) continue;
    auto refs = refs_after(p, i, a.var);
    if (refs.empty()) continue;
    bool writes_a = false;
    for (int j : refs) writes_a = writes_a || p.actions[j].writes(a.var);
    const int last = refs.back();
    bool ok = true;
    if (writes_a) {
      const Action& back = p.actions[last];
      ok = plain_copy(back) && back.lhs == b && back.args[0] == a;
      for (int m = static_cast<int>(i) + 1; m < last && ok; ++m)
        if (references(p.actions[m], b.var)) ok = false;
    } else {
      for (int m = static_cast<int>(i) + 1; m <= last && ok; ++m)
        if (p.actions[m].writes(b.var)) ok = false;
    }
    if (!ok) continue;
    std::vector<Action> renamed;
    for (int j : refs) {
      Action x = p.actions[j];
      rename_in(x, a.var, b);
      if (!alias_ok(x) && !(plain_copy(x) && x.args[0] == x.lhs)) ok = false;
      if (!log_legal(p, x)) ok = false;
      renamed.push_back(std::move(x));
    }
    if (!ok) continue;
    for (size_t r = 0; r < refs.size(); ++r) p.actions[refs[r]] = std::move(renamed[r]);
    p.actions.erase(p.actions.begin() + i);
    return true;
  }
  return false;
}

bool substitute_backward(CfgProgram& p) {
  for (size_t j = 0; j < p.actions.size(); ++j) {
    const Action& c = p.actions[j];
    if (!plain_copy(c) || !is_temp(p, c.args[0].var)) continue;
    const Operand a = c.lhs, t = c.args[0];
    if (a.var == t.var || a.idx != t.idx) continue;
    int writer = -1, writers = 0;
    for (size_t i = 0; i < j; ++i)
      if (p.actions[i].writes(t.var)) {
        writer = static_cast<int>(i);
        ++writers;
      }
    if (writers != 1 || p.actions[writer].add) continue;
    if (!refs_after(p, j, t.var).empty()) continue;
    bool ok = true;
    for (size_t m = writer + 1; m < j && ok; ++m)
      if (references(p.actions[m], t.var) || references(p.actions[m], a.var)) ok = false;
    if (!ok) continue;
    Action x = p.actions[writer];
    if (x.lhs.idx != t.idx) continue;
    x.lhs = a;
    if (!alias_ok(x) || !log_legal(p, x)) continue;
    p.actions[writer] = std::move(x);
    p.actions.erase(p.actions.begin() + j);
    return true;
  }
  return false;
}

bool remove_empty_statements(CfgProgram& p) {
  auto it = std::remove_if(p.actions.begin(), p.actions.end(),
                           [](const Action& a) { return plain_copy(a) && a.args[0] == a.lhs; });
  bool changed = it != p.actions.end();
  p.actions.erase(it, p.actions.end());
  return changed;
}

bool merge_actions(CfgProgram& p) {
  for (size_t j = 0; j < p.actions.size(); ++j) {
    const Action& s = p.actions[j];
    if (s.kind != OpKind::CopyScaleAdd || !s.add || s.args.size() != 1 || !is_temp(p, s.args[0].var)) continue;
    const Operand a = s.args[0];
    if (a.idx != s.lhs.idx || a.var == s.lhs.var) continue;
    int writer = -1, writers = 0;
    for (size_t i = 0; i < j; ++i)
      if (p.actions[i].writes(a.var)) {
        writer = static_cast<int>(i);
        ++writers;
      }
    if (writers != 1 || p.actions[writer].add) continue;
    if (!refs_after(p, j, a.var).empty()) continue;
    const Action& f = p.actions[writer];
    if (f.lhs.idx != a.idx && f.kind != OpKind::CopyScaleAdd) continue;
    if (!f.alpha.is_one() && !s.alpha.is_one()) continue;
    bool ok = true;
    for (size_t m = writer + 1; m < j && ok; ++m) {
      const Action& x = p.actions[m];
      // the merged action stays at the position of the addition, so only f moves
      if (references(x, a.var) || writes_any(x, f.args)) ok = false;
    }
    if (!ok) continue;
    Action merged = f;
    merged.lhs = s.lhs;
    merged.add = true;
    merged.alpha = f.alpha * s.alpha;
    if (!alias_ok(merged) || !log_legal(p, merged)) continue;
    p.actions[j] = std::move(merged);
    p.actions.erase(p.actions.begin() + writer);
    return true;
  }
  return false;
}

void buffer_plan(CfgProgram& p) {
  liveness(p);
  p.buffers.clear();
  p.buffer_of.clear();
  std::map<std::string, std::pair<int, int>> span;
  std::vector<std::string> order;
  for (size_t i = 0; i < p.actions.size(); ++i) {
    std::vector<std::string> vs{p.actions[i].lhs.var};
    for (const auto& o : p.actions[i].args) vs.push_back(o.var);
    for (const auto& v : vs) {
      if (!is_temp(p, v)) continue;
      auto it = span.find(v);
      if (it == span.end()) {
        span[v] = {static_cast<int>(i), static_cast<int>(i)};
        order.push_back(v);
      } else {
        it->second.second = static_cast<int>(i);
      }
    }
  }
  std::vector<std::vector<std::pair<int, int>>> busy;
  for (const auto& v : order) {
    auto s = span[v];
    int chosen = -1;
    for (size_t b = 0; b < busy.size() && chosen < 0; ++b) {
      bool free = true;
      for (const auto& q : busy[b])
        if (s.first <= q.second && q.first <= s.second) free = false;
      if (free) chosen = static_cast<int>(b);
    }
    if (chosen < 0) {
      chosen = static_cast<int>(p.buffers.size());
      p.buffers.emplace_back();
      busy.emplace_back();
    }
    busy[chosen].push_back(s);
    p.buffers[chosen].vars.push_back(v);
    p.buffers[chosen].elements = std::max(p.buffers[chosen].elements, p.vars.at(v).layout.stored());
    p.buffer_of[v] = chosen;
  }
}

CfgProgram run_passes(CfgProgram p, PassTrace* trace) {
  using Pass = bool (*)(CfgProgram&);
  const std::vector<std::pair<std::string, Pass>> passes{
      {"MergeScalarMultiplications", merge_scalar_multiplications},
      {"SubstituteForward", substitute_forward},
      {"SubstituteBackward", substitute_backward},
      {"RemoveEmptyStatements", remove_empty_statements},
      {"MergeActions", merge_actions},
  };
  p.buffers.clear();
  p.buffer_of.clear();
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [name, pass] : passes) {
      if (name == "SubstituteForward") liveness(p);
      if (name == "MergeActions") liveness(p);
      while (pass(p)) {
        changed = true;
        if (trace) trace->emplace_back(name, p);
      }
    }
  }
  // drop temporaries no action refers to any more
  std::set<std::string> used;
  for (const auto& a : p.actions) {
    used.insert(a.lhs.var);
    for (const auto& o : a.args) used.insert(o.var);
  }
  for (auto it = p.vars.begin(); it != p.vars.end();)
    it = it->second.temp && !used.count(it->first) ? p.vars.erase(it) : std::next(it);
  buffer_plan(p);
  if (trace) trace->emplace_back("DetermineLocalInitialization", p);
  return p;
}

namespace {

std::string num(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string opnd(const Operand& o) { return o.var + "['" + o.idx + "']"; }

}  // namespace

std::string dump(const Action& a) {
  std::string s = opnd(a.lhs) + (a.add ? " += " : " = ");
  if (!a.alpha.is_one()) {
    std::vector<std::string> f;
    if (a.alpha.lit != 1.0 || a.alpha.syms.empty()) f.push_back(num(a.alpha.lit));
    for (const auto& x : a.alpha.syms) f.push_back(x);
    for (const auto& x : f) s += x + " * ";
  }
  auto list = [&] {
    std::string r;
    for (size_t i = 0; i < a.args.size(); ++i) r += (i ? ", " : "") + opnd(a.args[i]);
    return r;
  };
  switch (a.kind) {
    case OpKind::CopyScaleAdd: s += opnd(a.args[0]); break;
    case OpKind::Log: s += "log(" + list() + ")"; break;
    case OpKind::Product: s += "product(" + list() + ")"; break;
    case OpKind::IndexSum: s += "sum_" + a.node->summed + "(" + list() + ")"; break;
  }
  if (!a.prefetch.empty()) s += "  # prefetch " + a.prefetch;
  return s;
}

std::string dump(const CfgProgram& p) {
  std::string s;
  for (const auto& a : p.actions) s += dump(a) + "\n";
  return s;
}

}  // namespace tkc
