#include "tkc/emit_c.hpp"

#include <cctype>
#include <cstdio>
#include <map>
#include <set>

#include <fmt/format.h>

#include "tkc/interp.hpp"
#include "tkc/reference.hpp"

namespace tkc {

namespace {

std::string hexf(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::string comment_safe(std::string s) {
  for (size_t p; (p = s.find("*/")) != std::string::npos;) s.replace(p, 2, "* /");
  return s;
}

template <class T>
std::string join(const std::vector<T>& v, const std::string& sep = ", ") {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + fmt::format("{}", v[i]);
  return s;
}

// base + sum_d var_d * stride_d, skipping zero strides.
std::string offset(long base, const std::vector<long>& stride, const std::string& var) {
  std::string s = std::to_string(base);
  for (size_t d = 0; d < stride.size(); ++d)
    if (stride[d] != 0) s += fmt::format(" + {}*{}{}", stride[d], var, d);
  return s;
}

class PortableBackend : public Backend {
public:
  std::string name() const override { return "portable"; }
  bool supports(OpKind, const Instr&, bool) const override { return true; }

  std::string prelude(const std::vector<Instr>& instrs) const override {
    bool dense = false, csc = false;
    for (const auto& in : instrs)
      if (const auto* g = std::get_if<GemmInstr>(&in)) (g->csc ? csc : dense) = true;
    return (dense ? std::string(kGemm) : "") + (csc ? kGemmCsc : "");
  }

  static constexpr const char* kGemm = R"(static void tkc_gemm(long M, long N, long K, const real* A, long a_m, long a_k, const real* B, long b_k,
                     long b_n, real* C, long c_m, long c_n, real alpha, int scale, int accumulate) {
  for (long n = 0; n < N; ++n)
    for (long m = 0; m < M; ++m) {
      real acc = 0;
      for (long k = 0; k < K; ++k) acc += A[m * a_m + k * a_k] * B[k * b_k + n * b_n];
      real v = scale ? alpha * acc : acc;
      C[m * c_m + n * c_n] = accumulate ? v + C[m * c_m + n * c_n] : v;
    }
}

)";

  static constexpr const char* kGemmCsc = R"(/* B in compressed sparse columns; rows outside [k_lo, k_hi) are skipped. */
static void tkc_gemm_csc(long M, int n_lo, int n_hi, int k_lo, int k_hi, const int* colptr, const int* rowidx,
                         const real* A, long a_m, long a_k, const real* B, real* C, long c_m, long c_n, real alpha,
                         int scale, int accumulate) {
  for (int col = n_lo; col < n_hi; ++col)
    for (long m = 0; m < M; ++m) {
      real acc = 0;
      for (int p = colptr[col]; p < colptr[col + 1]; ++p) {
        const int row = rowidx[p];
        if (row < k_lo || row >= k_hi) continue;
        acc += A[m * a_m + (row - k_lo) * a_k] * B[p];
      }
      real v = scale ? alpha * acc : acc;
      C[m * c_m + (col - n_lo) * c_n] = accumulate ? v + C[m * c_m + (col - n_lo) * c_n] : v;
    }
}

)";

  std::string emit(const Instr& in, const InstrContext& ctx) const override {
    const std::string& ind = ctx.indent;
    const std::string alpha = ctx.alpha.empty() ? "1" : ctx.alpha;
    const int scale = ctx.alpha.empty() ? 0 : 1;
    if (const auto* z = std::get_if<ZeroInstr>(&in))
      return fmt::format("{}for (long i = 0; i < {}; ++i) {}[i] = 0;\n", ind, ctx.size(z->var), ctx.operand(z->var));
    if (const auto* g = std::get_if<GemmInstr>(&in)) {
      std::string s;
      std::string inner = ind;
      if (g->csc) {
        s += ind + "{\n";
        inner += "  ";
        s += fmt::format("{}static const int colptr[] = {{{}}};\n", inner, join(g->colptr));
        s += fmt::format("{}static const int rowidx[] = {{{}}};\n", inner, g->rowidx.empty() ? "0" : join(g->rowidx));
      }
      std::string body_ind = inner;
      for (size_t d = 0; d < g->batch_count.size(); ++d) {
        s += fmt::format("{}for (long b{} = 0; b{} < {}; ++b{})\n", body_ind, d, d, g->batch_count[d], d);
        body_ind += "  ";
      }
      const std::string oa = offset(g->base_a, g->batch_a, "b");
      const std::string oc = offset(g->base_c, g->batch_c, "b");
      if (g->csc) {
        s += fmt::format("{}tkc_gemm_csc({}, {}, {}, {}, {}, colptr, rowidx, {} + {}, {}, {}, {}, {} + {}, {}, {}, {}, {}, {});\n",
                         body_ind, g->M, g->n_lo, g->n_hi, g->k_lo, g->k_hi, ctx.operand(g->a), oa, g->a_m, g->a_k,
                         ctx.operand(g->b), ctx.operand(g->c), oc, g->c_m, g->c_n, alpha, scale, g->accumulate ? 1 : 0);
        s += ind + "}\n";
      } else {
        const std::string ob = offset(g->base_b, g->batch_b, "b");
        s += fmt::format("{}tkc_gemm({}, {}, {}, {} + {}, {}, {}, {} + {}, {}, {}, {} + {}, {}, {}, {}, {}, {});\n", body_ind,
                         g->M, g->N, g->K, ctx.operand(g->a), oa, g->a_m, g->a_k, ctx.operand(g->b), ob, g->b_k, g->b_n,
                         ctx.operand(g->c), oc, g->c_m, g->c_n, alpha, scale, g->accumulate ? 1 : 0);
      }
      return s;
    }
    const auto& n = std::get<NestInstr>(in);
    std::string s;
    std::string body = ind;
    for (size_t d = n.count.size(); d-- > 0;) {
      s += fmt::format("{}for (long i{} = 0; i{} < {}; ++i{})\n", body, d, d, n.count[d], d);
      body += "  ";
    }
    s += body + "{\n";
    const std::string b2 = body + "  ";
    const std::string oa = offset(n.base_a, n.s_a, "i");
    if (n.kind == NestInstr::Copy) {
      s += fmt::format("{}real v = {}[{}];\n", b2, ctx.operand(n.a), oa);
    } else if (n.kind == NestInstr::Product) {
      s += fmt::format("{}real v = {}[{}] * {}[{}];\n", b2, ctx.operand(n.a), oa, ctx.operand(n.b),
                       offset(n.base_b, n.s_b, "i"));
    } else {
      s += b2 + "real v = 0;\n";
      s += fmt::format("{}for (long s = 0; s < {}; ++s) v += {}[{} + s*{}];\n", b2, n.sum_count, ctx.operand(n.a), oa,
                       n.sum_a);
    }
    const std::string out = fmt::format("{}[{}]", ctx.operand(n.out), offset(n.base_out, n.s_out, "i"));
    const std::string v = scale ? alpha + " * v" : "v";
    s += fmt::format("{}{} = {};\n", b2, out, n.accumulate ? v + " + " + out : v);
    s += body + "}\n";
    return s;
  }
};

const PortableBackend& portable() {
  static const PortableBackend b;
  return b;
}

struct KernelView {
  const KernelResult* kr;
  const LoweredKernel* lk;
  const Kernel* src;
};

std::vector<KernelView> views(const FamilyResult& fr, const std::vector<LoweredKernel>* lowered) {
  if (!fr.ok()) throw Error("NotCompiled", "family " + fr.family.name + " has diagnostics");
  if (lowered && lowered->size() != fr.kernels.size())
    throw Error("Internal", "replacement kernels do not match the family");
  std::vector<KernelView> out;
  for (size_t i = 0; i < fr.kernels.size(); ++i) {
    const Kernel* src = nullptr;
    for (const auto& k : fr.family.kernels)
      if (k.name == fr.kernels[i].name) src = &k;
    out.push_back({&fr.kernels[i], lowered ? &(*lowered)[i] : &fr.kernels[i].lowered, src});
  }
  return out;
}

std::set<std::string> coef_syms(const LoweredKernel& lk) {
  std::set<std::string> s;
  for (const auto& a : lk.actions)
    for (const auto& in : a.instrs) {
      const Coef* c = nullptr;
      if (const auto* g = std::get_if<GemmInstr>(&in)) c = &g->alpha;
      if (const auto* n = std::get_if<NestInstr>(&in)) c = &n->alpha;
      if (c) s.insert(c->syms.begin(), c->syms.end());
    }
  return s;
}

// Symbolic scalars that become struct fields.
std::vector<std::string> scalar_slots(const Family& fam, const LoweredKernel& lk) {
  std::vector<std::string> out;
  for (const auto& s : coef_syms(lk))
    if (!fam.scalars.at(s).value) out.push_back(s);
  return out;
}

std::vector<std::string> tensor_slots(const Family& fam, const LoweredKernel& lk) {
  std::vector<std::string> out;
  for (const auto& s : lk.storage)
    if (!s.temp && !fam.tensor(s.name).is_constant()) out.push_back(s.name);
  return out;
}

std::string alpha_expr(const Family& fam, const Coef& c, const std::string& self) {
  if (c.is_one()) return "";
  std::string s = "(real)" + hexf(c.lit);
  for (const auto& y : c.syms) {
    const Scalar& sc = fam.scalars.at(y);
    s += " * " + (sc.value ? "(real)" + hexf(*sc.value) : self + "->" + c_name(y));
  }
  return s;
}

std::string header(const FamilyResult& fr, const std::vector<KernelView>& ks) {
  const std::string f = c_name(fr.family.name);
  const std::string F = upper(f);
  std::string s = fmt::format("#ifndef TKC_{0}_H\n#define TKC_{0}_H\n\n", F);
  s += fmt::format("typedef {} {}_real;\n\n", fr.opt.single ? "float" : "double", f);
  for (const auto& [name, t] : fr.family.tensors) {
    const MemoryLayout& l = fr.layouts.at(name);
    s += fmt::format("/* {}: shape ({}), {} layout */\n", name, join(t.shape), layout_kind_name(l.kind));
    s += fmt::format("#define {}_{}_RANK {}\n", F, c_name(name), t.rank());
    s += fmt::format("#define {}_{}_SIZE {}L\n", F, c_name(name), l.stored());
    s += fmt::format("/* storage offset of a multi-index, -1 when not stored */\n");
    s += fmt::format("long {}_{}_index(const int* i);\n", f, c_name(name));
    if (t.is_constant()) s += fmt::format("extern const {0}_real {0}_{1}[];\n", f, c_name(name));
    s += "\n";
  }
  for (const auto& kv : ks) {
    const std::string k = c_name(kv.kr->name);
    s += fmt::format("#define {}_{}_NONZERO_FLOPS {}L\n", F, upper(k), kv.kr->nonzero_flops);
    s += fmt::format("#define {}_{}_HARDWARE_FLOPS {}L\n", F, upper(k), kv.kr->hardware_flops);
    s += fmt::format("struct {}_{} {{\n", f, k);
    for (const auto& t : tensor_slots(fr.family, *kv.lk)) s += fmt::format("  {}_real* {};\n", f, c_name(t));
    for (const auto& y : scalar_slots(fr.family, *kv.lk)) s += fmt::format("  {}_real {};\n", f, c_name(y));
    if (tensor_slots(fr.family, *kv.lk).empty() && scalar_slots(fr.family, *kv.lk).empty()) s += "  int unused;\n";
    s += "};\n";
    s += fmt::format("void {0}_{1}_execute(const struct {0}_{1}* k);\n\n", f, k);
  }
  s += "#endif\n";
  return s;
}

// Temporaries above this many elements live on the heap.
constexpr long kStackLimit = 1L << 15;

std::string kernels_file(const FamilyResult& fr, const std::vector<KernelView>& ks) {
  const std::string f = c_name(fr.family.name);
  std::vector<std::unique_ptr<Backend>> owned;
  std::vector<const Backend*> order;
  for (const auto& b : fr.opt.backend_order)
    if (auto p = make_backend(b)) {
      order.push_back(p.get());
      owned.push_back(std::move(p));
    }
  std::string s = fmt::format("#include \"{}.h\"\n\n#include <stdlib.h>\n\ntypedef {}_real real;\n\n", f, f);
  std::map<std::string, std::vector<Instr>> handled;
  std::string bodies;
  for (const auto& kv : ks) {
    const std::string k = c_name(kv.kr->name);
    std::map<std::string, std::string> ref;
    std::map<std::string, long> size;
    std::string decl, fin;
    for (const auto& st : kv.lk->storage) {
      size[st.name] = st.elements;
      if (st.temp) {
        const std::string v = "t" + c_name(st.name);
        ref[st.name] = v;
        const long n = std::max(1L, st.elements);
        if (n > kStackLimit) {
          decl += fmt::format("  real* {} = (real*)calloc({}, sizeof(real));\n", v, n);
          fin += fmt::format("  free({});\n", v);
        } else {
          decl += fmt::format("  real {}[{}];\n", v, n);
        }
      } else if (fr.family.tensor(st.name).is_constant()) {
        ref[st.name] = fmt::format("{}_{}", f, c_name(st.name));
      } else {
        ref[st.name] = "k->" + c_name(st.name);
      }
    }
    std::string body;
    for (const auto& a : kv.lk->actions) {
      body += fmt::format("  /* {} ({}) */\n", comment_safe(a.text), op_kind_name(a.kind));
      if (!a.prefetch.empty()) body += fmt::format("  /* prefetch {} */\n", a.prefetch);
      for (const auto& in : a.instrs) {
        const Coef* c = nullptr;
        if (const auto* g = std::get_if<GemmInstr>(&in)) c = &g->alpha;
        if (const auto* n = std::get_if<NestInstr>(&in)) c = &n->alpha;
        InstrContext ctx{[&](const std::string& n) { return ref.at(n); }, [&](const std::string& n) { return size.at(n); },
                         c ? alpha_expr(fr.family, *c, "k") : "", "  "};
        const Backend& b = select_backend(order, a.kind, in, fr.opt.single);
        handled[b.name()].push_back(in);
        body += b.emit(in, ctx);
      }
    }
    bodies += fmt::format("void {0}_{1}_execute(const struct {0}_{1}* k) {{\n", f, k);
    bodies += "  (void)k;\n" + decl + body + fin + "}\n\n";
  }
  for (const auto& [name, instrs] : handled) s += make_backend(name)->prelude(instrs);
  return s + bodies;
}

std::string tensors_file(const FamilyResult& fr) {
  const std::string f = c_name(fr.family.name);
  std::string s = fmt::format("#include \"{}.h\"\n\n", f);
  for (const auto& [name, t] : fr.family.tensors) {
    const MemoryLayout& l = fr.layouts.at(name);
    const std::string n = c_name(name);
    if (l.kind == LayoutKind::Csc) {
      s += fmt::format("static const int {}_colptr[] = {{{}}};\n", n, join(l.colptr));
      s += fmt::format("static const int {}_rowidx[] = {{{}}};\n", n, l.rowidx.empty() ? "0" : join(l.rowidx));
      s += fmt::format("long {}_{}_index(const int* i) {{\n", f, n);
      s += fmt::format("  if (i[1] < 0 || i[1] >= {}) return -1;\n", l.shape[1]);
      s += fmt::format("  for (int p = {0}_colptr[i[1]]; p < {0}_colptr[i[1] + 1]; ++p)\n", n);
      s += fmt::format("    if ({}_rowidx[p] == i[0]) return p;\n", n);
      s += "  return -1;\n}\n";
    } else {
      s += fmt::format("long {}_{}_index(const int* i) {{\n", f, n);
      std::string off;
      for (int d = 0; d < l.rank(); ++d) {
        s += fmt::format("  if (i[{0}] < {1} || i[{0}] >= {2}) return -1;\n", d, l.box[d].lo, l.box[d].hi);
        off += fmt::format("{}(long)(i[{}] - {}) * {}L", d ? " + " : "", d, l.box[d].lo, l.stride[d]);
      }
      s += fmt::format("  return {};\n}}\n", off.empty() ? "0" : off);
    }
    if (t.is_constant()) {
      std::vector<double> p = pack(l, *t.values);
      std::vector<std::string> txt;
      for (double v : p) txt.push_back(hexf(v));
      if (txt.empty()) txt.push_back("0");
      s += fmt::format("const {0}_real {0}_{1}[] = {{\n", f, n);
      for (size_t i = 0; i < txt.size(); i += 4) {
        std::vector<std::string> row(txt.begin() + i, txt.begin() + std::min(txt.size(), i + 4));
        s += "  " + join(row) + ",\n";
      }
      s += "};\n";
    }
    s += "\n";
  }
  return s;
}

// Dense double reference of one kernel, statement by statement.
class RefGen {
public:
  RefGen(const Family& fam, std::string& code) : fam_(fam), code_(code) {}

  void statement(const Statement& st0) {
    Statement st{st0.root->clone(), st0.accumulate};
    deduce_indices(fam_, st);
    visit_postorder(st.root, [&](const NodePtr& n) {
      if (n->kind != NodeKind::Indexed) return;
      const Tensor& t = fam_.tensor(n->tensor);
      for (size_t p = 0; p < n->idx.size(); ++p) size_[n->idx[p]] = t.shape[p];
    });
    const NodePtr& target = st.root->kids[0];
    const NodePtr& rhs = st.root->kids[1];
    code_ += "  {\n";
    const std::string r = node(rhs);
    loops(target->idx, "    ");
    code_ += fmt::format("d_{}[{}] = {}[{}];\n", c_name(target->tensor), addr(target->idx), r, addr(rhs->idx));
    code_ += frees_;
    frees_.clear();
    code_ += "  }\n";
  }

private:
  long volume(const std::string& idx) {
    long v = 1;
    for (char c : idx) v *= size_.at(c);
    return v;
  }

  std::string addr(const std::string& idx) {
    if (idx.empty()) return "0";
    std::string s;
    for (size_t d = idx.size(); d-- > 0;) {
      if (s.empty()) {
        s = fmt::format("l_{}", idx[d]);
      } else {
        s = fmt::format("l_{} + {}L*({})", idx[d], size_.at(idx[d]), s);
      }
    }
    return s;
  }

  // Opens loops over `letters`, first letter fastest; leaves the cursor at
  // the innermost statement position.
  void loops(const std::string& letters, const std::string& ind) {
    std::string i = ind;
    for (size_t d = letters.size(); d-- > 0;) {
      code_ += fmt::format("{0}for (long l_{1} = 0; l_{1} < {2}; ++l_{1})\n", i, letters[d], size_.at(letters[d]));
      i += "  ";
    }
    code_ += i;
  }

  std::string fresh(const std::string& idx) {
    const std::string v = fmt::format("r{}", next_++);
    code_ += fmt::format("    double* {} = (double*)calloc({}, sizeof(double));\n", v, std::max(1L, volume(idx)));
    frees_ += fmt::format("    free({});\n", v);
    return v;
  }

  std::string node(const NodePtr& n) {
    switch (n->kind) {
      case NodeKind::Indexed:
        return "d_" + c_name(n->tensor);
      case NodeKind::Permute: {
        const std::string k = node(n->kids[0]);
        const std::string r = fresh(n->idx);
        loops(n->idx, "    ");
        code_ += fmt::format("{}[{}] = {}[{}];\n", r, addr(n->idx), k, addr(n->kids[0]->idx));
        return r;
      }
      case NodeKind::ScalarMul: {
        const std::string k = node(n->kids[0]);
        const std::string r = fresh(n->idx);
        std::string a = hexf(n->coef.lit);
        for (const auto& y : n->coef.syms) a += " * s_" + c_name(y);
        loops(n->idx, "    ");
        code_ += fmt::format("{}[{}] = {} * {}[{}];\n", r, addr(n->idx), a, k, addr(n->kids[0]->idx));
        return r;
      }
      case NodeKind::Add: {
        std::vector<std::string> terms;
        for (const auto& k : n->kids) terms.push_back(node(k));
        const std::string r = fresh(n->idx);
        std::string e;
        for (size_t i = 0; i < terms.size(); ++i) e += fmt::format("{}{}[{}]", i ? " + " : "", terms[i], addr(n->kids[i]->idx));
        loops(n->idx, "    ");
        code_ += fmt::format("{}[{}] = {};\n", r, addr(n->idx), e);
        return r;
      }
      case NodeKind::Einsum: {
        std::vector<std::string> terms;
        std::string letters;
        for (const auto& k : n->kids) {
          terms.push_back(node(k));
          for (char c : k->idx)
            if (letters.find(c) == std::string::npos) letters += c;
        }
        const std::string r = fresh(n->idx);
        std::string e;
        for (size_t i = 0; i < terms.size(); ++i) e += fmt::format("{}{}[{}]", i ? " * " : "", terms[i], addr(n->kids[i]->idx));
        loops(letters, "    ");
        code_ += fmt::format("{}[{}] += {};\n", r, addr(n->idx), e);
        return r;
      }
      default:
        throw Error("Internal", std::string("reference emission cannot handle ") + kind_name(n->kind));
    }
  }

  const Family& fam_;
  std::string& code_;
  std::map<char, int> size_;
  std::string frees_;
  int next_ = 0;
};

const char* kTestCopy = R"(static double* tkc_copy(long volume, const double* v) {
  double* d = (double*)calloc(volume > 0 ? volume : 1, sizeof(double));
  if (volume > 0) memcpy(d, v, volume * sizeof(double));
  return d;
}

)";

const char* kTestPrelude = R"(#include <math.h>
#include <stdint.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static uint64_t tkc_splitmix(uint64_t* s) {
  uint64_t z = (*s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

static double tkc_unit(uint64_t* s) { return (double)(tkc_splitmix(s) >> 11) * 0x1.0p-52 - 1.0; }

static uint64_t tkc_stream(uint64_t seed, const char* name) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char* c = (const unsigned char*)name; *c; ++c) {
    h ^= *c;
    h *= 0x100000001b3ULL;
  }
  return seed ^ h;
}

static double* tkc_random(long volume, const long* nz, long nnz, uint64_t seed, const char* name) {
  double* d = (double*)calloc(volume > 0 ? volume : 1, sizeof(double));
  uint64_t s = tkc_stream(seed, name);
  for (long i = 0; i < nnz; ++i) d[nz[i]] = tkc_unit(&s);
  return d;
}

static void tkc_unlinear(int rank, const int* shape, long lin, int* idx) {
  for (int d = 0; d < rank; ++d) {
    idx[d] = (int)(lin % shape[d]);
    lin /= shape[d];
  }
}

static real* tkc_pack(int rank, const int* shape, long volume, long stored, long (*index)(const int*),
                      const double* dense) {
  real* out = (real*)calloc(stored > 0 ? stored : 1, sizeof(real));
  int idx[8];
  for (long i = 0; i < volume; ++i) {
    tkc_unlinear(rank, shape, i, idx);
    long off = index(idx);
    if (off >= 0) out[off] = (real)dense[i];
  }
  return out;
}

static void tkc_unpack(int rank, const int* shape, long volume, long (*index)(const int*), const real* st,
                       double* dense) {
  int idx[8];
  for (long i = 0; i < volume; ++i) {
    tkc_unlinear(rank, shape, i, idx);
    long off = index(idx);
    dense[i] = off >= 0 ? (double)st[off] : 0.0;
  }
}

static void tkc_dump(const char* kernel, const char* tensor, long n, const real* st) {
  printf("%s %s %ld\n", kernel, tensor, n);
  for (long i = 0; i < n; ++i) printf("%a\n", (double)st[i]);
}

)";

std::string tests_file(const FamilyResult& fr, const std::vector<KernelView>& ks) {
  const Family& fam = fr.family;
  const std::string f = c_name(fam.name);
  const std::string F = upper(f);
  std::string s = fmt::format("#include \"{}.h\"\n\n", f);
  s += fmt::format("typedef {}_real real;\n\n", f);
  s += kTestPrelude;
  s += fmt::format("static const double tolerance = {};\n\n", fr.opt.single ? "1e-5" : "1e-12");

  std::set<std::string> used, packed;
  for (const auto& kv : ks) {
    for (const auto& t : tensors_of(*kv.src)) used.insert(t);
    for (const auto& t : tensor_slots(fam, *kv.lk)) packed.insert(t);
  }
  bool constants = false;
  for (const auto& name : used) constants = constants || fam.tensor(name).is_constant();
  if (constants) s += kTestCopy;
  for (const auto& name : used) {
    const Tensor& t = fam.tensor(name);
    const std::string n = c_name(name);
    if (packed.count(name))
      s += fmt::format("static const int shape_{}[] = {{{}}};\n", n, t.shape.empty() ? "1" : join(t.shape));
    if (t.is_constant()) {
      std::vector<std::string> txt;
      for (long i = 0; i < t.values->size(); ++i) txt.push_back(hexf((*t.values)[i]));
      s += fmt::format("static const double dense_{}[] = {{\n", n);
      for (size_t i = 0; i < txt.size(); i += 4) {
        std::vector<std::string> row(txt.begin() + i, txt.begin() + std::min(txt.size(), i + 4));
        s += "  " + join(row) + ",\n";
      }
      s += "};\n";
    } else {
      std::vector<long> nz;
      for (long i = 0; i < t.spp.size(); ++i)
        if (t.spp.lin(i)) nz.push_back(i);
      s += fmt::format("static const long nz_{}[] = {{{}}};\n", n, nz.empty() ? "0" : join(nz));
      s += fmt::format("static const long nnz_{} = {};\n", n, nz.size());
    }
  }
  s += "\n";

  for (const auto& kv : ks) {
    const std::string k = c_name(kv.kr->name);
    const std::set<std::string> tens = tensors_of(*kv.src);
    const std::set<std::string> written = written_by(*kv.src);
    s += fmt::format("static int test_{}(uint64_t seed, int dump) {{\n", k);
    for (const auto& [name, sc] : fam.scalars) {
      if (sc.value)
        s += fmt::format("  const double s_{} = {};\n", c_name(name), hexf(*sc.value));
      else
        s += fmt::format("  uint64_t st_{0} = tkc_stream(seed, \"{1}\");\n  const double s_{0} = 1.0 + 0.5 * tkc_unit(&st_{0});\n",
                         c_name(name), name);
      s += fmt::format("  (void)s_{};\n", c_name(name));
    }
    for (const auto& name : tens) {
      const Tensor& t = fam.tensor(name);
      const std::string n = c_name(name);
      const long vol = t.spp.size();
      if (t.is_constant())
        s += fmt::format("  double* d_{0} = tkc_copy({1}, dense_{0});\n", n, vol);
      else
        s += fmt::format("  double* d_{0} = tkc_random({1}, nz_{0}, nnz_{0}, seed, \"{2}\");\n", n, vol, name);
    }
    // Storage for the optimized kernel, packed before the reference runs.
    const std::vector<std::string> slots = tensor_slots(fam, *kv.lk);
    s += fmt::format("  struct {}_{} kernel;\n  memset(&kernel, 0, sizeof kernel);\n", f, k);
    for (const auto& name : slots) {
      const std::string n = c_name(name);
      const Tensor& t = fam.tensor(name);
      s += fmt::format("  kernel.{1} = tkc_pack({2}, shape_{1}, {3}, {4}_{1}_SIZE, {0}_{1}_index, d_{1});\n", f, n,
                       t.rank(), t.spp.size(), F);
    }
    for (const auto& y : scalar_slots(fam, *kv.lk)) s += fmt::format("  kernel.{0} = (real)s_{0};\n", c_name(y));
    for (const auto& st : kv.src->stmts) RefGen(fam, s).statement(st);
    s += fmt::format("  {}_{}_execute(&kernel);\n", f, k);
    s += "  double worst = 0.0;\n";
    for (const auto& name : written) {
      const std::string n = c_name(name);
      const Tensor& t = fam.tensor(name);
      const long vol = t.spp.size();
      s += "  {\n";
      s += fmt::format("    double* got = (double*)calloc({}, sizeof(double));\n", std::max(1L, vol));
      s += fmt::format("    tkc_unpack({}, shape_{}, {}, {}_{}_index, kernel.{}, got);\n", t.rank(), n, vol, f, n, n);
      s += "    double num = 0.0, den = 0.0;\n";
      s += fmt::format("    for (long i = 0; i < {}; ++i) {{\n", vol);
      s += fmt::format("      double e = got[i] - d_{}[i];\n      num += e * e;\n      den += d_{}[i] * d_{}[i];\n", n, n, n);
      s += "    }\n";
      s += "    double err = den > 0.0 ? sqrt(num / den) : sqrt(num);\n";
      s += "    if (!(err <= worst)) worst = err;\n";
      s += "    free(got);\n  }\n";
    }
    s += "  if (dump) {\n";
    for (const auto& name : slots)
      s += fmt::format("    tkc_dump(\"{}\", \"{}\", {}_{}_SIZE, kernel.{});\n", kv.kr->name, name, F, c_name(name), c_name(name));
    s += "  } else {\n";
    s += fmt::format("    printf(\"%s {}_{} relative error %.3e\\n\", worst <= tolerance ? \"PASS\" : \"FAIL\", worst);\n", f, k);
    s += "  }\n";
    for (const auto& name : slots) s += fmt::format("  free(kernel.{});\n", c_name(name));
    for (const auto& name : tens) s += fmt::format("  free(d_{});\n", c_name(name));
    s += "  return worst <= tolerance ? 0 : 1;\n}\n\n";
  }

  s += "int main(int argc, char** argv) {\n";
  s += fmt::format("  uint64_t seed = argc > 1 ? strtoull(argv[1], NULL, 10) : {}ULL;\n", fr.opt.seed);
  s += "  int dump = argc > 2 && strcmp(argv[2], \"--dump\") == 0;\n";
  s += "  int failures = 0;\n";
  for (const auto& kv : ks) s += fmt::format("  failures += test_{}(seed, dump);\n", c_name(kv.kr->name));
  s += "  return failures == 0 ? 0 : 1;\n}\n";
  return s;
}

template <class T>
std::string dump_kernel(const FamilyResult& fr, const KernelView& kv, uint64_t seed) {
  const Family& fam = fr.family;
  Values<T> v = cast_values<T>(make_inputs(fam, *kv.src, seed));
  std::map<std::string, std::vector<T>> store;
  Bindings<T> b;
  b.scalars = v.scalars;
  for (const auto& st : kv.lk->storage) {
    if (st.temp) continue;
    std::vector<double> p = pack(fr.layouts.at(st.name), v.tensors.at(st.name).template cast<double>());
    store[st.name].assign(p.begin(), p.end());
    b.tensors[st.name] = store[st.name].data();
  }
  execute<T>(*kv.lk, b);
  std::string out;
  char buf[64];
  for (const auto& name : tensor_slots(fam, *kv.lk)) {
    const auto& d = store.at(name);
    out += fmt::format("{} {} {}\n", kv.kr->name, name, d.size());
    for (T x : d) {
      std::snprintf(buf, sizeof buf, "%a\n", static_cast<double>(x));
      out += buf;
    }
  }
  return out;
}

}  // namespace

std::string c_name(const std::string& s) {
  std::string r;
  for (char c : s) r += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  if (r.empty() || std::isdigit(static_cast<unsigned char>(r[0]))) r = "_" + r;
  return r;
}

std::unique_ptr<Backend> make_backend(const std::string& name) {
  if (name == "portable") return std::make_unique<PortableBackend>();
  return nullptr;
}

std::vector<std::string> available_backends() { return {"portable"}; }

const Backend& select_backend(const std::vector<const Backend*>& order, OpKind kind, const Instr& in, bool single) {
  for (const Backend* b : order)
    if (b && b->supports(kind, in, single)) return *b;
  return portable();
}

std::vector<EmittedFile> emit_c99(const FamilyResult& fr, const std::vector<LoweredKernel>* lowered) {
  const std::vector<KernelView> ks = views(fr, lowered);
  const std::string f = c_name(fr.family.name);
  return {{f + ".h", header(fr, ks)},
          {f + "_kernels.c", kernels_file(fr, ks)},
          {f + "_tensors.c", tensors_file(fr)},
          {f + "_tests.c", tests_file(fr, ks)}};
}

std::string interpreter_dump(const FamilyResult& fr, uint64_t seed, const std::vector<LoweredKernel>* lowered) {
  std::string out;
  for (const auto& kv : views(fr, lowered))
    out += fr.opt.single ? dump_kernel<float>(fr, kv, seed) : dump_kernel<double>(fr, kv, seed);
  return out;
}

}  // namespace tkc
