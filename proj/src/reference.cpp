#include "tkc/reference.hpp"

#include "tkc/einsum.hpp"
#include "tkc/interp.hpp"
#include "tkc/random.hpp"

namespace tkc {

namespace {

// Larger index spaces are evaluated pairwise.
constexpr long kDirectLimit = 1L << 22;

void walk_tensors(const NodePtr& n, std::set<std::string>& out) {
  if (n->kind == NodeKind::Indexed) out.insert(n->tensor);
  for (const auto& k : n->kids) walk_tensors(k, out);
}

template <class T>
Grid<T> eval(const Family& fam, const NodePtr& n, const Values<T>& v) {
  switch (n->kind) {
    case NodeKind::Indexed:
      return v.tensors.at(n->tensor);
    case NodeKind::Permute:
      return transpose(eval(fam, n->kids[0], v), n->kids[0]->idx, n->idx);
    case NodeKind::ScalarMul: {
      Grid<T> g = eval(fam, n->kids[0], v);
      const T a = eval_coef<T>(n->coef, v.scalars);
      for (long i = 0; i < g.size(); ++i) g[i] = a * g[i];
      return g;
    }
    case NodeKind::Add: {
      Grid<T> g = eval(fam, n->kids[0], v);
      for (size_t k = 1; k < n->kids.size(); ++k) {
        Grid<T> h = eval(fam, n->kids[k], v);
        for (long i = 0; i < g.size(); ++i) g[i] += h[i];
      }
      return g;
    }
    case NodeKind::Einsum: {
      std::vector<Grid<T>> kids;
      for (const auto& k : n->kids) kids.push_back(eval(fam, k, v));
      std::vector<ValueOperand<T>> ops;
      for (size_t k = 0; k < kids.size(); ++k) ops.emplace_back(&kids[k], n->kids[k]->idx);
      std::vector<IndexedShape> shapes;
      for (const auto& k : kids) shapes.emplace_back(k.extents(), ops[&k - kids.data()].second);
      if (build_index_space(shapes).volume() <= kDirectLimit) return naive_einsum<T>(n->idx, ops);
      return contract_values<T>(ops, n->idx);
    }
    default:
      throw Error("Internal", std::string("reference cannot evaluate ") + kind_name(n->kind));
  }
}

}  // namespace

std::set<std::string> tensors_of(const Kernel& k) {
  std::set<std::string> out;
  for (const auto& st : k.stmts) walk_tensors(st.root, out);
  return out;
}

std::set<std::string> written_by(const Kernel& k) {
  std::set<std::string> out;
  for (const auto& st : k.stmts) out.insert(st.root->kids[0]->tensor);
  return out;
}

Values<double> make_inputs(const Family& fam, const Kernel& k, uint64_t seed) {
  Values<double> v;
  for (const auto& name : tensors_of(k)) {
    const Tensor& t = fam.tensor(name);
    if (t.values) {
      v.tensors[name] = *t.values;
      continue;
    }
    Grid<double> g(t.shape);
    uint64_t s = tensor_stream(seed, name);
    for (long i = 0; i < g.size(); ++i)
      if (t.spp.lin(i)) g[i] = unit_random(s);
    v.tensors[name] = g;
  }
  for (const auto& [name, sc] : fam.scalars) {
    if (sc.value) {
      v.scalars[name] = *sc.value;
      continue;
    }
    uint64_t s = tensor_stream(seed, name);
    v.scalars[name] = 1.0 + 0.5 * unit_random(s);
  }
  return v;
}

template <class T>
Values<T> cast_values(const Values<double>& v) {
  Values<T> r;
  for (const auto& [n, g] : v.tensors) r.tensors[n] = g.template cast<T>();
  for (const auto& [n, s] : v.scalars) r.scalars[n] = static_cast<T>(s);
  return r;
}

template <class T>
void reference_run(const Family& fam, const Kernel& k, Values<T>& v) {
  for (const auto& st0 : k.stmts) {
    Statement st{st0.root->clone(), st0.accumulate};
    deduce_indices(fam, st);
    Grid<T> r = eval(fam, st.root->kids[1], v);
    v.tensors[st.root->kids[0]->tensor] = r;
  }
}

std::vector<double> pack_as(const MemoryLayout& l, const Grid<double>& g) { return pack(l, g); }

template <class T>
long interpret_run(const FamilyResult& fr, const LoweredKernel& lk, Values<T>& v) {
  std::map<std::string, std::vector<T>> store;
  Bindings<T> b;
  b.scalars = v.scalars;
  for (const auto& s : lk.storage) {
    if (s.temp) continue;
    const MemoryLayout& l = fr.layouts.at(s.name);
    std::vector<double> p = pack(l, v.tensors.at(s.name).template cast<double>());
    std::vector<T>& dst = store[s.name];
    dst.assign(p.begin(), p.end());
    b.tensors[s.name] = dst.data();
  }
  long flops = execute<T>(lk, b);
  for (auto& [name, data] : store) {
    std::vector<double> d(data.begin(), data.end());
    v.tensors[name] = unpack(fr.layouts.at(name), d).template cast<T>();
  }
  return flops;
}

template Values<double> cast_values<double>(const Values<double>&);
template Values<float> cast_values<float>(const Values<double>&);
template void reference_run<double>(const Family&, const Kernel&, Values<double>&);
template void reference_run<float>(const Family&, const Kernel&, Values<float>&);
template long interpret_run<double>(const FamilyResult&, const LoweredKernel&, Values<double>&);
template long interpret_run<float>(const FamilyResult&, const LoweredKernel&, Values<float>&);

}  // namespace tkc
