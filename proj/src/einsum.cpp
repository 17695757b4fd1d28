#include "tkc/einsum.hpp"

#include <cstdint>

#include "tkc/diag.hpp"
#include "tkc/letters.hpp"
#include "tkc/odometer.hpp"

namespace tkc {

namespace {

void check_result_letters(const IndexSpace& g, const std::string& result) {
  if (has_repeats(result)) throw Error("DuplicateIndexInTensor", "result index '" + result + "' repeats a letter");
  for (char c : result)
    if (g.position(c) < 0) throw Error("FreeIndexNotInOperands", std::string("result letter ") + c + " is unused");
}

// Generic term for pairwise evaluation under a (plus, times) semiring.
template <class T>
struct Term {
  std::string letters;
  Extents ext;
  std::vector<T> data;
};

struct BoolRing {
  using V = uint8_t;
  static V add(V a, V b) { return a | b; }
  static V mul(V a, V b) { return a & b; }
};

template <class T>
struct RealRing {
  using V = T;
  static V add(V a, V b) { return a + b; }
  static V mul(V a, V b) { return a * b; }
};

template <class R>
Term<typename R::V> combine(const Term<typename R::V>* a, const Term<typename R::V>* b, const std::string& keep,
                            const std::array<int, 52>& size) {
  using V = typename R::V;
  std::string all = a->letters;
  if (b) all = letter_union(all, b->letters);
  else all = sorted_letters(all);
  Term<V> r;
  r.letters = letters_in(all, keep);
  for (char c : r.letters) r.ext.push_back(size[letter_rank(c)]);
  r.data.assign(volume(r.ext), V(0));
  Extents ext;
  for (char c : all) ext.push_back(size[letter_rank(c)]);
  auto strides = [&](const std::string& idx, const Extents& e) {
    std::vector<long> st(all.size(), 0);
    long s = 1;
    for (size_t d = 0; d < idx.size(); ++d) {
      st[all.find(idx[d])] = s;
      s *= e[d];
    }
    return st;
  };
  std::array<std::vector<long>, 3> st{strides(r.letters, r.ext), strides(a->letters, a->ext),
                                      b ? strides(b->letters, b->ext) : std::vector<long>(all.size(), 0)};
  odometer<3>(ext, st, {0, 0, 0}, [&](const std::vector<int>&, const std::array<long, 3>& off) {
    V x = a->data[off[1]];
    if (b) x = R::mul(x, b->data[off[2]]);
    r.data[off[0]] = R::add(r.data[off[0]], x);
  });
  return r;
}

template <class R>
Term<typename R::V> evaluate(std::vector<Term<typename R::V>> terms, const std::string& result,
                             const std::array<int, 52>& size) {
  using V = typename R::V;
  if (terms.empty()) throw Error("EmptyEinsum", "no operands");
  auto needed = [&](size_t skip, size_t skip2) {
    std::string n = result;
    for (size_t t = 0; t < terms.size(); ++t)
      if (t != skip && t != skip2) n += terms[t].letters;
    return n;
  };
  for (size_t t = 0; t < terms.size(); ++t) {
    std::string keep = letters_in(terms[t].letters, needed(t, t));
    if (keep.size() != terms[t].letters.size()) terms[t] = combine<R>(&terms[t], nullptr, keep, size);
  }
  while (terms.size() > 1) {
    size_t bi = 0, bj = 1;
    long best = -1;
    for (size_t i = 0; i < terms.size(); ++i)
      for (size_t j = i + 1; j < terms.size(); ++j) {
        long v = 1;
        for (char c : letter_union(terms[i].letters, terms[j].letters)) v *= size[letter_rank(c)];
        if (best < 0 || v < best) {
          best = v;
          bi = i;
          bj = j;
        }
      }
    std::string keep = needed(bi, bj);
    Term<V> r = combine<R>(&terms[bi], &terms[bj], keep, size);
    terms.erase(terms.begin() + bj);
    terms[bi] = std::move(r);
  }
  Term<V> t = std::move(terms[0]);
  for (char c : result)
    if (!has_letter(t.letters, c)) throw Error("FreeIndexNotInOperands", std::string("result letter ") + c + " is unused");
  if (t.letters.size() != result.size()) t = combine<R>(&t, nullptr, result, size);
  return t;
}

template <class T, class G>
Term<T> to_term(const G& g, const std::string& idx) {
  Term<T> t;
  t.letters = idx;
  t.ext = g.extents();
  if constexpr (std::is_same_v<G, SparsityPattern>) t.data = g.bits();
  else t.data = g.data();
  return t;
}

template <class T>
std::vector<T> reorder(const Term<T>& t, const std::string& to, Extents& out_ext) {
  out_ext.clear();
  std::vector<long> src_stride(t.ext.size(), 1);
  for (size_t d = 1; d < t.ext.size(); ++d) src_stride[d] = src_stride[d - 1] * t.ext[d - 1];
  std::array<std::vector<long>, 1> st;
  for (char c : to) {
    const size_t p = t.letters.find(c);
    out_ext.push_back(t.ext[p]);
    st[0].push_back(src_stride[p]);
  }
  std::vector<T> out(volume(out_ext));
  long i = 0;
  odometer<1>(out_ext, st, {0}, [&](const std::vector<int>&, const std::array<long, 1>& off) { out[i++] = t.data[off[0]]; });
  return out;
}

std::array<int, 52> size_table(const IndexSpace& g) { return g.sizes; }

}  // namespace

template <class T>
Grid<T> naive_einsum(const std::string& result, const std::vector<ValueOperand<T>>& ops) {
  std::vector<IndexedShape> shapes;
  for (const auto& [grid, idx] : ops) shapes.emplace_back(grid->extents(), idx);
  IndexSpace g = build_index_space(shapes);
  check_result_letters(g, result);
  Grid<T> out(g.extents_of(result));
  std::vector<Projection> proj;
  for (const auto& op : ops) proj.emplace_back(g, op.second);
  Projection pu(g, result);
  Extents ge = g.extents();
  for (long lin = 0; lin < g.volume(); ++lin) {
    MultiIndex j = unlinear_index(ge, lin);
    T prod = T(1);
    for (size_t k = 0; k < ops.size(); ++k) prod *= (*ops[k].first)(proj[k].apply(j));
    out(pu.apply(j)) += prod;
  }
  return out;
}

SparsityPattern spp_of_product(const std::vector<PatternOperand>& ops, const std::string& result) {
  std::vector<IndexedShape> shapes;
  for (const auto& [p, idx] : ops) shapes.emplace_back(p->extents(), idx);
  IndexSpace g = build_index_space(shapes);
  check_result_letters(g, result);
  SparsityPattern out(g.extents_of(result));
  std::vector<Projection> proj;
  for (const auto& op : ops) proj.emplace_back(g, op.second);
  Projection pu(g, result);
  Extents ge = g.extents();
  for (long lin = 0; lin < g.volume(); ++lin) {
    MultiIndex j = unlinear_index(ge, lin);
    bool all = true;
    for (size_t k = 0; k < ops.size() && all; ++k) all = ops[k].first->at(proj[k].apply(j));
    if (all) out.set(pu.apply(j));
  }
  return out;
}

SparsityPattern contract_patterns(const std::vector<PatternOperand>& ops, const std::string& result) {
  std::vector<IndexedShape> shapes;
  for (const auto& [p, idx] : ops) shapes.emplace_back(p->extents(), idx);
  IndexSpace g = build_index_space(shapes);
  check_result_letters(g, result);
  std::vector<Term<uint8_t>> terms;
  for (const auto& [p, idx] : ops) terms.push_back(to_term<uint8_t>(*p, idx));
  Term<uint8_t> t = evaluate<BoolRing>(std::move(terms), result, size_table(g));
  Extents ext;
  std::vector<uint8_t> bits = reorder(t, result, ext);
  SparsityPattern out(ext);
  out.bits() = std::move(bits);
  return out;
}

template <class T>
Grid<T> contract_values(const std::vector<ValueOperand<T>>& ops, const std::string& result) {
  std::vector<IndexedShape> shapes;
  for (const auto& [p, idx] : ops) shapes.emplace_back(p->extents(), idx);
  IndexSpace g = build_index_space(shapes);
  check_result_letters(g, result);
  std::vector<Term<T>> terms;
  for (const auto& [p, idx] : ops) terms.push_back(to_term<T>(*p, idx));
  Term<T> t = evaluate<RealRing<T>>(std::move(terms), result, size_table(g));
  Extents ext;
  std::vector<T> data = reorder(t, result, ext);
  Grid<T> out(ext);
  out.data() = std::move(data);
  return out;
}

template <class T>
Grid<T> transpose(const Grid<T>& g, const std::string& from, const std::string& to) {
  Term<T> t{from, g.extents(), g.data()};
  Extents ext;
  std::vector<T> data = reorder(t, to, ext);
  Grid<T> out(ext);
  out.data() = std::move(data);
  return out;
}

SparsityPattern transpose(const SparsityPattern& p, const std::string& from, const std::string& to) {
  Term<uint8_t> t{from, p.extents(), p.bits()};
  Extents ext;
  std::vector<uint8_t> bits = reorder(t, to, ext);
  SparsityPattern out(ext);
  out.bits() = std::move(bits);
  return out;
}

template Grid<double> naive_einsum<double>(const std::string&, const std::vector<ValueOperand<double>>&);
template Grid<float> naive_einsum<float>(const std::string&, const std::vector<ValueOperand<float>>&);
template Grid<double> contract_values<double>(const std::vector<ValueOperand<double>>&, const std::string&);
template Grid<float> contract_values<float>(const std::vector<ValueOperand<float>>&, const std::string&);
template Grid<double> transpose<double>(const Grid<double>&, const std::string&, const std::string&);
template Grid<float> transpose<float>(const Grid<float>&, const std::string&, const std::string&);

}  // namespace tkc
