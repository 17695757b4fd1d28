#include "tkc/interp.hpp"

#include <algorithm>

#include "tkc/diag.hpp"
#include "tkc/odometer.hpp"

namespace tkc {

template <class T>
T eval_coef(const Coef& c, const std::map<std::string, T>& scalars) {
  T a = static_cast<T>(c.lit);
  for (const auto& s : c.syms) {
    auto it = scalars.find(s);
    if (it == scalars.end()) throw Error("UnboundSlot", "scalar " + s + " is not bound");
    a = a * it->second;
  }
  return a;
}

namespace {

template <class T>
class Machine {
public:
  Machine(const LoweredKernel& k, Bindings<T>& b) : b_(b) {
    for (const auto& s : k.storage) {
      if (s.temp) {
        temps_[s.name].assign(s.elements, T(0));
        mem_[s.name] = temps_[s.name].data();
        size_[s.name] = s.elements;
        continue;
      }
      auto it = b.tensors.find(s.name);
      if (it == b.tensors.end() || !it->second) throw Error("UnboundSlot", "tensor " + s.name + " is not bound");
      mem_[s.name] = it->second;
      size_[s.name] = s.elements;
    }
  }

  long flops = 0;

  void run(const Instr& in) {
    if (const auto* z = std::get_if<ZeroInstr>(&in)) {
      std::fill(mem_.at(z->var), mem_.at(z->var) + size_.at(z->var), T(0));
    } else if (const auto* g = std::get_if<GemmInstr>(&in)) {
      gemm(*g);
    } else {
      nest(std::get<NestInstr>(in));
    }
  }

private:
  // GEMM stores count the alpha scaling only; the accumulation into C is
  // part of the 2MNK convention.
  void store(T& c, T acc, bool scale, T alpha, bool accumulate, bool gemm = false) {
    T v = scale ? alpha * acc : acc;
    c = accumulate ? v + c : v;
    flops += (scale ? 1 : 0) + (accumulate && !gemm ? 1 : 0);
  }

  void gemm(const GemmInstr& g) {
    const T* A = mem_.at(g.a);
    const T* B = mem_.at(g.b);
    T* C = mem_.at(g.c);
    const bool scale = !g.alpha.is_one();
    const T alpha = eval_coef<T>(g.alpha, b_.scalars);
    std::vector<int> cnt(g.batch_count.rbegin(), g.batch_count.rend());
    std::array<std::vector<long>, 3> st{std::vector<long>(g.batch_a.rbegin(), g.batch_a.rend()),
                                        std::vector<long>(g.batch_b.rbegin(), g.batch_b.rend()),
                                        std::vector<long>(g.batch_c.rbegin(), g.batch_c.rend())};
    odometer<3>(cnt, st, {g.base_a, g.base_b, g.base_c}, [&](const std::vector<int>&, const std::array<long, 3>& o) {
      if (g.csc) {
        for (int col = g.n_lo; col < g.n_hi; ++col)
          for (long m = 0; m < g.M; ++m) {
            T acc = T(0);
            for (int p = g.colptr[col]; p < g.colptr[col + 1]; ++p) {
              const int row = g.rowidx[p];
              if (row < g.k_lo || row >= g.k_hi) continue;
              acc += A[o[0] + m * g.a_m + (row - g.k_lo) * g.a_k] * B[p];
              flops += 2;
            }
            store(C[o[2] + m * g.c_m + (col - g.n_lo) * g.c_n], acc, scale, alpha, g.accumulate, true);
          }
        return;
      }
      for (long n = 0; n < g.N; ++n)
        for (long m = 0; m < g.M; ++m) {
          T acc = T(0);
          for (long k = 0; k < g.K; ++k) {
            acc += A[o[0] + m * g.a_m + k * g.a_k] * B[o[1] + k * g.b_k + n * g.b_n];
            flops += 2;
          }
          store(C[o[2] + m * g.c_m + n * g.c_n], acc, scale, alpha, g.accumulate, true);
        }
    });
  }

  void nest(const NestInstr& n) {
    T* out = mem_.at(n.out);
    const T* a = mem_.at(n.a);
    const T* b = n.kind == NestInstr::Product ? mem_.at(n.b) : nullptr;
    const bool scale = !n.alpha.is_one();
    const T alpha = eval_coef<T>(n.alpha, b_.scalars);
    std::array<std::vector<long>, 3> st{n.s_out, n.s_a, n.s_b};
    odometer<3>(n.count, st, {n.base_out, n.base_a, n.base_b}, [&](const std::vector<int>&, const std::array<long, 3>& o) {
      T v;
      if (n.kind == NestInstr::Copy) {
        v = a[o[1]];
      } else if (n.kind == NestInstr::Product) {
        v = a[o[1]] * b[o[2]];
        ++flops;
      } else {
        v = T(0);
        for (int s = 0; s < n.sum_count; ++s) {
          v += a[o[1] + s * n.sum_a];
          ++flops;
        }
      }
      store(out[o[0]], v, scale, alpha, n.accumulate);
    });
  }

  Bindings<T>& b_;
  std::map<std::string, std::vector<T>> temps_;
  std::map<std::string, T*> mem_;
  std::map<std::string, long> size_;
};

}  // namespace

template <class T>
long execute(const LoweredKernel& k, Bindings<T>& b) {
  Machine<T> m(k, b);
  for (const auto& a : k.actions)
    for (const auto& in : a.instrs) m.run(in);
  return m.flops;
}

template long execute<double>(const LoweredKernel&, Bindings<double>&);
template long execute<float>(const LoweredKernel&, Bindings<float>&);
template double eval_coef<double>(const Coef&, const std::map<std::string, double>&);
template float eval_coef<float>(const Coef&, const std::map<std::string, float>&);

}  // namespace tkc
