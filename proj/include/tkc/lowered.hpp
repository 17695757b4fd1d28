#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tkc/cfg.hpp"
#include "tkc/log.hpp"

namespace tkc {

struct ZeroInstr {
  std::string var;
};

// Per batch iteration: C[m,n] = alpha*sum_k A[m,k]B[k,n] (+ C[m,n]).
struct GemmInstr {
  std::string a, b, c;
  long base_a = 0, base_b = 0, base_c = 0;
  std::vector<int> batch_count;  // outermost first
  std::vector<long> batch_a, batch_b, batch_c;
  long M = 1, N = 1, K = 1;
  long a_m = 0, a_k = 0, b_k = 0, b_n = 0, c_m = 0, c_n = 0;
  Coef alpha;
  bool accumulate = false;
  // b stored as Csc: rows are k, columns are n.
  bool csc = false;
  std::vector<int> colptr, rowidx;
  int k_lo = 0, k_hi = 0, n_lo = 0, n_hi = 0;
};

// Elementwise loop nest, first loop fastest.
struct NestInstr {
  enum Kind { Copy, Product, Sum } kind = Copy;
  std::string out, a, b;
  long base_out = 0, base_a = 0, base_b = 0;
  std::vector<int> count;
  std::vector<long> s_out, s_a, s_b;
  int sum_count = 1;
  long sum_a = 0;
  Coef alpha;
  bool accumulate = false;
};

using Instr = std::variant<ZeroInstr, GemmInstr, NestInstr>;

long instr_flops(const Instr& in);

// Concrete GEMM for a plan on the given operand layouts; nullopt when the
// plan is not realisable.  a and b are the contraction's children.
std::optional<GemmInstr> instantiate_log(const LogPlan& plan, const LogOperand& a, const LogOperand& b,
                                         const LogOperand& c, const RangeMap& region, RangeMap* ranges = nullptr);

// Log actions stay valid after a rename only if the plan still fits and
// computes the same index ranges.
bool log_legal(const CfgProgram& p, const Action& a);

std::vector<Instr> lower_action(const CfgProgram& p, const Action& a);

struct LoweredAction {
  std::string text;  // dump of the CFG action
  OpKind kind = OpKind::CopyScaleAdd;
  std::vector<Instr> instrs;
  long flops = 0;
  std::string prefetch;
};

struct Storage {
  std::string name;
  long elements = 0;
  bool temp = false;
};

struct LoweredKernel {
  std::string name;
  std::vector<LoweredAction> actions;
  std::vector<Storage> storage;  // declared tensors first, then buffers
  long hardware_flops = 0;
};

// Temporaries are renamed to their buffers when a buffer plan exists.
LoweredKernel lower_program(const CfgProgram& p);

}  // namespace tkc
