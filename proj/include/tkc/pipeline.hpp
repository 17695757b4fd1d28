#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tkc/ast.hpp"
#include "tkc/cfg.hpp"
#include "tkc/layout.hpp"
#include "tkc/log.hpp"
#include "tkc/lowered.hpp"
#include "tkc/prefetch.hpp"
#include "tkc/strength.hpp"

namespace tkc {

struct Options {
  bool single = false;  // element type float instead of double
  int align = 1;        // SIMD width v in elements
  bool eqspp = true;
  bool csc = true;             // allow CSC for sparse constant matrices
  double csc_density = 0.4;    // nnz/size below which CSC is tried
  bool dense_baseline = false;  // every pattern dense, every layout dense, no EQSPP
  Caps caps;
  uint64_t seed = 1;  // default seed of the generated unit tests
  std::vector<std::string> backend_order{"portable"};

  int element_bytes() const { return single ? 4 : 8; }
};

struct EinsumInfo {
  std::string text;   // parenthesisation of the reduced tree
  long cost = 0;      // sparse operation count of the schedule
  long naive = 0;     // direct evaluation count
  std::vector<SrOperand> operands;  // EQSPP-masked operands
  std::string result;
};

struct KernelResult {
  std::string name;
  std::vector<NodePtr> trees;  // final trees, one per statement
  std::vector<NodePtr> unconfigured;  // the same before the permutation DP
  std::vector<EinsumInfo> einsums;
  long nonzero_flops = 0;
  long hardware_flops = 0;
  CostTuple log_cost;
  int loop_fallbacks = 0;  // contractions without a LoG plan, run as loop nests
  CfgProgram initial_cfg;
  CfgProgram cfg;
  LoweredKernel lowered;
  std::vector<PrefetchMatch> prefetch;
  Diagnostics diags;
  bool ok = false;
};

struct FamilyResult {
  Family family;  // after the dense-baseline rewrite, if any
  Options opt;
  std::map<std::string, SparsityPattern> storage_spp;
  std::map<std::string, MemoryLayout> layouts;
  std::vector<KernelResult> kernels;
  Diagnostics diags;

  bool ok() const;
  const KernelResult& kernel(const std::string& name) const;
};

// Strength-reduced statement trees of one kernel before layout decisions.
struct ShapedKernel {
  std::string name;
  std::vector<NodePtr> trees;
  std::vector<EinsumInfo> einsums;
  long nonzero_flops = 0;
};

// AST shaping, EQSPP and strength reduction for one statement.
// Errors: those of deduce_indices.
NodePtr shape_statement(const Family& fam, const Statement& st, bool eqspp, std::vector<EinsumInfo>* info,
                        long* nonzero);

FamilyResult run_pipeline(const Family& fam, const Options& opt);

}  // namespace tkc
