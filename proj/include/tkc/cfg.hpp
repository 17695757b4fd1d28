#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tkc/ast.hpp"
#include "tkc/layout.hpp"
#include "tkc/log.hpp"

namespace tkc {

enum class OpKind { CopyScaleAdd, IndexSum, Product, Log };

const char* op_kind_name(OpKind k);

struct Operand {
  std::string var;
  std::string idx;
  bool operator==(const Operand& o) const { return var == o.var && idx == o.idx; }
};

struct Action {
  Operand lhs;
  bool add = false;  // plus-equals
  Coef alpha;
  OpKind kind = OpKind::CopyScaleAdd;
  NodePtr node;  // Contraction with plan, Product or IndexSum; empty for copies
  std::vector<Operand> args;
  std::optional<RangeMap> ranges;  // Log: effective ranges when first lowered
  std::string prefetch;

  bool reads(const std::string& v) const;
  bool writes(const std::string& v) const { return lhs.var == v; }
};

struct VarInfo {
  std::string name;
  bool temp = false;
  MemoryLayout layout;
};

struct Buffer {
  long elements = 0;
  std::vector<std::string> vars;
};

struct CfgProgram {
  std::string kernel;
  std::map<std::string, VarInfo> vars;
  std::vector<Action> actions;
  std::vector<std::set<std::string>> live;  // live temporaries after each action
  std::vector<Buffer> buffers;
  std::map<std::string, int> buffer_of;
  int next_temp = 0;
};

// One action per operation node, fresh temporaries for internal results.
// `layouts` holds the declared tensors' layouts.
CfgProgram lower(const Kernel& k, const std::map<std::string, MemoryLayout>& layouts, int align);

void liveness(CfgProgram& p);
bool merge_scalar_multiplications(CfgProgram& p);
bool substitute_forward(CfgProgram& p);
bool substitute_backward(CfgProgram& p);
bool remove_empty_statements(CfgProgram& p);
bool merge_actions(CfgProgram& p);
// DetermineLocalInitialization: greedy first-fit of temporaries to buffers.
void buffer_plan(CfgProgram& p);

using PassTrace = std::vector<std::pair<std::string, CfgProgram>>;

// Runs the pass list to a fixpoint, then assigns buffers.  When `trace` is
// set, the program after every individual pass application is recorded.
CfgProgram run_passes(CfgProgram p, PassTrace* trace = nullptr);

std::string dump(const Action& a);
std::string dump(const CfgProgram& p);

}  // namespace tkc
