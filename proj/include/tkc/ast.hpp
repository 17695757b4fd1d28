#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tkc/diag.hpp"
#include "tkc/spp.hpp"
#include "tkc/tensor.hpp"

namespace tkc {

enum class NodeKind { Assign, Add, ScalarMul, Einsum, Indexed, Product, IndexSum, Contraction, LoG, Permute };

const char* kind_name(NodeKind k);

// Literal factor times an ordered product of named scalars.
struct Coef {
  double lit = 1.0;
  std::vector<std::string> syms;

  bool is_one() const { return lit == 1.0 && syms.empty(); }
  Coef operator*(const Coef& o) const;
  bool operator==(const Coef& o) const { return lit == o.lit && syms == o.syms; }
  std::string str() const;
};

struct LogPlan;

struct Node;
using NodePtr = std::shared_ptr<Node>;

struct Node {
  NodeKind kind = NodeKind::Indexed;
  std::vector<NodePtr> kids;
  std::string idx;                       // result letters in storage order
  SparsityPattern spp;                   // pattern of the result over idx
  std::optional<SparsityPattern> eqspp;  // Indexed operands: mask for this occurrence
  Coef coef;                             // ScalarMul
  std::string tensor;                    // Indexed
  std::string summed;                    // IndexSum: one letter; Contraction/LoG: contracted letters
  std::shared_ptr<const LogPlan> plan;   // LoG
  std::string prefetch;                  // tensor prefetched alongside this LoG
  bool scalar_only = false;              // builder leaf holding only a coefficient

  NodePtr clone() const;  // deep copy
};

NodePtr make_node(NodeKind k, std::vector<NodePtr> kids = {}, std::string idx = {});
NodePtr make_indexed(const std::string& tensor, const std::string& idx);

// The four merge actions for '*' (Einsum) and '+' (Add).
NodePtr combine(NodePtr op1, NodePtr op2, NodeKind type);

// Builder mirroring operator forms.  Scalars in a '*' chain are folded into
// one ScalarMul above the Einsum; literal factors are multiplied eagerly.
class Expr {
public:
  Expr() = default;
  explicit Expr(NodePtr n) : n_(std::move(n)) {}
  const NodePtr& node() const { return n_; }

private:
  NodePtr n_;
};

Expr ix(const std::string& tensor, const std::string& idx);
Expr lit(double v);
Expr sym(const std::string& scalar);
Expr operator*(const Expr& a, const Expr& b);
Expr operator+(const Expr& a, const Expr& b);
Expr operator*(double a, const Expr& b);

struct Statement {
  NodePtr root;  // Assign(target, expr); `+=` already desugared
  bool accumulate = false;
};

struct Kernel {
  std::string name;
  std::vector<Statement> stmts;
  std::vector<std::string> prefetch;
};

struct Family {
  std::string name = "family";
  std::map<std::string, Tensor> tensors;
  std::map<std::string, Scalar> scalars;
  std::vector<Kernel> kernels;

  void add_tensor(Tensor t);
  void add_scalar(Scalar s);
  const Tensor& tensor(const std::string& name) const;
};

// target <= expr, or target <= target + expr when accumulate.
Statement make_statement(const Expr& target, const Expr& expr, bool accumulate);

struct Caps {
  int max_rank = 7;
  long max_elements = 1L << 20;
  int max_operands = 7;
};

// Fills idx (and Permute wrappers) top-down from the assignment target.
// Errors: IndexMismatch, FreeIndexNotInTarget.
void deduce_indices(const Family& fam, Statement& st);
// Result letters of an Einsum for a given target.
std::string deduce_einsum_letters(const std::vector<std::string>& operand_letters, const std::string& target);

Diagnostics validate_kernel(const Family& fam, const Kernel& k, const Caps& caps = {});

// Structural checks used by tests: no Einsum under Einsum, no Add under Add,
// no ScalarMul under Einsum.
bool normalized(const NodePtr& n);

std::string dump(const NodePtr& n);

template <class F>
void visit_postorder(const NodePtr& n, F&& f) {
  for (const auto& k : n->kids) visit_postorder(k, f);
  f(n);
}

}  // namespace tkc
