#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tkc/ast.hpp"
#include "tkc/diag.hpp"

namespace tkc {

struct TensorDecl {
  std::string name;
  Extents shape;
  std::optional<std::string> spp;  // path of a pattern file
  std::optional<LayoutPolicy> layout;
  int line = 0, col = 0;

  bool operator==(const TensorDecl& o) const {
    return name == o.name && shape == o.shape && spp == o.spp && layout == o.layout;
  }
};

struct ScalarDecl {
  std::string name;
  std::optional<double> value;
  int line = 0, col = 0;

  bool operator==(const ScalarDecl& o) const { return name == o.name && value == o.value; }
};

struct KernelDecl {
  std::string name;
  std::vector<Statement> stmts;
  std::vector<std::pair<int, int>> stmt_pos;  // line, column of each statement
  std::vector<std::string> prefetch;
  int line = 0, col = 0;
};

struct KernelFile {
  std::vector<TensorDecl> tensors;
  std::vector<ScalarDecl> scalars;
  std::vector<KernelDecl> kernels;
};

// Errors: SyntaxError with line and column.
KernelFile parse(const std::string& text);
std::string print(const KernelFile& f);
// Structural equality (declarations and statement trees).
bool same_file(const KernelFile& a, const KernelFile& b);
// Loads pattern files relative to base_dir.  Errors carry the declaration's
// position.
Family to_family(const KernelFile& f, const std::string& name, const std::string& base_dir = ".");

// Expression text in the file syntax.
std::string print_expr(const NodePtr& n);
std::string format_number(double v);

}  // namespace tkc
