#include "tkc/ast.hpp"

#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "tkc/letters.hpp"

namespace tkc {

const char* kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::Assign: return "Assign";
    case NodeKind::Add: return "Add";
    case NodeKind::ScalarMul: return "ScalarMultiplication";
    case NodeKind::Einsum: return "Einsum";
    case NodeKind::Indexed: return "IndexedTensor";
    case NodeKind::Product: return "Product";
    case NodeKind::IndexSum: return "IndexSum";
    case NodeKind::Contraction: return "Contraction";
    case NodeKind::LoG: return "LoG";
    case NodeKind::Permute: return "Permute";
  }
  return "?";
}

Coef Coef::operator*(const Coef& o) const {
  Coef r;
  r.lit = lit * o.lit;
  r.syms = syms;
  r.syms.insert(r.syms.end(), o.syms.begin(), o.syms.end());
  return r;
}

std::string Coef::str() const {
  std::ostringstream os;
  os.precision(17);
  os << lit;
  for (const auto& s : syms) os << "*" << s;
  return os.str();
}

NodePtr Node::clone() const {
  auto n = std::make_shared<Node>(*this);
  for (auto& k : n->kids) k = k->clone();
  return n;
}

NodePtr make_node(NodeKind k, std::vector<NodePtr> kids, std::string idx) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->kids = std::move(kids);
  n->idx = std::move(idx);
  return n;
}

NodePtr make_indexed(const std::string& tensor, const std::string& idx) {
  auto n = make_node(NodeKind::Indexed, {}, idx);
  n->tensor = tensor;
  return n;
}

NodePtr combine(NodePtr op1, NodePtr op2, NodeKind type) {
  const bool t1 = op1->kind == type, t2 = op2->kind == type;
  if (t1 && t2) {
    auto r = std::make_shared<Node>(*op1);
    r->kids.insert(r->kids.end(), op2->kids.begin(), op2->kids.end());
    return r;
  }
  if (t1) {
    auto r = std::make_shared<Node>(*op1);
    r->kids.push_back(op2);
    return r;
  }
  if (t2) {
    auto r = std::make_shared<Node>(*op2);
    r->kids.insert(r->kids.begin(), op1);
    return r;
  }
  return make_node(type, {std::move(op1), std::move(op2)});
}

Expr ix(const std::string& tensor, const std::string& idx) { return Expr(make_indexed(tensor, idx)); }

Expr lit(double v) {
  auto n = make_node(NodeKind::ScalarMul);
  n->coef.lit = v;
  n->scalar_only = true;
  return Expr(n);
}

Expr sym(const std::string& scalar) {
  auto n = make_node(NodeKind::ScalarMul);
  n->coef.syms.push_back(scalar);
  n->scalar_only = true;
  return Expr(n);
}

namespace {

std::pair<Coef, NodePtr> strip(const NodePtr& n) {
  if (n->kind == NodeKind::ScalarMul) return {n->coef, n->scalar_only ? nullptr : n->kids[0]};
  return {Coef{}, n};
}

}  // namespace

Expr operator*(const Expr& a, const Expr& b) {
  auto [ca, ia] = strip(a.node());
  auto [cb, ib] = strip(b.node());
  Coef c = ca * cb;
  NodePtr inner = ia && ib ? combine(ia, ib, NodeKind::Einsum) : (ia ? ia : ib);
  auto n = make_node(NodeKind::ScalarMul);
  n->coef = c;
  if (!inner) {
    n->scalar_only = true;
    return Expr(n);
  }
  if (c.is_one()) return Expr(inner);
  n->kids.push_back(inner);
  return Expr(n);
}

Expr operator*(double a, const Expr& b) { return lit(a) * b; }

Expr operator+(const Expr& a, const Expr& b) {
  if (a.node()->scalar_only || b.node()->scalar_only)
    throw Error("ScalarInAdd", "a scalar cannot be added to a tensor expression");
  return Expr(combine(a.node(), b.node(), NodeKind::Add));
}

void Family::add_tensor(Tensor t) {
  if (tensors.count(t.name) || scalars.count(t.name)) throw Error("Redeclared", "name " + t.name + " declared twice");
  std::string n = t.name;
  tensors.emplace(n, std::move(t));
}

void Family::add_scalar(Scalar s) {
  if (tensors.count(s.name) || scalars.count(s.name)) throw Error("Redeclared", "name " + s.name + " declared twice");
  if (s.value && !std::isfinite(*s.value)) throw Error("BadScalar", "scalar " + s.name + " is not finite");
  std::string n = s.name;
  scalars.emplace(n, std::move(s));
}

const Tensor& Family::tensor(const std::string& name) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw Error("UndeclaredTensor", "tensor " + name + " is not declared");
  return it->second;
}

Statement make_statement(const Expr& target, const Expr& expr, bool accumulate) {
  if (target.node()->kind != NodeKind::Indexed) throw Error("BadTarget", "assignment target must be an indexed tensor");
  if (expr.node()->scalar_only) throw Error("ScalarInAssign", "cannot assign a bare scalar to a tensor");
  Statement st;
  st.accumulate = accumulate;
  NodePtr rhs = expr.node();
  if (accumulate) rhs = combine(make_indexed(target.node()->tensor, target.node()->idx), rhs, NodeKind::Add);
  st.root = make_node(NodeKind::Assign, {target.node()->clone(), rhs});
  return st;
}

std::string deduce_einsum_letters(const std::vector<std::string>& operand_letters, const std::string& target) {
  std::map<char, int> count;
  std::string all;
  for (const auto& l : operand_letters)
    for (char c : l) {
      if (!count[c]++) all += c;
    }
  for (char c : all)
    if (count[c] == 1 && !has_letter(target, c))
      throw Error("FreeIndexNotInTarget", std::string("index ") + c + " occurs once but is not in target '" + target + "'");
  return letters_in(target, all);
}

namespace {

// Forces node n to produce letters in order `order`; leaves get a Permute.
NodePtr set_order(const NodePtr& n, const std::string& order) {
  if (n->idx == order) return n;
  switch (n->kind) {
    case NodeKind::Indexed:
      return make_node(NodeKind::Permute, {n}, order);
    case NodeKind::ScalarMul:
      n->kids[0] = set_order(n->kids[0], order);
      n->idx = order;
      return n;
    case NodeKind::Add:
      for (auto& k : n->kids) k = set_order(k, order);
      n->idx = order;
      return n;
    default:
      n->idx = order;
      return n;
  }
}

std::string deduce(const Family& fam, const NodePtr& n, const std::string& ctx) {
  switch (n->kind) {
    case NodeKind::Indexed: {
      const Tensor& t = fam.tensor(n->tensor);
      if (static_cast<int>(n->idx.size()) != t.rank())
        throw Error("RankMismatch", "index string '" + n->idx + "' of " + t.name + " has length " +
                                        std::to_string(n->idx.size()) + " but rank is " + std::to_string(t.rank()));
      if (has_repeats(n->idx)) throw Error("DuplicateIndexInTensor", "index string '" + n->idx + "' repeats a letter");
      return n->idx;
    }
    case NodeKind::ScalarMul:
      n->idx = deduce(fam, n->kids[0], ctx);
      return n->idx;
    case NodeKind::Permute:
      deduce(fam, n->kids[0], n->idx);
      if (!same_letter_set(n->kids[0]->idx, n->idx)) throw Error("IndexMismatch", "permute changes the letter set");
      return n->idx;
    case NodeKind::Einsum: {
      std::string fixed;
      for (const auto& k : n->kids)
        if (k->kind == NodeKind::Indexed) fixed += deduce(fam, k, ctx);
      std::vector<std::string> letters;
      for (auto& k : n->kids) {
        if (k->kind == NodeKind::Indexed) letters.push_back(k->idx);
        else letters.push_back(deduce(fam, k, ctx + fixed));
      }
      n->idx = deduce_einsum_letters(letters, ctx);
      return n->idx;
    }
    case NodeKind::Add: {
      std::vector<std::string> l;
      for (auto& k : n->kids) l.push_back(deduce(fam, k, ctx));
      for (size_t i = 1; i < l.size(); ++i)
        if (!same_letter_set(l[i], l[0]))
          throw Error("IndexMismatch", "addition of '" + l[0] + "' and '" + l[i] + "' with different letters");
      std::string order = letters_not_in(l[0], ctx).empty() ? letters_in(ctx, l[0]) : l[0];
      for (auto& k : n->kids) k = set_order(k, order);
      n->idx = order;
      return n->idx;
    }
    case NodeKind::Assign: {
      const std::string t = deduce(fam, n->kids[0], "");
      const std::string e = deduce(fam, n->kids[1], t);
      if (!same_letter_set(t, e))
        throw Error("IndexMismatch", "expression letters '" + e + "' do not match target '" + t + "'");
      n->kids[1] = set_order(n->kids[1], t);
      n->idx = t;
      return t;
    }
    default:
      return n->idx;
  }
}

}  // namespace

void deduce_indices(const Family& fam, Statement& st) { deduce(fam, st.root, ""); }

Diagnostics validate_kernel(const Family& fam, const Kernel& k, const Caps& caps) {
  Diagnostics out;
  auto diag = [&](std::string code, std::string msg) {
    out.push_back(Diagnostic{std::move(code), "kernel " + k.name + ": " + std::move(msg), 0, 0});
  };
  for (const auto& st : k.stmts) {
    bool structural = true;
    std::set<char> distinct;
    std::function<void(const NodePtr&)> walk = [&](const NodePtr& n) {
      if (n->kind == NodeKind::Indexed) {
        for (char c : n->idx) distinct.insert(c);
        auto it = fam.tensors.find(n->tensor);
        if (it == fam.tensors.end()) {
          diag("UndeclaredTensor", "tensor " + n->tensor + " is not declared");
          structural = false;
        } else {
          const Tensor& t = it->second;
          if (static_cast<int>(n->idx.size()) != t.rank()) {
            diag("RankMismatch", "index string '" + n->idx + "' has length " + std::to_string(n->idx.size()) +
                                     " but " + t.name + " has rank " + std::to_string(t.rank()));
            structural = false;
          }
          if (t.rank() > caps.max_rank) diag("CapExceeded", "tensor " + t.name + " exceeds the rank cap");
          if (volume(t.shape) > caps.max_elements) diag("CapExceeded", "tensor " + t.name + " exceeds the size cap");
        }
        if (has_repeats(n->idx)) {
          diag("DuplicateIndexInTensor", "index string '" + n->idx + "' repeats a letter");
          structural = false;
        }
        for (char c : n->idx)
          if (!is_letter(c)) {
            diag("BadIndex", std::string("'") + c + "' is not an index letter");
            structural = false;
          }
      }
      if (n->kind == NodeKind::ScalarMul)
        for (const auto& s : n->coef.syms)
          if (!fam.scalars.count(s)) {
            diag("UndeclaredScalar", "scalar " + s + " is not declared");
            structural = false;
          }
      if (n->kind == NodeKind::Einsum && static_cast<int>(n->kids.size()) > caps.max_operands)
        diag("CapExceeded", "einsum with " + std::to_string(n->kids.size()) + " operands exceeds the cap");
      for (const auto& c : n->kids) walk(c);
    };
    walk(st.root);
    if (distinct.size() > 52) {
      diag("AlphabetExhausted", std::to_string(distinct.size()) + " distinct indices requested; at most 52 exist");
      structural = false;
    }
    const NodePtr& target = st.root->kids[0];
    auto it = fam.tensors.find(target->tensor);
    if (it != fam.tensors.end() && it->second.is_constant())
      diag("ReadOnlyTarget", "constant tensor " + target->tensor + " cannot be assigned");
    if (!structural) continue;
    std::function<void(const NodePtr&)> sizes = [&](const NodePtr& n) {
      if (n->kind == NodeKind::Einsum || n->kind == NodeKind::Assign) {
        std::vector<IndexedShape> shapes;
        for (const auto& c : n->kids)
          if (c->kind == NodeKind::Indexed) shapes.emplace_back(fam.tensor(c->tensor).shape, c->idx);
        try {
          build_index_space(shapes);
        } catch (const Error& e) {
          diag(e.code(), e.diag().message);
        }
      }
      for (const auto& c : n->kids) sizes(c);
    };
    sizes(st.root);
    Statement copy{st.root->clone(), st.accumulate};
    try {
      deduce_indices(fam, copy);
    } catch (const Error& e) {
      diag(e.code(), e.diag().message);
    }
  }
  return out;
}

bool normalized(const NodePtr& n) {
  for (const auto& c : n->kids) {
    if (n->kind == NodeKind::Einsum && (c->kind == NodeKind::Einsum || c->kind == NodeKind::ScalarMul)) return false;
    if (n->kind == NodeKind::Add && c->kind == NodeKind::Add) return false;
    if (!normalized(c)) return false;
  }
  return true;
}

std::string dump(const NodePtr& n) {
  std::ostringstream os;
  switch (n->kind) {
    case NodeKind::Indexed: os << n->tensor << "[" << n->idx << "]"; return os.str();
    case NodeKind::ScalarMul: os << "ScalarMultiplication(" << n->coef.str(); break;
    case NodeKind::IndexSum: os << "IndexSum_" << n->summed << "[" << n->idx << "]("; break;
    case NodeKind::Contraction:
    case NodeKind::LoG: os << kind_name(n->kind) << "_" << n->summed << "[" << n->idx << "]("; break;
    default: os << kind_name(n->kind) << "[" << n->idx << "]("; break;
  }
  bool first = n->kind != NodeKind::ScalarMul;
  for (const auto& c : n->kids) {
    if (!first) os << ", ";
    first = false;
    os << dump(c);
  }
  os << ")";
  return os.str();
}

}  // namespace tkc
