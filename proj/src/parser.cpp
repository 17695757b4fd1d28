#include "tkc/parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>

#include "tkc/letters.hpp"
#include "tkc/spp_io.hpp"

namespace tkc {

namespace {

enum class Tok { Ident, Number, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip();
      Token t;
      t.line = line_;
      t.col = col_;
      if (i_ >= s_.size()) {
        out.push_back(t);
        return out;
      }
      const char c = s_[i_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) t.text += get();
        t.kind = Tok::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                 (c == '-' && i_ + 1 < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_ + 1])) || s_[i_ + 1] == '.'))) {
        t.kind = Tok::Number;
        t.text += get();
        while (i_ < s_.size()) {
          const char d = s_[i_];
          if (std::isdigit(static_cast<unsigned char>(d)) || d == '.') {
            t.text += get();
          } else if (d == 'e' || d == 'E') {
            t.text += get();
            if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) t.text += get();
          } else {
            break;
          }
        }
      } else if (c == '\'' || c == '"') {
        t.kind = Tok::String;
        get();
        while (i_ < s_.size() && s_[i_] != c && s_[i_] != '\n') t.text += get();
        if (i_ >= s_.size() || s_[i_] != c) throw Error(Diagnostic{"SyntaxError", "unterminated string", t.line, t.col});
        get();
      } else {
        t.kind = Tok::Punct;
        if ((c == '<' || c == '+') && i_ + 1 < s_.size() && s_[i_ + 1] == '=') {
          t.text += get();
          t.text += get();
        } else if (std::string("(){}[],*+=;").find(c) != std::string::npos) {
          t.text += get();
        } else {
          throw Error(Diagnostic{"SyntaxError", std::string("unexpected character '") + c + "'", t.line, t.col});
        }
      }
      out.push_back(t);
    }
  }

private:
  char get() {
    const char c = s_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        get();
      } else if (s_[i_] == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') get();
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
public:
  explicit Parser(std::vector<Token> t) : t_(std::move(t)) {}

  KernelFile file() {
    KernelFile f;
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (is_ident("tensor")) {
        f.tensors.push_back(tensor());
      } else if (is_ident("scalar")) {
        f.scalars.push_back(scalar());
      } else if (is_ident("kernel")) {
        f.kernels.push_back(kernel());
      } else {
        fail(t, "expected 'tensor', 'scalar' or 'kernel'");
      }
    }
    return f;
  }

private:
  const Token& peek(size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  const Token& next() { return t_[std::min(p_++, t_.size() - 1)]; }
  bool is_ident(const char* w, size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == w; }
  bool is_punct(const char* w, size_t k = 0) const { return peek(k).kind == Tok::Punct && peek(k).text == w; }

  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Error(Diagnostic{"SyntaxError", msg + ", found " + got, t.line, t.col});
  }

  void expect(const char* p) {
    if (!is_punct(p)) fail(peek(), std::string("expected '") + p + "'");
    next();
  }

  std::string name() {
    if (peek().kind != Tok::Ident) fail(peek(), "expected a name");
    return next().text;
  }

  long integer() {
    const Token& t = peek();
    long v = 0;
    auto [q, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (t.kind != Tok::Number || ec != std::errc() || q != t.text.data() + t.text.size()) fail(t, "expected an integer");
    next();
    return v;
  }

  double number() {
    const Token& t = peek();
    if (t.kind != Tok::Number) fail(t, "expected a number");
    double v = 0;
    auto [q, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || q != t.text.data() + t.text.size() || !std::isfinite(v)) fail(t, "malformed number");
    next();
    return v;
  }

  TensorDecl tensor() {
    TensorDecl d;
    d.line = peek().line;
    d.col = peek().col;
    next();
    d.name = name();
    expect("(");
    const Token& first = peek();
    long e = integer();
    if (e <= 0) fail(first, "extents must be positive");
    d.shape.push_back(static_cast<int>(e));
    while (is_punct(",")) {
      next();
      const Token& t = peek();
      e = integer();
      if (e <= 0) fail(t, "extents must be positive");
      d.shape.push_back(static_cast<int>(e));
    }
    expect(")");
    if (is_ident("spp")) {
      next();
      if (peek().kind != Tok::String) fail(peek(), "expected a pattern file name");
      d.spp = next().text;
    }
    if (is_ident("layout")) {
      next();
      const Token& t = peek();
      std::string w = name();
      if (w == "dense") d.layout = LayoutPolicy::Dense;
      else if (w == "bbox") d.layout = LayoutPolicy::BBox;
      else if (w == "aligned") d.layout = LayoutPolicy::Aligned;
      else if (w == "csc") d.layout = LayoutPolicy::Csc;
      else fail(t, "expected dense, bbox, aligned or csc");
    }
    return d;
  }

  ScalarDecl scalar() {
    ScalarDecl d;
    d.line = peek().line;
    d.col = peek().col;
    next();
    d.name = name();
    if (is_punct("=")) {
      next();
      d.value = number();
    }
    return d;
  }

  KernelDecl kernel() {
    KernelDecl k;
    k.line = peek().line;
    k.col = peek().col;
    next();
    k.name = name();
    expect("{");
    while (!is_punct("}")) {
      if (is_punct(";")) {
        next();
        continue;
      }
      if (is_ident("prefetch") && !is_punct("[", 1)) {
        next();
        k.prefetch.push_back(name());
        while (peek().kind == Tok::Ident) k.prefetch.push_back(name());
        if (!is_punct("}")) fail(peek(), "prefetch must be the last item of a kernel; expected '}'");
        break;
      }
      const Token& start = peek();
      Expr target = access();
      bool acc = false;
      if (is_punct("+=")) {
        acc = true;
      } else if (!is_punct("<=")) {
        fail(peek(), "expected '<=' or '+='");
      }
      next();
      Expr e = expr();
      try {
        k.stmts.push_back(make_statement(target, e, acc));
      } catch (const Error& err) {
        throw Error(Diagnostic{err.code(), err.diag().message, start.line, start.col});
      }
      k.stmt_pos.emplace_back(start.line, start.col);
    }
    if (k.stmts.empty()) fail(peek(), "kernel needs at least one statement");
    expect("}");
    return k;
  }

  Expr access() {
    const Token& t = peek();
    std::string n = name();
    expect("[");
    std::string letters;
    if (peek().kind == Tok::String || peek().kind == Tok::Ident) {
      letters = next().text;
    } else if (!is_punct("]")) {
      fail(peek(), "expected index letters");
    }
    for (char c : letters)
      if (!is_letter(c)) throw Error(Diagnostic{"BadIndex", std::string("'") + c + "' is not an index letter", t.line, t.col});
    expect("]");
    return ix(n, letters);
  }

  Expr expr() {
    Expr e = term();
    while (is_punct("+")) {
      next();
      e = e + term();
    }
    return e;
  }

  Expr term() {
    Expr e = factor();
    while (is_punct("*")) {
      next();
      e = e * factor();
    }
    return e;
  }

  Expr factor() {
    const Token& t = peek();
    if (t.kind == Tok::Number) return lit(number());
    if (is_punct("(")) {
      next();
      Expr e = expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::Ident) {
      if (is_punct("[", 1)) return access();
      return sym(name());
    }
    fail(t, "expected a tensor access, number or scalar");
  }

  std::vector<Token> t_;
  size_t p_ = 0;
};

std::string policy_word(LayoutPolicy p) {
  switch (p) {
    case LayoutPolicy::Dense: return "dense";
    case LayoutPolicy::BBox: return "bbox";
    case LayoutPolicy::Aligned: return "aligned";
    case LayoutPolicy::Csc: return "csc";
    default: return "";
  }
}

std::string coef_text(const Coef& c) {
  std::string s;
  if (c.lit != 1.0 || c.syms.empty()) s = format_number(c.lit);
  for (const auto& y : c.syms) s += (s.empty() ? "" : " * ") + y;
  return s;
}

std::string factor_text(const NodePtr& n) {
  if (n->kind == NodeKind::Add) return "(" + print_expr(n) + ")";
  return print_expr(n);
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, p);
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos) s += ".0";
  return s;
}

std::string print_expr(const NodePtr& n) {
  switch (n->kind) {
    case NodeKind::Indexed:
      return n->tensor + "['" + n->idx + "']";
    case NodeKind::Add: {
      std::string s;
      for (size_t i = 0; i < n->kids.size(); ++i) s += (i ? " + " : "") + print_expr(n->kids[i]);
      return s;
    }
    case NodeKind::Einsum: {
      std::string s;
      for (size_t i = 0; i < n->kids.size(); ++i) s += (i ? " * " : "") + factor_text(n->kids[i]);
      return s;
    }
    case NodeKind::ScalarMul: {
      const NodePtr& k = n->kids[0];
      return coef_text(n->coef) + " * " + (k->kind == NodeKind::Add ? "(" + print_expr(k) + ")" : print_expr(k));
    }
    case NodeKind::Permute:
      return print_expr(n->kids[0]);
    default:
      throw Error("Internal", std::string("cannot print node ") + kind_name(n->kind));
  }
}

KernelFile parse(const std::string& text) { return Parser(Lexer(text).run()).file(); }

std::string print(const KernelFile& f) {
  std::string s;
  for (const auto& t : f.tensors) {
    s += "tensor " + t.name + "(";
    for (size_t d = 0; d < t.shape.size(); ++d) s += (d ? ", " : "") + std::to_string(t.shape[d]);
    s += ")";
    if (t.spp) s += " spp \"" + *t.spp + "\"";
    if (t.layout) s += " layout " + policy_word(*t.layout);
    s += "\n";
  }
  for (const auto& sc : f.scalars) {
    s += "scalar " + sc.name;
    if (sc.value) s += " = " + format_number(*sc.value);
    s += "\n";
  }
  for (const auto& k : f.kernels) {
    s += "kernel " + k.name + " {\n";
    for (const auto& st : k.stmts) {
      const NodePtr& target = st.root->kids[0];
      const NodePtr& rhs = st.root->kids[1];
      s += "  " + print_expr(target);
      if (st.accumulate) {
        s += " += ";
        std::string rest;
        for (size_t i = 1; i < rhs->kids.size(); ++i) rest += (i > 1 ? " + " : "") + print_expr(rhs->kids[i]);
        s += rest;
      } else {
        s += " <= " + print_expr(rhs);
      }
      s += "\n";
    }
    if (!k.prefetch.empty()) {
      s += "  prefetch";
      for (const auto& p : k.prefetch) s += " " + p;
      s += "\n";
    }
    s += "}\n";
  }
  return s;
}

bool same_file(const KernelFile& a, const KernelFile& b) {
  if (!(a.tensors == b.tensors) || !(a.scalars == b.scalars) || a.kernels.size() != b.kernels.size()) return false;
  for (size_t i = 0; i < a.kernels.size(); ++i) {
    const auto& x = a.kernels[i];
    const auto& y = b.kernels[i];
    if (x.name != y.name || x.prefetch != y.prefetch || x.stmts.size() != y.stmts.size()) return false;
    for (size_t j = 0; j < x.stmts.size(); ++j)
      if (x.stmts[j].accumulate != y.stmts[j].accumulate || dump(x.stmts[j].root) != dump(y.stmts[j].root)) return false;
  }
  return true;
}

Family to_family(const KernelFile& f, const std::string& name, const std::string& base_dir) {
  Family fam;
  fam.name = name;
  for (const auto& d : f.tensors) {
    try {
      std::optional<SparsityPattern> spp;
      if (d.spp) {
        std::filesystem::path p(*d.spp);
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        spp = load_spp(p.string());
        if (spp->extents() != d.shape) throw Error("SppShapeMismatch", "pattern extents differ from the shape of " + d.name);
      }
      fam.add_tensor(make_tensor(d.name, d.shape, spp, std::nullopt, d.layout.value_or(LayoutPolicy::Auto)));
    } catch (const Error& e) {
      throw Error(Diagnostic{e.code(), e.diag().message, d.line, d.col});
    }
  }
  for (const auto& d : f.scalars) {
    try {
      fam.add_scalar({d.name, d.value});
    } catch (const Error& e) {
      throw Error(Diagnostic{e.code(), e.diag().message, d.line, d.col});
    }
  }
  for (const auto& k : f.kernels) {
    for (const auto& other : fam.kernels)
      if (other.name == k.name) throw Error(Diagnostic{"Redeclared", "kernel " + k.name + " declared twice", k.line, k.col});
    fam.kernels.push_back(Kernel{k.name, k.stmts, k.prefetch});
  }
  return fam;
}

}  // namespace tkc
