#include <sstream>

#include "tkc/diag.hpp"
#include "tkc/letters.hpp"
#include "tkc/tensor.hpp"

namespace tkc {

std::string Diagnostic::str() const {
  std::ostringstream os;
  if (line > 0) os << line << ":" << col << ": ";
  os << code << ": " << message;
  return os.str();
}

Error::Error(Diagnostic d) : std::runtime_error(d.str()), d_(std::move(d)) {}
Error::Error(std::string code, std::string message)
    : Error(Diagnostic{std::move(code), std::move(message), 0, 0}) {}

const char* policy_name(LayoutPolicy p) {
  switch (p) {
    case LayoutPolicy::Auto: return "auto";
    case LayoutPolicy::Dense: return "dense";
    case LayoutPolicy::BBox: return "bbox";
    case LayoutPolicy::Aligned: return "aligned";
    case LayoutPolicy::Csc: return "csc";
  }
  return "auto";
}

bool valid_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  if (!alpha(s[0])) return false;
  for (char c : s)
    if (!alpha(c) && !(c >= '0' && c <= '9')) return false;
  return true;
}

Tensor make_tensor(std::string name, Extents shape, std::optional<SparsityPattern> spp,
                   std::optional<Grid<double>> values, LayoutPolicy policy) {
  if (!valid_identifier(name)) throw Error("BadName", "invalid tensor name '" + name + "'");
  if (shape.empty()) throw Error("BadShape", "tensor " + name + " needs at least one dimension");
  for (int e : shape)
    if (e <= 0) throw Error("BadShape", "tensor " + name + " has a non-positive extent");
  Tensor t;
  t.name = std::move(name);
  t.shape = shape;
  t.spp = spp ? *spp : SparsityPattern::dense(shape);
  if (t.spp.extents() != shape)
    throw Error("SppMismatch", "sparsity pattern extents of " + t.name + " differ from its shape");
  if (values) {
    if (values->extents() != shape)
      throw Error("ValueMismatch", "value grid extents of " + t.name + " differ from its shape");
    for (long i = 0; i < values->size(); ++i)
      if (!t.spp.lin(i) && (*values)[i] != 0.0)
        throw Error("ValueMismatch", "values of " + t.name + " are nonzero outside its pattern");
    t.values = std::move(values);
  }
  if (policy == LayoutPolicy::Csc && shape.size() != 2)
    throw Error("CscRankError", "csc layout requested for non-matrix " + t.name);
  t.policy = policy;
  return t;
}

int IndexSpace::size_of(char c) const { return sizes[letter_rank(c)]; }

int IndexSpace::position(char c) const {
  auto p = letters.find(c);
  return p == std::string::npos ? -1 : static_cast<int>(p);
}

Extents IndexSpace::extents() const { return extents_of(letters); }

Extents IndexSpace::extents_of(const std::string& s) const {
  Extents e;
  for (char c : s) e.push_back(size_of(c));
  return e;
}

long IndexSpace::volume() const { return tkc::volume(extents()); }

IndexSpace build_index_space(const std::vector<IndexedShape>& tensors) {
  IndexSpace g;
  std::string all;
  for (const auto& [ext, idx] : tensors) {
    if (has_repeats(idx)) throw Error("DuplicateIndexInTensor", "index string '" + idx + "' repeats a letter");
    if (ext.size() != idx.size())
      throw Error("RankMismatch", "index string '" + idx + "' does not match rank " + std::to_string(ext.size()));
    for (size_t d = 0; d < idx.size(); ++d) {
      char c = idx[d];
      if (!is_letter(c)) throw Error("BadIndex", std::string("'") + c + "' is not an index letter");
      int& s = g.sizes[letter_rank(c)];
      if (s == 0) {
        s = ext[d];
        all += c;
      } else if (s != ext[d]) {
        throw Error("SizeMismatch", std::string("index ") + c + " has sizes " + std::to_string(s) + " and " +
                                        std::to_string(ext[d]));
      }
    }
  }
  g.letters = sorted_letters(all);
  return g;
}

Projection::Projection(const IndexSpace& g, const std::string& idx) {
  for (char c : idx) pos.push_back(g.position(c));
}

MultiIndex Projection::apply(const MultiIndex& global) const {
  MultiIndex r(pos.size());
  for (size_t k = 0; k < pos.size(); ++k) r[k] = global[pos[k]];
  return r;
}

}  // namespace tkc
