#include "tkc/spp_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "tkc/diag.hpp"

namespace tkc {

namespace {

Error at_line(const std::string& code, const std::string& msg, int line) {
  return Error(Diagnostic{code, msg, line, 1});
}

std::vector<long> numbers(const std::string& line, int lineno) {
  std::vector<long> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (p == end) break;
    long v = 0;
    auto [q, ec] = std::from_chars(p, end, v);
    if (ec != std::errc() || (q < end && *q != ' ' && *q != '\t' && *q != '\r'))
      throw at_line("MalformedSpp", "expected an integer in '" + line + "'", lineno);
    out.push_back(v);
    p = q;
  }
  return out;
}

}  // namespace

SparsityPattern parse_spp(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Extents ext;
  bool have = false;
  SparsityPattern p;
  while (std::getline(in, line)) {
    ++lineno;
    std::vector<long> v = numbers(line, lineno);
    if (v.empty()) continue;
    if (!have) {
      for (long e : v) {
        if (e <= 0) throw at_line("MalformedSpp", "extents must be positive", lineno);
        ext.push_back(static_cast<int>(e));
      }
      p = SparsityPattern(ext);
      have = true;
      continue;
    }
    if (v.size() != ext.size())
      throw at_line("MalformedSpp", "coordinate has " + std::to_string(v.size()) + " entries, expected " +
                                        std::to_string(ext.size()), lineno);
    MultiIndex m;
    for (size_t d = 0; d < v.size(); ++d) {
      if (v[d] < 0 || v[d] >= ext[d])
        throw at_line("CoordinateOutOfRange", "coordinate " + std::to_string(v[d]) + " outside extent " +
                                                  std::to_string(ext[d]), lineno);
      m.push_back(static_cast<int>(v[d]));
    }
    p.set(m);
  }
  if (!have) throw at_line("MalformedSpp", "missing extents line", lineno);
  return p;
}

SparsityPattern load_spp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("FileNotFound", "cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_spp(ss.str());
}

std::string format_spp(const SparsityPattern& p) {
  std::string s;
  for (int d = 0; d < p.rank(); ++d) s += (d ? " " : "") + std::to_string(p.extents()[d]);
  s += "\n";
  for (long i = 0; i < p.size(); ++i) {
    if (!p.lin(i)) continue;
    MultiIndex m = unlinear_index(p.extents(), i);
    for (size_t d = 0; d < m.size(); ++d) s += (d ? " " : "") + std::to_string(m[d]);
    s += "\n";
  }
  return s;
}

}  // namespace tkc
