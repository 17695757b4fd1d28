#include "helpers.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sys/wait.h>
#include <unistd.h>

#include "tkc/parser.hpp"
#include "tkc/random.hpp"

namespace tkc::test {

Run run_command(const std::string& cmd) {
  Run r;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  namespace fs = std::filesystem;
  fs::path p = fs::temp_directory_path() /
               ("tkc_" + tag + "_" + std::to_string(getpid()) + "_" + std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

CBuild build_emitted(const FamilyResult& fr, const std::string& cc, const std::vector<LoweredKernel>* lowered) {
  CBuild b;
  b.dir = scratch_dir(c_name(fr.family.name));
  const std::string fam = c_name(fr.family.name);
  for (const auto& f : emit_c99(fr, lowered)) std::ofstream(b.dir + "/" + f.name, std::ios::binary) << f.text;
  b.exe = b.dir + "/" + fam + "_tests";
  const std::string cmd = cc + " -std=c99 -O1 -ffp-contract=off -Wall -Wextra -o " + b.exe + " " + b.dir + "/" + fam +
                          "_kernels.c " + b.dir + "/" + fam + "_tensors.c " + b.dir + "/" + fam + "_tests.c -lm";
  Run r = run_command(cmd);
  b.log = r.out;
  b.compiled = r.status == 0;
  return b;
}

void declare(Family& fam, const std::string& name, const Extents& shape) { fam.add_tensor(make_tensor(name, shape)); }

Family single_kernel(const std::string& name, Family fam, Statement st) {
  Kernel k;
  k.name = name;
  k.stmts.push_back(std::move(st));
  fam.kernels.push_back(std::move(k));
  return fam;
}

Family family_from_text(const std::string& text, const std::string& name) { return to_family(parse(text), name); }

uint64_t next_random(uint64_t& state) { return splitmix64(state); }

int random_int(uint64_t& state, int lo, int hi) {
  return lo + static_cast<int>(splitmix64(state) % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace tkc::test

namespace tkc::test {

Family random_contraction_family(uint64_t& state, int index) {
  const std::string pool = "abcdef";
  for (;;) {
    int extent[6];
    for (int& e : extent) e = random_int(state, 1, 4);
    const int n = random_int(state, 2, 5);
    std::vector<std::string> idx(n);
    for (int k = 0; k < n; ++k) {
      std::string letters = pool;
      for (int i = 5; i > 0; --i) std::swap(letters[i], letters[random_int(state, 0, i)]);
      idx[k] = letters.substr(0, random_int(state, 1, 4));
    }
    std::map<char, int> uses;
    for (const auto& s : idx)
      for (char c : s) ++uses[c];
    std::string target;
    for (auto [c, u] : uses)
      if (u == 1 || random_int(state, 0, 3) == 0) target += c;
    if (target.empty() || target.size() > 4) continue;
    for (int i = static_cast<int>(target.size()) - 1; i > 0; --i)
      std::swap(target[i], target[random_int(state, 0, i)]);
    Family fam;
    fam.name = "random" + std::to_string(index);
    Expr e;
    for (int k = 0; k < n; ++k) {
      const std::string name = "T" + std::to_string(k);
      Extents shape;
      for (char c : idx[k]) shape.push_back(extent[c - 'a']);
      SparsityPattern p(shape);
      for (long i = 0; i < p.size(); ++i) p.set_lin(i, random_int(state, 0, 9) < 7);
      p.set_lin(0, true);
      fam.add_tensor(make_tensor(name, shape, p));
      e = k == 0 ? ix(name, idx[k]) : e * ix(name, idx[k]);
    }
    Extents rs;
    for (char c : target) rs.push_back(extent[c - 'a']);
    fam.add_tensor(make_tensor("R", rs));
    return single_kernel("k", std::move(fam), make_statement(ix("R", target), e, false));
  }
}

int widest_node(const NodePtr& n) {
  int w = static_cast<int>(n->idx.size());
  for (const auto& k : n->kids) w = std::max(w, widest_node(k));
  return w;
}

}  // namespace tkc::test
