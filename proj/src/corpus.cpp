#include "tkc/corpus.hpp"

#include <cstdio>

#include "tkc/pipeline.hpp"
#include "tkc/random.hpp"

namespace tkc {

namespace {

long binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void add_tensor(Family& f, const std::string& name, Extents shape, std::optional<SparsityPattern> spp,
                bool constant, uint64_t seed) {
  SparsityPattern p = spp ? *spp : SparsityPattern::dense(shape);
  std::optional<Grid<double>> values;
  if (constant) values = random_values(p, tensor_stream(seed, name));
  f.add_tensor(make_tensor(name, std::move(shape), p, std::move(values)));
}

SparsityPattern transposed2(const SparsityPattern& p) { return p.permuted({1, 0}); }

SparsityPattern unit_vector(int n, int at) {
  SparsityPattern p({n});
  p.set({at});
  return p;
}

void add_unit_vector(Family& f, const std::string& name, int n, int at) {
  Grid<double> g({n});
  g[at] = 1.0;
  f.add_tensor(make_tensor(name, {n}, unit_vector(n, at), g));
}

Extents with_sims(int sims, Extents e) {
  if (sims > 1) e.insert(e.begin(), sims);
  return e;
}

// Replaces the pattern of `name` with the result pattern of statement `st`.
void derive_pattern(Family& f, const std::string& name, const Statement& st) {
  NodePtr t = shape_statement(f, st, true, nullptr, nullptr);
  Tensor& tn = f.tensors.at(name);
  tn.spp = t->spp;
}

}  // namespace

int basis_size(int N) { return static_cast<int>(binom(N + 3, 3)); }
int face_basis_size(int N) { return static_cast<int>(binom(N + 2, 2)); }

int basis_degree(int k) {
  int d = 0;
  while (basis_size(d) <= k) ++d;
  return d;
}

int face_basis_degree(int k) {
  int d = 0;
  while (face_basis_size(d) <= k) ++d;
  return d;
}

SparsityPattern khat_pattern(int N) {
  const int B = basis_size(N), Bt = face_basis_size(N);
  SparsityPattern p({B, B});
  for (int k = 0; k < B; ++k)
    for (int l = 0; l < Bt && l < B; ++l)
      if (basis_degree(l) <= basis_degree(k)) p.set({k, l});
  return p;
}

SparsityPattern ktilde_pattern(int N) {
  const int B = basis_size(N);
  SparsityPattern p({B, B});
  for (int k = 0; k < B; ++k)
    for (int l = 0; l < B; ++l)
      if (basis_degree(k) < basis_degree(l)) p.set({k, l});
  return p;
}

SparsityPattern star_pattern() {
  SparsityPattern p({9, 9});
  for (int r = 0; r < 6; ++r)
    for (int c = 6; c < 9; ++c) p.set({r, c});
  const int vel[3][3] = {{0, 3, 5}, {3, 1, 4}, {5, 4, 2}};
  for (int v = 0; v < 3; ++v)
    for (int s : vel[v]) p.set({6 + v, s});
  return p;
}

Grid<double> random_values(const SparsityPattern& p, uint64_t seed) {
  Grid<double> g(p.extents());
  uint64_t s = seed;
  for (long i = 0; i < g.size(); ++i)
    if (p.lin(i)) g[i] = unit_random(s);
  return g;
}

Family seissol_family(int order, int sims, uint64_t seed) {
  const int N = order - 1, B = basis_size(N), Bt = face_basis_size(N);
  Family f;
  f.name = "seissol_o" + std::to_string(order) + "_s" + std::to_string(sims);
  const std::string s = sims > 1 ? "s" : "";
  const Extents dof = with_sims(sims, {B, 9});
  add_tensor(f, "Q", dof, std::nullopt, false, seed);
  add_tensor(f, "I", dof, std::nullopt, false, seed);
  for (int d = 1; d <= N; ++d) add_tensor(f, "D" + std::to_string(d), dof, std::nullopt, false, seed);
  const char* dirs[3] = {"Xi", "Eta", "Zeta"};
  for (const char* d : dirs) {
    add_tensor(f, std::string("kDivM") + d, {B, B}, ktilde_pattern(N), true, seed);
    add_tensor(f, std::string("kDivMT") + d, {B, B}, khat_pattern(N), true, seed);
  }
  // star matrices are stored transposed: index q before p
  const SparsityPattern starT = transposed2(star_pattern());
  for (const char* n : {"starA", "starB", "starC"}) add_tensor(f, n, {9, 9}, starT, false, seed);
  for (int d = 0; d <= N; ++d) f.add_scalar({"c" + std::to_string(d), std::nullopt});
  for (int face = 1; face <= 4; ++face) {
    const std::string id = std::to_string(face);
    add_tensor(f, "rDivM" + id, {B, Bt}, std::nullopt, true, seed);
    add_tensor(f, "fMrT" + id, {B, Bt}, std::nullopt, true, seed);
    add_tensor(f, "AplusT" + id, {9, 9}, std::nullopt, false, seed);
  }
  SparsityPattern frot({Bt, Bt});
  for (int m = 0; m < Bt; ++m)
    for (int n = 0; n < Bt; ++n)
      if (face_basis_degree(m) == face_basis_degree(n)) frot.set({m, n});
  add_tensor(f, "fP", {Bt, Bt}, frot, true, seed);
  add_tensor(f, "rT", {B, Bt}, std::nullopt, true, seed);
  add_tensor(f, "Ineigh", dof, std::nullopt, false, seed);
  add_tensor(f, "AminusT", {9, 9}, std::nullopt, false, seed);

  const char* star[3] = {"starA", "starB", "starC"};
  Kernel ader;
  ader.name = "ader";
  for (int d = 1; d <= N; ++d) {
    const std::string prev = d == 1 ? "Q" : "D" + std::to_string(d - 1);
    Expr e;
    for (int x = 0; x < 3; ++x) {
      Expr t = ix(std::string("kDivM") + dirs[x], "kl") * ix(prev, s + "lq") * ix(star[x], "qp");
      e = x == 0 ? t : e + t;
    }
    Statement st = make_statement(ix("D" + std::to_string(d), s + "kp"), e, false);
    derive_pattern(f, "D" + std::to_string(d), st);
    ader.stmts.push_back(st);
  }
  Expr integral = sym("c0") * ix("Q", s + "kp");
  for (int d = 1; d <= N; ++d) integral = integral + sym("c" + std::to_string(d)) * ix("D" + std::to_string(d), s + "kp");
  ader.stmts.push_back(make_statement(ix("I", s + "kp"), integral, false));
  f.kernels.push_back(ader);

  Kernel volume;
  volume.name = "volume";
  Expr ve;
  for (int x = 0; x < 3; ++x) {
    Expr t = ix(std::string("kDivMT") + dirs[x], "kl") * ix("I", s + "lq") * ix(star[x], "qp");
    ve = x == 0 ? t : ve + t;
  }
  volume.stmts.push_back(make_statement(ix("Q", s + "kp"), ve, true));
  f.kernels.push_back(volume);

  Kernel local;
  local.name = "localFlux";
  Expr le;
  for (int face = 1; face <= 4; ++face) {
    const std::string id = std::to_string(face);
    Expr t = ix("rDivM" + id, "km") * ix("fMrT" + id, "lm") * ix("I", s + "lq") * ix("AplusT" + id, "qp");
    le = face == 1 ? t : le + t;
  }
  local.stmts.push_back(make_statement(ix("Q", s + "kp"), le, true));
  f.kernels.push_back(local);

  Kernel neigh;
  neigh.name = "neighbourFlux";
  neigh.stmts.push_back(make_statement(
      ix("Q", s + "kp"),
      ix("rDivM1", "km") * ix("fP", "mn") * ix("rT", "ln") * ix("Ineigh", s + "lq") * ix("AminusT", "qp"), true));
  f.kernels.push_back(neigh);
  return f;
}

Family seissol_neighbour(int order, int sims, uint64_t seed) {
  const int N = order - 1, B = basis_size(N), Bt = face_basis_size(N);
  Family f;
  f.name = "neighbour_o" + std::to_string(order) + "_s" + std::to_string(sims);
  const std::string s = sims > 1 ? "s" : "";
  const Extents dof = with_sims(sims, {B, 9});
  add_tensor(f, "Q", dof, std::nullopt, false, seed);
  add_tensor(f, "I", dof, std::nullopt, false, seed);
  add_tensor(f, "Rhat", {B, Bt}, std::nullopt, true, seed);
  add_tensor(f, "f", {Bt, Bt}, std::nullopt, true, seed);
  add_tensor(f, "R", {B, Bt}, std::nullopt, true, seed);
  add_tensor(f, "Am", {9, 9}, std::nullopt, false, seed);
  Kernel k;
  k.name = "neighbourFlux";
  k.stmts.push_back(make_statement(
      ix("Q", s + "kp"), ix("Rhat", "km") * ix("f", "mn") * ix("R", "ln") * ix("I", s + "lq") * ix("Am", "pq"), true));
  f.kernels.push_back(k);
  return f;
}

Family lina_family(int dim, int order, uint64_t seed) {
  const int n = order, nq = dim + 1, N = order - 1;
  Family f;
  f.name = "lina" + std::to_string(dim) + "d_o" + std::to_string(order);
  const std::string sp = dim == 3 ? "xyz" : "xy";
  const std::string sum = dim == 3 ? "lmn" : "lm";
  Extents dof(dim, n);
  dof.push_back(nq);
  add_tensor(f, "Q", dof, std::nullopt, false, seed);
  add_tensor(f, "I", dof, std::nullopt, false, seed);
  for (int d = 1; d <= N; ++d) add_tensor(f, "D" + std::to_string(d), dof, std::nullopt, false, seed);
  for (int d = 0; d <= N; ++d) f.add_scalar({"c" + std::to_string(d), std::nullopt});
  add_tensor(f, "kTildeT", {n, n}, std::nullopt, true, seed);
  add_tensor(f, "kHatT", {n, n}, std::nullopt, true, seed);
  const char* starn[3] = {"starA", "starB", "starC"};
  for (int x = 0; x < dim; ++x) {
    SparsityPattern p({nq, nq});
    p.set({0, 1 + x});
    p.set({1 + x, 0});
    add_tensor(f, starn[x], {nq, nq}, p, false, seed);
  }
  add_unit_vector(f, "F0", n, 0);
  add_unit_vector(f, "F1", n, n - 1);
  add_unit_vector(f, "Fhat0", n, 0);
  add_unit_vector(f, "Fhat1", n, n - 1);
  const char* sides[6] = {"left", "right", "bottom", "top", "back", "front"};
  for (int x = 0; x < dim; ++x)
    for (int e = 0; e < 2; ++e) {
      const std::string side = sides[2 * x + e];
      Extents face(dim - 1, n);
      face.push_back(nq);
      add_tensor(f, "face_" + side, face, std::nullopt, false, seed);
      add_tensor(f, "neigh_" + side, face, std::nullopt, false, seed);
      add_tensor(f, "AplusT_" + side, {nq, nq}, std::nullopt, false, seed);
      add_tensor(f, "AminusT_" + side, {nq, nq}, std::nullopt, false, seed);
    }
  // letters of the derivative in direction x replace sp[x] by sum[x]
  auto swap_letter = [&](int x, const std::string& tail) {
    std::string s = sp;
    s[x] = sum[x];
    return s + tail;
  };
  Kernel ader;
  ader.name = "ader";
  for (int d = 1; d <= N; ++d) {
    const std::string prev = d == 1 ? "Q" : "D" + std::to_string(d - 1);
    Expr e;
    for (int x = 0; x < dim; ++x) {
      Expr t = ix("kTildeT", std::string(1, sum[x]) + sp[x]) * ix(prev, swap_letter(x, "q")) * ix(starn[x], "qp");
      e = x == 0 ? t : e + t;
    }
    ader.stmts.push_back(make_statement(ix("D" + std::to_string(d), sp + "p"), e, false));
  }
  Expr integral = sym("c0") * ix("Q", sp + "p");
  for (int d = 1; d <= N; ++d) integral = integral + sym("c" + std::to_string(d)) * ix("D" + std::to_string(d), sp + "p");
  ader.stmts.push_back(make_statement(ix("I", sp + "p"), integral, false));
  f.kernels.push_back(ader);

  Kernel volume;
  volume.name = "volume";
  Expr ve;
  for (int x = 0; x < dim; ++x) {
    Expr t = ix("kHatT", std::string(1, sum[x]) + sp[x]) * ix("I", swap_letter(x, "q")) * ix(starn[x], "qp");
    ve = x == 0 ? t : ve + t;
  }
  volume.stmts.push_back(make_statement(ix("Q", sp + "p"), ve, true));
  f.kernels.push_back(volume);

  Kernel side;
  side.name = "evaluateSide";
  for (int x = 0; x < dim; ++x)
    for (int e = 0; e < 2; ++e) {
      std::string rest = sp;
      rest.erase(x, 1);
      side.stmts.push_back(make_statement(ix(std::string("face_") + sides[2 * x + e], rest + "p"),
                                          ix(e ? "F1" : "F0", std::string(1, sum[x])) * ix("I", swap_letter(x, "p")),
                                          false));
    }
  f.kernels.push_back(side);

  Kernel flux;
  flux.name = "flux";
  Expr fe;
  bool first = true;
  for (int x = 0; x < dim; ++x)
    for (int e = 0; e < 2; ++e) {
      const std::string sd = sides[2 * x + e];
      std::string rest = sp;
      rest.erase(x, 1);
      Expr inner = ix("face_" + sd, rest + "q") * ix("AplusT_" + sd, "qp") +
                   ix("neigh_" + sd, rest + "q") * ix("AminusT_" + sd, "qp");
      Expr t = ix(e ? "Fhat1" : "Fhat0", std::string(1, sp[x])) * inner;
      fe = first ? t : fe + t;
      first = false;
    }
  flux.stmts.push_back(make_statement(ix("Q", sp + "p"), fe, true));
  f.kernels.push_back(flux);
  return f;
}

Family mra_family(int p, int q, bool pretransposed, uint64_t seed) {
  Family f;
  f.name = "mra_p" + std::to_string(p) + "_q" + std::to_string(q) + (pretransposed ? "" : "_nt");
  add_tensor(f, "S", {p, p, p}, std::nullopt, false, seed);
  add_tensor(f, "R", {p, p, p}, std::nullopt, false, seed);
  if (pretransposed) {
    add_tensor(f, "XL", {q, p}, std::nullopt, false, seed);
    add_tensor(f, "XR", {p, q}, std::nullopt, false, seed);
  } else {
    add_tensor(f, "XL", {p, q}, std::nullopt, false, seed);
    add_tensor(f, "XR", {q, p}, std::nullopt, false, seed);
  }
  add_tensor(f, "YL", {p, q}, std::nullopt, false, seed);
  add_tensor(f, "YR", {q, p}, std::nullopt, false, seed);
  add_tensor(f, "ZL", {p, q}, std::nullopt, false, seed);
  add_tensor(f, "ZR", {q, p}, std::nullopt, false, seed);
  Kernel k;
  k.name = "mra";
  Expr xl = pretransposed ? ix("XL", "lx") : ix("XL", "xl");
  Expr xr = pretransposed ? ix("XR", "il") : ix("XR", "li");
  k.stmts.push_back(make_statement(
      ix("R", "ijk"), ix("S", "xyz") * xl * xr * ix("YL", "ym") * ix("YR", "mj") * ix("ZL", "zn") * ix("ZR", "nk"),
      false));
  f.kernels.push_back(k);
  return f;
}

Family matmul_family(int n) {
  Family f;
  f.name = "gemm";
  for (const char* t : {"A", "B", "C"}) add_tensor(f, t, {n, n}, std::nullopt, false, 1);
  Kernel k;
  k.name = "gemm";
  k.stmts.push_back(make_statement(ix("C", "ij"), ix("C", "ij") + 0.5 * ix("A", "ik") * ix("B", "kj"), false));
  f.kernels.push_back(k);
  return f;
}

Family sabij_family(int n) {
  Family f;
  f.name = "sabij_n" + std::to_string(n);
  for (const char* t : {"A", "B", "C", "D", "S"}) add_tensor(f, t, {n, n, n, n}, std::nullopt, false, 1);
  Kernel k;
  k.name = "sabij";
  k.stmts.push_back(make_statement(
      ix("S", "abij"), ix("A", "acik") * ix("B", "befl") * ix("C", "dfjk") * ix("D", "cdel"), false));
  f.kernels.push_back(k);
  return f;
}

std::vector<CorpusEntry> full_corpus() {
  std::vector<CorpusEntry> out;
  for (int order : {2, 3, 4})
    for (int sims : {1, 8}) {
      Family f = seissol_family(order, sims);
      out.push_back({f.name, f});
    }
  for (int dim : {2, 3})
    for (int order : {3, 4}) {
      Family f = lina_family(dim, order);
      out.push_back({f.name, f});
    }
  for (int p : {4, 8})
    for (int q : {1, 2, 4}) {
      Family f = mra_family(p, q);
      out.push_back({f.name, f});
    }
  return out;
}

Family corpus_family(const std::string& name) {
  int a = 0, b = 0;
  char tail = 0;
  if (std::sscanf(name.c_str(), "seissol_o%d_s%d%c", &a, &b, &tail) == 2 && a >= 2 && b >= 1) return seissol_family(a, b);
  if (std::sscanf(name.c_str(), "neighbour_o%d_s%d%c", &a, &b, &tail) == 2 && a >= 2 && b >= 1)
    return seissol_neighbour(a, b);
  if (std::sscanf(name.c_str(), "lina%dd_o%d%c", &a, &b, &tail) == 2 && (a == 2 || a == 3) && b >= 1)
    return lina_family(a, b);
  if (std::sscanf(name.c_str(), "mra_p%d_q%d%c", &a, &b, &tail) == 2 && a >= 1 && b >= 1) return mra_family(a, b);
  if (std::sscanf(name.c_str(), "sabij_n%d%c", &a, &tail) == 1 && a >= 1) return sabij_family(a);
  if (name == "gemm") return matmul_family();
  throw Error("UnknownCorpus", "no corpus family named " + name);
}

}  // namespace tkc
