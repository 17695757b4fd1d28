// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>

#include "helpers.hpp"
#include "tkc/corpus.hpp"
#include "tkc/eqspp.hpp"
#include "tkc/oracles.hpp"
#include "tkc/random.hpp"
#include "tkc/reference.hpp"

using namespace tkc;

namespace {

const std::string kCc = TKC_CC;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Outcome {
  bool ok = true;
  std::ostringstream why;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) why << "; ";
      why << what;
      ok = false;
    }
  }
};

Family only(Family f, const std::string& kernel) {
  std::vector<Kernel> ks;
  for (const auto& k : f.kernels)
    if (k.name == kernel) ks.push_back(k);
  f.kernels = ks;
  return f;
}

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

void c1(Outcome& o, std::ostream& info) {
  const auto t0 = Clock::now();
  for (int n : {2, 3}) {
    FamilyResult fr = run_pipeline(sabij_family(n), Options{});
    const EinsumInfo& e = fr.kernel("sabij").einsums.at(0);
    const long best = sr_oracle(e.operands, e.result);
    info << " N=" << n << ": cost " << e.cost << " oracle " << best << " naive " << e.naive << ";";
    o.require(e.cost == best, "N=" + std::to_string(n) + " not minimal");
    o.require(e.cost <= 6 * ipow(n, 6), "N=" + std::to_string(n) + " above 6N^6");
    o.require(e.naive == 4 * ipow(n, 10), "N=" + std::to_string(n) + " naive count differs from 4N^10");
  }
  const double s = seconds_since(t0);
  info << " " << s << " s";
  o.require(s < 10.0, "slower than 10 s");
}

void c2(Outcome& o, std::ostream& info) {
  SparsityPattern k({2, 4}), a({2, 4}), q = SparsityPattern::dense({4, 4}), want({4, 4});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      k.set({i, j});
      a.set({i, j});
      want.set({i, j});
    }
  EqsppResult r = compute_eqspp({{&k, "ik"}, {&q, "kl"}, {&a, "jl"}}, "ij");
  info << " nnz(Q mask) " << r.masks[1].nnz();
  o.require(r.masks[1] == want, "Q mask is not the top-left block");
  SparsityPattern bt({4, 2});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) bt.set({i, j});
  EqsppResult r2 = compute_eqspp({{&k, "ik"}, {&q, "kl"}, {&bt, "lj"}}, "ij");
  o.require(r2.masks[1] == want, "transposed right factor variant differs");
}

void c3(Outcome& o, std::ostream& info) {
  for (auto [order, want] : {std::pair{4, 0.5}, std::pair{6, 0.375}}) {
    Family f = only(seissol_family(order, 1), "volume");
    Options dense;
    dense.dense_baseline = true;
    const long hs = run_pipeline(f, Options{}).kernel("volume").hardware_flops;
    const long hd = run_pipeline(f, dense).kernel("volume").hardware_flops;
    const double ratio = static_cast<double>(hs) / static_cast<double>(hd);
    info << " order " << order << ": " << hs << "/" << hd << " = " << ratio << ";";
    o.require(std::abs(ratio - want) <= 0.01 * want, "order " + std::to_string(order) + " ratio off");
  }
}

void c4(Outcome& o, std::ostream& info) {
  const auto t0 = Clock::now();
  long cost[2] = {0, 0};
  for (int order : {5, 6}) {
    FamilyResult fr = run_pipeline(seissol_neighbour(order, 1), Options{});
    const EinsumInfo& e = fr.kernel("neighbourFlux").einsums.at(0);
    cost[order - 5] = e.cost;
    info << " o" << order << " s1 " << e.text << " cost " << e.cost << ";";
    o.require(e.text == "Rhat((f(RI))Am)", "order " + std::to_string(order) + " single simulation order " + e.text);
    o.require(e.cost == sr_oracle(e.operands, e.result), "order " + std::to_string(order) + " not minimal");
  }
  // cost growth from N=4 to N=5 against degree-5 (B*Bt) and degree-6 (B^2) models
  const double r = static_cast<double>(cost[1]) / static_cast<double>(cost[0]);
  const double b4 = basis_size(4), b5 = basis_size(5), t4 = face_basis_size(4), t5 = face_basis_size(5);
  const double d5 = (b5 * t5) / (b4 * t4), d6 = (b5 * b5) / (b4 * b4);
  info << " growth " << r << " (degree 5: " << d5 << ", degree 6: " << d6 << ");";
  o.require(std::abs(std::log(r / d5)) < std::abs(std::log(r / d6)), "growth closer to degree 6");
  for (int sims : {8, 16, 32}) {
    FamilyResult fr = run_pipeline(seissol_neighbour(4, sims), Options{});
    const EinsumInfo& e = fr.kernel("neighbourFlux").einsums.at(0);
    info << " s" << sims << " " << e.text << ";";
    o.require(e.text == "(Rhatf)((RI)Am)", "sims " + std::to_string(sims) + " order " + e.text);
    o.require(e.cost == sr_oracle(e.operands, e.result), "sims " + std::to_string(sims) + " not minimal");
  }
  const double s = seconds_since(t0);
  info << " " << s << " s";
  o.require(s < 60.0, "slower than 60 s");
}

void c5(Outcome& o, std::ostream& info) {
  uint64_t state = 20240501;
  int checked = 0, rejected = 0, agree = 0;
  for (int trial = 0; checked < 200 && trial < 5000; ++trial) {
    Family f = test::random_contraction_family(state, trial);
    Options opt;
    opt.align = 1 + trial % 2;
    FamilyResult fr = run_pipeline(f, opt);
    const KernelResult& k = fr.kernel("k");
    if (!k.ok) {
      o.require(false, "random instance " + std::to_string(trial) + " failed to compile");
      continue;
    }
    if (test::widest_node(k.unconfigured.at(0)) > 4) {
      ++rejected;
      continue;
    }
    PermContext ctx{&fr.layouts, opt.align};
    ++checked;
    if (optimize_permutations(k.unconfigured[0], ctx).cost == configuration_oracle(k.unconfigured[0], ctx)) ++agree;
  }
  info << " " << agree << "/" << checked << " agree (" << rejected << " rejected as wider than 4 letters)";
  o.require(checked == 200, "not enough instances");
  o.require(agree == checked, "DP differs from exhaustive search");
}

void c6(Outcome& o, std::ostream& info) {
  uint64_t s = 6060;
  int good = 0;
  for (int trial = 0; trial < 50; ++trial) {
    int n[4];
    for (int& x : n) x = test::random_int(s, 1, 4);
    SparsityPattern a({n[0], n[1], n[2]}), b({n[2], n[3]}), c({n[3], n[1]});
    for (auto* p : {&a, &b, &c})
      for (long i = 0; i < p->size(); ++i) p->set_lin(i, splitmix64(s) % 3 != 0);
    std::vector<PatternOperand> ops{{&a, "ijk"}, {&b, "kl"}, {&c, "lj"}};
    const std::string target = trial % 3 == 0 ? "i" : trial % 3 == 1 ? "ij" : "il";
    if (check_minimality(ops, target, compute_eqspp(ops, target))) ++good;
  }
  info << " " << good << "/50 minimal";
  o.require(good == 50, "non-minimal EQSPP");
}

void c7(Outcome& o, std::ostream& info) {
  FamilyResult fr = run_pipeline(matmul_family(), Options{});
  const CfgProgram& p = fr.kernel("gemm").cfg;
  const std::string d = dump(p);
  info << " " << d.substr(0, d.size() - 1);
  o.require(d == "C['ij'] += 0.5 * log(A['ik'], B['kj'])\n", "dump differs from golden");
  o.require(p.actions.size() == 1 && p.actions[0].kind == OpKind::Log && p.actions[0].alpha.lit == 0.5 &&
                p.actions[0].alpha.syms.empty() && p.actions[0].add,
            "not one log action with alpha 0.5 and beta 1");
}

struct CorpusRun {
  std::string label;
  FamilyResult fr;
};

std::vector<CorpusRun>& corpus() {
  static std::vector<CorpusRun> runs = [] {
    std::vector<CorpusRun> r;
    for (auto& e : full_corpus()) r.push_back({e.label, run_pipeline(e.family, Options{})});
    return r;
  }();
  return runs;
}

const Kernel& source_of(const FamilyResult& fr, const std::string& name) {
  for (const auto& k : fr.family.kernels)
    if (k.name == name) return k;
  throw Error("UnknownKernel", name);
}

void c8(Outcome& o, std::ostream& info) {
  if (kCc.empty()) {
    o.require(false, "no C compiler found");
    return;
  }
  int families = 0, runs = 0, dumps = 0;
  double worst_interp = 0;
  for (const auto& c : corpus()) {
    const FamilyResult& fr = c.fr;
    o.require(fr.ok(), c.label + " did not compile");
    if (!fr.ok()) continue;
    for (const auto& k : fr.kernels) {
      const Kernel& src = source_of(fr, k.name);
      Values<double> want = make_inputs(fr.family, src, 1), got = want;
      reference_run(fr.family, src, want);
      interpret_run(fr, k.lowered, got);
      for (const auto& t : written_by(src))
        worst_interp = std::max(worst_interp, relative_error(got.tensors.at(t), want.tensors.at(t)));
    }
    test::CBuild b = test::build_emitted(fr, kCc);
    o.require(b.compiled, c.label + " emitted C does not compile: " + b.log.substr(0, 200));
    if (!b.compiled) continue;
    for (int seed = 1; seed <= 10; ++seed) {
      test::Run r = test::run_command(b.exe + " " + std::to_string(seed));
      ++runs;
      o.require(r.status == 0 && r.out.find("FAIL") == std::string::npos,
                c.label + " seed " + std::to_string(seed) + ": " + r.out.substr(0, 200));
      const std::string dump = test::run_command(b.exe + " " + std::to_string(seed) + " --dump").out;
      if (dump == interpreter_dump(fr, seed))
        ++dumps;
      else
        o.require(false, c.label + " seed " + std::to_string(seed) + " C and interpreter outputs differ");
    }
    Options single;
    single.single = true;
    FamilyResult sf = run_pipeline(fr.family, single);
    test::CBuild sb = test::build_emitted(sf, kCc);
    o.require(sb.compiled, c.label + " single precision C does not compile");
    if (sb.compiled) {
      test::Run r = test::run_command(sb.exe + " 1");
      o.require(r.status == 0, c.label + " single precision: " + r.out.substr(0, 200));
    }
    ++families;
  }
  info << " " << families << " families, " << runs << " seeded runs, " << dumps
       << " bit-identical dumps, interpreter vs reference " << worst_interp;
  o.require(worst_interp <= 1e-12, "interpreter differs from the reference");
}

void c9(Outcome& o, std::ostream& info) {
  int kernels = 0;
  for (const auto& c : corpus())
    for (const auto& k : c.fr.kernels) {
      Values<double> v = make_inputs(c.fr.family, source_of(c.fr, k.name), 2);
      const long tally = interpret_run(c.fr, k.lowered, v);
      ++kernels;
      o.require(tally == k.hardware_flops, c.label + "/" + k.name + ": tally " + std::to_string(tally) + " reported " +
                                               std::to_string(k.hardware_flops));
    }
  info << " " << kernels << " kernels";
}

std::vector<std::vector<double>> outputs(const FamilyResult& fr, const Kernel& src, const CfgProgram& p) {
  Values<double> v = make_inputs(fr.family, src, 3);
  interpret_run(fr, lower_program(p), v);
  std::vector<std::vector<double>> out;
  for (const auto& t : written_by(src)) out.push_back(pack(fr.layouts.at(t), v.tensors.at(t)));
  return out;
}

bool bit_equal(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].size() != b[i].size() || std::memcmp(a[i].data(), b[i].data(), a[i].size() * sizeof(double)) != 0)
      return false;
  return true;
}

void c10(Outcome& o, std::ostream& info) {
  int programs = 0;
  for (const auto& c : corpus())
    for (const auto& k : c.fr.kernels) {
      const Kernel& src = source_of(c.fr, k.name);
      PassTrace trace;
      CfgProgram done = run_passes(k.initial_cfg, &trace);
      const auto want = outputs(c.fr, src, k.initial_cfg);
      for (const auto& [pass, p] : trace) {
        ++programs;
        o.require(bit_equal(want, outputs(c.fr, src, p)), c.label + "/" + k.name + " changed by " + pass);
      }
      o.require(dump(run_passes(done)) == dump(done), c.label + "/" + k.name + " passes not idempotent");
    }
  info << " " << programs << " intermediate programs";
}

void c11(Outcome& o, std::ostream& info) {
  for (int q : {1, 2}) {
    FamilyResult fr = run_pipeline(mra_family(4, q), Options{});
    const KernelResult& k = fr.kernel("mra");
    for (const auto& e : k.einsums) {
      const long best = sr_oracle(e.operands, e.result);
      info << " q=" << q << " " << e.text << " cost " << e.cost << " oracle " << best;
      o.require(e.cost == best, "q=" + std::to_string(q) + " not minimal");
    }
    info << " transposes " << k.log_cost.l + k.log_cost.r << ";";
    o.require(!k.log_cost.inf && k.log_cost.l + k.log_cost.r == 0, "q=" + std::to_string(q) + " needs transposes");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<void(Outcome&, std::ostream&)>>> criteria{
      {1, c1}, {2, c2}, {3, c3}, {4, c4}, {5, c5}, {6, c6}, {7, c7}, {8, c8}, {9, c9}, {10, c10}, {11, c11}};
  int failed = 0;
  for (const auto& [n, run] : criteria) {
    Outcome o;
    std::ostringstream info;
    const auto t0 = Clock::now();
    try {
      run(o, info);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << "criterion " << n << ": " << (o.ok ? "PASS" : "FAIL") << " (" << seconds_since(t0) << " s)"
              << info.str();
    if (!o.ok) std::cout << " -- " << o.why.str();
    std::cout << std::endl;
    failed += o.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
