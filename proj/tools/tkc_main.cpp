#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tkc/corpus.hpp"
#include "tkc/emit_c.hpp"
#include "tkc/oracles.hpp"
#include "tkc/parser.hpp"
#include "tkc/pipeline.hpp"
#include "tkc/reference.hpp"
#include "tkc/report.hpp"

namespace fs = std::filesystem;
using namespace tkc;

namespace {

struct Args {
  std::string input;
  std::string corpus;
  std::string precision = "double";
  int align = 1;
  std::vector<std::string> backends{"portable"};
  std::string out_dir = ".";
  std::string emit = "c99";
  uint64_t seed = 1;
  bool dense = false;
};

// Diagnostics are reported to the user; everything else is internal.
struct Failed {
  Diagnostics diags;
};

std::string where(const Args& a) { return a.corpus.empty() ? a.input : "corpus:" + a.corpus; }

void print_diags(const Args& a, const Diagnostics& ds) {
  for (const auto& d : ds) std::cerr << where(a) << ":" << d.str() << "\n";
}

Family load(const Args& a) {
  try {
    if (!a.corpus.empty()) return corpus_family(a.corpus);
    std::ifstream in(a.input);
    if (!in) throw Error("FileNotFound", "cannot open " + a.input);
    std::stringstream ss;
    ss << in.rdbuf();
    fs::path p(a.input);
    return to_family(parse(ss.str()), c_name(p.stem().string()), p.parent_path().string().empty() ? "." : p.parent_path().string());
  } catch (const Error& e) {
    throw Failed{{e.diag()}};
  }
}

Options options(const Args& a) {
  Options o;
  o.single = a.precision == "single";
  o.align = a.align;
  o.backend_order = a.backends;
  o.seed = a.seed;
  o.dense_baseline = a.dense;
  return o;
}

FamilyResult compile_family(const Args& a) {
  FamilyResult fr = run_pipeline(load(a), options(a));
  Diagnostics all = fr.diags;
  for (const auto& k : fr.kernels) all.insert(all.end(), k.diags.begin(), k.diags.end());
  if (!all.empty()) throw Failed{all};
  return fr;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int cmd_check(const Args& a) {
  Family fam = load(a);
  Options o = options(a);
  Diagnostics all;
  for (const auto& k : fam.kernels) {
    Diagnostics d = validate_kernel(fam, k, o.caps);
    all.insert(all.end(), d.begin(), d.end());
  }
  if (!all.empty()) throw Failed{all};
  std::cout << fam.name << ": " << fam.kernels.size() << " kernel(s), " << fam.tensors.size() << " tensor(s) ok\n";
  return 0;
}

int cmd_compile(const Args& a) {
  FamilyResult fr = compile_family(a);
  fs::create_directories(a.out_dir);
  const std::string name = c_name(fr.family.name);
  write_file(fs::path(a.out_dir) / (name + "_report.json"), report_json(fr));
  if (a.emit == "c99")
    for (const auto& f : emit_c99(fr)) write_file(fs::path(a.out_dir) / f.name, f.text);
  for (const auto& k : fr.kernels)
    std::cout << fr.family.name << "/" << k.name << ": nonzero " << k.nonzero_flops << ", hardware " << k.hardware_flops
              << "\n";
  return 0;
}

int cmd_report(const Args& a) {
  std::cout << report_json(compile_family(a));
  return 0;
}

double relative_error(const Grid<double>& got, const Grid<double>& want) {
  double n = 0, d = 0;
  for (long i = 0; i < want.size(); ++i) {
    const double e = got[i] - want[i];
    n += e * e;
    d += want[i] * want[i];
  }
  return d > 0 ? std::sqrt(n / d) : std::sqrt(n);
}

int cmd_oracle(const Args& a) {
  FamilyResult fr = compile_family(a);
  int failures = 0;
  auto line = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << "\n";
    if (!ok) ++failures;
  };
  PermContext ctx{&fr.layouts, fr.opt.align};
  for (const auto& k : fr.kernels) {
    const std::string base = fr.family.name + "/" + k.name;
    for (size_t i = 0; i < k.einsums.size(); ++i) {
      const EinsumInfo& e = k.einsums[i];
      const long best = sr_oracle(e.operands, e.result);
      line(best == e.cost, base + " einsum " + std::to_string(i) + " " + e.text + ": cost " + std::to_string(e.cost) +
                               ", exhaustive " + std::to_string(best));
    }
    for (size_t i = 0; i < k.unconfigured.size(); ++i) {
      const PermResult dp = optimize_permutations(k.unconfigured[i], ctx);
      try {
        const CostTuple ex = configuration_oracle(k.unconfigured[i], ctx);
        line(ex == dp.cost, base + " statement " + std::to_string(i) + ": permutation cost " + dp.cost.str() +
                                ", exhaustive " + ex.str());
      } catch (const Error& e) {
        std::cout << "SKIP " << base << " statement " << i << ": " << e.diag().message << "\n";
      }
    }
    const Kernel* src = nullptr;
    for (const auto& kk : fr.family.kernels)
      if (kk.name == k.name) src = &kk;
    Values<double> want = make_inputs(fr.family, *src, a.seed);
    Values<double> got = want;
    reference_run(fr.family, *src, want);
    const long tally = interpret_run(fr, k.lowered, got);
    double worst = 0;
    for (const auto& t : written_by(*src)) worst = std::max(worst, relative_error(got.tensors.at(t), want.tensors.at(t)));
    line(worst <= 1e-12, base + " interpreter vs reference: relative error " + std::to_string(worst));
    line(tally == k.hardware_flops, base + " flop tally " + std::to_string(tally) + ", reported " +
                                        std::to_string(k.hardware_flops));
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tkc: tensor-contraction kernel compiler"};
  app.require_subcommand(1);
  Args a;
  auto add_common = [&](CLI::App* sub) {
    auto* in = sub->add_option("file", a.input, "kernel description file");
    auto* cor = sub->add_option("--corpus", a.corpus, "bundled family instead of a file, e.g. seissol_o4_s1");
    in->excludes(cor);
    sub->add_option("--precision", a.precision, "element type")->check(CLI::IsMember({"double", "single"}));
    sub->add_option("--align", a.align, "SIMD width in elements")->check(CLI::PositiveNumber);
    sub->add_option("--backend-order", a.backends, "backend priority list")->delimiter(',');
    sub->add_option("--seed", a.seed, "seed for generated test inputs");
    sub->add_flag("--dense-baseline", a.dense, "treat every tensor as dense without EQSPP");
  };
  CLI::App* compile = app.add_subcommand("compile", "compile, emit code and write the report");
  add_common(compile);
  compile->add_option("--out-dir", a.out_dir, "output directory");
  compile->add_option("--emit", a.emit, "emission target")->check(CLI::IsMember({"c99", "none"}));
  CLI::App* check = app.add_subcommand("check", "validate only");
  add_common(check);
  CLI::App* report = app.add_subcommand("report", "print the JSON report without emitting code");
  add_common(report);
  CLI::App* oracle = app.add_subcommand("oracle", "compare against brute-force verifiers");
  add_common(oracle);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (a.input.empty() && a.corpus.empty()) {
    std::cerr << "tkc: a kernel file or --corpus is required\n";
    return 1;
  }
  try {
    if (compile->parsed()) return cmd_compile(a);
    if (check->parsed()) return cmd_check(a);
    if (report->parsed()) return cmd_report(a);
    return cmd_oracle(a);
  } catch (const Failed& f) {
    print_diags(a, f.diags);
    return 1;
  } catch (const Error& e) {
    std::cerr << where(a) << ": internal error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << where(a) << ": internal error: " << e.what() << "\n";
    return 2;
  }
}
