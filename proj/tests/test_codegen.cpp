#include <gtest/gtest.h>

#include <cstring>

#include "helpers.hpp"
#include "tkc/diag.hpp"
#include "tkc/corpus.hpp"
#include "tkc/interp.hpp"
#include "tkc/reference.hpp"
#include "tkc/report.hpp"

using namespace tkc;
using tkc::test::declare;

namespace {

const std::string kCc = TKC_CC;

Family matmul2() {
  Family f;
  declare(f, "A", {2, 2});
  declare(f, "B", {2, 2});
  declare(f, "C", {2, 2});
  return test::single_kernel("mm", f, make_statement(ix("C", "ij"), ix("A", "ik") * ix("B", "kj"), false));
}

std::string file_text(const std::vector<EmittedFile>& files, const std::string& suffix) {
  for (const auto& f : files)
    if (f.name.size() >= suffix.size() && f.name.compare(f.name.size() - suffix.size(), suffix.size(), suffix) == 0)
      return f.text;
  return {};
}

}  // namespace

TEST(Flops, DenseTwoByTwoMatmul) {
  FamilyResult fr = run_pipeline(matmul2(), Options{});
  const KernelResult& k = fr.kernel("mm");
  EXPECT_EQ(k.nonzero_flops, 12);
  EXPECT_EQ(k.hardware_flops, 16);
  ASSERT_EQ(k.lowered.actions.size(), 1u);
  EXPECT_EQ(k.lowered.actions[0].kind, OpKind::Log);
}

TEST(Flops, ZeroPatternOperand) {
  Family f;
  f.add_tensor(make_tensor("A", {2, 2}, SparsityPattern::zeros({2, 2})));
  declare(f, "B", {2, 2});
  declare(f, "C", {2, 2});
  f = test::single_kernel("z", f, make_statement(ix("C", "ij"), ix("A", "ik") * ix("B", "kj"), false));
  FamilyResult fr = run_pipeline(f, Options{});
  EXPECT_EQ(fr.kernel("z").nonzero_flops, 0);
  Values<double> v = make_inputs(fr.family, fr.family.kernels[0], 3);
  interpret_run(fr, fr.kernel("z").lowered, v);
  for (double x : v.tensors.at("C").data()) EXPECT_EQ(x, 0.0);
}

TEST(Flops, VolumeKernelHalvesAtOrderFour) {
  auto volume_only = [](Family f) {
    std::vector<Kernel> ks;
    for (const auto& k : f.kernels)
      if (k.name == "volume") ks.push_back(k);
    f.kernels = ks;
    return f;
  };
  Family f = volume_only(seissol_family(4, 1));
  Options dense;
  dense.dense_baseline = true;
  const long sparse_hw = run_pipeline(f, Options{}).kernel("volume").hardware_flops;
  const long dense_hw = run_pipeline(f, dense).kernel("volume").hardware_flops;
  EXPECT_EQ(2 * sparse_hw, dense_hw);
}

TEST(Interpreter, IdentityMatmul) {
  Family f = matmul2();
  Grid<double> id({2, 2});
  id({0, 0}) = id({1, 1}) = 1.0;
  FamilyResult fr = run_pipeline(f, Options{});
  Values<double> v;
  v.tensors["A"] = id;
  v.tensors["B"] = id;
  v.tensors["C"] = Grid<double>({2, 2}, 7.0);
  const long tally = interpret_run(fr, fr.kernel("mm").lowered, v);
  EXPECT_EQ(v.tensors.at("C").data(), id.data());
  EXPECT_EQ(tally, fr.kernel("mm").hardware_flops);
}

TEST(Interpreter, GemmKernelMatchesFormulaExactly) {
  FamilyResult fr = run_pipeline(matmul_family(), Options{});
  const Kernel& src = fr.family.kernels[0];
  Values<double> v = make_inputs(fr.family, src, 11);
  const Grid<double> a = v.tensors.at("A"), b = v.tensors.at("B"), c = v.tensors.at("C");
  interpret_run(fr, fr.kernel("gemm").lowered, v);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += a({i, k}) * b({k, j});
      EXPECT_EQ(v.tensors.at("C")({i, j}), c({i, j}) + 0.5 * acc);
    }
}

TEST(Interpreter, LinaFluxMatchesReference) {
  FamilyResult fr = run_pipeline(lina_family(3, 3), Options{});
  const KernelResult& k = fr.kernel("flux");
  const Kernel* src = nullptr;
  for (const auto& s : fr.family.kernels)
    if (s.name == "flux") src = &s;
  ASSERT_NE(src, nullptr);
  Values<double> want = make_inputs(fr.family, *src, 4), got = want;
  reference_run(fr.family, *src, want);
  EXPECT_EQ(interpret_run(fr, k.lowered, got), k.hardware_flops);
  for (const auto& t : written_by(*src)) EXPECT_LE(relative_error(got.tensors.at(t), want.tensors.at(t)), 1e-12);
}

TEST(Emit, LinaFluxHasGemmsAndLoops) {
  FamilyResult fr = run_pipeline(lina_family(3, 4), Options{});
  std::string kernels = file_text(emit_c99(fr), "_kernels.c");
  const size_t at = kernels.find("void lina3d_o4_flux_execute");
  ASSERT_NE(at, std::string::npos);
  const std::string body = kernels.substr(at, kernels.find("\n}\n", at) - at);
  EXPECT_NE(body.find("tkc_gemm"), std::string::npos);
  EXPECT_NE(body.find("for ("), std::string::npos);
  bool product = false;
  for (const auto& a : fr.kernel("flux").lowered.actions) product |= a.kind == OpKind::Product;
  EXPECT_TRUE(product);
}

TEST(Emit, EmptyKernelHasEmptyBody) {
  Family f;
  declare(f, "A", {2});
  f.kernels.push_back(Kernel{"nothing", {}, {}});
  FamilyResult fr = run_pipeline(f, Options{});
  ASSERT_TRUE(fr.ok());
  f.name = "empty";
  fr.family.name = "empty";
  std::string kernels = file_text(emit_c99(fr), "_kernels.c");
  EXPECT_NE(kernels.find("void empty_nothing_execute(const struct empty_nothing* k) {\n"), std::string::npos);
  const size_t at = kernels.find("void empty_nothing_execute(const struct empty_nothing* k) {\n");
  const std::string rest = kernels.substr(at);
  const size_t open = rest.find('{'), close = rest.find("\n}");
  EXPECT_EQ(rest.substr(open + 1, close - open - 1), "\n  (void)k;");
}

TEST(Emit, UnknownBackendIsNull) {
  EXPECT_EQ(make_backend("no-such-backend"), nullptr);
  ASSERT_NE(make_backend("portable"), nullptr);
  EXPECT_EQ(make_backend("portable")->name(), "portable");
  Options o;
  o.backend_order = {"no-such-backend"};
  FamilyResult fr = run_pipeline(matmul_family(), o);
  EXPECT_FALSE(fr.ok());
}

TEST(Emit, Deterministic) {
  FamilyResult a = run_pipeline(seissol_family(2, 8), Options{});
  FamilyResult b = run_pipeline(seissol_family(2, 8), Options{});
  auto fa = emit_c99(a), fb = emit_c99(b);
  ASSERT_EQ(fa.size(), fb.size());
  for (size_t i = 0; i < fa.size(); ++i) {
    EXPECT_EQ(fa[i].name, fb[i].name);
    EXPECT_EQ(fa[i].text, fb[i].text) << fa[i].name;
  }
  EXPECT_EQ(report_json(a), report_json(b));
}

TEST(Report, KernelFields) {
  FamilyResult fr = run_pipeline(matmul_family(), Options{});
  const std::string r = report_json(fr);
  for (const char* key : {"\"nonzero_flops\"", "\"hardware_flops\"", "\"log_cost\"", "\"descriptors\"", "\"actions\"",
                          "\"buffers\"", "\"conventions\"", "\"layouts\""})
    EXPECT_NE(r.find(key), std::string::npos) << key;
}

class EmittedC : public ::testing::Test {
protected:
  void SetUp() override {
    if (kCc.empty()) GTEST_SKIP() << "no C compiler";
  }
};

TEST_F(EmittedC, CopyScaleAddKernel) {
  Family f;
  declare(f, "A", {3, 4});
  declare(f, "B", {3, 4});
  f.add_scalar({"w", std::nullopt});
  f = test::single_kernel("scale", f, make_statement(ix("B", "ij"), sym("w") * ix("A", "ij"), true));
  f.name = "axpy";
  FamilyResult fr = run_pipeline(f, Options{});
  ASSERT_TRUE(fr.ok());
  ASSERT_EQ(fr.kernel("scale").cfg.actions.size(), 1u);
  std::string kernels = file_text(emit_c99(fr), "_kernels.c");
  EXPECT_NE(kernels.find("k->w"), std::string::npos);
  test::CBuild b = test::build_emitted(fr, kCc);
  ASSERT_TRUE(b.compiled) << b.log;
  test::Run r = test::run_command(b.exe + " 3");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(test::run_command(b.exe + " 3 --dump").out, interpreter_dump(fr, 3));
}

TEST_F(EmittedC, GemmFamilyPassesAndMatchesInterpreter) {
  FamilyResult fr = run_pipeline(matmul_family(), Options{});
  test::CBuild b = test::build_emitted(fr, kCc);
  ASSERT_TRUE(b.compiled) << b.log;
  EXPECT_TRUE(b.log.empty()) << b.log;
  test::Run r = test::run_command(b.exe);
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("PASS"), std::string::npos);
  EXPECT_EQ(test::run_command(b.exe + " 9 --dump").out, interpreter_dump(fr, 9));
}

TEST_F(EmittedC, SinglePrecision) {
  Options o;
  o.single = true;
  FamilyResult fr = run_pipeline(lina_family(2, 3), o);
  test::CBuild b = test::build_emitted(fr, kCc);
  ASSERT_TRUE(b.compiled) << b.log;
  test::Run r = test::run_command(b.exe + " 2");
  EXPECT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(test::run_command(b.exe + " 2 --dump").out, interpreter_dump(fr, 2));
}

TEST_F(EmittedC, ZeroInputsGiveZeroOutputs) {
  Family f;
  f.add_tensor(make_tensor("A", {3, 3}, SparsityPattern::zeros({3, 3})));
  declare(f, "B", {3, 3});
  declare(f, "C", {3, 3});
  f = test::single_kernel("zero", f, make_statement(ix("C", "ij"), ix("A", "ik") * ix("B", "kj"), false));
  f.name = "zeros";
  FamilyResult fr = run_pipeline(f, Options{});
  ASSERT_TRUE(fr.ok());
  test::CBuild b = test::build_emitted(fr, kCc);
  ASSERT_TRUE(b.compiled) << b.log;
  EXPECT_EQ(test::run_command(b.exe).status, 0);
  const std::string dump = test::run_command(b.exe + " 1 --dump").out;
  EXPECT_EQ(dump, interpreter_dump(fr, 1));
  const size_t c = dump.find("zero C ");
  ASSERT_NE(c, std::string::npos);
  std::string rest = dump.substr(dump.find('\n', c) + 1);
  for (int i = 0; i < 9; ++i) {
    EXPECT_EQ(rest.substr(0, rest.find('\n')), "0x0p+0");
    rest = rest.substr(rest.find('\n') + 1);
  }
}

TEST_F(EmittedC, CorruptedDescriptorFails) {
  FamilyResult fr = run_pipeline(matmul_family(), Options{});
  std::vector<LoweredKernel> lowered{fr.kernel("gemm").lowered};
  bool mutated = false;
  for (auto& a : lowered[0].actions)
    for (auto& in : a.instrs)
      if (auto* g = std::get_if<GemmInstr>(&in)) {
        std::swap(g->a_m, g->a_k);
        mutated = true;
      }
  ASSERT_TRUE(mutated);
  test::CBuild b = test::build_emitted(fr, kCc, &lowered);
  ASSERT_TRUE(b.compiled) << b.log;
  test::Run r = test::run_command(b.exe);
  EXPECT_NE(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}
