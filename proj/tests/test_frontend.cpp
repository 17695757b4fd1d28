#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "tkc/diag.hpp"
#include "tkc/corpus.hpp"
#include "tkc/oracles.hpp"
#include "tkc/parser.hpp"
#include "tkc/spp_io.hpp"

using namespace tkc;

namespace {

const std::string kCli = TKC_CLI;

const char* kExample = R"(# kernel example
tensor C(2, 3)
tensor A(4, 3) layout bbox
tensor B(2, 5, 4)
tensor w(5)
scalar s = 2
scalar t
kernel k {
  C['ij'] <= 2.0*C['ij'] + A['lj']*B['ikl']*w['k']
  C['ij'] += s * t * (A['lj'] + A['lj']) * B['ikl'] * w['k']
  prefetch A
}
)";

Diagnostic parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.diag();
  }
  return {};
}

void write(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

}  // namespace

TEST(Parser, KernelExample) {
  KernelFile f = parse("kernel k { C['ij'] <= 2.0*C['ij'] + A['lj']*B['ikl']*w['k'] }");
  ASSERT_EQ(f.kernels.size(), 1u);
  ASSERT_EQ(f.kernels[0].stmts.size(), 1u);
  EXPECT_EQ(dump(f.kernels[0].stmts[0].root),
            "Assign[](C[ij], Add[](ScalarMultiplication(2, C[ij]), Einsum[](A[lj], B[ikl], w[k])))");
  EXPECT_FALSE(f.kernels[0].stmts[0].accumulate);
}

TEST(Parser, RoundTrip) {
  KernelFile f = parse(kExample);
  EXPECT_EQ(f.tensors.size(), 4u);
  EXPECT_EQ(f.scalars.size(), 2u);
  EXPECT_EQ(f.kernels[0].prefetch, (std::vector<std::string>{"A"}));
  EXPECT_EQ(f.tensors[1].layout, LayoutPolicy::BBox);
  const std::string printed = print(f);
  KernelFile g = parse(printed);
  EXPECT_TRUE(same_file(f, g)) << printed;
  EXPECT_EQ(print(g), printed);
}

TEST(Parser, AccumulateDesugars) {
  KernelFile f = parse("kernel k { C['ij'] += A['ij'] }");
  const Statement& st = f.kernels[0].stmts[0];
  EXPECT_TRUE(st.accumulate);
  EXPECT_EQ(st.root->kids[1]->kind, NodeKind::Add);
}

TEST(Parser, MissingBraceHasLocation) {
  Diagnostic d = parse_error("tensor A(2)\nkernel k { A['i'] <= A['i']\n");
  EXPECT_EQ(d.code, "SyntaxError");
  EXPECT_EQ(d.line, 3);
  EXPECT_EQ(d.col, 1);
}

TEST(Parser, BadTokenHasLocation) {
  Diagnostic d = parse_error("tensor A(2, x)");
  EXPECT_EQ(d.code, "SyntaxError");
  EXPECT_EQ(d.line, 1);
  EXPECT_EQ(d.col, 13);
  EXPECT_EQ(parse_error("kernel k { C['i j'] <= A['ij'] }").code, "BadIndex");
}

TEST(Parser, IndexLengthMismatchDiagnosed) {
  Family fam = test::family_from_text("tensor A(2, 2)\ntensor B(2, 2)\nkernel k { B['ij'] <= A['ijk'] }");
  Diagnostics d = validate_kernel(fam, fam.kernels[0]);
  ASSERT_FALSE(d.empty());
  EXPECT_EQ(d[0].code, "RankMismatch");
}

TEST(Parser, NumberFormatting) {
  EXPECT_EQ(format_number(2), "2.0");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(-1e-20), "-1e-20");
}

TEST(SppIo, DiagonalPattern) {
  SparsityPattern p = parse_spp("2 2 \n 0 0 \n 1 1");
  SparsityPattern want({2, 2});
  want.set({0, 0});
  want.set({1, 1});
  EXPECT_EQ(p, want);
  EXPECT_EQ(parse_spp("2 2\n0 0\n0 0\n1 1\n"), want);
}

TEST(SppIo, Errors) {
  try {
    parse_spp("2 2\n0 0\n2 1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "CoordinateOutOfRange");
    EXPECT_EQ(e.diag().line, 3);
  }
  EXPECT_THROW(parse_spp("2 2\n0\n"), Error);
  EXPECT_THROW(parse_spp("2 x\n"), Error);
  EXPECT_THROW(load_spp("/nonexistent/pattern.spp"), Error);
}

TEST(SppIo, StaircaseFileRoundTrip) {
  const std::string dir = test::scratch_dir("spp");
  SparsityPattern k = ktilde_pattern(3);
  write(dir + "/kt.spp", format_spp(k));
  SparsityPattern back = load_spp(dir + "/kt.spp");
  EXPECT_EQ(back, k);
  EXPECT_EQ(back.nnz(), k.nnz());
}

TEST(Frontend, SppPathRelativeToFile) {
  const std::string dir = test::scratch_dir("fam");
  write(dir + "/diag.spp", "3 3\n0 0\n1 1\n2 2\n");
  Family f = to_family(parse("tensor D(3, 3) spp \"diag.spp\"\ntensor X(3, 3)\nkernel k { X['ij'] <= D['ik'] * X['kj'] }"),
                       "f", dir);
  EXPECT_EQ(f.tensor("D").spp.nnz(), 3);
  try {
    to_family(parse("tensor D(2, 2) spp \"diag.spp\"\nkernel k { D['ij'] <= D['ij'] }"), "f", dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "SppShapeMismatch");
    EXPECT_EQ(e.diag().line, 1);
  }
}

TEST(Frontend, CorpusNames) {
  EXPECT_EQ(corpus_family("seissol_o3_s8").name, "seissol_o3_s8");
  EXPECT_EQ(corpus_family("lina2d_o3").name, "lina2d_o3");
  EXPECT_EQ(corpus_family("mra_p4_q2").name, "mra_p4_q2");
  EXPECT_EQ(corpus_family("gemm").kernels.size(), 1u);
  EXPECT_THROW(corpus_family("nope"), Error);
}

TEST(Frontend, PipelineMraOrderIsOptimal) {
  FamilyResult fr = run_pipeline(mra_family(4, 2), Options{});
  const KernelResult& k = fr.kernel("mra");
  ASSERT_TRUE(k.ok);
  for (const auto& e : k.einsums) EXPECT_EQ(e.cost, sr_oracle(e.operands, e.result));
}

TEST(Cli, CompileCheckReportAndExitCodes) {
  const std::string dir = test::scratch_dir("cli");
  write(dir + "/mm.tkc", "tensor A(3, 4)\ntensor B(4, 5)\ntensor C(3, 5)\nkernel mm { C['ij'] <= A['ik'] * B['kj'] }\n");
  write(dir + "/bad.tkc", "tensor A(3, 4)\nkernel mm { A['ij'] <= A['ij']\n");
  write(dir + "/rank.tkc", "tensor A(3, 4)\nkernel mm { A['ij'] <= A['ijk'] }\n");

  test::Run r = test::run_command(kCli + " compile " + dir + "/mm.tkc --out-dir " + dir + "/out");
  EXPECT_EQ(r.status, 0) << r.out;
  for (const char* f : {"mm_report.json", "mm.h", "mm_kernels.c", "mm_tensors.c", "mm_tests.c"})
    EXPECT_TRUE(std::filesystem::exists(dir + "/out/" + f)) << f;

  r = test::run_command(kCli + " compile " + dir + "/mm.tkc --emit none --out-dir " + dir + "/none");
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(std::filesystem::exists(dir + "/none/mm_report.json"));
  EXPECT_FALSE(std::filesystem::exists(dir + "/none/mm.h"));

  EXPECT_EQ(test::run_command(kCli + " check " + dir + "/mm.tkc").status, 0);
  r = test::run_command(kCli + " report " + dir + "/mm.tkc --precision single --align 4");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"precision\": \"single\""), std::string::npos) << r.out;

  r = test::run_command(kCli + " check " + dir + "/bad.tkc");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find(":3:1: SyntaxError"), std::string::npos) << r.out;
  r = test::run_command(kCli + " check " + dir + "/rank.tkc");
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("RankMismatch"), std::string::npos) << r.out;
  EXPECT_EQ(test::run_command(kCli + " compile --corpus gemm --backend-order bogus --emit none --out-dir " + dir).status,
            1);
  EXPECT_EQ(test::run_command(kCli + " frobnicate").status, 1);
  EXPECT_EQ(test::run_command(kCli + " oracle --corpus mra_p4_q1").status, 0);
}
