#include <gtest/gtest.h>

#include <algorithm>

#include "helpers.hpp"
#include "tkc/diag.hpp"
#include "tkc/ast.hpp"

using namespace tkc;
using tkc::test::declare;

namespace {

Family abcw() {
  Family f;
  declare(f, "C", {2, 3});
  declare(f, "A", {4, 3});
  declare(f, "B", {2, 5, 4});
  declare(f, "w", {5});
  return f;
}

bool has_code(const Diagnostics& ds, const std::string& code) {
  return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) { return d.code == code; });
}

}  // namespace

TEST(Combine, EinsumChainFlattens) {
  Expr e = (ix("A", "lj") * ix("B", "ikl")) * ix("w", "k");
  ASSERT_EQ(e.node()->kind, NodeKind::Einsum);
  ASSERT_EQ(e.node()->kids.size(), 3u);
  EXPECT_EQ(e.node()->kids[2]->tensor, "w");
}

TEST(Combine, AddIsNotDistributed) {
  Expr e = ix("A", "ik") * (ix("B", "kj") + ix("C", "kj"));
  ASSERT_EQ(e.node()->kind, NodeKind::Einsum);
  ASSERT_EQ(e.node()->kids.size(), 2u);
  EXPECT_EQ(e.node()->kids[1]->kind, NodeKind::Add);
}

TEST(Combine, ScalarsFold) {
  Expr e = 2.0 * (3.0 * ix("A", "ij"));
  ASSERT_EQ(e.node()->kind, NodeKind::ScalarMul);
  EXPECT_EQ(e.node()->coef.lit, 6.0);
  EXPECT_EQ(e.node()->kids[0]->kind, NodeKind::Indexed);
}

TEST(Combine, AddLeftAndRightMerge) {
  NodePtr a = make_indexed("A", "ij"), b = make_indexed("B", "ij"), c = make_indexed("C", "ij");
  NodePtr ab = combine(a, b, NodeKind::Add);
  EXPECT_EQ(combine(ab, c, NodeKind::Add)->kids.size(), 3u);
  EXPECT_EQ(combine(c, ab, NodeKind::Add)->kids[0], c);
  EXPECT_EQ(combine(ab, ab, NodeKind::Add)->kids.size(), 4u);
}

TEST(Ast, KernelExampleShape) {
  Family f = abcw();
  Statement st = make_statement(ix("C", "ij"), 2.0 * ix("C", "ij") + ix("A", "lj") * ix("B", "ikl") * ix("w", "k"), false);
  deduce_indices(f, st);
  const NodePtr& add = st.root->kids[1];
  ASSERT_EQ(add->kind, NodeKind::Add);
  EXPECT_EQ(add->kids[0]->kind, NodeKind::ScalarMul);
  EXPECT_EQ(add->kids[0]->coef.lit, 2.0);
  ASSERT_EQ(add->kids[1]->kind, NodeKind::Einsum);
  EXPECT_EQ(add->kids[1]->idx, "ij");
  EXPECT_TRUE(normalized(st.root));
}

TEST(Ast, ScalarMulSitsAboveEinsum) {
  Expr e = ix("A", "ik") * sym("alpha") * ix("B", "kj");
  ASSERT_EQ(e.node()->kind, NodeKind::ScalarMul);
  EXPECT_EQ(e.node()->coef.syms, (std::vector<std::string>{"alpha"}));
  EXPECT_EQ(e.node()->kids[0]->kind, NodeKind::Einsum);
  EXPECT_TRUE(normalized(e.node()));
}

TEST(DeduceIndices, ContractedLetters) {
  EXPECT_EQ(deduce_einsum_letters({"lj", "ikl", "k"}, "ij"), "ij");
  EXPECT_EQ(deduce_einsum_letters({"slq", "lk", "qp"}, "skp"), "skp");
  EXPECT_THROW(deduce_einsum_letters({"ij", "jk"}, "i"), Error);
}

TEST(DeduceIndices, StiffnessTimesStarKernel) {
  Family f;
  declare(f, "Q", {2, 3, 4});
  declare(f, "I", {2, 5, 6});
  declare(f, "K", {5, 3});
  declare(f, "A", {6, 4});
  Statement st = make_statement(ix("Q", "skp"), ix("I", "slq") * ix("K", "lk") * ix("A", "qp"), false);
  deduce_indices(f, st);
  EXPECT_EQ(st.root->kids[1]->idx, "skp");
}

TEST(DeduceIndices, AddWithTransposeGetsPermute) {
  Family f;
  declare(f, "C", {3, 3});
  declare(f, "A", {3, 3});
  declare(f, "B", {3, 3});
  Statement st = make_statement(ix("C", "ij"), ix("A", "ij") + ix("B", "ji"), false);
  deduce_indices(f, st);
  const NodePtr& add = st.root->kids[1];
  EXPECT_EQ(add->kids[0]->kind, NodeKind::Indexed);
  ASSERT_EQ(add->kids[1]->kind, NodeKind::Permute);
  EXPECT_EQ(add->kids[1]->idx, "ij");
  EXPECT_EQ(add->kids[1]->kids[0]->idx, "ji");
}

TEST(DeduceIndices, MismatchedAdd) {
  Family f;
  declare(f, "C", {3, 3});
  declare(f, "A", {3, 3});
  declare(f, "B", {3, 3});
  Statement st = make_statement(ix("C", "ij"), ix("A", "ij") + ix("B", "jk"), false);
  EXPECT_THROW(deduce_indices(f, st), Error);
}

TEST(Validate, RankMismatch) {
  Family f = abcw();
  Kernel k{"k", {make_statement(ix("C", "ij"), ix("A", "ijk"), false)}, {}};
  Diagnostics d = validate_kernel(f, k);
  ASSERT_TRUE(has_code(d, "RankMismatch"));
  EXPECT_NE(d[0].message.find("A"), std::string::npos);
}

TEST(Validate, UndeclaredTensor) {
  Family f = abcw();
  Kernel k{"k", {make_statement(ix("C", "ij"), ix("Z", "ij"), false)}, {}};
  EXPECT_TRUE(has_code(validate_kernel(f, k), "UndeclaredTensor"));
}

TEST(Validate, AlphabetExhausted) {
  const std::string pool = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0";
  Family f;
  declare(f, "T", {1, 1, 1, 1, 1, 1});
  declare(f, "R", {1});
  Expr e;
  for (int t = 0; t < 9; ++t) {
    std::string idx;
    for (int d = 0; d < 6; ++d) idx += pool[(t * 6 + d) % pool.size()];
    e = t == 0 ? ix("T", idx) : e * ix("T", idx);
  }
  Kernel k{"k", {make_statement(ix("R", "a"), e, false)}, {}};
  EXPECT_TRUE(has_code(validate_kernel(f, k), "AlphabetExhausted"));
}

TEST(Validate, OperandCap) {
  Family f;
  declare(f, "M", {2, 2});
  Expr e = ix("M", "ab");
  const std::string chain = "abcdefghij";
  for (int i = 1; i < 9; ++i) e = e * ix("M", chain.substr(i, 2));
  Kernel k{"k", {make_statement(ix("M", "aj"), e, false)}, {}};
  EXPECT_TRUE(has_code(validate_kernel(f, k), "CapExceeded"));
}

TEST(Validate, CleanKernel) {
  Family f = abcw();
  Kernel k{"k", {make_statement(ix("C", "ij"), ix("A", "lj") * ix("B", "ikl") * ix("w", "k"), true)}, {}};
  EXPECT_TRUE(validate_kernel(f, k).empty());
}

TEST(Validate, ConstantTargetRejected) {
  Family f;
  f.add_tensor(make_tensor("K", {2, 2}, std::nullopt, Grid<double>({2, 2}, 1.0)));
  declare(f, "A", {2, 2});
  Kernel k{"k", {make_statement(ix("K", "ij"), ix("A", "ij"), false)}, {}};
  EXPECT_TRUE(has_code(validate_kernel(f, k), "ReadOnlyTarget"));
}

TEST(Builder, BareScalarCannotBeAssigned) {
  EXPECT_THROW(make_statement(ix("C", "ij"), lit(2.0), false), Error);
  EXPECT_THROW(ix("C", "ij") + lit(1.0), Error);
}
