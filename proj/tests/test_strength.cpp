#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "tkc/diag.hpp"
#include "tkc/corpus.hpp"
#include "tkc/oracles.hpp"
#include "tkc/random.hpp"
#include "tkc/strength.hpp"

using namespace tkc;

namespace {

SrOperand dense(const std::string& idx, const Extents& e) { return {idx, SparsityPattern::dense(e)}; }

// Classic matrix-chain DP with the product cost 2mkn - mn of one matrix
// product (mkn multiplications, mkn - mn additions).
long chain_dp(const std::vector<int>& dims) {
  const int n = static_cast<int>(dims.size()) - 1;
  std::vector<std::vector<long>> c(n, std::vector<long>(n, 0));
  for (int len = 2; len <= n; ++len)
    for (int i = 0; i + len - 1 < n; ++i) {
      const int j = i + len - 1;
      c[i][j] = -1;
      for (int k = i; k < j; ++k) {
        const long m = dims[i], kk = dims[k + 1], nn = dims[j + 1];
        const long v = c[i][k] + c[k + 1][j] + 2 * m * kk * nn - m * nn;
        if (c[i][j] < 0 || v < c[i][j]) c[i][j] = v;
      }
    }
  return c[0][n - 1];
}

}  // namespace

TEST(FormulaCost, DenseMatmul) {
  EXPECT_EQ(multiplication_cost(SparsityPattern::dense({2, 2, 2})), 8);
  EXPECT_EQ(summation_cost(SparsityPattern::dense({2, 2, 2}), SparsityPattern::dense({2, 2})), 4);
  Schedule s = reduce_schedule({dense("ik", {2, 2}), dense("kj", {2, 2})}, "ij");
  EXPECT_EQ(s.cost, 12);
  ASSERT_EQ(s.formulas.size(), 2u);
  EXPECT_FALSE(s.formulas[0].summation);
  EXPECT_TRUE(s.formulas[1].summation);
  EXPECT_EQ(s.formulas[1].letter, 'k');
}

TEST(FormulaCost, DiagonalSummation) {
  SparsityPattern d({4, 4});
  for (int i = 0; i < 4; ++i) d.set({i, i});
  EXPECT_EQ(summation_cost(d, SparsityPattern::dense({4})), 0);
}

TEST(FormulaCost, SparseRowTimesDense) {
  SparsityPattern k({1, 2});
  k.set({0, 0});
  // T_ikj = K_ik Q_kj with K = (1 0) has two nonzeros
  SrOperand a{"ik", k}, b = dense("kj", {2, 2});
  Schedule s = reduce_schedule({a, b}, "ij");
  EXPECT_EQ(s.formulas[0].cost, 2);
  EXPECT_EQ(s.cost, 2);
}

TEST(StrengthReduction, SingleOperandSum) {
  Schedule s = reduce_schedule({dense("ik", {3, 4})}, "i");
  ASSERT_EQ(s.formulas.size(), 1u);
  EXPECT_TRUE(s.formulas[0].summation);
  EXPECT_EQ(s.cost, 9);
}

TEST(StrengthReduction, MatrixChain) {
  std::vector<SrOperand> ops{dense("ij", {10, 2}), dense("jk", {2, 10}), dense("kl", {10, 5})};
  Schedule s = reduce_schedule(ops, "il");
  EXPECT_EQ(s.cost, chain_dp({10, 2, 10, 5}));
  EXPECT_EQ(s.cost, sr_oracle(ops, "il"));
  EXPECT_EQ(s.cost, 340);
}

TEST(StrengthReduction, TwoOperandsForced) {
  std::vector<SrOperand> ops{dense("ij", {3, 4}), dense("jk", {4, 5})};
  EXPECT_EQ(reduce_schedule(ops, "ik").cost, 2 * 3 * 4 * 5 - 3 * 5);
  EXPECT_EQ(sr_oracle(ops, "ik"), 2 * 3 * 4 * 5 - 3 * 5);
}

TEST(StrengthReduction, SabijAtTwo) {
  const int N = 2;
  std::vector<SrOperand> ops{dense("acik", {N, N, N, N}), dense("befl", {N, N, N, N}), dense("dfjk", {N, N, N, N}),
                             dense("cdel", {N, N, N, N})};
  Schedule s = reduce_schedule(ops, "abij");
  EXPECT_EQ(s.cost, sr_oracle(ops, "abij"));
  EXPECT_LE(s.cost, 6 * static_cast<long>(std::pow(N, 6)));
  EXPECT_EQ(naive_cost(ops), 4 * static_cast<long>(std::pow(N, 10)));
}

TEST(StrengthReduction, RandomAgainstOracle) {
  uint64_t st = 7;
  const std::string pool = "abcdef";
  for (int trial = 0; trial < 40; ++trial) {
    std::map<char, int> size;
    for (char c : pool) size[c] = test::random_int(st, 1, 3);
    const int n = test::random_int(st, 2, 4);
    std::vector<SrOperand> ops;
    std::string used;
    for (int k = 0; k < n; ++k) {
      std::string idx;
      for (char c : pool)
        if (splitmix64(st) % 3 == 0) idx += c;
      if (idx.empty()) idx = std::string(1, pool[k]);
      Extents e;
      for (char c : idx) e.push_back(size[c]);
      SparsityPattern p(e);
      for (long i = 0; i < p.size(); ++i) p.set_lin(i, splitmix64(st) % 4 != 0);
      ops.push_back({idx, p});
      used = letter_union(used, idx);
    }
    std::string result;
    for (char c : used)
      if (splitmix64(st) % 2) result += c;
    EXPECT_EQ(reduce_schedule(ops, result).cost, sr_oracle(ops, result)) << "trial " << trial;
  }
}

TEST(StrengthReduction, SparsityLowersCost) {
  SparsityPattern k({4, 4});
  for (int i = 0; i < 4; ++i) k.set({i, 0});
  std::vector<SrOperand> ops{{"ik", k}, dense("kj", {4, 4})};
  EXPECT_LT(reduce_schedule(ops, "ij").cost, reduce_schedule({dense("ik", {4, 4}), dense("kj", {4, 4})}, "ij").cost);
}

TEST(StrengthReduction, NeighbourChainSingleSimulation) {
  FamilyResult fr = run_pipeline(seissol_neighbour(4, 1), Options{});
  const KernelResult& k = fr.kernel("neighbourFlux");
  ASSERT_EQ(k.einsums.size(), 1u);
  EXPECT_EQ(k.einsums[0].text, "Rhat((f(RI))Am)");
  EXPECT_EQ(k.einsums[0].cost, sr_oracle(k.einsums[0].operands, k.einsums[0].result));
}
