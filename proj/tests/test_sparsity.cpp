#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tkc/diag.hpp"
#include "tkc/corpus.hpp"
#include "tkc/eqspp.hpp"
#include "tkc/random.hpp"

using namespace tkc;

namespace {

SparsityPattern block_cols(int rows, int cols, int nonzero_cols) {
  SparsityPattern p({rows, cols});
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < nonzero_cols; ++j) p.set({i, j});
  return p;
}

// Entries of a pattern that are set, as a brute-force scan.
std::vector<Interval> scan_box(const SparsityPattern& p) {
  std::vector<Interval> b(p.rank(), Interval{1 << 30, -1});
  for (long i = 0; i < p.size(); ++i) {
    if (!p.lin(i)) continue;
    MultiIndex m = unlinear_index(p.extents(), i);
    for (int d = 0; d < p.rank(); ++d) {
      b[d].lo = std::min(b[d].lo, m[d]);
      b[d].hi = std::max(b[d].hi, m[d] + 1);
    }
  }
  return b;
}

}  // namespace

TEST(Eqspp, BlockExample) {
  SparsityPattern k = block_cols(2, 4, 2), a = block_cols(2, 4, 2), q = SparsityPattern::dense({4, 4});
  std::vector<PatternOperand> ops{{&k, "ik"}, {&q, "kl"}, {&a, "jl"}};
  EqsppResult r = compute_eqspp(ops, "ij");
  SparsityPattern want({4, 4});
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) want.set({i, j});
  EXPECT_EQ(r.masks[1], want);
  EXPECT_EQ(r.masks[0], k);
  EXPECT_EQ(r.masks[2], a);
  EXPECT_TRUE(check_minimality(ops, "ij", r));
}

TEST(Eqspp, DenseOperandsUnchanged) {
  SparsityPattern a = SparsityPattern::dense({3, 2}), b = SparsityPattern::dense({2, 4});
  std::vector<PatternOperand> ops{{&a, "ik"}, {&b, "kj"}};
  EqsppResult r = compute_eqspp(ops, "ij");
  EXPECT_EQ(r.masks[0], a);
  EXPECT_EQ(r.masks[1], b);
  EXPECT_EQ(r.result, SparsityPattern::dense({3, 4}));
  EXPECT_TRUE(check_minimality(ops, "ij", r));
}

TEST(Eqspp, StiffnessRestrictsIntegratedDofs) {
  const int S = 2, B = 20, Bt = 10;
  SparsityPattern i = SparsityPattern::dense({S, B, 9}), k({B, B}), a = SparsityPattern::dense({9, 9});
  for (int l = 0; l < Bt; ++l)
    for (int c = 0; c < B; ++c) k.set({l, c});
  std::vector<PatternOperand> ops{{&i, "slq"}, {&k, "lk"}, {&a, "qp"}};
  EqsppResult r = compute_eqspp(ops, "skp");
  EXPECT_EQ(r.masks[0].nnz(), S * Bt * 9);
  auto box = bounding_box(r.masks[0]);
  EXPECT_EQ(box[1], (Interval{0, Bt}));
  EXPECT_EQ(r.masks[1], k);
  EXPECT_EQ(r.masks[2], a);
}

TEST(Eqspp, AllZeroOperand) {
  SparsityPattern a = SparsityPattern::zeros({2, 2}), b = SparsityPattern::dense({2, 2});
  std::vector<PatternOperand> ops{{&a, "ik"}, {&b, "kj"}};
  EqsppResult r = compute_eqspp(ops, "ij");
  EXPECT_EQ(r.masks[1].nnz(), 0);
  EXPECT_EQ(r.result.nnz(), 0);
}

TEST(Minimality, DetectsRedundantEntry) {
  SparsityPattern k = block_cols(2, 4, 2), a = block_cols(2, 4, 2), q = SparsityPattern::dense({4, 4});
  std::vector<PatternOperand> ops{{&k, "ik"}, {&q, "kl"}, {&a, "jl"}};
  EqsppResult r = compute_eqspp(ops, "ij");
  r.masks[1] = q;
  EXPECT_FALSE(check_minimality(ops, "ij", r));
}

TEST(Minimality, RandomThreeTensorInstances) {
  uint64_t s = 2024;
  for (int trial = 0; trial < 50; ++trial) {
    int n[4];
    for (int& x : n) x = test::random_int(s, 1, 4);
    SparsityPattern a({n[0], n[1], n[2]}), b({n[2], n[3]}), c({n[1], n[3], n[0]});
    for (auto* p : {&a, &b, &c})
      for (long i = 0; i < p->size(); ++i) p->set_lin(i, splitmix64(s) % 2 == 0);
    std::vector<PatternOperand> ops{{&a, "ijk"}, {&b, "kl"}, {&c, "jli"}};
    const std::string target = trial % 2 ? "il" : "ij";
    EqsppResult r = compute_eqspp(ops, target);
    EXPECT_TRUE(check_minimality(ops, target, r)) << "trial " << trial;
    for (size_t k = 0; k < ops.size(); ++k) EXPECT_TRUE(r.masks[k].subset_of(*ops[k].first));
    EXPECT_EQ(r.result, spp_of_product(ops, target));
  }
}

TEST(Sparsity, StaircaseBoxesOfKtilde) {
  // Columns of degree <= m only reach rows of degree < m.
  const int N = 3, B = basis_size(N);
  SparsityPattern kt = ktilde_pattern(N);
  for (int m = 1; m <= N; ++m) {
    const int cols = basis_size(m);
    SparsityPattern sub({B, cols});
    for (int i = 0; i < B; ++i)
      for (int j = 0; j < cols; ++j) sub.set({i, j}, kt.at({i, j}));
    auto box = bounding_box(sub);
    auto scan = scan_box(sub);
    EXPECT_EQ(box[0], scan[0]);
    EXPECT_EQ(box[1], scan[1]);
    EXPECT_EQ(box[0], (Interval{0, basis_size(m - 1)})) << "degree " << m;
    EXPECT_EQ(box[1], (Interval{1, cols})) << "degree " << m;
  }
}

TEST(Sparsity, BitOps) {
  SparsityPattern a({2, 2}), b({2, 2});
  a.set({0, 0});
  b.set({0, 0});
  b.set({1, 0});
  EXPECT_TRUE(a.subset_of(b));
  EXPECT_FALSE(b.subset_of(a));
  EXPECT_EQ((a | b), b);
  EXPECT_EQ((a & b), a);
  EXPECT_EQ(b.permuted({1, 0}).at({0, 1}), true);
}
