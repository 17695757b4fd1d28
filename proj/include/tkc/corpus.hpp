#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tkc/ast.hpp"

namespace tkc {

// Tetrahedral and triangular basis sizes for polynomial degree N.
int basis_size(int N);
int face_basis_size(int N);
// Total degree of the k-th basis function in graded order.
int basis_degree(int k);
int face_basis_degree(int k);

// Stiffness patterns: khat is nonzero for l < face_basis_size(N) and
// deg(l) <= deg(k); ktilde is the staircase deg(k) < deg(l).
SparsityPattern khat_pattern(int N);
SparsityPattern ktilde_pattern(int N);
SparsityPattern star_pattern();  // 9x9 elastic, stress rows then velocity rows

// Random values respecting a pattern, deterministic for a seed.
Grid<double> random_values(const SparsityPattern& p, uint64_t seed);

// Order O = N+1; sims == 1 drops the simulation index.
Family seissol_family(int order, int sims, uint64_t seed = 1);
// Neighbour flux only, for chain-order studies at larger orders.
Family seissol_neighbour(int order, int sims, uint64_t seed = 1);
Family lina_family(int dim, int order, uint64_t seed = 1);
// R_ijk = S_xyz XL_xl XR_li YL_ym YR_mj ZL_zn ZR_nk, with XL and XR stored
// transposed when `pretransposed`.
Family mra_family(int p, int q, bool pretransposed = true, uint64_t seed = 1);
// C['ij'] <= C['ij'] + 0.5 * A['ik'] * B['kj']
Family matmul_family(int n = 4);
// S_abij = A_acik B_befl C_dfjk D_cdel with every extent n.
Family sabij_family(int n);

struct CorpusEntry {
  std::string label;
  Family family;
};

// SeisSol orders 2-4 x sims {1,8}; LinA 2D/3D orders 3-4; MRA p in {4,8},
// q in {1,2,4}.
std::vector<CorpusEntry> full_corpus();

// Family by its name: seissol_o<O>_s<S>, neighbour_o<O>_s<S>, lina<d>d_o<O>,
// mra_p<p>_q<q>, gemm, sabij_n<N>.  Errors: UnknownCorpus.
Family corpus_family(const std::string& name);

}  // namespace tkc
