#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tkc/ast.hpp"
#include "tkc/layout.hpp"

namespace tkc {

struct CostTuple {
  long s = 0;  // non-unit-stride slices
  long l = 0;  // left transposes
  long r = 0;  // right transposes
  long f = 0;  // fused indices (enters negated)
  bool inf = false;

  static CostTuple infinite() {
    CostTuple c;
    c.inf = true;
    return c;
  }
  CostTuple operator+(const CostTuple& o) const;
  bool operator==(const CostTuple& o) const;
  std::string str() const;
};

// Lexicographic on (s, l+r, -f), then l.  Infinite is larger than everything.
bool operator<(const CostTuple& a, const CostTuple& b);

struct LogPlan {
  bool swap = false;   // GEMM left operand is the second child
  std::string batch;   // batched letters, in result storage order
  std::string m, n, k;  // groups, innermost letter first
  bool trans_left = false;
  bool trans_right = false;
  bool csc_right = false;
  CostTuple cost;

  std::string str(const std::string& result_idx, const std::string& left_name = "A",
                  const std::string& right_name = "B") const;
};

struct LogOperand {
  std::string idx;
  const MemoryLayout* layout = nullptr;
};

using RangeMap = std::map<char, Interval>;

// Per letter: intersection of the stored intervals of the tensors holding
// it, clamped to the shape; free letters are also clipped to `region`.
RangeMap effective_ranges(const LogOperand& a, const LogOperand& b, const LogOperand& c, const RangeMap& region);

// Bounding box of a node's result pattern, keyed by letter.
RangeMap region_of(const std::string& idx, const SparsityPattern& spp);

// Merges IndexSum+ over Product into Contraction nodes when the summed
// letters occur in both factors; other sums stay above as IndexSum.
NodePtr find_contractions(const NodePtr& tree);

// A letter group may act as one GEMM dimension of tensor o: consecutive in
// storage, fusable, and every inner letter spans its whole extent.
bool fusable_group(const LogOperand& o, const std::string& g, const RangeMap& ranges);

std::vector<LogPlan> enumerate_logs(const LogOperand& a, const LogOperand& b, const LogOperand& c,
                                    const std::string& contracted, const RangeMap& region);

CostTuple min_log(const LogOperand& a, const LogOperand& b, const LogOperand& c, const std::string& contracted,
                  const RangeMap& region, LogPlan* best = nullptr);

}  // namespace tkc
