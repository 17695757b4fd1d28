#pragma once

#include <string>
#include <vector>

#include "tkc/log.hpp"
#include "tkc/permdp.hpp"
#include "tkc/strength.hpp"

namespace tkc {

// Minimum operation count for an Einstein sum, by recursion over leaf
// subsets and the letters each subterm keeps.  Shares no code with the
// state search in reduce_schedule.
long sr_oracle(const std::vector<SrOperand>& ops, const std::string& result);

// Minimum configuration cost by enumerating every combination of candidate
// orders.  Errors: SizeLimitExceeded when more than `cap` combinations exist.
CostTuple configuration_oracle(const NodePtr& root, const PermContext& ctx, long cap = 2000000);

}  // namespace tkc
