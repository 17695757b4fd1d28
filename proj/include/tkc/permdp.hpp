#pragma once

#include <map>
#include <string>
#include <vector>

#include "tkc/ast.hpp"
#include "tkc/layout.hpp"
#include "tkc/log.hpp"

namespace tkc {

struct PermContext {
  const std::map<std::string, MemoryLayout>* layouts = nullptr;  // declared tensors
  int align = 1;
};

using Configuration = std::map<const Node*, std::string>;

struct PermResult {
  CostTuple cost;
  Configuration config;
};

// Orders a node may take: the fixed order of a leaf or assignment, all
// permutations of the letters otherwise (in lexicographic letter order).
std::vector<std::string> candidate_orders(const NodePtr& n);

// Layout of a node's result when stored in letter order `order`.
MemoryLayout node_layout(const NodePtr& n, const std::string& order, const PermContext& ctx);

// Cost of one node given its order and the orders of its children.
CostTuple node_cost(const NodePtr& n, const std::string& y, const std::vector<std::string>& kids,
                    const PermContext& ctx, LogPlan* plan = nullptr);

// Sum of node costs over the tree for a full configuration.
CostTuple configuration_cost(const NodePtr& root, const Configuration& c, const PermContext& ctx);

// Post-order dynamic program over subtrees; ties go to the lexicographically
// smaller permutation strings.
PermResult optimize_permutations(const NodePtr& root, const PermContext& ctx);

// Rewrites idx/spp of temporaries and attaches LoG plans to contractions.
void apply_configuration(const NodePtr& root, const Configuration& c, const PermContext& ctx);

}  // namespace tkc
