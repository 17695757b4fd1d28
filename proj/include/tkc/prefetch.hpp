#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tkc/ast.hpp"
#include "tkc/diag.hpp"

namespace tkc {

struct PrefetchCandidate {
  NodePtr node;
  long capability = 0;  // bytes of the node's result
};

struct PrefetchRequest {
  std::string tensor;
  long bytes = 0;
};

struct PrefetchMatch {
  std::string tensor;
  long bytes = 0;
  long capability = 0;
  int candidate = -1;
};

struct PrefetchResult {
  std::vector<PrefetchMatch> matches;
  Diagnostics diags;
};

// Each request, in order, takes the free candidate whose capability is
// closest to its size.  Sets Node::prefetch on matched nodes.
PrefetchResult assign_prefetch(std::vector<PrefetchCandidate>& candidates, const std::vector<PrefetchRequest>& requests);

}  // namespace tkc
