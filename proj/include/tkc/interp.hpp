#pragma once

#include <map>
#include <string>
#include <vector>

#include "tkc/lowered.hpp"

namespace tkc {

template <class T>
struct Bindings {
  std::map<std::string, T*> tensors;  // storage in layout order
  std::map<std::string, T> scalars;
};

// Runs the lowered kernel and returns the tallied hardware flops.
// Errors: UnboundSlot.
template <class T>
long execute(const LoweredKernel& k, Bindings<T>& b);

template <class T>
T eval_coef(const Coef& c, const std::map<std::string, T>& scalars);

}  // namespace tkc
