#pragma once

#include <string>

#include "tkc/spp.hpp"

namespace tkc {

// First line: extents.  Each further non-blank line: one zero-based
// coordinate of a nonzero.  Errors: MalformedSpp, CoordinateOutOfRange,
// FileNotFound; diagnostics carry the line number.
SparsityPattern parse_spp(const std::string& text);
SparsityPattern load_spp(const std::string& path);
std::string format_spp(const SparsityPattern& p);

}  // namespace tkc
