#pragma once

#include <string>

#include "tkc/pipeline.hpp"

namespace tkc {

// `<family>_report.json` contents; keys are sorted, so equal results give
// byte-identical text.
std::string report_json(const FamilyResult& fr);

}  // namespace tkc
