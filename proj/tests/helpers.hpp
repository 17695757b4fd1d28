#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tkc/ast.hpp"
#include "tkc/emit_c.hpp"
#include "tkc/pipeline.hpp"

namespace tkc::test {

struct Run {
  int status = -1;
  std::string out;
};

// Output and exit status of a shell command.
Run run_command(const std::string& cmd);

// Fresh scratch directory below the system temp dir.
std::string scratch_dir(const std::string& tag);

struct CBuild {
  bool compiled = false;
  std::string dir;
  std::string exe;
  std::string log;
};

// Writes the emitted files of `fr` and compiles the generated test with the
// system C compiler.
CBuild build_emitted(const FamilyResult& fr, const std::string& cc, const std::vector<LoweredKernel>* lowered = nullptr);

// Dense random tensor on a pattern, declared in `fam`.
void declare(Family& fam, const std::string& name, const Extents& shape);
Family single_kernel(const std::string& name, Family fam, Statement st);

// Family with one kernel from a statement written in the file syntax.
Family family_from_text(const std::string& text, const std::string& name = "t");

uint64_t next_random(uint64_t& state);
int random_int(uint64_t& state, int lo, int hi);  // inclusive

}  // namespace tkc::test

namespace tkc::test {

// Random single-statement family: a product of 2 to 5 operands over at
// most 6 letters, each operand and the target with at most 4 letters,
// extents at most 4 and random sparsity.
Family random_contraction_family(uint64_t& state, int index);

// Largest number of letters of any node in a tree.
int widest_node(const NodePtr& n);

}  // namespace tkc::test
