#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "tkc/lowered.hpp"
#include "tkc/pipeline.hpp"

namespace tkc {

struct EmittedFile {
  std::string name;
  std::string text;
};

struct InstrContext {
  // C expression for the base pointer of a storage name.
  std::function<std::string(const std::string&)> operand;
  std::function<long(const std::string&)> size;  // storage elements
  std::string alpha;  // C expression of the coefficient, "" when one
  std::string indent;
};

class Backend {
public:
  virtual ~Backend() = default;
  virtual std::string name() const = 0;
  virtual bool supports(OpKind kind, const Instr& in, bool single) const = 0;
  // C99 statements for one instruction.
  virtual std::string emit(const Instr& in, const InstrContext& ctx) const = 0;
  // Helper definitions needed by `instrs`, emitted once per file.
  virtual std::string prelude(const std::vector<Instr>& instrs) const = 0;
};

// nullptr for unknown names.
std::unique_ptr<Backend> make_backend(const std::string& name);
std::vector<std::string> available_backends();

// Highest-priority backend in `order` that supports the instruction, falling
// back to the portable backend.
const Backend& select_backend(const std::vector<const Backend*>& order, OpKind kind, const Instr& in, bool single);

// Header, kernels, tensors and generated unit test for a compiled family.
// `lowered` replaces the family's lowered kernels (same order) when given.
std::vector<EmittedFile> emit_c99(const FamilyResult& fr, const std::vector<LoweredKernel>* lowered = nullptr);

// What the generated test prints with --dump, computed by the interpreter.
std::string interpreter_dump(const FamilyResult& fr, uint64_t seed, const std::vector<LoweredKernel>* lowered = nullptr);

// C identifier of a family, kernel or tensor name.
std::string c_name(const std::string& s);

}  // namespace tkc
