#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tkc {

struct Diagnostic {
  std::string code;
  std::string message;
  int line = 0;
  int col = 0;

  std::string str() const;
};

using Diagnostics = std::vector<Diagnostic>;

class Error : public std::runtime_error {
public:
  explicit Error(Diagnostic d);
  Error(std::string code, std::string message);
  const Diagnostic& diag() const { return d_; }
  const std::string& code() const { return d_.code; }

private:
  Diagnostic d_;
};

}  // namespace tkc
