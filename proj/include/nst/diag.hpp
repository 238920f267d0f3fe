#pragma once

#include <string>
#include <vector>

namespace nst {

struct Pos {
  int line = 1;
  int col = 1;
};

// Half-open source range attached to declarations and process terms.
struct SourceExtent {
  std::string file;
  Pos start;
  Pos end;

  std::string str() const;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;     // e.g. "UndefinedTypeName"
  std::string message;
  SourceExtent extent;

  // file:line:col-line:col severity code message
  std::string str() const;
};

std::string render(const std::vector<Diagnostic>& diags);

}  // namespace nst
