#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nst/ast.hpp"
#include "nst/diag.hpp"

namespace nst {

// Reverse mapping from expanded definition bodies to the name applications
// they came from; consulted when printing types so error messages show
// compact forms.
class CompressionMap {
 public:
  // record unfold(named) = expanded
  void add(const TypeRef& expanded, const TypeRef& named);
  // name application for an expanded body, if one was recorded
  const TypeRef* find(const TypeRef& t) const;
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, TypeRef> entries_;
};

struct ParseResult {
  Signature sig;
  std::vector<Diagnostic> errors;
  bool ok() const { return errors.empty(); }
};

// Parses a whole program: `type`, `decl`, `proc` and `eqtype` declarations.
// Comments run from `%` to end of line. On a syntax error, parsing resumes
// at the next top-level keyword so all errors are reported in one pass.
ParseResult parse_program(const std::string& text,
                          const std::string& filename = "<input>");

// Parses a single type expression (used by the CLI for --left/--right).
std::optional<TypeRef> parse_type(const std::string& text,
                                  std::vector<Diagnostic>* errors = nullptr);

// Re-reads bare identifiers as type names where the signature defines them
// (nullary names are lexically indistinguishable from variables).
TypeRef resolve_type(const TypeRef& t, const Signature& sig);

// Renders a type, compressing any subterm the map knows a shorter name for.
std::string pretty_print(const TypeRef& t, const CompressionMap& cmap);

// Renders a full signature in concrete syntax (used by --dump-renamed).
std::string print_signature(const Signature& sig);

}  // namespace nst
