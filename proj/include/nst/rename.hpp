#pragma once

#include <set>
#include <string>
#include <vector>

#include "nst/ast.hpp"

namespace nst {

// Signature after internal renaming: every definition body is structural and
// all of its immediate sub-positions (branches, operands, name arguments)
// are 1, a variable, or a name application.
struct RenamedSignature {
  Signature sig;
  std::set<std::string> fresh_names;  // the generated %i names
  int next_fresh = 0;

  std::string gen_name() { return "%" + std::to_string(next_fresh++); }
};

// Renames every definition of a validated signature, appending one fresh
// definition per extracted structural subterm. Fresh names are %0, %1, ... in
// a left-to-right, outside-in traversal, parameterized over the free
// variables of the subterm in first-occurrence order.
RenamedSignature rename_signature(const Signature& sig);

// Renames a single goal type against an existing renamed signature,
// appending any new definitions to it. Returns a type in the
// 1 / variable / name-application fragment.
TypeRef rename_type(const TypeRef& t, RenamedSignature& rsig);

// Alternation invariant: machine check for the post-pass shape.
bool check_alternation(const Signature& sig);

}  // namespace nst
