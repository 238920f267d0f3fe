#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "nst/ast.hpp"
#include "nst/diag.hpp"
#include "nst/equality.hpp"
#include "nst/syntax.hpp"

namespace nst {

// Bidirectional checker for the judgment 𝒱 ; Δ ⊢ P :: (x : A). Types in
// contexts may be name applications; every rule unfolds its subject type
// first, recording unfoldings in a compression map so error messages print
// compact forms.
class Checker {
 public:
  explicit Checker(const Signature& sig, int depth_bound = 1);

  const Signature& signature() const { return sig_; }
  const TypeEquality& equality() const { return eq_; }
  const CompressionMap& compression() const { return cmap_; }

  // Checks one process; an empty result means the judgment holds.
  std::vector<Diagnostic> check_process(
      const std::set<std::string>& typevars,
      const std::map<std::string, TypeRef>& uses, const ProcRef& p,
      const std::string& offered, const TypeRef& offered_type);

  // Checks every definition against its declaration (definitions may be
  // mutually recursive), pairing defs with decls and reporting orphans of
  // either kind plus any invalid eqtype declarations.
  std::vector<Diagnostic> check_all();

 private:
  Signature sig_;
  TypeEquality eq_;
  CompressionMap cmap_;
};

}  // namespace nst
