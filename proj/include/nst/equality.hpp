#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nst/ast.hpp"
#include "nst/rename.hpp"

namespace nst {

// One coinductive hypothesis: all closed instances (over vars) of the claim
// left ≡ right.
struct Closure {
  std::set<std::string> vars;
  TypeRef left, right;
};

// (typename, 0-based parameter index) → true when the definition does not
// depend on that parameter.
using NonvariantMap = std::map<std::pair<std::string, int>, bool>;

// Least fixed point of "the parameter is observed": (V,i) is variant iff
// parameter i occurs in V's body at a structural position, or as argument j
// of some W with (W,j) variant.
NonvariantMap compute_nonvariant(const RenamedSignature& rsig);

enum class VerdictKind { Equal, NotEqual, Inconclusive };

struct Verdict {
  VerdictKind kind = VerdictKind::Equal;
  std::vector<Closure> witness;    // Equal: closures of the bisimulation built
  std::vector<std::string> path;   // NotEqual: action word from the query root
  std::string mismatch;            // NotEqual: what differs after path
  std::string reason;              // Inconclusive: the blocking head pair

  bool is_equal() const { return kind == VerdictKind::Equal; }
  bool is_not_equal() const { return kind == VerdictKind::NotEqual; }
  bool is_inconclusive() const { return kind == VerdictKind::Inconclusive; }

  static Verdict equal(std::vector<Closure> w = {});
  static Verdict not_equal(std::vector<std::string> path, std::string mismatch);
  static Verdict inconclusive(std::string reason);

  std::string str() const;  // "equal" / "not-equal PATH" / "inconclusive"
};

// Rendered action symbols used in counterexample paths (and by the grammar
// oracle): "+l" (internal choice), "&l" (external choice), "*1"/"*2"
// (channel output), "-o1"/"-o2" (channel input).
std::string act_internal(const std::string& label);
std::string act_external(const std::string& label);

// The algorithmic equality judgment 𝒱 ; Γ ⊢ a ≡ b over a renamed signature.
// a and b must already be in the name fragment (rename_type). Rule order on
// name/name pairs is refl, then def (newest closure first), then expd; expd
// is cut off once Γ holds depth_bound closures with the same head pair.
Verdict check_equal(const std::set<std::string>& vars,
                    const std::vector<Closure>& seeds, const TypeRef& a,
                    const TypeRef& b, const RenamedSignature& rsig,
                    const NonvariantMap& nonvariant, int depth_bound);

// Same judgment with expd disabled (𝒱 ; Γ ⊩ a ≡ b); always terminates.
Verdict rigid_equal(const std::set<std::string>& vars,
                    const std::vector<Closure>& gamma, const TypeRef& a,
                    const TypeRef& b, const RenamedSignature& rsig,
                    const NonvariantMap& nonvariant);

// Candidate substitution over tmpl.vars instantiating the closure to the
// goals; found by first-order matching (left list first, right list for any
// still-unbound variables). The def rule confirms candidates with two rigid
// premises — matching is only a search heuristic.
std::optional<std::map<std::string, TypeRef>> match_closure(
    const Closure& tmpl, const TypeRef& left_goal, const TypeRef& right_goal);

struct SeedResult {
  std::vector<Closure> gamma0;
  std::vector<std::string> errors;  // one message per invalid declaration
  bool ok() const { return errors.empty(); }
};

// Collects eqtype declarations into Γ0 and validates each pair under the
// full seed set (mutual justification allowed). To keep self-justification
// guarded, the root step of each validation query must be an expansion.
// Appends renamed forms of the declared types to rsig.
SeedResult seed_and_validate(const std::vector<EqTypeDecl>& eqtypes,
                             RenamedSignature& rsig, int depth_bound);

// Convenience front end holding the renamed signature, nonvariance map and
// validated seeds for a program; every query is independent and reentrant.
class TypeEquality {
 public:
  explicit TypeEquality(const Signature& sig, int depth_bound = 1);

  const SeedResult& seeds() const { return seeds_; }
  const RenamedSignature& renamed() const { return rsig_; }
  int depth_bound() const { return depth_bound_; }

  // Renames the goals into a scratch copy of the signature and runs
  // check_equal under the validated seeds.
  Verdict equal(const TypeRef& a, const TypeRef& b) const;

 private:
  RenamedSignature rsig_;
  NonvariantMap nonvariant_;
  SeedResult seeds_;
  int depth_bound_;
};

}  // namespace nst
