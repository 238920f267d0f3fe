#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nst/ast.hpp"
#include "nst/rename.hpp"

namespace nst {

// First-order terms: ⊥, variables, and applications of nonterminals.
struct Term;
using TermRef = std::shared_ptr<const Term>;

enum class TermKind { Bot, TVar, Apply };

struct Term {
  TermKind kind;
  std::string name;            // TVar / Apply
  std::vector<TermRef> args;   // Apply

  static TermRef bot();
  static TermRef tvar(std::string n);
  static TermRef apply(std::string n, std::vector<TermRef> as = {});
};

std::string term_str(const TermRef& t);
std::string term_key(const TermRef& t);

// Deterministic first-order grammar: at most one rule per
// (nonterminal, action) pair. Actions are spelled "+l", "&l", "*1", "*2",
// "-o1", "-o2".
struct Grammar {
  std::map<std::string, int> nonterminals;  // name → arity
  std::set<std::string> actions;
  struct Rule {
    std::vector<std::string> params;
    TermRef rhs;
  };
  std::map<std::pair<std::string, std::string>, Rule> rules;
  // Definitions whose body is 1 or a variable have no rules of their own; a
  // term headed by one behaves as the instantiated body.
  std::map<std::string, std::pair<std::vector<std::string>, TermRef>> aliases;
};

// ⟦1⟧ = ⊥, ⟦α⟧ = α, ⟦V[B̄]⟧ = V ⟦B̄⟧. Throws std::invalid_argument on a
// structural argument (callers rename first).
TermRef embed(const TypeRef& t);

// Translates every definition of a renamed signature into grammar rules:
// each branch/operand of a structural body becomes one rule labeled with
// the corresponding action.
Grammar fog(const RenamedSignature& rsig);

// Closes a set of free variables: adds one definition A_α = ⊕{l_α : A_α}
// per variable with globally fresh labels, returning the substitution
// α ↦ A_α.
std::map<std::string, TypeRef> close_open(RenamedSignature& rsig,
                                          const std::set<std::string>& vars);

// All action words of length ≤ k enabled from t (prefix-closed; includes ε).
std::set<std::vector<std::string>> traces(const Grammar& g, const TermRef& t,
                                          int k);

// Compares trace sets of two closed types up to k; nullopt when they agree,
// otherwise a shortest differing word (breadth-first).
std::optional<std::vector<std::string>> bounded_trace_diff(
    const RenamedSignature& rsig, const TypeRef& a, const TypeRef& b, int k);

// Stable dump: one line per rule, `X a1..an --act--> RHS`, sorted.
std::string dump_grammar(const Grammar& g);

}  // namespace nst
