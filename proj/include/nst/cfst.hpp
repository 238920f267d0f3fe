#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "nst/ast.hpp"
#include "nst/diag.hpp"

namespace nst {

// Context-free session types: skip, sequential composition, choices, and
// references to named equations.
struct CfstExpr;
using CfstRef = std::shared_ptr<const CfstExpr>;

enum class CfstKind { Skip, Seq, IChoice, EChoice, Name };

struct CfstExpr {
  CfstKind kind;
  CfstRef left, right;                                   // Seq
  std::vector<std::pair<std::string, CfstRef>> branches;  // choices
  std::string name;                                       // Name

  static CfstRef skip();
  static CfstRef seq(CfstRef a, CfstRef b);
  static CfstRef ichoice(std::vector<std::pair<std::string, CfstRef>> bs);
  static CfstRef echoice(std::vector<std::pair<std::string, CfstRef>> bs);
  static CfstRef ref(std::string n);
};

std::string cfst_str(const CfstRef& e);

struct CfstProgram {
  std::vector<std::pair<std::string, CfstRef>> eqs;  // source order
  std::vector<Diagnostic> errors;
  bool ok() const { return errors.empty(); }
};

// Equations `s = T`, one per `=`; expressions are skip, names, `+{l : T,…}`,
// `&{l : T,…}`, `T ; T` (right associative) and parentheses; `%` comments.
CfstProgram parse_cfst(const std::string& text,
                       const std::string& filename = "<input>");

// Sequential-composition normal form: no skips inside Seq, Seq right-nested,
// Seq distributed over choices.
CfstRef cfst_normalize(const CfstRef& e);

// τ with an explicit continuation type: τ_α(skip)=α, τ_α(S;T)=[τ_α(T)/β]τ_β(S),
// choices pointwise, τ_α(s)=s[α].
TypeRef tau(const CfstRef& e, const TypeRef& cont);

// Each equation s ≜ T becomes the unary definition s[param] = τ_param(T).
Signature tau_embed(const std::vector<std::pair<std::string, CfstRef>>& eqs,
                    const std::string& param = "alpha");

}  // namespace nst
