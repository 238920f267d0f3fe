#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nst/diag.hpp"

namespace nst {

// ---------------------------------------------------------------------------
// Session types.
//
// Types are immutable values with structural sharing; identity is structural.
// Choice branch order is preserved for printing, but label-set comparisons
// are order-insensitive.
// ---------------------------------------------------------------------------

struct TypeExpr;
using TypeRef = std::shared_ptr<const TypeExpr>;

enum class TypeKind {
  Internal,  // +{l : A, ...}
  External,  // &{l : A, ...}
  Tensor,    // A * B
  Lolli,     // A -o B
  One,       // 1
  Var,       // type variable
  Named,     // V[A1]...[An]
};

using Branches = std::vector<std::pair<std::string, TypeRef>>;

struct TypeExpr {
  TypeKind kind;
  Branches branches;           // Internal / External
  TypeRef left, right;         // Tensor / Lolli
  std::string name;            // Var / Named
  std::vector<TypeRef> args;   // Named

  static TypeRef internal(Branches bs);
  static TypeRef external(Branches bs);
  static TypeRef tensor(TypeRef a, TypeRef b);
  static TypeRef lolli(TypeRef a, TypeRef b);
  static TypeRef one();
  static TypeRef var(std::string n);
  static TypeRef named(std::string n, std::vector<TypeRef> as = {});

  bool is_structural() const { return kind != TypeKind::Named; }
};

// Structural (syntactic) equality.
bool type_eq(const TypeRef& a, const TypeRef& b);

// Canonical string key; two types have equal keys iff type_eq holds.
std::string type_key(const TypeRef& t);

// Plain (uncompressed) rendering in concrete syntax.
std::string type_str(const TypeRef& t);

// ---------------------------------------------------------------------------
// Processes.
// ---------------------------------------------------------------------------

struct ProcExpr;
using ProcRef = std::shared_ptr<const ProcExpr>;

enum class ProcKind {
  SendLabel,  // c.k ; P
  Case,       // case c ( l => P | ... )
  SendChan,   // send c d ; P
  RecvChan,   // x <- recv c ; P
  Close,      // close c
  Wait,       // wait c ; P
  Fwd,        // c <-> d
  Spawn,      // x <- f[A..] y1 ... yn ; P
  TailCall,   // c <- f[A..] y1 ... yn
};

struct ProcExpr {
  ProcKind kind;
  std::string chan;    // subject channel (offered side for Fwd)
  std::string label;   // SendLabel
  std::string chan2;   // payload (SendChan), bound (RecvChan/Spawn/TailCall: offered), used (Fwd)
  ProcRef cont;
  std::vector<std::pair<std::string, ProcRef>> branches;  // Case
  std::string procname;                                   // Spawn / TailCall
  std::vector<TypeRef> typeargs;
  std::vector<std::string> chanargs;
  SourceExtent extent;

  static ProcRef send_label(std::string c, std::string k, ProcRef p);
  static ProcRef case_of(std::string c,
                         std::vector<std::pair<std::string, ProcRef>> bs);
  static ProcRef send_chan(std::string c, std::string d, ProcRef p);
  static ProcRef recv_chan(std::string c, std::string y, ProcRef p);
  static ProcRef close(std::string c);
  static ProcRef wait(std::string c, ProcRef p);
  static ProcRef fwd(std::string offer, std::string use);
  static ProcRef spawn(std::string x, std::string f, std::vector<TypeRef> as,
                       std::vector<std::string> ys, ProcRef p);
  static ProcRef tail_call(std::string x, std::string f,
                           std::vector<TypeRef> as,
                           std::vector<std::string> ys);
};

std::string proc_str(const ProcRef& p);

// Channels mentioned by a process expression (free channel names).
std::set<std::string> free_chans(const ProcRef& p);

// Capture-free channel renaming (channels and type variables live in
// disjoint namespaces from binders' point of view; bound channels shadow).
ProcRef rename_chans(const ProcRef& p,
                     const std::map<std::string, std::string>& m);

// Substitute types for type variables throughout a process body (only spawn
// and tail-call type arguments mention types).
ProcRef subst_types_in_proc(const ProcRef& p,
                            const std::map<std::string, TypeRef>& bindings);

// ---------------------------------------------------------------------------
// Signatures.
// ---------------------------------------------------------------------------

struct TypeDef {
  std::string name;
  std::vector<std::string> params;
  TypeRef body;
  SourceExtent extent;
};

struct ProcDecl {
  std::string name;
  std::vector<std::string> typeparams;
  std::vector<std::pair<std::string, TypeRef>> uses;
  std::pair<std::string, TypeRef> offers;
  SourceExtent extent;
};

struct ProcDef {
  std::string name;
  std::vector<std::string> typeparams;
  std::string offered;
  std::vector<std::string> chanargs;
  ProcRef body;
  SourceExtent extent;
};

struct EqTypeDecl {
  std::vector<std::string> params;  // free vars, first-occurrence order
  TypeRef left, right;
  SourceExtent extent;
};

struct Signature {
  std::map<std::string, TypeDef> typedefs;
  std::vector<std::string> typedef_order;  // source order
  std::map<std::string, ProcDecl> procdecls;
  std::map<std::string, ProcDef> procdefs;
  std::vector<EqTypeDecl> eqtypes;

  void add_typedef(TypeDef d);
  const TypeDef* find_typedef(const std::string& n) const;
};

// ---------------------------------------------------------------------------
// Core operations.
// ---------------------------------------------------------------------------

// Substitution of types for variables; unbound variables pass through.
// Prenex form rules out capture.
TypeRef substitute(const TypeRef& target,
                   const std::map<std::string, TypeRef>& bindings);

// Single-step unfolding: a name application becomes its instantiated body;
// anything else is returned unchanged. Never returns a Named application
// for a valid signature. Throws std::runtime_error on undefined names or
// arity mismatches (callers validate first).
TypeRef unfold(const Signature& sig, const TypeRef& t);

// Free type variables.
std::set<std::string> free_vars(const TypeRef& t);
// As above but in first-occurrence order.
std::vector<std::string> free_vars_ordered(const TypeRef& t);

// Whole-signature validity: contractiveness, defined names with matching
// arities, duplicate-free parameter lists, closure of bodies over their
// parameters, closure of eqtype pairs and process declarations. Collects
// every violation instead of stopping at the first.
std::vector<Diagnostic> validate_signature(const Signature& sig);

}  // namespace nst
