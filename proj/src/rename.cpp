#include "nst/rename.hpp"

#include <stdexcept>

namespace nst {

namespace {

// A type is in the name fragment when it is 1, a variable, or a name
// application whose arguments are again in the fragment.
bool in_fragment(const TypeRef& t) {
  switch (t->kind) {
    case TypeKind::One:
    case TypeKind::Var:
      return true;
    case TypeKind::Named:
      for (const auto& a : t->args)
        if (!in_fragment(a)) return false;
      return true;
    default:
      return false;
  }
}

struct Renamer {
  RenamedSignature& rsig;

  // Rewrites t into the name fragment, extracting structural subterms into
  // fresh definitions. Fresh names are allocated before recursing so they
  // read off in a left-to-right, outside-in order.
  TypeRef to_fragment(const TypeRef& t) {
    switch (t->kind) {
      case TypeKind::One:
      case TypeKind::Var:
        return t;
      case TypeKind::Named: {
        std::vector<TypeRef> as;
        as.reserve(t->args.size());
        for (const auto& a : t->args) as.push_back(to_fragment(a));
        return TypeExpr::named(t->name, std::move(as));
      }
      default:
        return extract(t);
    }
  }

  // Structural t becomes a fresh definition parameterized over its free
  // variables; the occurrence is replaced by the corresponding application.
  TypeRef extract(const TypeRef& t) {
    std::string fresh = rsig.gen_name();
    rsig.fresh_names.insert(fresh);
    std::vector<std::string> params = free_vars_ordered(t);

    TypeDef d;
    d.name = fresh;
    d.params = params;
    d.body = shallow_rename(t);
    rsig.sig.add_typedef(std::move(d));

    std::vector<TypeRef> args;
    args.reserve(params.size());
    for (const auto& p : params) args.push_back(TypeExpr::var(p));
    return TypeExpr::named(fresh, std::move(args));
  }

  // Keeps the top-level structural constructor and pushes every immediate
  // subterm into the fragment.
  TypeRef shallow_rename(const TypeRef& t) {
    switch (t->kind) {
      case TypeKind::Internal:
      case TypeKind::External: {
        Branches bs;
        bs.reserve(t->branches.size());
        for (const auto& [l, a] : t->branches) bs.emplace_back(l, to_fragment(a));
        return t->kind == TypeKind::Internal ? TypeExpr::internal(std::move(bs))
                                             : TypeExpr::external(std::move(bs));
      }
      case TypeKind::Tensor:
        return TypeExpr::tensor(to_fragment(t->left), to_fragment(t->right));
      case TypeKind::Lolli:
        return TypeExpr::lolli(to_fragment(t->left), to_fragment(t->right));
      default:
        // Non-structural bodies (aliases) stay in the fragment.
        return to_fragment(t);
    }
  }
};

}  // namespace

RenamedSignature rename_signature(const Signature& sig) {
  RenamedSignature rsig;
  rsig.sig = sig;
  Renamer rn{rsig};
  // Rewrite original bodies in place, in source order; extracted definitions
  // are appended behind them.
  for (const auto& name : sig.typedef_order) {
    TypeRef body = sig.typedefs.at(name).body;
    rsig.sig.typedefs.at(name).body = rn.shallow_rename(body);
  }
  return rsig;
}

TypeRef rename_type(const TypeRef& t, RenamedSignature& rsig) {
  Renamer rn{rsig};
  return rn.to_fragment(t);
}

bool check_alternation(const Signature& sig) {
  for (const auto& [name, d] : sig.typedefs) {
    const TypeRef& b = d.body;
    if (in_fragment(b)) continue;
    switch (b->kind) {
      case TypeKind::Internal:
      case TypeKind::External: {
        for (const auto& [l, a] : b->branches)
          if (!in_fragment(a)) return false;
        break;
      }
      case TypeKind::Tensor:
      case TypeKind::Lolli:
        if (!in_fragment(b->left) || !in_fragment(b->right)) return false;
        break;
      default:
        return false;
    }
  }
  return true;
}

}  // namespace nst
