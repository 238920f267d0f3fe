#include "nst/equality.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

namespace nst {

std::string act_internal(const std::string& label) { return "+" + label; }
std::string act_external(const std::string& label) { return "&" + label; }

Verdict Verdict::equal(std::vector<Closure> w) {
  Verdict v;
  v.kind = VerdictKind::Equal;
  v.witness = std::move(w);
  return v;
}

Verdict Verdict::not_equal(std::vector<std::string> path, std::string mismatch) {
  Verdict v;
  v.kind = VerdictKind::NotEqual;
  v.path = std::move(path);
  v.mismatch = std::move(mismatch);
  return v;
}

Verdict Verdict::inconclusive(std::string reason) {
  Verdict v;
  v.kind = VerdictKind::Inconclusive;
  v.reason = std::move(reason);
  return v;
}

std::string Verdict::str() const {
  switch (kind) {
    case VerdictKind::Equal:
      return "equal";
    case VerdictKind::NotEqual: {
      std::string s = "not-equal";
      for (const auto& a : path) s += " " + a;
      return s;
    }
    default:
      return "inconclusive";
  }
}

namespace {

std::string label_set(const Branches& bs) {
  std::string s = "{";
  bool first = true;
  for (const auto& [l, t] : bs) {
    if (!first) s += ",";
    first = false;
    s += l;
  }
  return s + "}";
}

std::string head_desc(const TypeRef& t) {
  switch (t->kind) {
    case TypeKind::Internal:
      return "+" + label_set(t->branches);
    case TypeKind::External:
      return "&" + label_set(t->branches);
    case TypeKind::Tensor:
      return "*";
    case TypeKind::Lolli:
      return "-o";
    case TypeKind::One:
      return "1";
    case TypeKind::Var:
      return t->name;
    default:
      return t->name + "[..]";
  }
}

bool match_term(const TypeRef& t, const TypeRef& g,
                const std::set<std::string>& vars,
                std::map<std::string, TypeRef>& sub, bool strict) {
  if (t->kind == TypeKind::Var && vars.count(t->name)) {
    auto it = sub.find(t->name);
    if (it == sub.end()) {
      sub.emplace(t->name, g);
      return true;
    }
    return !strict || type_eq(it->second, g);
  }
  if (t->kind != g->kind) return !strict;
  switch (t->kind) {
    case TypeKind::One:
      return true;
    case TypeKind::Var:
      return !strict || t->name == g->name;
    case TypeKind::Named: {
      if (t->name != g->name || t->args.size() != g->args.size())
        return !strict;
      for (size_t i = 0; i < t->args.size(); ++i)
        if (!match_term(t->args[i], g->args[i], vars, sub, strict) && strict)
          return false;
      return true;
    }
    default:
      // Non-fragment templates only arise from degenerate seeds; require
      // literal agreement.
      return !strict || type_eq(t, g);
  }
}

struct Engine {
  const Signature& sig;
  const NonvariantMap& nv;
  int depth_bound;
  // Validated seed closures occupy the first seed_count slots of gamma and
  // are exempt from the expansion budget: the bound limits the work done for
  // this query, not loops already justified by declarations.
  size_t seed_count;
  std::vector<std::string> path;
  std::vector<Closure> witness;

  bool nonvariant(const std::string& v, int i) const {
    auto it = nv.find({v, i});
    return it != nv.end() && it->second;
  }

  Verdict mismatch(const TypeRef& a, const TypeRef& b, const std::string& what) {
    return Verdict::not_equal(
        path, what + " " + head_desc(a) + " vs " + head_desc(b));
  }

  Verdict eq(const std::set<std::string>& V, std::vector<Closure> gamma,
             TypeRef a, TypeRef b, bool rigid, bool root_expand = false) {
    // A name against a leaf or structural type: unfold the named side.
    // Terminates because definition bodies are never bare applications, so
    // each unfolding either exposes a constructor or shrinks the term.
    while (a->kind == TypeKind::Named && b->kind != TypeKind::Named)
      a = unfold(sig, a);
    while (b->kind == TypeKind::Named && a->kind != TypeKind::Named)
      b = unfold(sig, b);

    if (a->kind == TypeKind::Named)
      return name_name(V, std::move(gamma), a, b, rigid, root_expand);

    if (a->kind != b->kind) return mismatch(a, b, "head");

    switch (a->kind) {
      case TypeKind::One:
        return Verdict::equal();
      case TypeKind::Var:
        if (a->name == b->name) return Verdict::equal();
        return mismatch(a, b, "type variable");
      case TypeKind::Internal:
      case TypeKind::External: {
        std::set<std::string> la, lb;
        for (const auto& [l, t] : a->branches) la.insert(l);
        for (const auto& [l, t] : b->branches) lb.insert(l);
        if (la != lb) return mismatch(a, b, "label sets");
        for (const auto& [l, ta] : a->branches) {
          const TypeRef* tb = nullptr;
          for (const auto& [m, t] : b->branches)
            if (m == l) tb = &t;
          path.push_back(a->kind == TypeKind::Internal ? act_internal(l)
                                                       : act_external(l));
          Verdict v = eq(V, gamma, ta, *tb, rigid);
          path.pop_back();
          if (!v.is_equal()) return v;
        }
        return Verdict::equal();
      }
      case TypeKind::Tensor:
      case TypeKind::Lolli: {
        const char* base = a->kind == TypeKind::Tensor ? "*" : "-o";
        path.push_back(std::string(base) + "1");
        Verdict v1 = eq(V, gamma, a->left, b->left, rigid);
        path.pop_back();
        if (!v1.is_equal()) return v1;
        path.push_back(std::string(base) + "2");
        Verdict v2 = eq(V, gamma, a->right, b->right, rigid);
        path.pop_back();
        return v2;
      }
      default:
        return mismatch(a, b, "head");
    }
  }

  Verdict name_name(const std::set<std::string>& V, std::vector<Closure> gamma,
                    const TypeRef& a, const TypeRef& b, bool rigid,
                    bool root_expand) {
    if (!root_expand) {
      // refl: same name, arguments pointwise (nonvariant positions skipped).
      if (a->name == b->name) {
        assert(a->args.size() == b->args.size());
        bool all = true;
        for (size_t i = 0; i < a->args.size() && all; ++i) {
          if (nonvariant(a->name, static_cast<int>(i))) continue;
          if (!eq(V, gamma, a->args[i], b->args[i], rigid).is_equal())
            all = false;
        }
        if (all) return Verdict::equal();
      }
      // def: newest closure with the same head pair first; candidates are
      // confirmed by two rigid premises.
      for (auto it = gamma.rbegin(); it != gamma.rend(); ++it) {
        const Closure& c = *it;
        if (c.left->kind != TypeKind::Named ||
            c.right->kind != TypeKind::Named || c.left->name != a->name ||
            c.right->name != b->name)
          continue;
        auto sub = match_closure(c, a, b);
        if (!sub) continue;
        TypeRef li = substitute(c.left, *sub);
        TypeRef ri = substitute(c.right, *sub);
        if (eq(V, gamma, li, a, /*rigid=*/true).is_equal() &&
            eq(V, gamma, ri, b, /*rigid=*/true).is_equal())
          return Verdict::equal();
      }
    }
    // expd
    std::string pair = "(" + a->name + ", " + b->name + ")";
    if (rigid) return Verdict::inconclusive("rigid equality stuck at " + pair);
    if (!root_expand) {
      int count = 0;
      for (size_t i = seed_count; i < gamma.size(); ++i) {
        const Closure& c = gamma[i];
        if (c.left->kind == TypeKind::Named &&
            c.right->kind == TypeKind::Named && c.left->name == a->name &&
            c.right->name == b->name)
          ++count;
      }
      if (count >= depth_bound)
        return Verdict::inconclusive("depth bound reached for " + pair);
    }
    Closure c{V, a, b};
    gamma.push_back(c);
    witness.push_back(c);
    return eq(V, std::move(gamma), unfold(sig, a), unfold(sig, b),
              /*rigid=*/false);
  }
};

Verdict run_query(const std::set<std::string>& vars,
                  const std::vector<Closure>& seeds, const TypeRef& a,
                  const TypeRef& b, const RenamedSignature& rsig,
                  const NonvariantMap& nonvariant, int depth_bound,
                  bool root_expand) {
  Engine e{rsig.sig, nonvariant, depth_bound, seeds.size(), {}, {}};
  Verdict v = e.eq(vars, seeds, a, b, /*rigid=*/false, root_expand);
  if (v.is_equal()) v.witness = std::move(e.witness);
  return v;
}

}  // namespace

NonvariantMap compute_nonvariant(const RenamedSignature& rsig) {
  const Signature& sig = rsig.sig;
  std::map<std::pair<std::string, int>, bool> variant;
  for (const auto& [name, d] : sig.typedefs)
    for (size_t i = 0; i < d.params.size(); ++i)
      variant[{name, static_cast<int>(i)}] = false;

  // Does t observe alpha, given the current variance approximation?
  std::function<bool(const TypeRef&, const std::string&)> observe =
      [&](const TypeRef& t, const std::string& alpha) -> bool {
    switch (t->kind) {
      case TypeKind::One:
        return false;
      case TypeKind::Var:
        return t->name == alpha;
      case TypeKind::Named: {
        for (size_t j = 0; j < t->args.size(); ++j) {
          if (!observe(t->args[j], alpha)) continue;
          auto it = variant.find({t->name, static_cast<int>(j)});
          // Unknown names are treated as observing every argument.
          if (it == variant.end() || it->second) return true;
        }
        return false;
      }
      case TypeKind::Tensor:
      case TypeKind::Lolli:
        return observe(t->left, alpha) || observe(t->right, alpha);
      default:
        for (const auto& [l, c] : t->branches)
          if (observe(c, alpha)) return true;
        return false;
    }
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [name, d] : sig.typedefs) {
      for (size_t i = 0; i < d.params.size(); ++i) {
        auto key = std::make_pair(name, static_cast<int>(i));
        if (variant[key]) continue;
        if (observe(d.body, d.params[i])) {
          variant[key] = true;
          changed = true;
        }
      }
    }
  }

  NonvariantMap nv;
  for (const auto& [key, var] : variant) nv[key] = !var;
  return nv;
}

std::optional<std::map<std::string, TypeRef>> match_closure(
    const Closure& tmpl, const TypeRef& left_goal, const TypeRef& right_goal) {
  std::map<std::string, TypeRef> sub;
  if (tmpl.left->kind == TypeKind::Named &&
      left_goal->kind == TypeKind::Named) {
    if (tmpl.left->args.size() != left_goal->args.size()) return std::nullopt;
    for (size_t i = 0; i < tmpl.left->args.size(); ++i)
      if (!match_term(tmpl.left->args[i], left_goal->args[i], tmpl.vars, sub,
                      /*strict=*/true))
        return std::nullopt;
  }
  if (tmpl.right->kind == TypeKind::Named &&
      right_goal->kind == TypeKind::Named &&
      tmpl.right->args.size() == right_goal->args.size()) {
    // Lenient pass: only binds still-unbound variables; rigid premises of
    // the def rule are the actual acceptance criterion for the right side.
    for (size_t i = 0; i < tmpl.right->args.size(); ++i)
      match_term(tmpl.right->args[i], right_goal->args[i], tmpl.vars, sub,
                 /*strict=*/false);
  }
  for (const auto& v : tmpl.vars)
    if (!sub.count(v)) return std::nullopt;
  return sub;
}

Verdict check_equal(const std::set<std::string>& vars,
                    const std::vector<Closure>& seeds, const TypeRef& a,
                    const TypeRef& b, const RenamedSignature& rsig,
                    const NonvariantMap& nonvariant, int depth_bound) {
  return run_query(vars, seeds, a, b, rsig, nonvariant, depth_bound,
                   /*root_expand=*/false);
}

Verdict rigid_equal(const std::set<std::string>& vars,
                    const std::vector<Closure>& gamma, const TypeRef& a,
                    const TypeRef& b, const RenamedSignature& rsig,
                    const NonvariantMap& nonvariant) {
  Engine e{rsig.sig, nonvariant, /*depth_bound=*/1, /*seed_count=*/0, {}, {}};
  return e.eq(vars, gamma, a, b, /*rigid=*/true);
}

SeedResult seed_and_validate(const std::vector<EqTypeDecl>& eqtypes,
                             RenamedSignature& rsig, int depth_bound) {
  SeedResult res;
  for (const auto& e : eqtypes) {
    Closure c;
    c.vars.insert(e.params.begin(), e.params.end());
    c.left = rename_type(e.left, rsig);
    c.right = rename_type(e.right, rsig);
    res.gamma0.push_back(std::move(c));
  }
  NonvariantMap nv = compute_nonvariant(rsig);
  for (size_t i = 0; i < eqtypes.size(); ++i) {
    const Closure& c = res.gamma0[i];
    // The root step must be an expansion so a declaration cannot justify
    // itself before any observation.
    Verdict v = run_query(c.vars, res.gamma0, c.left, c.right, rsig, nv,
                          depth_bound, /*root_expand=*/true);
    if (!v.is_equal()) {
      res.errors.push_back("invalid eqtype " + type_str(eqtypes[i].left) +
                           " = " + type_str(eqtypes[i].right) + ": " +
                           v.str());
    }
  }
  return res;
}

TypeEquality::TypeEquality(const Signature& sig, int depth_bound)
    : rsig_(rename_signature(sig)), depth_bound_(depth_bound) {
  seeds_ = seed_and_validate(sig.eqtypes, rsig_, depth_bound_);
  nonvariant_ = compute_nonvariant(rsig_);
}

Verdict TypeEquality::equal(const TypeRef& a, const TypeRef& b) const {
  RenamedSignature scratch = rsig_;
  TypeRef ra = rename_type(a, scratch);
  TypeRef rb = rename_type(b, scratch);
  const NonvariantMap& base = nonvariant_;
  NonvariantMap ext;
  const NonvariantMap* nv = &base;
  if (scratch.sig.typedef_order.size() != rsig_.sig.typedef_order.size()) {
    ext = compute_nonvariant(scratch);
    nv = &ext;
  }
  std::set<std::string> vars = free_vars(a);
  for (const auto& x : free_vars(b)) vars.insert(x);
  return check_equal(vars, seeds_.gamma0, ra, rb, scratch, *nv, depth_bound_);
}

}  // namespace nst
