#include "nst/checker.hpp"

#include <algorithm>

namespace nst {

namespace {

struct Chk {
  const Signature& sig;
  const TypeEquality& eq;
  CompressionMap& cmap;
  std::vector<Diagnostic>& diags;
  std::set<std::string> typevars;

  void error(const SourceExtent& where, const std::string& code,
             const std::string& message) {
    diags.push_back({Severity::Error, code, message, where});
  }

  std::string show(const TypeRef& t) { return pretty_print(t, cmap); }

  // Lazy unfolding of name applications at rule heads.
  TypeRef norm(TypeRef t) {
    while (t->kind == TypeKind::Named) {
      TypeRef u = unfold(sig, t);
      cmap.add(u, t);
      t = u;
    }
    return t;
  }

  bool require_equal(const SourceExtent& where, const TypeRef& got,
                     const TypeRef& want, const std::string& what) {
    Verdict v = eq.equal(got, want);
    if (v.is_equal()) return true;
    error(where, "TypeMismatch",
          what + ": " + show(got) + " vs " + show(want) + " (" + v.str() +
              ")");
    return false;
  }

  // 𝒱 ; Δ ⊢ p :: (x : a). Returns false after reporting (the branch cannot
  // be checked further).
  bool check(std::map<std::string, TypeRef> delta, const ProcRef& p,
             const std::string& x, TypeRef a) {
    switch (p->kind) {
      case ProcKind::SendLabel: {
        if (p->chan == x) {  // ⊕R
          TypeRef t = norm(a);
          if (t->kind != TypeKind::Internal) {
            error(p->extent, "TypeMismatch",
                  "send of label " + p->label + " on " + x +
                      " of non-internal type " + show(a));
            return false;
          }
          for (const auto& [l, c] : t->branches)
            if (l == p->label) return check(std::move(delta), p->cont, x, c);
          error(p->extent, "LabelSetMismatch",
                "label " + p->label + " not in " + show(t));
          return false;
        }
        auto it = delta.find(p->chan);
        if (it == delta.end()) {
          error(p->extent, "UnknownChannel", "unknown channel " + p->chan);
          return false;
        }
        TypeRef t = norm(it->second);  // &L
        if (t->kind != TypeKind::External) {
          error(p->extent, "TypeMismatch",
                "send of label " + p->label + " on " + p->chan +
                    " of non-external type " + show(it->second));
          return false;
        }
        for (const auto& [l, c] : t->branches)
          if (l == p->label) {
            it->second = c;
            return check(std::move(delta), p->cont, x, a);
          }
        error(p->extent, "LabelSetMismatch",
              "label " + p->label + " not in " + show(t));
        return false;
      }

      case ProcKind::Case: {
        TypeRef subject;
        bool right = p->chan == x;
        std::map<std::string, TypeRef>::iterator it;
        if (right) {
          subject = norm(a);
          if (subject->kind != TypeKind::External) {
            error(p->extent, "TypeMismatch",
                  "case on offered " + x + " of non-external type " + show(a));
            return false;
          }
        } else {
          it = delta.find(p->chan);
          if (it == delta.end()) {
            error(p->extent, "UnknownChannel", "unknown channel " + p->chan);
            return false;
          }
          subject = norm(it->second);
          if (subject->kind != TypeKind::Internal) {
            error(p->extent, "TypeMismatch",
                  "case on used " + p->chan + " of non-internal type " +
                      show(it->second));
            return false;
          }
        }
        std::set<std::string> have, want;
        for (const auto& [l, q] : p->branches) have.insert(l);
        for (const auto& [l, c] : subject->branches) want.insert(l);
        if (have != want) {
          error(p->extent, "LabelSetMismatch",
                "case branches do not match " + show(subject));
          return false;
        }
        bool ok = true;
        for (const auto& [l, c] : subject->branches) {
          const ProcRef* q = nullptr;
          for (const auto& [m, b] : p->branches)
            if (m == l) q = &b;
          std::map<std::string, TypeRef> d2 = delta;
          if (right) {
            if (!check(std::move(d2), *q, x, c)) ok = false;  // &R
          } else {
            d2[p->chan] = c;
            if (!check(std::move(d2), *q, x, a)) ok = false;  // ⊕L
          }
        }
        return ok;
      }

      case ProcKind::SendChan: {
        auto dit = delta.find(p->chan2);
        if (dit == delta.end()) {
          error(p->extent, "UnknownChannel",
                "unknown channel " + p->chan2 + " sent on " + p->chan);
          return false;
        }
        TypeRef payload = dit->second;
        if (p->chan == x) {  // ⊗R
          TypeRef t = norm(a);
          if (t->kind != TypeKind::Tensor) {
            error(p->extent, "TypeMismatch",
                  "send on offered " + x + " of non-tensor type " + show(a));
            return false;
          }
          if (!require_equal(p->extent, payload, t->left,
                            "sent channel " + p->chan2))
            return false;
          delta.erase(p->chan2);
          return check(std::move(delta), p->cont, x, t->right);
        }
        auto it = delta.find(p->chan);
        if (it == delta.end()) {
          error(p->extent, "UnknownChannel", "unknown channel " + p->chan);
          return false;
        }
        TypeRef t = norm(it->second);  // ⊸L
        if (t->kind != TypeKind::Lolli) {
          error(p->extent, "TypeMismatch",
                "send on used " + p->chan + " of non-lolli type " +
                    show(it->second));
          return false;
        }
        if (!require_equal(p->extent, payload, t->left,
                          "sent channel " + p->chan2))
          return false;
        delta.erase(p->chan2);
        delta[p->chan] = t->right;
        return check(std::move(delta), p->cont, x, a);
      }

      case ProcKind::RecvChan: {
        if (p->chan2 == x || delta.count(p->chan2)) {
          error(p->extent, "LinearityViolation",
                "channel " + p->chan2 + " shadows an existing channel");
          return false;
        }
        if (p->chan == x) {  // ⊸R
          TypeRef t = norm(a);
          if (t->kind != TypeKind::Lolli) {
            error(p->extent, "TypeMismatch",
                  "receive on offered " + x + " of non-lolli type " + show(a));
            return false;
          }
          delta[p->chan2] = t->left;
          return check(std::move(delta), p->cont, x, t->right);
        }
        auto it = delta.find(p->chan);
        if (it == delta.end()) {
          error(p->extent, "UnknownChannel", "unknown channel " + p->chan);
          return false;
        }
        TypeRef t = norm(it->second);  // ⊗L
        if (t->kind != TypeKind::Tensor) {
          error(p->extent, "TypeMismatch",
                "receive on used " + p->chan + " of non-tensor type " +
                    show(it->second));
          return false;
        }
        delta[p->chan2] = t->left;
        delta[p->chan] = t->right;
        return check(std::move(delta), p->cont, x, a);
      }

      case ProcKind::Close: {
        if (p->chan != x) {
          error(p->extent, "TypeMismatch",
                "close on " + p->chan + " which is not the offered channel");
          return false;
        }
        TypeRef t = norm(a);
        if (t->kind != TypeKind::One) {
          error(p->extent, "TypeMismatch",
                "close on " + x + " of type " + show(a));
          return false;
        }
        if (!delta.empty()) {  // 1R
          std::string who;
          for (const auto& [c, ty] : delta) who += (who.empty() ? "" : ", ") + c;
          error(p->extent, "LinearityViolation",
                "close with unused channels " + who);
          return false;
        }
        return true;
      }

      case ProcKind::Wait: {
        auto it = delta.find(p->chan);
        if (it == delta.end()) {
          error(p->extent, "UnknownChannel",
                p->chan == x ? "cannot wait on the offered channel " + x
                             : "unknown channel " + p->chan);
          return false;
        }
        TypeRef t = norm(it->second);  // 1L
        if (t->kind != TypeKind::One) {
          error(p->extent, "TypeMismatch",
                "wait on " + p->chan + " of type " + show(it->second));
          return false;
        }
        delta.erase(it);
        return check(std::move(delta), p->cont, x, a);
      }

      case ProcKind::Fwd: {
        if (p->chan != x) {
          error(p->extent, "TypeMismatch",
                "forward must offer the provided channel " + x);
          return false;
        }
        if (delta.size() != 1 || !delta.count(p->chan2)) {  // id
          error(p->extent, "LinearityViolation",
                "forward " + x + " <-> " + p->chan2 +
                    " must use exactly that one channel");
          return false;
        }
        return require_equal(p->extent, delta.at(p->chan2), a,
                             "forwarded channel " + p->chan2);
      }

      case ProcKind::Spawn: {
        auto dit = sig.procdecls.find(p->procname);
        if (dit == sig.procdecls.end()) {
          error(p->extent, "UnknownProcess",
                "no declaration for process " + p->procname);
          return false;
        }
        const ProcDecl& decl = dit->second;
        if (p->typeargs.size() != decl.typeparams.size()) {
          error(p->extent, "TypeArityMismatch",
                p->procname + " expects " +
                    std::to_string(decl.typeparams.size()) + " type arguments");
          return false;
        }
        if (p->chanargs.size() != decl.uses.size()) {
          error(p->extent, "TypeArityMismatch",
                p->procname + " expects " + std::to_string(decl.uses.size()) +
                    " channel arguments");
          return false;
        }
        std::map<std::string, TypeRef> subst;
        for (size_t i = 0; i < decl.typeparams.size(); ++i)
          subst[decl.typeparams[i]] = p->typeargs[i];
        for (size_t i = 0; i < p->chanargs.size(); ++i) {
          auto it = delta.find(p->chanargs[i]);
          if (it == delta.end()) {
            error(p->extent, "UnknownChannel",
                  "unknown channel " + p->chanargs[i] + " passed to " +
                      p->procname);
            return false;
          }
          TypeRef want = substitute(decl.uses[i].second, subst);
          if (!require_equal(p->extent, it->second, want,
                            "argument " + p->chanargs[i] + " of " +
                                p->procname))
            return false;
          delta.erase(it);
        }
        if (p->chan2 == x || delta.count(p->chan2)) {
          error(p->extent, "LinearityViolation",
                "channel " + p->chan2 + " shadows an existing channel");
          return false;
        }
        delta[p->chan2] = substitute(decl.offers.second, subst);
        return check(std::move(delta), p->cont, x, a);
      }

      case ProcKind::TailCall: {
        if (p->chan2 != x) {
          error(p->extent, "TypeMismatch",
                "tail call must provide the offered channel " + x);
          return false;
        }
        // Short-hand for spawning a fresh channel and forwarding to it.
        ProcRef elab = ProcExpr::spawn(
            "%tail", p->procname, p->typeargs, p->chanargs,
            ProcExpr::fwd(x, "%tail"));
        const_cast<ProcExpr*>(elab.get())->extent = p->extent;
        const_cast<ProcExpr*>(elab->cont.get())->extent = p->extent;
        return check(std::move(delta), elab, x, a);
      }
    }
    return false;
  }
};

}  // namespace

Checker::Checker(const Signature& sig, int depth_bound)
    : sig_(sig), eq_(sig, depth_bound) {}

std::vector<Diagnostic> Checker::check_process(
    const std::set<std::string>& typevars,
    const std::map<std::string, TypeRef>& uses, const ProcRef& p,
    const std::string& offered, const TypeRef& offered_type) {
  std::vector<Diagnostic> diags;
  Chk chk{sig_, eq_, cmap_, diags, typevars};
  chk.check(uses, p, offered, offered_type);
  return diags;
}

std::vector<Diagnostic> Checker::check_all() {
  std::vector<Diagnostic> diags;
  for (const auto& e : eq_.seeds().errors)
    diags.push_back({Severity::Error, "InvalidEqtype", e, {}});

  for (const auto& [name, def] : sig_.procdefs) {
    auto dit = sig_.procdecls.find(name);
    if (dit == sig_.procdecls.end()) {
      diags.push_back({Severity::Error, "UnknownProcess",
                       "process " + name + " has no declaration", def.extent});
      continue;
    }
    const ProcDecl& decl = dit->second;
    if (def.typeparams.size() != decl.typeparams.size()) {
      diags.push_back({Severity::Error, "TypeArityMismatch",
                       "definition of " + name +
                           " has a different number of type parameters than "
                           "its declaration",
                       def.extent});
      continue;
    }
    if (def.chanargs.size() != decl.uses.size()) {
      diags.push_back({Severity::Error, "TypeArityMismatch",
                       "definition of " + name +
                           " has a different number of channel parameters "
                           "than its declaration",
                       def.extent});
      continue;
    }
    // The definition may rename both type and channel parameters.
    std::map<std::string, TypeRef> subst;
    for (size_t i = 0; i < decl.typeparams.size(); ++i)
      subst[decl.typeparams[i]] = TypeExpr::var(def.typeparams[i]);
    std::set<std::string> typevars(def.typeparams.begin(),
                                   def.typeparams.end());
    std::map<std::string, TypeRef> delta;
    bool dup = false;
    for (size_t i = 0; i < def.chanargs.size(); ++i) {
      if (def.chanargs[i] == def.offered || delta.count(def.chanargs[i])) {
        diags.push_back({Severity::Error, "LinearityViolation",
                         "duplicate channel parameter " + def.chanargs[i] +
                             " in definition of " + name,
                         def.extent});
        dup = true;
        break;
      }
      delta[def.chanargs[i]] = substitute(decl.uses[i].second, subst);
    }
    if (dup) continue;
    TypeRef offer = substitute(decl.offers.second, subst);
    auto ds = check_process(typevars, delta, def.body, def.offered, offer);
    diags.insert(diags.end(), ds.begin(), ds.end());
  }
  for (const auto& [name, decl] : sig_.procdecls) {
    if (!sig_.procdefs.count(name))
      diags.push_back({Severity::Error, "UnknownProcess",
                       "declared process " + name + " has no definition",
                       decl.extent});
  }
  return diags;
}

}  // namespace nst
