#include "nst/ast.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace nst {

// ----- constructors --------------------------------------------------------

static TypeRef mk(TypeExpr t) {
  return std::make_shared<const TypeExpr>(std::move(t));
}

TypeRef TypeExpr::internal(Branches bs) {
  TypeExpr t;
  t.kind = TypeKind::Internal;
  t.branches = std::move(bs);
  return mk(std::move(t));
}

TypeRef TypeExpr::external(Branches bs) {
  TypeExpr t;
  t.kind = TypeKind::External;
  t.branches = std::move(bs);
  return mk(std::move(t));
}

TypeRef TypeExpr::tensor(TypeRef a, TypeRef b) {
  TypeExpr t;
  t.kind = TypeKind::Tensor;
  t.left = std::move(a);
  t.right = std::move(b);
  return mk(std::move(t));
}

TypeRef TypeExpr::lolli(TypeRef a, TypeRef b) {
  TypeExpr t;
  t.kind = TypeKind::Lolli;
  t.left = std::move(a);
  t.right = std::move(b);
  return mk(std::move(t));
}

TypeRef TypeExpr::one() {
  static const TypeRef o = [] {
    TypeExpr t;
    t.kind = TypeKind::One;
    return mk(std::move(t));
  }();
  return o;
}

TypeRef TypeExpr::var(std::string n) {
  TypeExpr t;
  t.kind = TypeKind::Var;
  t.name = std::move(n);
  return mk(std::move(t));
}

TypeRef TypeExpr::named(std::string n, std::vector<TypeRef> as) {
  TypeExpr t;
  t.kind = TypeKind::Named;
  t.name = std::move(n);
  t.args = std::move(as);
  return mk(std::move(t));
}

// ----- structural identity -------------------------------------------------

bool type_eq(const TypeRef& a, const TypeRef& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::One:
      return true;
    case TypeKind::Var:
      return a->name == b->name;
    case TypeKind::Named: {
      if (a->name != b->name || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!type_eq(a->args[i], b->args[i])) return false;
      return true;
    }
    case TypeKind::Tensor:
    case TypeKind::Lolli:
      return type_eq(a->left, b->left) && type_eq(a->right, b->right);
    case TypeKind::Internal:
    case TypeKind::External: {
      if (a->branches.size() != b->branches.size()) return false;
      // Label sets compare order-insensitively.
      for (const auto& [l, ta] : a->branches) {
        const TypeRef* tb = nullptr;
        for (const auto& [l2, t2] : b->branches)
          if (l2 == l) tb = &t2;
        if (!tb || !type_eq(ta, *tb)) return false;
      }
      return true;
    }
  }
  return false;
}

std::string type_key(const TypeRef& t) {
  std::ostringstream os;
  std::function<void(const TypeRef&)> go = [&](const TypeRef& u) {
    switch (u->kind) {
      case TypeKind::One:
        os << "1";
        break;
      case TypeKind::Var:
        os << "v(" << u->name << ")";
        break;
      case TypeKind::Named:
        os << "n(" << u->name;
        for (const auto& a : u->args) {
          os << ";";
          go(a);
        }
        os << ")";
        break;
      case TypeKind::Tensor:
        os << "t(";
        go(u->left);
        os << ";";
        go(u->right);
        os << ")";
        break;
      case TypeKind::Lolli:
        os << "l(";
        go(u->left);
        os << ";";
        go(u->right);
        os << ")";
        break;
      case TypeKind::Internal:
      case TypeKind::External: {
        os << (u->kind == TypeKind::Internal ? "i{" : "e{");
        // canonicalize label order
        std::vector<std::pair<std::string, TypeRef>> bs(u->branches.begin(),
                                                        u->branches.end());
        std::sort(bs.begin(), bs.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [l, b] : bs) {
          os << l << ":";
          go(b);
          os << ",";
        }
        os << "}";
        break;
      }
    }
  };
  go(t);
  return os.str();
}

// ----- printing ------------------------------------------------------------

namespace {

// Precedence: -o (1) < * (2) < atoms (3). Both binary ops right-associative.
void print_type(std::ostream& os, const TypeRef& t, int prec) {
  switch (t->kind) {
    case TypeKind::One:
      os << "1";
      break;
    case TypeKind::Var:
      os << t->name;
      break;
    case TypeKind::Named:
      os << t->name;
      for (const auto& a : t->args) {
        os << "[";
        print_type(os, a, 0);
        os << "]";
      }
      break;
    case TypeKind::Tensor: {
      bool paren = prec > 2;
      if (paren) os << "(";
      print_type(os, t->left, 3);
      os << " * ";
      print_type(os, t->right, 2);
      if (paren) os << ")";
      break;
    }
    case TypeKind::Lolli: {
      bool paren = prec > 1;
      if (paren) os << "(";
      print_type(os, t->left, 2);
      os << " -o ";
      print_type(os, t->right, 1);
      if (paren) os << ")";
      break;
    }
    case TypeKind::Internal:
    case TypeKind::External: {
      os << (t->kind == TypeKind::Internal ? "+{" : "&{");
      bool first = true;
      for (const auto& [l, b] : t->branches) {
        if (!first) os << ", ";
        first = false;
        os << l << " : ";
        print_type(os, b, 0);
      }
      os << "}";
      break;
    }
  }
}

}  // namespace

std::string type_str(const TypeRef& t) {
  std::ostringstream os;
  print_type(os, t, 0);
  return os.str();
}

// ----- process constructors ------------------------------------------------

static ProcRef mkp(ProcExpr p) {
  return std::make_shared<const ProcExpr>(std::move(p));
}

ProcRef ProcExpr::send_label(std::string c, std::string k, ProcRef p) {
  ProcExpr e;
  e.kind = ProcKind::SendLabel;
  e.chan = std::move(c);
  e.label = std::move(k);
  e.cont = std::move(p);
  return mkp(std::move(e));
}

ProcRef ProcExpr::case_of(std::string c,
                          std::vector<std::pair<std::string, ProcRef>> bs) {
  ProcExpr e;
  e.kind = ProcKind::Case;
  e.chan = std::move(c);
  e.branches = std::move(bs);
  return mkp(std::move(e));
}

ProcRef ProcExpr::send_chan(std::string c, std::string d, ProcRef p) {
  ProcExpr e;
  e.kind = ProcKind::SendChan;
  e.chan = std::move(c);
  e.chan2 = std::move(d);
  e.cont = std::move(p);
  return mkp(std::move(e));
}

ProcRef ProcExpr::recv_chan(std::string c, std::string y, ProcRef p) {
  ProcExpr e;
  e.kind = ProcKind::RecvChan;
  e.chan = std::move(c);
  e.chan2 = std::move(y);
  e.cont = std::move(p);
  return mkp(std::move(e));
}

ProcRef ProcExpr::close(std::string c) {
  ProcExpr e;
  e.kind = ProcKind::Close;
  e.chan = std::move(c);
  return mkp(std::move(e));
}

ProcRef ProcExpr::wait(std::string c, ProcRef p) {
  ProcExpr e;
  e.kind = ProcKind::Wait;
  e.chan = std::move(c);
  e.cont = std::move(p);
  return mkp(std::move(e));
}

ProcRef ProcExpr::fwd(std::string offer, std::string use) {
  ProcExpr e;
  e.kind = ProcKind::Fwd;
  e.chan = std::move(offer);
  e.chan2 = std::move(use);
  return mkp(std::move(e));
}

ProcRef ProcExpr::spawn(std::string x, std::string f, std::vector<TypeRef> as,
                        std::vector<std::string> ys, ProcRef p) {
  ProcExpr e;
  e.kind = ProcKind::Spawn;
  e.chan2 = std::move(x);
  e.procname = std::move(f);
  e.typeargs = std::move(as);
  e.chanargs = std::move(ys);
  e.cont = std::move(p);
  return mkp(std::move(e));
}

ProcRef ProcExpr::tail_call(std::string x, std::string f,
                            std::vector<TypeRef> as,
                            std::vector<std::string> ys) {
  ProcExpr e;
  e.kind = ProcKind::TailCall;
  e.chan2 = std::move(x);
  e.procname = std::move(f);
  e.typeargs = std::move(as);
  e.chanargs = std::move(ys);
  return mkp(std::move(e));
}

std::string proc_str(const ProcRef& p) {
  std::ostringstream os;
  std::function<void(const ProcRef&)> go = [&](const ProcRef& q) {
    switch (q->kind) {
      case ProcKind::SendLabel:
        os << q->chan << "." << q->label << " ; ";
        go(q->cont);
        break;
      case ProcKind::Case: {
        os << "case " << q->chan << " ( ";
        bool first = true;
        for (const auto& [l, b] : q->branches) {
          if (!first) os << " | ";
          first = false;
          os << l << " => ";
          go(b);
        }
        os << " )";
        break;
      }
      case ProcKind::SendChan:
        os << "send " << q->chan << " " << q->chan2 << " ; ";
        go(q->cont);
        break;
      case ProcKind::RecvChan:
        os << q->chan2 << " <- recv " << q->chan << " ; ";
        go(q->cont);
        break;
      case ProcKind::Close:
        os << "close " << q->chan;
        break;
      case ProcKind::Wait:
        os << "wait " << q->chan << " ; ";
        go(q->cont);
        break;
      case ProcKind::Fwd:
        os << q->chan << " <-> " << q->chan2;
        break;
      case ProcKind::Spawn:
      case ProcKind::TailCall:
        os << q->chan2 << " <- " << q->procname;
        for (const auto& a : q->typeargs) os << "[" << type_str(a) << "]";
        for (const auto& y : q->chanargs) os << " " << y;
        if (q->kind == ProcKind::Spawn) {
          os << " ; ";
          go(q->cont);
        }
        break;
    }
  };
  go(p);
  return os.str();
}

std::set<std::string> free_chans(const ProcRef& p) {
  std::set<std::string> out;
  std::function<void(const ProcRef&, std::set<std::string>)> go =
      [&](const ProcRef& q, std::set<std::string> bound) {
        auto add = [&](const std::string& c) {
          if (!bound.count(c)) out.insert(c);
        };
        switch (q->kind) {
          case ProcKind::SendLabel:
          case ProcKind::Wait:
            add(q->chan);
            go(q->cont, bound);
            break;
          case ProcKind::Case:
            add(q->chan);
            for (const auto& [l, b] : q->branches) go(b, bound);
            break;
          case ProcKind::SendChan:
            add(q->chan);
            add(q->chan2);
            go(q->cont, bound);
            break;
          case ProcKind::RecvChan:
            add(q->chan);
            bound.insert(q->chan2);
            go(q->cont, bound);
            break;
          case ProcKind::Close:
            add(q->chan);
            break;
          case ProcKind::Fwd:
            add(q->chan);
            add(q->chan2);
            break;
          case ProcKind::Spawn:
            for (const auto& y : q->chanargs) add(y);
            bound.insert(q->chan2);
            go(q->cont, bound);
            break;
          case ProcKind::TailCall:
            add(q->chan2);
            for (const auto& y : q->chanargs) add(y);
            break;
        }
      };
  go(p, {});
  return out;
}

ProcRef rename_chans(const ProcRef& p,
                     const std::map<std::string, std::string>& m) {
  if (m.empty()) return p;
  auto lookup = [&](const std::string& c) {
    auto it = m.find(c);
    return it == m.end() ? c : it->second;
  };
  ProcExpr e = *p;
  switch (p->kind) {
    case ProcKind::SendLabel:
    case ProcKind::Wait:
      e.chan = lookup(p->chan);
      e.cont = rename_chans(p->cont, m);
      break;
    case ProcKind::Case: {
      e.chan = lookup(p->chan);
      e.branches.clear();
      for (const auto& [l, b] : p->branches)
        e.branches.emplace_back(l, rename_chans(b, m));
      break;
    }
    case ProcKind::SendChan:
      e.chan = lookup(p->chan);
      e.chan2 = lookup(p->chan2);
      e.cont = rename_chans(p->cont, m);
      break;
    case ProcKind::RecvChan: {
      e.chan = lookup(p->chan);
      // bound name shadows
      auto m2 = m;
      m2.erase(p->chan2);
      e.cont = rename_chans(p->cont, m2);
      break;
    }
    case ProcKind::Close:
      e.chan = lookup(p->chan);
      break;
    case ProcKind::Fwd:
      e.chan = lookup(p->chan);
      e.chan2 = lookup(p->chan2);
      break;
    case ProcKind::Spawn: {
      e.chanargs.clear();
      for (const auto& y : p->chanargs) e.chanargs.push_back(lookup(y));
      auto m2 = m;
      m2.erase(p->chan2);
      e.cont = rename_chans(p->cont, m2);
      break;
    }
    case ProcKind::TailCall:
      e.chan2 = lookup(p->chan2);
      e.chanargs.clear();
      for (const auto& y : p->chanargs) e.chanargs.push_back(lookup(y));
      break;
  }
  return std::make_shared<const ProcExpr>(std::move(e));
}

ProcRef subst_types_in_proc(const ProcRef& p,
                            const std::map<std::string, TypeRef>& bindings) {
  if (bindings.empty()) return p;
  ProcExpr e = *p;
  if (p->cont) e.cont = subst_types_in_proc(p->cont, bindings);
  if (p->kind == ProcKind::Case) {
    e.branches.clear();
    for (const auto& [l, b] : p->branches)
      e.branches.emplace_back(l, subst_types_in_proc(b, bindings));
  }
  if (p->kind == ProcKind::Spawn || p->kind == ProcKind::TailCall) {
    e.typeargs.clear();
    for (const auto& a : p->typeargs)
      e.typeargs.push_back(substitute(a, bindings));
  }
  return std::make_shared<const ProcExpr>(std::move(e));
}

// ----- signature -----------------------------------------------------------

void Signature::add_typedef(TypeDef d) {
  if (!typedefs.count(d.name)) typedef_order.push_back(d.name);
  typedefs[d.name] = std::move(d);
}

const TypeDef* Signature::find_typedef(const std::string& n) const {
  auto it = typedefs.find(n);
  return it == typedefs.end() ? nullptr : &it->second;
}

// ----- substitution / unfolding / free variables ---------------------------

TypeRef substitute(const TypeRef& target,
                   const std::map<std::string, TypeRef>& bindings) {
  if (bindings.empty()) return target;
  switch (target->kind) {
    case TypeKind::One:
      return target;
    case TypeKind::Var: {
      auto it = bindings.find(target->name);
      return it == bindings.end() ? target : it->second;
    }
    case TypeKind::Named: {
      std::vector<TypeRef> as;
      as.reserve(target->args.size());
      for (const auto& a : target->args) as.push_back(substitute(a, bindings));
      return TypeExpr::named(target->name, std::move(as));
    }
    case TypeKind::Tensor:
      return TypeExpr::tensor(substitute(target->left, bindings),
                              substitute(target->right, bindings));
    case TypeKind::Lolli:
      return TypeExpr::lolli(substitute(target->left, bindings),
                             substitute(target->right, bindings));
    case TypeKind::Internal:
    case TypeKind::External: {
      Branches bs;
      bs.reserve(target->branches.size());
      for (const auto& [l, b] : target->branches)
        bs.emplace_back(l, substitute(b, bindings));
      return target->kind == TypeKind::Internal
                 ? TypeExpr::internal(std::move(bs))
                 : TypeExpr::external(std::move(bs));
    }
  }
  return target;
}

TypeRef unfold(const Signature& sig, const TypeRef& t) {
  if (t->kind != TypeKind::Named) return t;
  const TypeDef* def = sig.find_typedef(t->name);
  if (!def) throw std::runtime_error("UndefinedTypeName: " + t->name);
  if (def->params.size() != t->args.size())
    throw std::runtime_error("ArityMismatch: " + t->name);
  std::map<std::string, TypeRef> bindings;
  for (size_t i = 0; i < def->params.size(); ++i)
    bindings[def->params[i]] = t->args[i];
  return substitute(def->body, bindings);
}

static void collect_vars(const TypeRef& t, std::vector<std::string>& out,
                         std::set<std::string>& seen) {
  switch (t->kind) {
    case TypeKind::One:
      break;
    case TypeKind::Var:
      if (seen.insert(t->name).second) out.push_back(t->name);
      break;
    case TypeKind::Named:
      for (const auto& a : t->args) collect_vars(a, out, seen);
      break;
    case TypeKind::Tensor:
    case TypeKind::Lolli:
      collect_vars(t->left, out, seen);
      collect_vars(t->right, out, seen);
      break;
    case TypeKind::Internal:
    case TypeKind::External:
      for (const auto& [l, b] : t->branches) collect_vars(b, out, seen);
      break;
  }
}

std::set<std::string> free_vars(const TypeRef& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_vars(t, out, seen);
  return seen;
}

std::vector<std::string> free_vars_ordered(const TypeRef& t) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_vars(t, out, seen);
  return out;
}

// ----- validation ----------------------------------------------------------

namespace {

struct Validator {
  const Signature& sig;
  std::vector<Diagnostic> diags;

  void report(const std::string& code, const std::string& msg,
              const SourceExtent& ext) {
    diags.push_back({Severity::Error, code, msg, ext});
  }

  // all name applications defined with matching arity
  void check_refs(const TypeRef& t, const SourceExtent& ext) {
    switch (t->kind) {
      case TypeKind::Named: {
        const TypeDef* def = sig.find_typedef(t->name);
        if (!def) {
          report("UndefinedTypeName", "type name " + t->name + " is not defined",
                 ext);
        } else if (def->params.size() != t->args.size()) {
          report("ArityMismatch",
                 "type " + t->name + " expects " +
                     std::to_string(def->params.size()) + " arguments, got " +
                     std::to_string(t->args.size()),
                 ext);
        }
        for (const auto& a : t->args) check_refs(a, ext);
        break;
      }
      case TypeKind::Tensor:
      case TypeKind::Lolli:
        check_refs(t->left, ext);
        check_refs(t->right, ext);
        break;
      case TypeKind::Internal:
      case TypeKind::External: {
        std::set<std::string> labels;
        for (const auto& [l, b] : t->branches) {
          if (!labels.insert(l).second)
            report("DuplicateLabel", "label " + l + " repeated in choice", ext);
          check_refs(b, ext);
        }
        break;
      }
      default:
        break;
    }
  }

  void check_closed(const TypeRef& t, const std::vector<std::string>& params,
                    const SourceExtent& ext, const std::string& where) {
    std::set<std::string> scope(params.begin(), params.end());
    for (const auto& v : free_vars(t))
      if (!scope.count(v))
        report("UnboundTypeVariable",
               "type variable " + v + " is not bound in " + where, ext);
  }

  void check_spawn_types(const ProcRef& p,
                         const std::vector<std::string>& params) {
    if (p->kind == ProcKind::Spawn || p->kind == ProcKind::TailCall) {
      for (const auto& a : p->typeargs) {
        check_refs(a, p->extent);
        check_closed(a, params, p->extent, "process body");
      }
    }
    if (p->cont) check_spawn_types(p->cont, params);
    for (const auto& [l, b] : p->branches) check_spawn_types(b, params);
  }

  void run() {
    for (const auto& name : sig.typedef_order) {
      const TypeDef& d = sig.typedefs.at(name);
      if (!d.body->is_structural())
        report("NonContractive",
               "definition of " + name + " is itself a type name application",
               d.extent);
      std::set<std::string> seen;
      for (const auto& p : d.params)
        if (!seen.insert(p).second)
          report("DuplicateParam", "parameter " + p + " repeated in " + name,
                 d.extent);
      check_refs(d.body, d.extent);
      check_closed(d.body, d.params, d.extent, "definition of " + name);
    }
    for (const auto& [name, d] : sig.procdecls) {
      std::set<std::string> seen;
      for (const auto& p : d.typeparams)
        if (!seen.insert(p).second)
          report("DuplicateParam", "parameter " + p + " repeated in " + name,
                 d.extent);
      std::set<std::string> chans;
      for (const auto& [c, t] : d.uses) {
        if (!chans.insert(c).second)
          report("DuplicateChannel", "channel " + c + " repeated in " + name,
                 d.extent);
        check_refs(t, d.extent);
        check_closed(t, d.typeparams, d.extent, "declaration of " + name);
      }
      if (chans.count(d.offers.first))
        report("DuplicateChannel",
               "offered channel " + d.offers.first + " repeated in " + name,
               d.extent);
      check_refs(d.offers.second, d.extent);
      check_closed(d.offers.second, d.typeparams, d.extent,
                   "declaration of " + name);
    }
    for (const auto& [name, d] : sig.procdefs)
      check_spawn_types(d.body, d.typeparams);
    for (const auto& e : sig.eqtypes) {
      check_refs(e.left, e.extent);
      check_refs(e.right, e.extent);
      check_closed(e.left, e.params, e.extent, "eqtype declaration");
      check_closed(e.right, e.params, e.extent, "eqtype declaration");
    }
  }
};

}  // namespace

std::vector<Diagnostic> validate_signature(const Signature& sig) {
  Validator v{sig, {}};
  v.run();
  return v.diags;
}

}  // namespace nst
