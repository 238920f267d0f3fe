#include "nst/grammar.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "nst/equality.hpp"

namespace nst {

TermRef Term::bot() {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Bot;
  return t;
}

TermRef Term::tvar(std::string n) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::TVar;
  t->name = std::move(n);
  return t;
}

TermRef Term::apply(std::string n, std::vector<TermRef> as) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Apply;
  t->name = std::move(n);
  t->args = std::move(as);
  return t;
}

std::string term_str(const TermRef& t) {
  switch (t->kind) {
    case TermKind::Bot:
      return "bot";
    case TermKind::TVar:
      return t->name;
    default: {
      if (t->args.empty()) return t->name;
      std::string s = t->name + "(";
      for (size_t i = 0; i < t->args.size(); ++i) {
        if (i) s += ",";
        s += term_str(t->args[i]);
      }
      return s + ")";
    }
  }
}

std::string term_key(const TermRef& t) { return term_str(t); }

TermRef embed(const TypeRef& t) {
  switch (t->kind) {
    case TypeKind::One:
      return Term::bot();
    case TypeKind::Var:
      return Term::tvar(t->name);
    case TypeKind::Named: {
      std::vector<TermRef> as;
      as.reserve(t->args.size());
      for (const auto& a : t->args) as.push_back(embed(a));
      return Term::apply(t->name, std::move(as));
    }
    default:
      throw std::invalid_argument("embed: structural type " + type_str(t) +
                                  " is not in the name fragment");
  }
}

Grammar fog(const RenamedSignature& rsig) {
  Grammar g;
  for (const auto& name : rsig.sig.typedef_order) {
    const TypeDef& d = rsig.sig.typedefs.at(name);
    g.nonterminals[name] = static_cast<int>(d.params.size());
    const TypeRef& b = d.body;
    auto add = [&](const std::string& act, const TypeRef& cont) {
      g.actions.insert(act);
      auto key = std::make_pair(name, act);
      if (g.rules.count(key))
        throw std::logic_error("fog: duplicate rule for " + name + " " + act);
      g.rules[key] = Grammar::Rule{d.params, embed(cont)};
    };
    switch (b->kind) {
      case TypeKind::Internal:
        for (const auto& [l, c] : b->branches) add(act_internal(l), c);
        break;
      case TypeKind::External:
        for (const auto& [l, c] : b->branches) add(act_external(l), c);
        break;
      case TypeKind::Tensor:
        add("*1", b->left);
        add("*2", b->right);
        break;
      case TypeKind::Lolli:
        add("-o1", b->left);
        add("-o2", b->right);
        break;
      default:
        // 1 or a variable: no transitions of its own.
        g.aliases[name] = {d.params, embed(b)};
        break;
    }
  }
  return g;
}

std::map<std::string, TypeRef> close_open(RenamedSignature& rsig,
                                          const std::set<std::string>& vars) {
  std::map<std::string, TypeRef> sigma;
  for (const auto& v : vars) {
    std::string name = "%v_" + v;
    if (!rsig.sig.find_typedef(name)) {
      TypeDef d;
      d.name = name;
      d.body = TypeExpr::internal({{"%l_" + v, TypeExpr::named(name)}});
      rsig.sig.add_typedef(std::move(d));
      rsig.fresh_names.insert(name);
    }
    sigma[v] = TypeExpr::named(name);
  }
  return sigma;
}

namespace {

TermRef subst_term(const TermRef& t,
                   const std::map<std::string, TermRef>& m) {
  switch (t->kind) {
    case TermKind::Bot:
      return t;
    case TermKind::TVar: {
      auto it = m.find(t->name);
      return it == m.end() ? t : it->second;
    }
    default: {
      std::vector<TermRef> as;
      as.reserve(t->args.size());
      for (const auto& a : t->args) as.push_back(subst_term(a, m));
      return Term::apply(t->name, std::move(as));
    }
  }
}

TermRef instantiate(const std::vector<std::string>& params,
                    const TermRef& rhs, const std::vector<TermRef>& args) {
  std::map<std::string, TermRef> m;
  for (size_t i = 0; i < params.size() && i < args.size(); ++i)
    m[params[i]] = args[i];
  return subst_term(rhs, m);
}

// Chases alias-headed applications down to ⊥, a variable, or a nonterminal
// with rules. Terminates: an alias body is ⊥ or a parameter, so each step
// replaces the term by ⊥ or by one of its own argument subterms.
TermRef normalize(const Grammar& g, TermRef t) {
  while (t->kind == TermKind::Apply) {
    auto it = g.aliases.find(t->name);
    if (it == g.aliases.end()) break;
    t = instantiate(it->second.first, it->second.second, t->args);
  }
  return t;
}

// Enabled actions with their successor terms, on a normalized term.
std::vector<std::pair<std::string, TermRef>> successors(const Grammar& g,
                                                        const TermRef& t) {
  std::vector<std::pair<std::string, TermRef>> out;
  if (t->kind != TermKind::Apply) return out;
  auto lo = g.rules.lower_bound({t->name, ""});
  for (auto it = lo; it != g.rules.end() && it->first.first == t->name; ++it)
    out.emplace_back(it->first.second,
                     instantiate(it->second.params, it->second.rhs, t->args));
  return out;
}

}  // namespace

std::set<std::vector<std::string>> traces(const Grammar& g, const TermRef& t0,
                                          int k) {
  std::map<std::pair<std::string, int>, std::set<std::vector<std::string>>>
      memo;
  std::function<const std::set<std::vector<std::string>>&(TermRef, int)> go =
      [&](TermRef t, int depth) -> const std::set<std::vector<std::string>>& {
    t = normalize(g, t);
    auto key = std::make_pair(term_key(t), depth);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    std::set<std::vector<std::string>> out;
    out.insert(std::vector<std::string>{});
    if (depth > 0) {
      for (const auto& [act, next] : successors(g, t)) {
        for (const auto& w : go(next, depth - 1)) {
          std::vector<std::string> word;
          word.reserve(w.size() + 1);
          word.push_back(act);
          word.insert(word.end(), w.begin(), w.end());
          out.insert(std::move(word));
        }
      }
    }
    return memo.emplace(std::move(key), std::move(out)).first->second;
  };
  return go(t0, k);
}

std::optional<std::vector<std::string>> bounded_trace_diff(
    const RenamedSignature& rsig, const TypeRef& a, const TypeRef& b, int k) {
  RenamedSignature scratch = rsig;
  TypeRef ra = rename_type(a, scratch);
  TypeRef rb = rename_type(b, scratch);
  std::set<std::string> vars = free_vars(ra);
  for (const auto& v : free_vars(rb)) vars.insert(v);
  auto sigma = close_open(scratch, vars);
  ra = substitute(ra, sigma);
  rb = substitute(rb, sigma);
  Grammar g = fog(scratch);

  struct Item {
    TermRef ta, tb;
    std::vector<std::string> word;
  };
  std::deque<Item> queue;
  queue.push_back({normalize(g, embed(ra)), normalize(g, embed(rb)), {}});
  std::set<std::pair<std::string, std::string>> seen;
  while (!queue.empty()) {
    Item it = std::move(queue.front());
    queue.pop_front();
    if (!seen.insert({term_key(it.ta), term_key(it.tb)}).second) continue;
    auto sa = successors(g, it.ta);
    auto sb = successors(g, it.tb);
    std::map<std::string, TermRef> ma, mb;
    for (auto& [act, next] : sa) ma[act] = next;
    for (auto& [act, next] : sb) mb[act] = next;
    for (const auto& [act, next] : ma) {
      if (!mb.count(act)) {
        auto w = it.word;
        w.push_back(act);
        return w;
      }
    }
    for (const auto& [act, next] : mb) {
      if (!ma.count(act)) {
        auto w = it.word;
        w.push_back(act);
        return w;
      }
    }
    if (static_cast<int>(it.word.size()) >= k) continue;
    for (const auto& [act, next] : ma) {
      auto w = it.word;
      w.push_back(act);
      queue.push_back({normalize(g, next), normalize(g, mb.at(act)), w});
    }
  }
  return std::nullopt;
}

std::string dump_grammar(const Grammar& g) {
  std::string out;
  for (const auto& [key, rule] : g.rules) {
    std::string line = key.first;
    for (const auto& p : rule.params) line += " " + p;
    line += " --" + key.second + "--> " + term_str(rule.rhs);
    out += line + "\n";
  }
  return out;
}

}  // namespace nst
