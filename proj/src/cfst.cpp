#include "nst/cfst.hpp"

#include <cctype>

namespace nst {

namespace {

std::shared_ptr<CfstExpr> mk(CfstKind k) {
  auto e = std::make_shared<CfstExpr>();
  e->kind = k;
  return e;
}

}  // namespace

CfstRef CfstExpr::skip() { return mk(CfstKind::Skip); }

CfstRef CfstExpr::seq(CfstRef a, CfstRef b) {
  auto e = mk(CfstKind::Seq);
  e->left = std::move(a);
  e->right = std::move(b);
  return e;
}

CfstRef CfstExpr::ichoice(std::vector<std::pair<std::string, CfstRef>> bs) {
  auto e = mk(CfstKind::IChoice);
  e->branches = std::move(bs);
  return e;
}

CfstRef CfstExpr::echoice(std::vector<std::pair<std::string, CfstRef>> bs) {
  auto e = mk(CfstKind::EChoice);
  e->branches = std::move(bs);
  return e;
}

CfstRef CfstExpr::ref(std::string n) {
  auto e = mk(CfstKind::Name);
  e->name = std::move(n);
  return e;
}

std::string cfst_str(const CfstRef& e) {
  switch (e->kind) {
    case CfstKind::Skip:
      return "skip";
    case CfstKind::Name:
      return e->name;
    case CfstKind::Seq: {
      std::string l = cfst_str(e->left);
      if (e->left->kind == CfstKind::Seq) l = "(" + l + ")";
      return l + " ; " + cfst_str(e->right);
    }
    default: {
      std::string s = e->kind == CfstKind::IChoice ? "+{" : "&{";
      bool first = true;
      for (const auto& [l, b] : e->branches) {
        if (!first) s += ", ";
        first = false;
        s += l + " : " + cfst_str(b);
      }
      return s + "}";
    }
  }
}

namespace {

struct CfstParser {
  const std::string& src;
  std::string filename;
  size_t pos = 0;
  int line = 1, col = 1;
  std::vector<Diagnostic>& errors;

  void advance() {
    if (src[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_ws() {
    while (pos < src.size()) {
      if (src[pos] == '%') {
        while (pos < src.size() && src[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(src[pos]))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool ident_char(char c) const {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '$' || c == '\'';
  }

  SourceExtent here() const {
    return {filename, {line, col}, {line, col + 1}};
  }

  void error(const std::string& msg) {
    errors.push_back({Severity::Error, "SyntaxError", msg, here()});
  }

  bool eat(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      advance();
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_ws();
    std::string s;
    while (pos < src.size() && ident_char(src[pos])) {
      s += src[pos];
      advance();
    }
    return s;
  }

  CfstRef atom() {
    skip_ws();
    if (pos >= src.size()) {
      error("unexpected end of input");
      return CfstExpr::skip();
    }
    char c = src[pos];
    if (c == '(') {
      advance();
      CfstRef e = expr();
      if (!eat(')')) error("expected ')'");
      return e;
    }
    if (c == '+' || c == '&') {
      bool internal = c == '+';
      advance();
      if (!eat('{')) error("expected '{'");
      std::vector<std::pair<std::string, CfstRef>> bs;
      skip_ws();
      if (!eat('}')) {
        while (true) {
          std::string l = ident();
          if (l.empty()) {
            error("expected branch label");
            break;
          }
          if (!eat(':')) error("expected ':'");
          bs.emplace_back(l, expr());
          if (eat(',')) continue;
          if (!eat('}')) error("expected '}'");
          break;
        }
      }
      return internal ? CfstExpr::ichoice(std::move(bs))
                      : CfstExpr::echoice(std::move(bs));
    }
    std::string n = ident();
    if (n.empty()) {
      error(std::string("unexpected character '") + c + "'");
      advance();
      return CfstExpr::skip();
    }
    if (n == "skip") return CfstExpr::skip();
    return CfstExpr::ref(n);
  }

  CfstRef expr() {
    CfstRef a = atom();
    skip_ws();
    if (pos < src.size() && src[pos] == ';') {
      advance();
      return CfstExpr::seq(std::move(a), expr());
    }
    return a;
  }
};

}  // namespace

CfstProgram parse_cfst(const std::string& text, const std::string& filename) {
  CfstProgram prog;
  CfstParser p{text, filename, 0, 1, 1, prog.errors};
  while (true) {
    p.skip_ws();
    if (p.pos >= text.size()) break;
    std::string name = p.ident();
    if (name.empty()) {
      p.error("expected equation name");
      break;
    }
    if (!p.eat('=')) {
      p.error("expected '=' after " + name);
      break;
    }
    prog.eqs.emplace_back(name, p.expr());
  }
  return prog;
}

CfstRef cfst_normalize(const CfstRef& e) {
  switch (e->kind) {
    case CfstKind::Skip:
    case CfstKind::Name:
      return e;
    case CfstKind::IChoice:
    case CfstKind::EChoice: {
      std::vector<std::pair<std::string, CfstRef>> bs;
      bs.reserve(e->branches.size());
      for (const auto& [l, b] : e->branches)
        bs.emplace_back(l, cfst_normalize(b));
      return e->kind == CfstKind::IChoice ? CfstExpr::ichoice(std::move(bs))
                                          : CfstExpr::echoice(std::move(bs));
    }
    default: {
      CfstRef s = cfst_normalize(e->left);
      CfstRef t = cfst_normalize(e->right);
      if (s->kind == CfstKind::Skip) return t;
      if (t->kind == CfstKind::Skip) return s;
      if (s->kind == CfstKind::Seq)  // associativity: right-nest
        return cfst_normalize(
            CfstExpr::seq(s->left, CfstExpr::seq(s->right, t)));
      if (s->kind == CfstKind::IChoice || s->kind == CfstKind::EChoice) {
        // distributive law: (+{l:S}) ; T = +{l : S;T}
        std::vector<std::pair<std::string, CfstRef>> bs;
        bs.reserve(s->branches.size());
        for (const auto& [l, b] : s->branches)
          bs.emplace_back(l, cfst_normalize(CfstExpr::seq(b, t)));
        return s->kind == CfstKind::IChoice ? CfstExpr::ichoice(std::move(bs))
                                            : CfstExpr::echoice(std::move(bs));
      }
      return CfstExpr::seq(std::move(s), std::move(t));
    }
  }
}

TypeRef tau(const CfstRef& e, const TypeRef& cont) {
  switch (e->kind) {
    case CfstKind::Skip:
      return cont;
    case CfstKind::Name:
      return TypeExpr::named(e->name, {cont});
    case CfstKind::Seq:
      // τ_α(S;T) = [τ_α(T)/β] τ_β(S): translate T first, feed it to S as
      // the continuation.
      return tau(e->left, tau(e->right, cont));
    default: {
      Branches bs;
      bs.reserve(e->branches.size());
      for (const auto& [l, b] : e->branches) bs.emplace_back(l, tau(b, cont));
      return e->kind == CfstKind::IChoice ? TypeExpr::internal(std::move(bs))
                                          : TypeExpr::external(std::move(bs));
    }
  }
}

Signature tau_embed(const std::vector<std::pair<std::string, CfstRef>>& eqs,
                    const std::string& param) {
  Signature sig;
  TypeRef alpha = TypeExpr::var(param);
  for (const auto& [name, body] : eqs) {
    TypeDef d;
    d.name = name;
    d.params = {param};
    d.body = tau(cfst_normalize(body), alpha);
    sig.add_typedef(std::move(d));
  }
  return sig;
}

}  // namespace nst
