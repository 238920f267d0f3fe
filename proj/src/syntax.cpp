#include "nst/syntax.hpp"

#include <cctype>
#include <functional>
#include <sstream>

namespace nst {

// ----- compression map -----------------------------------------------------

void CompressionMap::add(const TypeRef& expanded, const TypeRef& named) {
  entries_.emplace(type_key(expanded), named);
}

const TypeRef* CompressionMap::find(const TypeRef& t) const {
  auto it = entries_.find(type_key(t));
  return it == entries_.end() ? nullptr : &it->second;
}

// ----- lexer ---------------------------------------------------------------

namespace {

enum class Tok {
  Ident,
  LBrace, RBrace, LParen, RParen, LBrack, RBrack,
  Plus, Amp, Star, Lolli,
  Comma, Colon, Semi, Eq, Dot, Bar,
  Arrow,      // <-
  FwdArrow,   // <->
  Turnstile,  // |-
  DArrow,     // =>
  End,
  Error,
};

struct Token {
  Tok kind;
  std::string text;
  Pos start, end;
};

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         c == '\'';
}

std::vector<Token> lex(const std::string& text, const std::string& file,
                       std::vector<Diagnostic>& errors) {
  std::vector<Token> toks;
  Pos pos{1, 1};
  size_t i = 0;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (text[i + k] == '\n') {
        pos.line++;
        pos.col = 1;
      } else {
        pos.col++;
      }
    }
    i += n;
  };
  auto push = [&](Tok k, size_t len) {
    Token t{k, text.substr(i, len), pos, pos};
    t.end.col += static_cast<int>(len);
    toks.push_back(t);
    advance(len);
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == '%') {  // comment to end of line
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (ident_char(c)) {
      size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      push(Tok::Ident, j - i);
      continue;
    }
    auto two = text.substr(i, 2);
    auto three = text.substr(i, 3);
    if (three == "<->") { push(Tok::FwdArrow, 3); continue; }
    if (two == "<-") { push(Tok::Arrow, 2); continue; }
    if (two == "|-") { push(Tok::Turnstile, 2); continue; }
    if (two == "=>") { push(Tok::DArrow, 2); continue; }
    if (two == "-o") { push(Tok::Lolli, 2); continue; }
    switch (c) {
      case '{': push(Tok::LBrace, 1); continue;
      case '}': push(Tok::RBrace, 1); continue;
      case '(': push(Tok::LParen, 1); continue;
      case ')': push(Tok::RParen, 1); continue;
      case '[': push(Tok::LBrack, 1); continue;
      case ']': push(Tok::RBrack, 1); continue;
      case '+': push(Tok::Plus, 1); continue;
      case '&': push(Tok::Amp, 1); continue;
      case '*': push(Tok::Star, 1); continue;
      case ',': push(Tok::Comma, 1); continue;
      case ':': push(Tok::Colon, 1); continue;
      case ';': push(Tok::Semi, 1); continue;
      case '=': push(Tok::Eq, 1); continue;
      case '.': push(Tok::Dot, 1); continue;
      case '|': push(Tok::Bar, 1); continue;
      default:
        errors.push_back({Severity::Error, "UnexpectedChar",
                          std::string("unexpected character '") + c + "'",
                          {file, pos, pos}});
        advance(1);
        continue;
    }
  }
  toks.push_back({Tok::End, "", pos, pos});
  return toks;
}

// ----- parser --------------------------------------------------------------

struct ParseError {};

class Parser {
 public:
  Parser(std::vector<Token> toks, std::string file,
         std::vector<Diagnostic>& errors)
      : toks_(std::move(toks)), file_(std::move(file)), errors_(errors) {}

  Signature program() {
    Signature sig;
    while (peek().kind != Tok::End) {
      try {
        declaration(sig);
      } catch (const ParseError&) {
        recover();
      }
    }
    return sig;
  }

  TypeRef type_only() {
    TypeRef t = type();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  std::vector<Token> toks_;
  std::string file_;
  std::vector<Diagnostic>& errors_;
  size_t i_ = 0;

  const Token& peek(size_t k = 0) const {
    return toks_[std::min(i_ + k, toks_.size() - 1)];
  }
  Token next() { return toks_[i_ == toks_.size() - 1 ? i_ : i_++]; }

  bool at_keyword(const char* kw) const {
    return peek().kind == Tok::Ident && peek().text == kw;
  }

  SourceExtent here() const { return {file_, peek().start, peek().end}; }
  SourceExtent span(Pos from) const {
    return {file_, from, toks_[i_ ? i_ - 1 : 0].end};
  }

  [[noreturn]] void fail(const std::string& msg) {
    errors_.push_back({Severity::Error, "SyntaxError",
                       msg + " (found '" +
                           (peek().kind == Tok::End ? "end of input"
                                                    : peek().text) +
                           "')",
                       here()});
    throw ParseError{};
  }

  Token expect(Tok k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    return next();
  }

  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return next().text;
  }

  void recover() {
    while (peek().kind != Tok::End && !at_keyword("type") &&
           !at_keyword("decl") && !at_keyword("proc") && !at_keyword("eqtype"))
      next();
  }

  bool is_decl_keyword() const {
    return at_keyword("type") || at_keyword("decl") || at_keyword("proc") ||
           at_keyword("eqtype");
  }

  // [x1][x2]... (identifier params)
  std::vector<std::string> param_list() {
    std::vector<std::string> ps;
    while (peek().kind == Tok::LBrack) {
      next();
      ps.push_back(ident("type parameter"));
      expect(Tok::RBrack, "']'");
    }
    return ps;
  }

  // [A1][A2]... and also [A1,A2] (type arguments)
  std::vector<TypeRef> type_args() {
    std::vector<TypeRef> as;
    while (peek().kind == Tok::LBrack) {
      next();
      as.push_back(type());
      while (peek().kind == Tok::Comma) {
        next();
        as.push_back(type());
      }
      expect(Tok::RBrack, "']'");
    }
    return as;
  }

  // lolli (lowest, right assoc) > tensor (right assoc) > atom
  TypeRef type() {
    TypeRef lhs = tensor_type();
    if (peek().kind == Tok::Lolli) {
      next();
      return TypeExpr::lolli(lhs, type());
    }
    return lhs;
  }

  TypeRef tensor_type() {
    TypeRef lhs = atom_type();
    if (peek().kind == Tok::Star) {
      next();
      return TypeExpr::tensor(lhs, tensor_type());
    }
    return lhs;
  }

  Branches branch_types() {
    Branches bs;
    expect(Tok::LBrace, "'{'");
    if (peek().kind != Tok::RBrace) {
      for (;;) {
        std::string l = ident("branch label");
        expect(Tok::Colon, "':'");
        bs.emplace_back(l, type());
        if (peek().kind != Tok::Comma) break;
        next();
      }
    }
    expect(Tok::RBrace, "'}'");
    return bs;
  }

  TypeRef atom_type() {
    switch (peek().kind) {
      case Tok::Plus:
        next();
        return TypeExpr::internal(branch_types());
      case Tok::Amp:
        next();
        return TypeExpr::external(branch_types());
      case Tok::LParen: {
        next();
        TypeRef t = type();
        expect(Tok::RParen, "')'");
        return t;
      }
      case Tok::Ident: {
        std::string n = next().text;
        if (n == "1") return TypeExpr::one();
        if (peek().kind == Tok::LBrack)
          return TypeExpr::named(n, type_args());
        // bare name: variable or nullary type name; resolved by context
        return TypeExpr::var(n);
      }
      default:
        fail("expected a type");
    }
  }

  ProcRef process() {
    Pos from = peek().start;
    ProcRef p = process_inner();
    ProcExpr e = *p;
    e.extent = span(from);
    return std::make_shared<const ProcExpr>(std::move(e));
  }

  ProcRef process_inner() {
    if (at_keyword("close")) {
      next();
      return ProcExpr::close(ident("channel"));
    }
    if (at_keyword("wait")) {
      next();
      std::string c = ident("channel");
      expect(Tok::Semi, "';'");
      return ProcExpr::wait(c, process());
    }
    if (at_keyword("send")) {
      next();
      std::string c = ident("channel");
      std::string d = ident("channel");
      expect(Tok::Semi, "';'");
      return ProcExpr::send_chan(c, d, process());
    }
    if (at_keyword("case")) {
      next();
      std::string c = ident("channel");
      expect(Tok::LParen, "'('");
      std::vector<std::pair<std::string, ProcRef>> bs;
      for (;;) {
        std::string l = ident("branch label");
        expect(Tok::DArrow, "'=>'");
        bs.emplace_back(l, process());
        if (peek().kind != Tok::Bar) break;
        next();
      }
      expect(Tok::RParen, "')'");
      return ProcExpr::case_of(c, std::move(bs));
    }
    std::string c = ident("process expression");
    if (peek().kind == Tok::Dot) {
      next();
      std::string k = ident("label");
      expect(Tok::Semi, "';'");
      return ProcExpr::send_label(c, k, process());
    }
    if (peek().kind == Tok::FwdArrow) {
      next();
      return ProcExpr::fwd(c, ident("channel"));
    }
    if (peek().kind == Tok::Arrow) {
      next();
      if (at_keyword("recv")) {
        next();
        std::string src = ident("channel");
        expect(Tok::Semi, "';'");
        return ProcExpr::recv_chan(src, c, process());
      }
      std::string f = ident("process name");
      std::vector<TypeRef> as = type_args();
      std::vector<std::string> ys;
      while (peek().kind == Tok::Ident && !is_decl_keyword())
        ys.push_back(next().text);
      if (peek().kind == Tok::Semi) {
        next();
        return ProcExpr::spawn(c, f, std::move(as), std::move(ys), process());
      }
      return ProcExpr::tail_call(c, f, std::move(as), std::move(ys));
    }
    fail("expected '.', '<-' or '<->' after channel");
  }

  void declaration(Signature& sig) {
    Pos from = peek().start;
    if (at_keyword("type")) {
      next();
      TypeDef d;
      d.name = ident("type name");
      d.params = param_list();
      expect(Tok::Eq, "'='");
      d.body = type();
      d.extent = span(from);
      if (sig.typedefs.count(d.name))
        errors_.push_back({Severity::Error, "DuplicateDefinition",
                           "type " + d.name + " defined twice", d.extent});
      sig.add_typedef(std::move(d));
      return;
    }
    if (at_keyword("decl")) {
      next();
      ProcDecl d;
      d.name = ident("process name");
      d.typeparams = param_list();
      expect(Tok::Colon, "':'");
      if (peek().kind == Tok::Dot) {
        next();  // '.' stands for the empty context
      } else {
        while (peek().kind == Tok::LParen && peek(1).kind == Tok::Ident &&
               peek(2).kind == Tok::Colon) {
          next();
          std::string c = ident("channel");
          expect(Tok::Colon, "':'");
          d.uses.emplace_back(c, type());
          expect(Tok::RParen, "')'");
          if (peek().kind == Tok::Turnstile) break;
        }
      }
      expect(Tok::Turnstile, "'|-'");
      expect(Tok::LParen, "'('");
      d.offers.first = ident("channel");
      expect(Tok::Colon, "':'");
      d.offers.second = type();
      expect(Tok::RParen, "')'");
      d.extent = span(from);
      if (sig.procdecls.count(d.name))
        errors_.push_back({Severity::Error, "DuplicateDefinition",
                           "process " + d.name + " declared twice", d.extent});
      sig.procdecls[d.name] = std::move(d);
      return;
    }
    if (at_keyword("proc")) {
      next();
      ProcDef d;
      d.offered = ident("channel");
      expect(Tok::Arrow, "'<-'");
      d.name = ident("process name");
      d.typeparams = param_list();
      while (peek().kind == Tok::Ident && !is_decl_keyword())
        d.chanargs.push_back(next().text);
      expect(Tok::Eq, "'='");
      d.body = process();
      d.extent = span(from);
      if (sig.procdefs.count(d.name))
        errors_.push_back({Severity::Error, "DuplicateDefinition",
                           "process " + d.name + " defined twice", d.extent});
      sig.procdefs[d.name] = std::move(d);
      return;
    }
    if (at_keyword("eqtype")) {
      next();
      EqTypeDecl e;
      e.left = type();
      expect(Tok::Eq, "'='");
      e.right = type();
      e.extent = span(from);
      std::set<std::string> seen;
      for (const auto& v : free_vars_ordered(e.left))
        if (seen.insert(v).second) e.params.push_back(v);
      for (const auto& v : free_vars_ordered(e.right))
        if (seen.insert(v).second) e.params.push_back(v);
      sig.eqtypes.push_back(std::move(e));
      return;
    }
    fail("expected 'type', 'decl', 'proc' or 'eqtype'");
  }
};

// Nullary type names parse as Var; once the whole signature is known we can
// tell names from variables and patch the representation.
TypeRef resolve_vars(const TypeRef& t, const Signature& sig) {
  switch (t->kind) {
    case TypeKind::Var:
      if (sig.typedefs.count(t->name)) return TypeExpr::named(t->name);
      return t;
    case TypeKind::Named: {
      std::vector<TypeRef> as;
      for (const auto& a : t->args) as.push_back(resolve_vars(a, sig));
      return TypeExpr::named(t->name, std::move(as));
    }
    case TypeKind::Tensor:
      return TypeExpr::tensor(resolve_vars(t->left, sig),
                              resolve_vars(t->right, sig));
    case TypeKind::Lolli:
      return TypeExpr::lolli(resolve_vars(t->left, sig),
                             resolve_vars(t->right, sig));
    case TypeKind::Internal:
    case TypeKind::External: {
      Branches bs;
      for (const auto& [l, b] : t->branches)
        bs.emplace_back(l, resolve_vars(b, sig));
      return t->kind == TypeKind::Internal ? TypeExpr::internal(std::move(bs))
                                           : TypeExpr::external(std::move(bs));
    }
    default:
      return t;
  }
}

ProcRef resolve_proc(const ProcRef& p, const Signature& sig) {
  ProcExpr e = *p;
  if (p->cont) e.cont = resolve_proc(p->cont, sig);
  if (p->kind == ProcKind::Case) {
    e.branches.clear();
    for (const auto& [l, b] : p->branches)
      e.branches.emplace_back(l, resolve_proc(b, sig));
  }
  if (p->kind == ProcKind::Spawn || p->kind == ProcKind::TailCall) {
    e.typeargs.clear();
    for (const auto& a : p->typeargs) e.typeargs.push_back(resolve_vars(a, sig));
  }
  return std::make_shared<const ProcExpr>(std::move(e));
}

}  // namespace

TypeRef resolve_type(const TypeRef& t, const Signature& sig) {
  return resolve_vars(t, sig);
}

ParseResult parse_program(const std::string& text,
                          const std::string& filename) {
  ParseResult res;
  auto toks = lex(text, filename, res.errors);
  Parser parser(std::move(toks), filename, res.errors);
  res.sig = parser.program();
  Signature& sig = res.sig;
  for (auto& name : sig.typedef_order)
    sig.typedefs[name].body = resolve_vars(sig.typedefs[name].body, sig);
  for (auto& [n, d] : sig.procdecls) {
    for (auto& [c, t] : d.uses) t = resolve_vars(t, sig);
    d.offers.second = resolve_vars(d.offers.second, sig);
  }
  for (auto& [n, d] : sig.procdefs) d.body = resolve_proc(d.body, sig);
  for (auto& e : sig.eqtypes) {
    e.left = resolve_vars(e.left, sig);
    e.right = resolve_vars(e.right, sig);
    // recompute params now that names are resolved
    e.params.clear();
    std::set<std::string> seen;
    for (const auto& v : free_vars_ordered(e.left))
      if (seen.insert(v).second) e.params.push_back(v);
    for (const auto& v : free_vars_ordered(e.right))
      if (seen.insert(v).second) e.params.push_back(v);
  }
  return res;
}

std::optional<TypeRef> parse_type(const std::string& text,
                                  std::vector<Diagnostic>* errors) {
  std::vector<Diagnostic> local;
  std::vector<Diagnostic>& errs = errors ? *errors : local;
  auto toks = lex(text, "<type>", errs);
  Parser parser(std::move(toks), "<type>", errs);
  try {
    TypeRef t = parser.type_only();
    if (!errs.empty()) return std::nullopt;
    return t;
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

// ----- pretty printing with compression ------------------------------------

namespace {

void pp(std::ostream& os, const TypeRef& t, const CompressionMap& cmap,
        int prec) {
  if (const TypeRef* named = cmap.find(t)) {
    os << (*named)->name;
    for (const auto& a : (*named)->args) {
      os << "[";
      pp(os, a, cmap, 0);
      os << "]";
    }
    return;
  }
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
        pp(os, a, cmap, 0);
        os << "]";
      }
      break;
    case TypeKind::Tensor: {
      bool paren = prec > 2;
      if (paren) os << "(";
      pp(os, t->left, cmap, 3);
      os << " * ";
      pp(os, t->right, cmap, 2);
      if (paren) os << ")";
      break;
    }
    case TypeKind::Lolli: {
      bool paren = prec > 1;
      if (paren) os << "(";
      pp(os, t->left, cmap, 2);
      os << " -o ";
      pp(os, t->right, cmap, 1);
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
        pp(os, b, cmap, 0);
      }
      os << "}";
      break;
    }
  }
}

}  // namespace

std::string pretty_print(const TypeRef& t, const CompressionMap& cmap) {
  std::ostringstream os;
  pp(os, t, cmap, 0);
  return os.str();
}

std::string print_signature(const Signature& sig) {
  std::ostringstream os;
  for (const auto& name : sig.typedef_order) {
    const TypeDef& d = sig.typedefs.at(name);
    os << "type " << d.name;
    for (const auto& p : d.params) os << "[" << p << "]";
    os << " = " << type_str(d.body) << "\n";
  }
  for (const auto& [name, d] : sig.procdecls) {
    os << "decl " << d.name;
    for (const auto& p : d.typeparams) os << "[" << p << "]";
    os << " : ";
    if (d.uses.empty()) {
      os << ".";
    } else {
      bool first = true;
      for (const auto& [c, ct] : d.uses) {
        if (!first) os << " ";
        first = false;
        os << "(" << c << " : " << type_str(ct) << ")";
      }
    }
    os << " |- (" << d.offers.first << " : " << type_str(d.offers.second)
       << ")\n";
  }
  for (const auto& [name, d] : sig.procdefs) {
    os << "proc " << d.offered << " <- " << d.name;
    for (const auto& p : d.typeparams) os << "[" << p << "]";
    for (const auto& c : d.chanargs) os << " " << c;
    os << " = " << proc_str(d.body) << "\n";
  }
  for (const auto& e : sig.eqtypes)
    os << "eqtype " << type_str(e.left) << " = " << type_str(e.right) << "\n";
  return os.str();
}

}  // namespace nst
