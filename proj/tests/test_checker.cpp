#include "doctest.h"
#include "helpers.hpp"

#include "nst/checker.hpp"
#include "nst/syntax.hpp"

using namespace nst;
using testutil::parse_sig;

static std::vector<Diagnostic> check_text(const std::string& text) {
  ParseResult r = parse_program(text);
  for (const auto& d : r.errors) INFO(d.str());
  REQUIRE(r.ok());
  auto v = validate_signature(r.sig);
  for (const auto& d : v) INFO(d.str());
  REQUIRE(v.empty());
  Checker chk(r.sig);
  return chk.check_all();
}

static bool has_code(const std::vector<Diagnostic>& ds, const std::string& c) {
  for (const auto& d : ds)
    if (d.code == c) return true;
  return false;
}

TEST_CASE("the full bundled corpus typechecks") {
  for (const char* file : {"queue.nst", "dyck.nst", "dyck_eqtype.nst",
                           "cropped.nst", "l3.nst", "lists.nst",
                           "exprserver.nst", "trees.nst", "tries.nst"}) {
    Signature sig = testutil::load_corpus(file);
    Checker chk(sig);
    auto diags = chk.check_all();
    for (const auto& d : diags) INFO(file << ": " << d.str());
    CHECK(diags.empty());
  }
}

TEST_CASE("1R: closing with a nonempty context is a linearity violation") {
  auto ds = check_text(
      "decl f : (x : 1) |- (c : 1)\n"
      "proc c <- f x = close c\n");
  CHECK(has_code(ds, "LinearityViolation"));
}

TEST_CASE("id: forwarding requires exactly the forwarded channel, equal types") {
  SUBCASE("leftover channel") {
    auto ds = check_text(
        "decl f : (x : 1) (y : 1) |- (c : 1)\n"
        "proc c <- f x y = c <-> x\n");
    CHECK(has_code(ds, "LinearityViolation"));
  }
  SUBCASE("type mismatch carries the equality verdict") {
    auto ds = check_text(
        "type R = +{ a : R }\n"
        "decl f : (x : 1) |- (c : R)\n"
        "proc c <- f x = c <-> x\n");
    CHECK(has_code(ds, "TypeMismatch"));
  }
  SUBCASE("equal-by-algorithm endpoint types are accepted") {
    auto ds = check_text(
        "type list[a] = +{ nil : 1, cons : a * list[a] }\n"
        "type list'[a] = +{ nil : 1, cons : a * list'[a] }\n"
        "decl f : (x : list[1]) |- (c : list'[1])\n"
        "proc c <- f x = c <-> x\n");
    CHECK(ds.empty());
  }
}

TEST_CASE("case: branch labels must match the label set exactly") {
  SUBCASE("missing branch") {
    auto ds = check_text(
        "type two = +{ a : 1, b : 1 }\n"
        "decl f : (x : two) |- (c : 1)\n"
        "proc c <- f x = case x ( a => wait x ; close c )\n");
    CHECK(has_code(ds, "LabelSetMismatch"));
  }
  SUBCASE("extra branch") {
    auto ds = check_text(
        "type oneof = +{ a : 1 }\n"
        "decl f : (x : oneof) |- (c : 1)\n"
        "proc c <- f x = case x ( a => wait x ; close c"
        "                       | b => wait x ; close c )\n");
    CHECK(has_code(ds, "LabelSetMismatch"));
  }
  SUBCASE("selecting a label outside the set") {
    auto ds = check_text(
        "type oneof = +{ a : 1 }\n"
        "decl f : . |- (c : oneof)\n"
        "proc c <- f = c.z ; close c\n");
    CHECK(!ds.empty());
  }
}

TEST_CASE("unknown channels and processes") {
  auto ds = check_text(
      "decl f : . |- (c : 1)\n"
      "proc c <- f = wait d ; close c\n");
  CHECK(has_code(ds, "UnknownChannel"));

  auto ds2 = check_text(
      "decl f : . |- (c : 1)\n"
      "proc c <- f = d <- g ; wait d ; close c\n");
  CHECK(has_code(ds2, "UnknownProcess"));
}

TEST_CASE("orphan declarations and definitions are reported") {
  auto ds = check_text("decl f : . |- (c : 1)\n");
  CHECK(has_code(ds, "UnknownProcess"));
}

TEST_CASE("spawn: wrong number of type arguments") {
  auto ds = check_text(
      "type box[a] = +{ put : a }\n"
      "decl f[a] : . |- (c : box[a])\n"
      "proc c <- f[a] = c.put ; c <- f\n");
  CHECK(has_code(ds, "TypeArityMismatch"));
}

TEST_CASE("channel shadowing by recv is rejected") {
  auto ds = check_text(
      "decl f : (x : 1 -o 1) |- (c : 1)\n"
      "proc c <- f x = c <- recv x ; wait x ; close c\n");
  CHECK(has_code(ds, "LinearityViolation"));
}

TEST_CASE("recursive spawn at an instantiated parameter (eval pattern)") {
  // Checking eval[K] exercises the spawn at type parameter tm[K].
  Signature sig = testutil::load_corpus("exprserver.nst");
  Checker chk(sig);
  const ProcDef& def = sig.procdefs.at("eval");
  const ProcDecl& decl = sig.procdecls.at("eval");
  std::map<std::string, TypeRef> uses;
  for (const auto& [c, ty] : decl.uses) uses[c] = ty;
  auto ds = chk.check_process({"K"}, uses, def.body, decl.offers.first,
                              decl.offers.second);
  CHECK(ds.empty());
}

TEST_CASE("substitution lemma: closed instances of checked bodies check") {
  Signature sig = testutil::load_corpus("exprserver.nst");
  Checker chk(sig);
  const ProcDef& def = sig.procdefs.at("exp");
  const ProcDecl& decl = sig.procdecls.at("exp");
  std::map<std::string, TypeRef> sigma = {{"K", TypeExpr::one()}};
  std::map<std::string, TypeRef> uses;
  for (const auto& [c, ty] : decl.uses) uses[c] = substitute(ty, sigma);
  ProcRef body = subst_types_in_proc(def.body, sigma);
  auto ds = chk.check_process({}, uses, body, decl.offers.first,
                              substitute(decl.offers.second, sigma));
  for (const auto& d : ds) INFO(d.str());
  CHECK(ds.empty());
}

TEST_CASE("adding valid eqtype seeds never breaks a checking program") {
  Signature plain = testutil::load_corpus("dyck.nst");
  Signature seeded = testutil::load_corpus("dyck_eqtype.nst");
  // merge processes from plain into seeded
  for (const auto& [n, d] : plain.procdecls) seeded.procdecls[n] = d;
  for (const auto& [n, d] : plain.procdefs) seeded.procdefs[n] = d;
  CHECK(Checker(plain).check_all().empty());
  CHECK(Checker(seeded).check_all().empty());
}

TEST_CASE("invalid eqtype declarations surface as InvalidEqtype") {
  auto ds = check_text(
      "type R = +{ a : R }\n"
      "type E = +{ }\n"
      "eqtype R = E\n");
  CHECK(has_code(ds, "InvalidEqtype"));
}

TEST_CASE("inconclusive equality at a use site fails the check") {
  // D vs D' is inconclusive without seeds; forwarding between them must be
  // rejected ("we interpret both (ii) and (iii) as a failure").
  auto ds = check_text(
      "type T[x] = +{ L : T[T[x]], R : x }\n"
      "type D = +{ L : T[D], $ : 1 }\n"
      "type T'[x] = +{ L : T'[T'[x]], R : x }\n"
      "type D' = +{ L : T'[D'], $ : 1 }\n"
      "decl f : (x : D) |- (c : D')\n"
      "proc c <- f x = c <-> x\n");
  CHECK(has_code(ds, "TypeMismatch"));
}
