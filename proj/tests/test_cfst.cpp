#include "doctest.h"
#include "helpers.hpp"

#include "nst/cfst.hpp"
#include "nst/equality.hpp"
#include "nst/grammar.hpp"
#include "nst/syntax.hpp"

using namespace nst;

static CfstRef expr(const std::string& s) {
  CfstProgram p = parse_cfst("e = " + s);
  REQUIRE(p.ok());
  REQUIRE(p.eqs.size() == 1);
  return p.eqs[0].second;
}

TEST_CASE("normalize: skip laws, associativity, distribution") {
  CHECK(cfst_str(cfst_normalize(expr("A ; skip"))) == "A");
  CHECK(cfst_str(cfst_normalize(expr("skip ; A"))) == "A");
  CHECK(cfst_str(cfst_normalize(expr("(A ; B) ; C"))) == "A ; B ; C");
  CHECK(cfst_str(cfst_normalize(expr("+{ l : A } ; B"))) == "+{l : A ; B}");
  CHECK(cfst_str(cfst_normalize(expr("&{ l : skip } ; B"))) == "&{l : B}");
}

TEST_CASE("tau: clause-by-clause") {
  TypeRef alpha = TypeExpr::var("alpha");
  CHECK(type_str(tau(expr("skip"), alpha)) == "alpha");
  CHECK(type_str(tau(expr("s"), alpha)) == "s[alpha]");
  CHECK(type_str(tau(expr("s ; t"), alpha)) == "s[t[alpha]]");
  CHECK(type_str(tau(expr("+{ a : skip, b : s }"), alpha)) ==
        "+{a : alpha, b : s[alpha]}");
}

TEST_CASE("tau_embed: the a^n b^n equations reproduce the direct definitions") {
  CfstProgram p = parse_cfst(testutil::read_file(std::string(CORPUS_DIR) +
                                                 "/anbn.cfst"));
  REQUIRE(p.ok());
  Signature sig = tau_embed(p.eqs);
  REQUIRE(validate_signature(sig).empty());
  CHECK(type_str(sig.find_typedef("A")->body) ==
        "+{a : A[B[alpha]], b : alpha}");
  CHECK(type_str(sig.find_typedef("B")->body) == "+{b : alpha}");
  CHECK(type_str(sig.find_typedef("S")->body) == "+{a : A[alpha]}");
}

TEST_CASE("[1/alpha] tau_alpha(S) equals the direct start type") {
  CfstProgram p = parse_cfst(testutil::read_file(std::string(CORPUS_DIR) +
                                                 "/anbn.cfst"));
  REQUIRE(p.ok());
  Signature sig = tau_embed(p.eqs);
  // the hand-written direct S = +{a : A[1]}
  TypeDef direct;
  direct.name = "Sdirect";
  direct.body = TypeExpr::internal(
      {{"a", TypeExpr::named("A", {TypeExpr::one()})}});
  sig.add_typedef(std::move(direct));
  REQUIRE(validate_signature(sig).empty());

  TypeEquality eq(sig);
  TypeRef s1 = TypeExpr::named("S", {TypeExpr::one()});
  CHECK(eq.equal(s1, TypeExpr::named("Sdirect")).is_equal());
}

TEST_CASE("normalize-equivalent inputs have equal embeddings") {
  CfstProgram p1 = parse_cfst(
      "A = +{ a : A ; B, b : skip }\n"
      "B = +{ b : skip }\n"
      "S = (+{ a : A }) ; skip\n");
  CfstProgram p2 = parse_cfst(
      "A = +{ a : (A ; B) ; skip, b : skip }\n"
      "B = +{ b : skip ; skip }\n"
      "S = +{ a : A ; skip }\n");
  REQUIRE((p1.ok() && p2.ok()));
  Signature s1 = tau_embed(p1.eqs);
  Signature s2 = tau_embed(p2.eqs);
  for (const auto& n : s1.typedef_order)
    CHECK(type_eq(s1.find_typedef(n)->body, s2.find_typedef(n)->body));

  // And the τ images are trace-identical.
  RenamedSignature r = rename_signature(s1);
  auto sigma = close_open(r, {"alpha"});
  TypeRef a = substitute(TypeExpr::named("S", {TypeExpr::var("alpha")}), sigma);
  Grammar g = fog(r);
  auto w = traces(g, embed(a), 6);
  CHECK(w.size() > 1);
}

TEST_CASE("cfst parse errors carry extents") {
  CfstProgram p = parse_cfst("A = +{ l  1 }");
  CHECK(!p.ok());
}
