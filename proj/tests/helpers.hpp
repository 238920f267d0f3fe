#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nst/ast.hpp"
#include "nst/equality.hpp"
#include "nst/grammar.hpp"
#include "nst/rename.hpp"
#include "nst/syntax.hpp"

namespace testutil {

inline nst::Signature parse_sig(const std::string& text) {
  nst::ParseResult r = nst::parse_program(text);
  if (!r.ok()) {
    std::string msg = "parse failed:\n";
    for (const auto& d : r.errors) msg += d.str() + "\n";
    throw std::runtime_error(msg);
  }
  auto v = nst::validate_signature(r.sig);
  if (!v.empty()) {
    std::string msg = "validation failed:\n";
    for (const auto& d : v) msg += d.str() + "\n";
    throw std::runtime_error(msg);
  }
  return r.sig;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nst::Signature load_corpus(const std::string& name) {
  return parse_sig(read_file(std::string(CORPUS_DIR) + "/" + name));
}

// Parses a type literal and resolves bare identifiers that name signature
// definitions into applications, the same way goal types are handled on the
// command line. Without this, a nullary name like D reads as a variable.
inline nst::TypeRef ty(const nst::Signature& sig, const std::string& s) {
  auto r = nst::parse_type(s);
  if (!r) throw std::runtime_error("unparsable type literal: " + s);
  return nst::resolve_type(*r, sig);
}

// ---------------------------------------------------------------------------
// Step-indexed bisimulation oracle: a direct, bounded implementation of the
// type-bisimulation definition over single-step unfolding. Independent of
// renaming and of the grammar translation.
// ---------------------------------------------------------------------------
inline bool bisim_oracle(const nst::Signature& sig, const nst::TypeRef& a,
                         const nst::TypeRef& b, int k) {
  if (k <= 0) return true;
  nst::TypeRef ua = nst::unfold(sig, a);
  nst::TypeRef ub = nst::unfold(sig, b);
  while (ua->kind == nst::TypeKind::Named) ua = nst::unfold(sig, ua);
  while (ub->kind == nst::TypeKind::Named) ub = nst::unfold(sig, ub);
  if (ua->kind != ub->kind) return false;
  switch (ua->kind) {
    case nst::TypeKind::One:
      return true;
    case nst::TypeKind::Var:
      return ua->name == ub->name;
    case nst::TypeKind::Internal:
    case nst::TypeKind::External: {
      if (ua->branches.size() != ub->branches.size()) return false;
      for (const auto& [l, ca] : ua->branches) {
        const nst::TypeRef* cb = nullptr;
        for (const auto& [m, c] : ub->branches)
          if (m == l) cb = &c;
        if (!cb) return false;
        if (!bisim_oracle(sig, ca, *cb, k - 1)) return false;
      }
      return true;
    }
    default:  // Tensor / Lolli
      return bisim_oracle(sig, ua->left, ub->left, k - 1) &&
             bisim_oracle(sig, ua->right, ub->right, k - 1);
  }
}

// Replays a counterexample path on two types; true when the path leads to a
// genuine head-constructor or label-set mismatch (or a point where only one
// side can take the next action).
inline bool path_confirms_difference(const nst::Signature& sig,
                                     nst::TypeRef a, nst::TypeRef b,
                                     const std::vector<std::string>& path) {
  auto head = [&](nst::TypeRef t) {
    while (t->kind == nst::TypeKind::Named) t = nst::unfold(sig, t);
    return t;
  };
  auto follow = [&](const nst::TypeRef& t,
                    const std::string& act) -> nst::TypeRef {
    switch (t->kind) {
      case nst::TypeKind::Internal:
      case nst::TypeKind::External: {
        const char* pre = t->kind == nst::TypeKind::Internal ? "+" : "&";
        for (const auto& [l, c] : t->branches)
          if (pre + l == act) return c;
        return nullptr;
      }
      case nst::TypeKind::Tensor:
        if (act == "*1") return t->left;
        if (act == "*2") return t->right;
        return nullptr;
      case nst::TypeKind::Lolli:
        if (act == "-o1") return t->left;
        if (act == "-o2") return t->right;
        return nullptr;
      default:
        return nullptr;
    }
  };
  for (const auto& act : path) {
    nst::TypeRef ha = head(a), hb = head(b);
    nst::TypeRef na = follow(ha, act), nb = follow(hb, act);
    if (!na && !nb) return false;  // path does not exist on either side
    if (!na || !nb) return true;   // only one side can act: a difference
    a = na;
    b = nb;
  }
  // After the full path the heads must disagree.
  return !bisim_oracle(sig, a, b, 1);
}

// ---------------------------------------------------------------------------
// Random signature generators for the differential suites.
// ---------------------------------------------------------------------------
struct Gen {
  std::mt19937 rng;
  explicit Gen(std::uint32_t seed) : rng(seed) {}

  int pick(int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); }

  nst::TypeRef leaf(const std::vector<std::string>& params,
                    const std::vector<std::string>& defnames,
                    const std::vector<int>& arities, int depth) {
    int r = pick(params.empty() ? 2 : 3);
    if (r == 2) return nst::TypeExpr::var(params[pick((int)params.size())]);
    if (r == 1 && !defnames.empty()) {
      int i = pick((int)defnames.size());
      std::vector<nst::TypeRef> args;
      for (int j = 0; j < arities[i]; ++j)
        args.push_back(depth > 0 ? type(params, defnames, arities, depth - 1)
                                 : nst::TypeExpr::one());
      return nst::TypeExpr::named(defnames[i], std::move(args));
    }
    return nst::TypeExpr::one();
  }

  nst::TypeRef type(const std::vector<std::string>& params,
                    const std::vector<std::string>& defnames,
                    const std::vector<int>& arities, int depth) {
    if (depth <= 0) return leaf(params, defnames, arities, 0);
    switch (pick(5)) {
      case 0: {
        nst::Branches bs;
        int n = 1 + pick(3);
        static const char* labels[] = {"a", "b", "c"};
        for (int i = 0; i < n; ++i)
          bs.emplace_back(labels[i], type(params, defnames, arities, depth - 1));
        return nst::TypeExpr::internal(std::move(bs));
      }
      case 1: {
        nst::Branches bs;
        int n = 1 + pick(3);
        static const char* labels[] = {"a", "b", "c"};
        for (int i = 0; i < n; ++i)
          bs.emplace_back(labels[i], type(params, defnames, arities, depth - 1));
        return nst::TypeExpr::external(std::move(bs));
      }
      case 2:
        return nst::TypeExpr::tensor(type(params, defnames, arities, depth - 1),
                                     type(params, defnames, arities, depth - 1));
      case 3:
        return nst::TypeExpr::lolli(type(params, defnames, arities, depth - 1),
                                    type(params, defnames, arities, depth - 1));
      default:
        return leaf(params, defnames, arities, depth - 1);
    }
  }

  // A structural body (never a bare name application), as contractiveness
  // requires.
  nst::TypeRef body(const std::vector<std::string>& params,
                    const std::vector<std::string>& defnames,
                    const std::vector<int>& arities, int depth) {
    nst::TypeRef t = type(params, defnames, arities, depth);
    if (t->kind == nst::TypeKind::Named)
      return nst::TypeExpr::internal({{"a", t}});
    return t;
  }

  // ≤ max_defs definitions, ≤ max_params parameters each, branch width ≤ 3.
  nst::Signature signature(int max_defs, int max_params) {
    nst::Signature sig;
    int ndefs = 1 + pick(max_defs);
    std::vector<std::string> names;
    std::vector<int> arities;
    for (int i = 0; i < ndefs; ++i) {
      names.push_back("V" + std::to_string(i));
      arities.push_back(max_params == 0 ? 0 : pick(max_params + 1));
    }
    for (int i = 0; i < ndefs; ++i) {
      nst::TypeDef d;
      d.name = names[i];
      for (int j = 0; j < arities[i]; ++j)
        d.params.push_back("p" + std::to_string(j));
      d.body = body(d.params, names, arities, 2);
      sig.add_typedef(std::move(d));
    }
    return sig;
  }

  // A closed query type over the signature's definitions.
  nst::TypeRef closed_query(const nst::Signature& sig) {
    std::vector<std::string> names;
    std::vector<int> arities;
    for (const auto& n : sig.typedef_order) {
      names.push_back(n);
      arities.push_back((int)sig.find_typedef(n)->params.size());
    }
    nst::TypeRef t = type({}, names, arities, 2);
    return t;
  }
};

// ---------------------------------------------------------------------------
// Differential driver shared by the property tests and the acceptance gate.
// For each seed: generate a signature, pose closed queries, and check every
// definite verdict against the trace oracle and the bisimulation oracle.
// Returns descriptions of violations (empty = sound) and counts Inconclusive
// verdicts for the monomorphic-completeness criterion.
// ---------------------------------------------------------------------------
struct DiffStats {
  int signatures = 0;
  int queries = 0;
  int equal = 0;
  int not_equal = 0;
  int inconclusive = 0;
  std::vector<std::string> violations;
};

inline DiffStats differential_run(int num_sigs, std::uint32_t seed0,
                                  int max_params, int k,
                                  int queries_per_sig = 3) {
  DiffStats st;
  for (int s = 0; s < num_sigs; ++s) {
    Gen g(seed0 + static_cast<std::uint32_t>(s));
    nst::Signature sig = g.signature(4, max_params);
    if (!nst::validate_signature(sig).empty()) continue;
    ++st.signatures;
    nst::TypeEquality eq(sig);
    for (int q = 0; q < queries_per_sig; ++q) {
      nst::TypeRef a = g.closed_query(sig);
      nst::TypeRef b = g.closed_query(sig);
      nst::Verdict v = eq.equal(a, b);
      ++st.queries;
      auto fail = [&](const std::string& what) {
        st.violations.push_back("seed " + std::to_string(seed0 + s) + ": " +
                                nst::type_str(a) + " vs " + nst::type_str(b) +
                                ": " + what);
      };
      if (v.is_equal()) {
        ++st.equal;
        nst::RenamedSignature r = nst::rename_signature(sig);
        auto diff = nst::bounded_trace_diff(r, a, b, k);
        if (diff.has_value()) fail("Equal but traces differ at k");
        if (!bisim_oracle(sig, a, b, k)) fail("Equal but bisim oracle refutes");
      } else if (v.is_not_equal()) {
        ++st.not_equal;
        if (!path_confirms_difference(sig, a, b, v.path))
          fail("NotEqual path " + v.str() + " not confirmed by replay");
      } else {
        ++st.inconclusive;
      }
    }
  }
  return st;
}

}  // namespace testutil
