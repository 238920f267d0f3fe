#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "nst/cfst.hpp"
#include "nst/checker.hpp"
#include "nst/equality.hpp"
#include "nst/grammar.hpp"
#include "nst/rename.hpp"
#include "nst/runtime.hpp"
#include "nst/syntax.hpp"

namespace {

constexpr const char* kVersion = "nstc 1.0.0";

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

// 0 = loaded; 1 = parse/validation diagnostics (printed); 2 = unreadable.
int load(const std::string& path, nst::Signature& sig) {
  std::string text;
  if (!read_file(path, text)) {
    std::cerr << "error: cannot read " << path << "\n";
    return 2;
  }
  nst::ParseResult r = nst::parse_program(text, path);
  if (!r.ok()) {
    std::cerr << nst::render(r.errors);
    return 1;
  }
  auto v = nst::validate_signature(r.sig);
  if (!v.empty()) {
    std::cerr << nst::render(v);
    return 1;
  }
  sig = std::move(r.sig);
  return 0;
}

// Checks that a goal type only mentions defined names at correct arities.
bool check_type_refs(const nst::TypeRef& t, const nst::Signature& sig) {
  switch (t->kind) {
    case nst::TypeKind::Named: {
      const nst::TypeDef* d = sig.find_typedef(t->name);
      if (!d || d->params.size() != t->args.size()) {
        std::cerr << "error: undefined type or wrong arity: "
                  << nst::type_str(t) << "\n";
        return false;
      }
      for (const auto& a : t->args)
        if (!check_type_refs(a, sig)) return false;
      return true;
    }
    case nst::TypeKind::Internal:
    case nst::TypeKind::External:
      for (const auto& [l, c] : t->branches)
        if (!check_type_refs(c, sig)) return false;
      return true;
    case nst::TypeKind::Tensor:
    case nst::TypeKind::Lolli:
      return check_type_refs(t->left, sig) && check_type_refs(t->right, sig);
    default:
      return true;
  }
}

bool parse_goal(const std::string& text, const nst::Signature& sig,
                nst::TypeRef& out) {
  std::vector<nst::Diagnostic> errs;
  auto t = nst::parse_type(text, &errs);
  if (!t) {
    std::cerr << nst::render(errs);
    return false;
  }
  out = nst::resolve_type(*t, sig);
  return check_type_refs(out, sig);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checker and interpreter for nested session types"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string file, left, right, goal_type, proc;
  int depth = 1, bound = 8;
  long steps = 100000;
  bool dump_renamed = false, trace = false;

  CLI::App* tc = app.add_subcommand("typecheck", "Type-check all definitions");
  tc->add_option("file", file)->required();
  tc->add_option("--depth", depth);
  tc->add_flag("--dump-renamed", dump_renamed);

  CLI::App* eqc = app.add_subcommand("equal", "Decide type equality");
  eqc->add_option("file", file)->required();
  eqc->add_option("--left", left)->required();
  eqc->add_option("--right", right)->required();
  eqc->add_option("--depth", depth);

  CLI::App* gr = app.add_subcommand("grammar", "Dump the first-order grammar");
  gr->add_option("file", file)->required();
  gr->add_option("--traces", goal_type);
  gr->add_option("--bound", bound);

  CLI::App* ex = app.add_subcommand("exec", "Execute a process");
  ex->add_option("file", file)->required();
  ex->add_option("--proc", proc)->required();
  ex->add_option("--steps", steps);
  ex->add_flag("--trace", trace);

  CLI::App* ce = app.add_subcommand("cfst-embed",
                                    "Embed context-free session types");
  ce->add_option("file", file)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (tc->parsed()) {
      nst::Signature sig;
      if (int rc = load(file, sig)) return rc;
      if (dump_renamed)
        std::cout << nst::print_signature(nst::rename_signature(sig).sig);
      nst::Checker chk(sig, depth);
      auto diags = chk.check_all();
      if (!diags.empty()) {
        std::cerr << nst::render(diags);
        return 1;
      }
      std::cout << "ok\n";
      return 0;
    }

    if (eqc->parsed()) {
      nst::Signature sig;
      if (int rc = load(file, sig)) return rc;
      nst::TypeRef a, b;
      if (!parse_goal(left, sig, a) || !parse_goal(right, sig, b)) return 2;
      nst::TypeEquality eq(sig, depth);
      if (!eq.seeds().ok()) {
        for (const auto& e : eq.seeds().errors) std::cerr << e << "\n";
        return 1;
      }
      nst::Verdict v = eq.equal(a, b);
      std::cout << v.str() << "\n";
      return v.is_equal() ? 0 : 1;
    }

    if (gr->parsed()) {
      nst::Signature sig;
      if (int rc = load(file, sig)) return rc;
      nst::RenamedSignature r = nst::rename_signature(sig);
      if (goal_type.empty()) {
        std::cout << nst::dump_grammar(nst::fog(r));
        return 0;
      }
      nst::TypeRef t;
      if (!parse_goal(goal_type, sig, t)) return 2;
      t = nst::rename_type(t, r);
      auto sigma = nst::close_open(r, nst::free_vars(t));
      t = nst::substitute(t, sigma);
      auto words = nst::traces(nst::fog(r), nst::embed(t), bound);
      for (const auto& w : words) {
        if (w.empty()) {
          std::cout << "-\n";
          continue;
        }
        for (size_t i = 0; i < w.size(); ++i)
          std::cout << (i ? " " : "") << w[i];
        std::cout << "\n";
      }
      return 0;
    }

    if (ex->parsed()) {
      nst::Signature sig;
      if (int rc = load(file, sig)) return rc;
      nst::Checker chk(sig, depth);
      auto diags = chk.check_all();
      if (!diags.empty()) {
        std::cerr << nst::render(diags);
        return 1;
      }
      nst::Runtime rt(sig, depth);
      nst::RunResult res = rt.run(proc, steps, 0, trace);
      if (trace)
        for (size_t i = 0; i < res.trace.size(); ++i)
          std::cerr << "[" << i << "] " << res.trace[i] << "\n";
      for (size_t i = 0; i < res.transcript.size(); ++i)
        std::cout << (i ? " " : "") << res.transcript[i];
      std::cout << "\n";
      switch (res.status) {
        case nst::RunStatus::Poised:
          std::cout << "status: poised\n";
          return 0;
        case nst::RunStatus::StepLimit:
          std::cout << "status: step-limit\n";
          return 1;
        default:
          std::cout << "status: stuck\n";
          return 1;
      }
    }

    if (ce->parsed()) {
      std::string text;
      if (!read_file(file, text)) return 2;
      nst::CfstProgram prog = nst::parse_cfst(text, file);
      if (!prog.ok()) {
        std::cerr << nst::render(prog.errors);
        return 1;
      }
      nst::Signature sig = nst::tau_embed(prog.eqs);
      auto v = nst::validate_signature(sig);
      if (!v.empty()) {
        std::cerr << nst::render(v);
        return 1;
      }
      std::cout << nst::print_signature(sig);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
