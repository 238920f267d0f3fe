#include "nst/runtime.hpp"

#include <algorithm>
#include <stdexcept>

namespace nst {

namespace {

TypeRef norm(const Signature& sig, TypeRef t) {
  while (t->kind == TypeKind::Named) t = unfold(sig, t);
  return t;
}

TypeRef branch_type(const TypeRef& structural, const std::string& label) {
  for (const auto& [l, c] : structural->branches)
    if (l == label) return c;
  throw std::runtime_error("runtime: no branch " + label);
}

// Message payload direction: a message is outbound ("plus") when its subject
// channel is the channel it provides (⊕, ⊗, 1 messages), inbound ("minus")
// when the subject is a channel it uses (&, ⊸ messages).
bool is_plus(const Obj& m) { return m.expr->chan == m.provides; }

}  // namespace

Runtime::Runtime(const Signature& sig, int depth_bound)
    : sig_(sig), checker_(sig, depth_bound) {}

Configuration Runtime::spawn_main(const std::string& procname,
                                  std::string* ext) {
  auto dit = sig_.procdecls.find(procname);
  auto fit = sig_.procdefs.find(procname);
  if (dit == sig_.procdecls.end() || fit == sig_.procdefs.end())
    throw std::runtime_error("no such process: " + procname);
  if (!dit->second.uses.empty() || !dit->second.typeparams.empty())
    throw std::runtime_error("process " + procname +
                             " is not runnable: it uses channels or has type "
                             "parameters");
  Configuration cfg;
  std::string c = cfg.fresh_chan();
  ProcRef body = rename_chans(fit->second.body, {{fit->second.offered, c}});
  cfg.objects.push_back({false, c, body, cfg.fresh_id()});
  cfg.chan_types[c] = dit->second.offers.second;
  if (ext) *ext = c;
  return cfg;
}

std::optional<std::string> Runtime::step(Configuration& cfg, int policy) {
  auto& objs = cfg.objects;

  auto find_msg = [&](auto pred) -> int {
    for (size_t i = 0; i < objs.size(); ++i)
      if (objs[i].is_msg && pred(objs[i])) return static_cast<int>(i);
    return -1;
  };
  auto erase_at = [&](int i) { objs.erase(objs.begin() + i); };

  auto attempt = [&](int i) -> std::optional<std::string> {
    Obj& o = objs[i];
    if (o.is_msg) return std::nullopt;  // messages never initiate
    const ProcRef p = o.expr;
    const std::string self = o.provides;

    switch (p->kind) {
      case ProcKind::SendLabel: {
        std::string c = p->chan;
        std::string c2 = cfg.fresh_chan();
        TypeRef t = norm(sig_, cfg.chan_types.at(c));
        cfg.chan_types[c2] = branch_type(t, p->label);
        if (c == self) {  // (⊕S)
          ProcRef m = ProcExpr::send_label(c, p->label, ProcExpr::fwd(c, c2));
          o.provides = c2;
          o.expr = rename_chans(p->cont, {{c, c2}});
          objs.push_back({true, c, m, cfg.fresh_id()});
          return "+S";
        }
        // (&S)
        ProcRef m = ProcExpr::send_label(c, p->label, ProcExpr::fwd(c2, c));
        o.expr = rename_chans(p->cont, {{c, c2}});
        objs.push_back({true, c2, m, cfg.fresh_id()});
        return "&S";
      }

      case ProcKind::SendChan: {
        std::string c = p->chan, d = p->chan2;
        std::string c2 = cfg.fresh_chan();
        TypeRef t = norm(sig_, cfg.chan_types.at(c));
        cfg.chan_types[c2] = t->right;
        if (c == self) {  // (⊗S)
          ProcRef m = ProcExpr::send_chan(c, d, ProcExpr::fwd(c, c2));
          o.provides = c2;
          o.expr = rename_chans(p->cont, {{c, c2}});
          objs.push_back({true, c, m, cfg.fresh_id()});
          return "*S";
        }
        // (⊸S)
        ProcRef m = ProcExpr::send_chan(c, d, ProcExpr::fwd(c2, c));
        o.expr = rename_chans(p->cont, {{c, c2}});
        objs.push_back({true, c2, m, cfg.fresh_id()});
        return "-oS";
      }

      case ProcKind::Close: {  // (1S)
        o.is_msg = true;
        return "1S";
      }

      case ProcKind::Case: {
        std::string c = p->chan;
        if (c == self) {  // (&C): inbound label message on our channel
          int mi = find_msg([&](const Obj& m) {
            return !is_plus(m) && m.expr->kind == ProcKind::SendLabel &&
                   m.expr->chan == c;
          });
          if (mi < 0) return std::nullopt;
          const Obj& m = objs[mi];
          std::string c2 = m.provides;
          ProcRef body;
          for (const auto& [l, q] : p->branches)
            if (l == m.expr->label) body = q;
          o.provides = c2;
          o.expr = rename_chans(body, {{c, c2}});
          cfg.chan_types.erase(c);
          erase_at(mi);
          return "&C";
        }
        // (⊕C): outbound label message providing the used channel
        int mi = find_msg([&](const Obj& m) {
          return is_plus(m) && m.expr->kind == ProcKind::SendLabel &&
                 m.provides == c;
        });
        if (mi < 0) return std::nullopt;
        const Obj& m = objs[mi];
        std::string c2 = m.expr->cont->chan2;  // fwd c c2
        ProcRef body;
        for (const auto& [l, q] : p->branches)
          if (l == m.expr->label) body = q;
        o.expr = rename_chans(body, {{c, c2}});
        cfg.chan_types.erase(c);
        erase_at(mi);
        return "+C";
      }

      case ProcKind::RecvChan: {
        std::string c = p->chan, y = p->chan2;
        if (c == self) {  // (⊸C)
          int mi = find_msg([&](const Obj& m) {
            return !is_plus(m) && m.expr->kind == ProcKind::SendChan &&
                   m.expr->chan == c;
          });
          if (mi < 0) return std::nullopt;
          const Obj& m = objs[mi];
          std::string c2 = m.provides;
          std::string d = m.expr->chan2;
          o.provides = c2;
          o.expr = rename_chans(p->cont, {{c, c2}, {y, d}});
          cfg.chan_types.erase(c);
          erase_at(mi);
          return "-oC";
        }
        // (⊗C)
        int mi = find_msg([&](const Obj& m) {
          return is_plus(m) && m.expr->kind == ProcKind::SendChan &&
                 m.provides == c;
        });
        if (mi < 0) return std::nullopt;
        const Obj& m = objs[mi];
        std::string c2 = m.expr->cont->chan2;  // fwd c c2
        std::string d = m.expr->chan2;
        o.expr = rename_chans(p->cont, {{c, c2}, {y, d}});
        cfg.chan_types.erase(c);
        erase_at(mi);
        return "*C";
      }

      case ProcKind::Wait: {  // (1C)
        std::string c = p->chan;
        int mi = find_msg([&](const Obj& m) {
          return m.expr->kind == ProcKind::Close && m.provides == c;
        });
        if (mi < 0) return std::nullopt;
        o.expr = p->cont;
        cfg.chan_types.erase(c);
        erase_at(mi);
        return "1C";
      }

      case ProcKind::Fwd: {
        std::string c = p->chan, d = p->chan2;
        // (id⁺C): a message providing d is re-addressed to provide c.
        int mi = find_msg([&](const Obj& m) { return m.provides == d; });
        if (mi >= 0) {
          Obj& m = objs[mi];
          m.expr = rename_chans(m.expr, {{d, c}});
          m.provides = m.provides == d ? c : m.provides;
          cfg.chan_types.erase(d);
          erase_at(i);
          return "id+C";
        }
        // (id⁻C): a message using c is re-addressed to use d.
        mi = find_msg([&](const Obj& m) {
          return m.provides != c && m.expr->chan == c && !is_plus(m);
        });
        if (mi >= 0) {
          Obj& m = objs[mi];
          m.expr = rename_chans(m.expr, {{c, d}});
          cfg.chan_types.erase(c);
          erase_at(i);
          return "id-C";
        }
        return std::nullopt;
      }

      case ProcKind::TailCall:
      case ProcKind::Spawn: {  // (defC)
        ProcRef call = p;
        if (p->kind == ProcKind::TailCall) {
          // x <- f ȳ stands for x' <- f ȳ ; x <-> x'.
          call = ProcExpr::spawn("%tail", p->procname, p->typeargs,
                                 p->chanargs, ProcExpr::fwd(self, "%tail"));
        }
        auto dit = sig_.procdecls.find(call->procname);
        auto fit = sig_.procdefs.find(call->procname);
        if (dit == sig_.procdecls.end() || fit == sig_.procdefs.end())
          throw std::runtime_error("undefined process " + call->procname);
        const ProcDecl& decl = dit->second;
        const ProcDef& def = fit->second;
        std::string a = cfg.fresh_chan();

        std::map<std::string, TypeRef> tsub_def, tsub_decl;
        for (size_t k = 0; k < def.typeparams.size(); ++k)
          tsub_def[def.typeparams[k]] = call->typeargs[k];
        for (size_t k = 0; k < decl.typeparams.size(); ++k)
          tsub_decl[decl.typeparams[k]] = call->typeargs[k];

        std::map<std::string, std::string> csub;
        csub[def.offered] = a;
        for (size_t k = 0; k < def.chanargs.size(); ++k)
          csub[def.chanargs[k]] = call->chanargs[k];

        ProcRef body = subst_types_in_proc(def.body, tsub_def);
        body = rename_chans(body, csub);
        cfg.chan_types[a] = substitute(decl.offers.second, tsub_decl);

        o.expr = rename_chans(call->cont, {{call->chan2, a}});
        objs.push_back({false, a, body, cfg.fresh_id()});
        return "defC";
      }
    }
    return std::nullopt;
  };

  int n = static_cast<int>(objs.size());
  for (int k = 0; k < n; ++k) {
    int i = policy == 0 ? k : n - 1 - k;
    if (auto tag = attempt(i)) return tag;
  }
  return std::nullopt;
}

void Runtime::observe(Configuration& cfg, std::vector<std::string>& stack,
                      std::vector<std::string>& transcript) {
  bool progressed = true;
  while (progressed && !stack.empty()) {
    progressed = false;
    const std::string& top = stack.back();
    for (size_t i = 0; i < cfg.objects.size(); ++i) {
      const Obj& m = cfg.objects[i];
      if (!m.is_msg || m.provides != top || !is_plus(m)) continue;
      if (m.expr->kind == ProcKind::SendLabel) {
        transcript.push_back(m.expr->label);
        std::string c2 = m.expr->cont->chan2;
        cfg.chan_types.erase(top);
        stack.back() = c2;
      } else if (m.expr->kind == ProcKind::SendChan) {
        transcript.push_back("(");
        std::string c2 = m.expr->cont->chan2;
        std::string d = m.expr->chan2;
        cfg.chan_types.erase(top);
        stack.back() = c2;
        stack.push_back(d);  // observe the passed channel depth-first
      } else {  // close
        transcript.push_back("close");
        cfg.chan_types.erase(top);
        stack.pop_back();
      }
      cfg.objects.erase(cfg.objects.begin() + i);
      progressed = true;
      break;
    }
  }
}

bool Runtime::is_poised(const Configuration& cfg) const {
  for (const Obj& o : cfg.objects) {
    if (o.is_msg) {
      if (!is_plus(o)) return false;
      continue;
    }
    const ProcRef& p = o.expr;
    bool receiving_on_own =
        (p->kind == ProcKind::Case || p->kind == ProcKind::RecvChan) &&
        p->chan == o.provides;
    if (!receiving_on_own) return false;
  }
  return true;
}

RunResult Runtime::run(const std::string& procname, long max_steps, int policy,
                       bool record_trace) {
  RunResult res;
  std::string ext;
  res.cfg = spawn_main(procname, &ext);
  std::vector<std::string> stack{ext};
  while (true) {
    observe(res.cfg, stack, res.transcript);
    if (res.steps >= max_steps) {
      res.status = RunStatus::StepLimit;
      return res;
    }
    auto tag = step(res.cfg, policy);
    if (!tag) {
      observe(res.cfg, stack, res.transcript);
      res.status = is_poised(res.cfg) ? RunStatus::Poised : RunStatus::Stuck;
      return res;
    }
    ++res.steps;
    if (record_trace) res.trace.push_back(*tag);
  }
}

std::vector<Diagnostic> Runtime::type_config(
    const Configuration& cfg, const std::map<std::string, TypeRef>& uses,
    const std::set<std::string>& offers) {
  std::vector<Diagnostic> diags;
  auto err = [&](const std::string& code, const std::string& msg) {
    diags.push_back({Severity::Error, code, msg, {}});
  };

  std::map<std::string, int> provider;  // channel → object index
  for (size_t i = 0; i < cfg.objects.size(); ++i) {
    const Obj& o = cfg.objects[i];
    if (!provider.emplace(o.provides, static_cast<int>(i)).second)
      err("DuplicateProvider", "two objects provide " + o.provides);
  }

  std::map<std::string, int> client;
  std::vector<std::set<std::string>> used(cfg.objects.size());
  for (size_t i = 0; i < cfg.objects.size(); ++i) {
    const Obj& o = cfg.objects[i];
    used[i] = free_chans(o.expr);
    used[i].erase(o.provides);
    for (const auto& u : used[i]) {
      if (!provider.count(u) && !uses.count(u))
        err("UnknownChannel", "channel " + u + " has no provider");
      if (!client.emplace(u, static_cast<int>(i)).second)
        err("LinearityViolation", "channel " + u + " has two clients");
    }
  }

  // Offered channels are exactly the provided ones without a client.
  std::set<std::string> computed;
  for (const auto& [c, i] : provider)
    if (!client.count(c)) computed.insert(c);
  if (computed != offers) {
    std::string got, want;
    for (const auto& c : computed) got += c + " ";
    for (const auto& c : offers) want += c + " ";
    err("OfferMismatch", "configuration offers {" + got + "} expected {" +
                             want + "}");
  }

  // comp-rule ordering exists iff provider-to-client dependencies are acyclic.
  std::vector<int> state(cfg.objects.size(), 0);
  std::function<bool(int)> dfs = [&](int i) -> bool {
    state[i] = 1;
    for (const auto& u : used[i]) {
      auto it = provider.find(u);
      if (it == provider.end()) continue;
      if (state[it->second] == 1) return false;
      if (state[it->second] == 0 && !dfs(it->second)) return false;
    }
    state[i] = 2;
    return true;
  };
  for (size_t i = 0; i < cfg.objects.size(); ++i)
    if (state[i] == 0 && !dfs(static_cast<int>(i)))
      err("NoValidOrdering", "cyclic channel dependency");

  for (size_t i = 0; i < cfg.objects.size(); ++i) {
    const Obj& o = cfg.objects[i];
    std::map<std::string, TypeRef> delta;
    bool missing = false;
    for (const auto& u : used[i]) {
      auto it = cfg.chan_types.find(u);
      if (it == cfg.chan_types.end()) {
        auto it2 = uses.find(u);
        if (it2 == uses.end()) {
          err("UnknownChannel", "no type recorded for channel " + u);
          missing = true;
          break;
        }
        delta[u] = it2->second;
      } else {
        delta[u] = it->second;
      }
    }
    if (missing) continue;
    auto ti = cfg.chan_types.find(o.provides);
    if (ti == cfg.chan_types.end()) {
      err("UnknownChannel", "no type recorded for channel " + o.provides);
      continue;
    }
    auto ds = checker_.check_process({}, delta, o.expr, o.provides, ti->second);
    diags.insert(diags.end(), ds.begin(), ds.end());
  }
  return diags;
}

}  // namespace nst
