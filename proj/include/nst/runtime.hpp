#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "nst/ast.hpp"
#include "nst/checker.hpp"
#include "nst/diag.hpp"

namespace nst {

// A semantic object: a running process or a message in flight. Messages are
// represented by restricted process terms ("c.k ; c <-> c'",
// "send c d ; c <-> c'", "close c") so configuration typing can reuse the
// process checker unchanged.
struct Obj {
  bool is_msg = false;
  std::string provides;
  ProcRef expr;
  long id = 0;  // creation order
};

struct Configuration {
  std::vector<Obj> objects;  // kept in creation order
  // Types of all live channels, maintained by the step rules; the basis of
  // the preservation harness.
  std::map<std::string, TypeRef> chan_types;
  long next_id = 0;
  long next_chan = 0;

  std::string fresh_chan() { return "%c" + std::to_string(next_chan++); }
  long fresh_id() { return next_id++; }
};

enum class RunStatus { Poised, StepLimit, Stuck };

struct RunResult {
  Configuration cfg;
  std::vector<std::string> transcript;  // observed events on the main channel
  RunStatus status = RunStatus::Poised;
  long steps = 0;
  std::vector<std::string> trace;  // fired rule tags, when requested
};

// Multiset-rewriting interpreter with a deterministic scheduler. Policy 0
// scans objects in creation order and fires the first enabled rule; policy 1
// scans in reverse (used by the confluence test).
class Runtime {
 public:
  explicit Runtime(const Signature& sig, int depth_bound = 1);

  const Signature& signature() const { return sig_; }

  // Initial configuration for a declared process with no used channels and
  // no type parameters; its offered channel becomes the external channel.
  Configuration spawn_main(const std::string& procname, std::string* ext);

  // Fires exactly one enabled rule; returns its tag, or nullopt when
  // quiescent.
  std::optional<std::string> step(Configuration& cfg, int policy = 0);

  // Runs to quiescence or budget, consuming messages on the external
  // channel into a transcript (labels, "(" for a channel hand-off observed
  // depth-first, "close").
  RunResult run(const std::string& procname, long max_steps = 100000,
                int policy = 0, bool record_trace = false);

  // Consumes any messages offered on the observation stack channels,
  // appending decoded events; exposed so tests can interleave observation
  // with manual stepping.
  void observe(Configuration& cfg, std::vector<std::string>& stack,
               std::vector<std::string>& transcript);

  bool is_poised(const Configuration& cfg) const;

  // Configuration typing Δ1 ⊩ cfg :: Δ2: distinct providers, linear clients,
  // an acyclic provider-before-client ordering, and every object checked by
  // the process checker at 𝒱 = ∅ with types from chan_types.
  std::vector<Diagnostic> type_config(const Configuration& cfg,
                                      const std::map<std::string, TypeRef>& uses,
                                      const std::set<std::string>& offers);

 private:
  Signature sig_;
  Checker checker_;
};

}  // namespace nst
