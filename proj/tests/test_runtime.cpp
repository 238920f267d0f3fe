#include "doctest.h"
#include "helpers.hpp"

#include <random>

#include "nst/runtime.hpp"
#include "nst/syntax.hpp"

using namespace nst;
using testutil::parse_sig;

TEST_CASE("run: a closing main yields [close] and poise") {
  Signature sig = parse_sig(
      "decl main : . |- (c : 1)\n"
      "proc c <- main = close c\n");
  Runtime rt(sig);
  RunResult res = rt.run("main");
  CHECK(res.transcript == std::vector<std::string>{"close"});
  CHECK(res.status == RunStatus::Poised);
}

TEST_CASE("step: ⊕S turns a sender into a message plus continuation") {
  Signature sig = parse_sig(
      "type two = +{ a : 1 }\n"
      "decl main : . |- (c : two)\n"
      "proc c <- main = c.a ; close c\n");
  Runtime rt(sig);
  std::string ext;
  Configuration cfg = rt.spawn_main("main", &ext);
  REQUIRE(cfg.objects.size() == 1);
  auto tag = rt.step(cfg);
  REQUIRE(tag.has_value());
  CHECK(*tag == "+S");
  REQUIRE(cfg.objects.size() == 2);
  int msgs = 0;
  for (const auto& o : cfg.objects)
    if (o.is_msg) {
      ++msgs;
      CHECK(o.provides == ext);
      CHECK(o.expr->kind == ProcKind::SendLabel);
    }
  CHECK(msgs == 1);
}

TEST_CASE("step: 1C consumes a close message and unblocks the waiter") {
  Signature sig = parse_sig(
      "decl sub : . |- (d : 1)\n"
      "proc d <- sub = close d\n"
      "decl main : . |- (c : 1)\n"
      "proc c <- main = d <- sub ; wait d ; close c\n");
  Runtime rt(sig);
  std::string ext;
  Configuration cfg = rt.spawn_main("main", &ext);
  std::vector<std::string> tags;
  while (auto tag = rt.step(cfg)) tags.push_back(*tag);
  // defC spawns sub, 1S emits close d, 1C consumes it, 1S emits close c.
  CHECK(tags == std::vector<std::string>{"defC", "1S", "1C", "1S"});
  CHECK(rt.is_poised(cfg));
}

TEST_CASE("is_poised: receiver on own channel, waiter on other channel, message") {
  Signature sig = parse_sig(
      "type two = +{ a : 1 }\n"
      "decl noop : (x : two) |- (c : 1)\n"
      "proc c <- noop x = case x ( a => wait x ; close c )\n"
      "decl main : . |- (c : two)\n"
      "proc c <- main = c.a ; close c\n");
  Runtime rt(sig);

  // A case on the *offered* channel is poised.
  Signature sig2 = parse_sig(
      "type ext = &{ go : 1 }\n"
      "decl main : . |- (c : ext)\n"
      "proc c <- main = case c ( go => close c )\n");
  Runtime rt2(sig2);
  std::string e2;
  Configuration c2 = rt2.spawn_main("main", &e2);
  CHECK(rt2.is_poised(c2));

  // A sender's message is poised; a waiter on a used channel is not.
  std::string e1;
  Configuration c1 = rt.spawn_main("main", &e1);
  rt.step(c1);  // +S: now a plus-message and a close-continuation
  // the close continuation is not a receiver; only after it fires is all poised
  while (auto t = rt.step(c1)) (void)t;
  CHECK(rt.is_poised(c1));
}

TEST_CASE("forwarding: both directions erase the forwarder") {
  // id+C: message toward the client passes through c <-> d.
  Signature sig = parse_sig(
      "type two = +{ a : 1 }\n"
      "decl sub : . |- (d : two)\n"
      "proc d <- sub = d.a ; close d\n"
      "decl main : . |- (c : two)\n"
      "proc c <- main = d <- sub ; c <-> d\n");
  Runtime rt(sig);
  RunResult res = rt.run("main");
  CHECK(res.transcript == std::vector<std::string>{"a", "close"});
  CHECK(res.status == RunStatus::Poised);
  bool saw_fwd = false;
  Runtime rt2(sig);
  RunResult traced = rt2.run("main", 100000, 0, true);
  for (const auto& tag : traced.trace)
    if (tag == "id+C" || tag == "id-C") saw_fwd = true;
  CHECK(saw_fwd);
}

TEST_CASE("channel hand-off is observed depth-first") {
  Signature sig = parse_sig(
      "type two = +{ a : 1 }\n"
      "decl payload : . |- (d : two)\n"
      "proc d <- payload = d.a ; close d\n"
      "decl main : . |- (c : two * 1)\n"
      "proc c <- main = d <- payload ; send c d ; close c\n");
  Runtime rt(sig);
  RunResult res = rt.run("main");
  CHECK(res.transcript ==
        std::vector<std::string>{"(", "a", "close", "close"});
  CHECK(res.status == RunStatus::Poised);
}

TEST_CASE("expression server: a + 2b with a=5, b=3 is binary 11") {
  Signature sig = testutil::load_corpus("exprserver.nst");
  Runtime rt(sig);
  RunResult res = rt.run("main");
  CHECK(res.transcript ==
        std::vector<std::string>{"b1", "b1", "b0", "b1", "$", "close"});
  CHECK(res.status == RunStatus::Poised);
}

TEST_CASE("preservation: type_config holds along the expression-server run") {
  Signature sig = testutil::load_corpus("exprserver.nst");
  Runtime rt(sig);
  std::string ext;
  Configuration cfg = rt.spawn_main("main", &ext);
  CHECK(rt.type_config(cfg, {}, {ext}).empty());
  for (int i = 0; i < 100; ++i) {
    auto tag = rt.step(cfg);
    if (!tag) break;
    auto ds = rt.type_config(cfg, {}, {ext});
    for (const auto& d : ds) INFO("after step " << i << " (" << *tag
                                                << "): " << d.str());
    CHECK(ds.empty());
  }
}

TEST_CASE("progress: a checked program never gets stuck") {
  for (const char* proc : {"main"}) {
    Signature sig = testutil::load_corpus("exprserver.nst");
    Runtime rt(sig);
    RunResult res = rt.run(proc);
    CHECK(res.status == RunStatus::Poised);
  }
}

TEST_CASE("provided channels stay distinct across a run") {
  Signature sig = testutil::load_corpus("exprserver.nst");
  Runtime rt(sig);
  std::string ext;
  Configuration cfg = rt.spawn_main("main", &ext);
  for (int i = 0; i < 300; ++i) {
    std::set<std::string> provided;
    for (const auto& o : cfg.objects) CHECK(provided.insert(o.provides).second);
    if (!rt.step(cfg)) break;
  }
}

TEST_CASE("confluence: both scheduling policies produce the same transcript") {
  for (const char* file : {"exprserver.nst"}) {
    Signature sig = testutil::load_corpus(file);
    Runtime rt(sig);
    RunResult r0 = rt.run("main", 100000, 0);
    RunResult r1 = rt.run("main", 100000, 1);
    CHECK(r0.transcript == r1.transcript);
    CHECK(r0.status == r1.status);
  }
}

TEST_CASE("type_config: duplicate providers are rejected") {
  Signature sig = parse_sig(
      "decl main : . |- (c : 1)\n"
      "proc c <- main = close c\n");
  Runtime rt(sig);
  std::string ext;
  Configuration cfg = rt.spawn_main("main", &ext);
  Obj dup = cfg.objects[0];
  dup.id = cfg.fresh_id();
  cfg.objects.push_back(dup);
  auto ds = rt.type_config(cfg, {}, {ext});
  bool found = false;
  for (const auto& d : ds)
    if (d.code == "DuplicateProvider") found = true;
  CHECK(found);
}

TEST_CASE("step limit reporting") {
  Signature sig = parse_sig(
      "type R = +{ a : R }\n"
      "decl main : . |- (c : R)\n"
      "proc c <- main = c.a ; c <- main\n");
  Runtime rt(sig);
  RunResult res = rt.run("main", 50);
  CHECK(res.status == RunStatus::StepLimit);
  CHECK(res.steps == 50);
  // All observed events are +a labels.
  for (const auto& e : res.transcript) CHECK(e == "a");
}

// ---------------------------------------------------------------------------
// Serialize → deserialize round trip on random trees.
// ---------------------------------------------------------------------------
namespace {

// Builds a program that constructs a random Tree[two], serializes it, then
// deserializes the serialization and emits the reconstructed tree.
struct TreeGen {
  std::mt19937 rng;
  int next = 0;
  explicit TreeGen(unsigned seed) : rng(seed) {}

  // returns the channel name holding the tree; appends spawns to body
  std::string build(int nodes, std::string& body) {
    if (nodes <= 0) {
      std::string c = "t" + std::to_string(next++);
      body += "  " + c + " <- leaf[two] ;\n";
      return c;
    }
    int left = (int)(rng() % (unsigned)nodes);
    std::string l = build(left, body);
    std::string x = "x" + std::to_string(next++);
    body += "  " + x + " <- mk_a ;\n";
    std::string r = build(nodes - 1 - left, body);
    std::string c = "t" + std::to_string(next++);
    body += "  " + c + " <- node[two] " + l + " " + x + " " + r + " ;\n";
    return c;
  }
};

std::string tree_program(unsigned seed, int nodes, bool roundtrip) {
  TreeGen g(seed);
  std::string spawns;
  std::string root = g.build(nodes, spawns);
  std::string prog = testutil::read_file(std::string(CORPUS_DIR) +
                                         "/trees.nst");
  prog +=
      "type two = +{ v : 1 }\n"
      "decl mk_a : . |- (x : two)\n"
      "proc x <- mk_a = x.v ; close x\n"
      "decl stop : . |- (k : 1)\n"
      "proc k <- stop = close k\n";
  if (roundtrip) {
    prog +=
        "decl main : . |- (out : Tree[two] * 1)\n"
        "proc out <- main =\n" +
        spawns +
        "  k <- stop ;\n"
        "  s <- serialize[two][1] " + root + " k ;\n"
        "  out <- deserialize[two][1] s\n";
  } else {
    prog +=
        "decl wrap : (t : Tree[two]) (k : 1) |- (out : Tree[two] * 1)\n"
        "proc out <- wrap t k = send out t ; wait k ; close out\n"
        "decl main : . |- (out : Tree[two] * 1)\n"
        "proc out <- main =\n" +
        spawns +
        "  k <- stop ;\n"
        "  out <- wrap " + root + " k\n";
  }
  return prog;
}

}  // namespace

TEST_CASE("serialize then deserialize reproduces the tree transcript") {
  for (unsigned seed = 1; seed <= 10; ++seed) {
    std::mt19937 pick(seed * 77);
    int nodes = (int)(pick() % 8);  // up to 7 nodes
    Signature direct = parse_sig(tree_program(seed, nodes, false));
    Signature round = parse_sig(tree_program(seed, nodes, true));
    Runtime rd(direct), rr(round);
    RunResult a = rd.run("main");
    RunResult b = rr.run("main");
    INFO("seed " << seed << " nodes " << nodes);
    CHECK(a.status == RunStatus::Poised);
    CHECK(b.status == RunStatus::Poised);
    CHECK(a.transcript == b.transcript);
  }
}
