#include <doctest.h>

#include <algorithm>

#include "family.hpp"
#include "funcert/error.hpp"
#include "funcert/oracle.hpp"
#include "funcert/solver.hpp"

using namespace funcert;
using funcert::testing::built;

namespace {

const char* kTopic = "features comp, obj, topic; s topic x; s <comp* . obj> x;";
const char* kParity = "features f; x $m y; x $n z; div($m, $n); in($m, f+); in($n, (f.f)+);";
const char* kCyclic = "features f; sorts A, B; x <f+> x; x f y; A(x); B(y);";

SolveOptions with(Control c, bool witness = true) {
  SolveOptions o;
  o.control = c;
  o.witness = witness;
  return o;
}

}  // namespace

TEST_CASE("solve: topicalization is sat under every control with checked witnesses") {
  for (auto c : {Control::basic(), Control::quasi(), Control::km(), Control::heuristic()}) {
    auto r = solve(kTopic, with(c));
    CHECK(r.status == Status::kSat);
    REQUIRE(!r.witnesses.empty());
    CHECK(std::all_of(r.witness_checked.begin(), r.witness_checked.end(), [](bool b) { return b; }));
    CHECK(r.diagnostics.empty());
  }
}

TEST_CASE("solve: the parity divergence is unsat") {
  for (auto c : {Control::basic(), Control::quasi(), Control::km(), Control::heuristic()}) {
    auto r = solve(kParity, with(c));
    CHECK(r.status == Status::kUnsat);
    CHECK(r.clauses.empty());
    CHECK(r.witnesses.empty());
  }
}

TEST_CASE("solve: cyclic clause is unknown under Basic and sat under Quasi") {
  auto basic = solve(kCyclic, with(Control::basic()));
  CHECK(basic.status == Status::kUnknown);
  CHECK(basic.loop_detected);
  REQUIRE(basic.diagnostics.size() == 1);
  CHECK(basic.diagnostics[0] == "loop detected; retry with --control quasi");

  auto quasi = solve(kCyclic, with(Control::quasi()));
  CHECK(quasi.status == Status::kSat);
  REQUIRE(quasi.witnesses.size() == 1);
  CHECK(quasi.witness_checked[0]);

  auto opts = with(Control::basic());
  opts.auto_retry = true;
  auto retried = solve(kCyclic, opts);
  CHECK(retried.status == Status::kSat);
  CHECK(retried.control.kind == Control::Kind::kQuasi);
}

TEST_CASE("solve: step limit gives unknown with a diagnostic") {
  auto opts = with(Control::basic(), false);
  opts.limits.max_steps = 2;
  auto r = solve(kTopic, opts);
  CHECK(r.status == Status::kUnknown);
  CHECK(r.limit_exceeded);
  CHECK(!r.diagnostics.empty());
}

TEST_CASE("solve: pre-solved emission reports the clause before solving") {
  auto opts = with(Control::quasi(), false);
  opts.emit = Emit::kPresolved;
  auto r = solve(kParity, opts);
  CHECK(r.status == Status::kUnsat);
  REQUIRE(r.clauses.size() == 1);
  CHECK(classify(r.clauses[0], *r.store).presolved);
  CHECK(!classify(r.clauses[0], *r.store).solved);
}

TEST_CASE("solve: parse errors carry a position") {
  CHECK_THROWS_AS(solve("features f; x <f+ y;", {}), ParseError);
  try {
    solve("features f;\nx g y;", {});
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).rfind("2:", 0) == 0);
  }
}

TEST_CASE("extract_witness examples") {
  auto edge = built("features f; sorts A; x f y; A(x);");
  auto g = extract_witness(edge.clause, *edge.store);
  CHECK(g.num_nodes() == 2);
  CHECK(g.edges().size() == 1);
  CHECK(g.sort(*g.anchor_of(0)) == 0u);

  auto even = built("features f; x <(f.f)+> y;");
  auto e = extract_witness(even.clause, *even.store);
  CHECK(e.num_nodes() == 3);
  CHECK(e.walk(*e.anchor_of(0), Word{even.feat("f"), even.feat("f")}) == e.anchor_of(1));

  auto loop = built("features f; x <f.f*> x;");
  auto l = extract_witness(loop.clause, *loop.store);
  CHECK(l.num_nodes() == 1);
  CHECK(l.next(0, loop.feat("f")) == Node{0});

  auto parity = built(kParity);
  CHECK_THROWS_AS(extract_witness(parity.clause, *parity.store), InvariantViolation);
  CHECK_THROWS_AS(extract_witness(Clause::bottom(parity.clause.signature()), *parity.store), InvariantViolation);
}

TEST_CASE("check_model accepts witnesses and rejects corrupted ones") {
  auto r = solve(kTopic, with(Control::quasi()));
  REQUIRE(!r.witnesses.empty());
  for (const auto& w : r.witnesses) {
    CHECK(check_model(w, *r.input, *r.store));
    for (const auto& [key, to] : w.edges()) {
      auto broken = w;
      broken.remove_edge(key.first, key.second);
      CHECK(!check_model(broken, *r.input, *r.store));
    }
  }
  auto parity = built(kParity);
  FeatureGraph g;
  Node x = g.add_node(), y = g.add_node(), z = g.add_node();
  g.set_edge(x, parity.feat("f"), y);
  g.set_edge(y, parity.feat("f"), z);
  for (std::uint32_t v = 0; v < 3; ++v) g.anchor(v, v);
  CHECK(!check_model(g, parity.clause, *parity.store));
}

TEST_CASE("property: witnesses round-trip and controls agree on the random family") {
  funcert::testing::PrimeFamily family(2024);
  auto store = family.store();
  for (int n = 0; n < 120; ++n) {
    auto phi = family.next();
    std::vector<Status> verdicts;
    for (auto c : {Control::basic(), Control::quasi(), Control::km()}) {
      auto r = solve(phi, store, with(c));
      INFO(render(phi, *store));
      for (std::size_t i = 0; i < r.witnesses.size(); ++i) CHECK(r.witness_checked[i]);
      if (r.status == Status::kSat) CHECK(!r.witnesses.empty());
      if (r.status != Status::kUnknown) verdicts.push_back(r.status);
      if (r.status == Status::kUnknown) CHECK((r.loop_detected || r.limit_exceeded));
    }
    for (auto v : verdicts) CHECK(v == verdicts.front());
  }
}
