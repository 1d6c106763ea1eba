#include <doctest.h>

#include "family.hpp"
#include "funcert/oracle.hpp"

using namespace funcert;
using funcert::testing::built;

TEST_CASE("relate_words follows the definitions") {
  Alphabet al({"f", "g"});
  auto words = funcert::testing::all_words(al, 4);
  for (const auto& u : words)
    for (const auto& v : words) {
      auto r = relate_words(u, v);
      CHECK(r == path_relation(u, v));
    }
  auto f = Feature{0}, g = Feature{1};
  CHECK(relate_words({f}, {f, g}) == Relation::kProperPrefix);
  CHECK(relate_words({f, g}, {f}) == Relation::kProperSuffixOf);
  CHECK(relate_words({f, g}, {g}) == Relation::kDiverge);
  CHECK(relate_words({g, f}, {g, f}) == Relation::kEqual);
}

TEST_CASE("evaluate checks each constraint kind") {
  auto b = built("features f, g; sorts A; x f y; A(y); x $m z; in($m, f.g);");
  FeatureGraph g;
  Node x = g.add_node(), y = g.add_node(), z = g.add_node();
  g.set_edge(x, b.feat("f"), y);
  g.set_edge(y, b.feat("g"), z);
  g.set_sort(y, 0);
  Valuation v;
  v.fo = {{FoVar{0}, x}, {FoVar{1}, y}, {FoVar{2}, z}};
  v.path[PathVar{0}] = {b.feat("f"), b.feat("g")};
  CHECK(evaluate(b.clause, g, v, *b.store));

  auto wrong = v;
  wrong.path[PathVar{0}] = {b.feat("f")};
  CHECK(!evaluate(b.clause, g, wrong, *b.store));

  auto unsorted = g;
  unsorted.set_sort(x, 0);
  CHECK(evaluate(b.clause, unsorted, v, *b.store));
  CHECK(!evaluate(Clause::bottom(b.clause.signature()), g, v, *b.store));

  Valuation partial = v;
  partial.fo.erase(FoVar{2});
  CHECK(!evaluate(b.clause, g, partial, *b.store));
}

TEST_CASE("bounded_sat on the sample problems") {
  auto topic = built("features comp, obj, topic; s topic x; s <comp* . obj> x;");
  auto m = bounded_sat(topic.clause, *topic.store, 3, 6);
  REQUIRE(m);
  CHECK(m->valuation.path.at(PathVar{0}) == Word{topic.feat("obj")});
  CHECK(m->graph.num_nodes() == 2);

  auto cyclic = built("features f; sorts A, B; x <f+> x; x f y; A(x); B(y);");
  auto c = bounded_sat(cyclic.clause, *cyclic.store, 3, 6);
  REQUIRE(c);
  CHECK(c->valuation.path.at(PathVar{0}).size() == 2);
  CHECK(c->graph.num_nodes() == 2);
  CHECK(c->graph.sort(*c->graph.anchor_of(0)) != c->graph.sort(*c->graph.anchor_of(1)));

  auto parity = built("features f; x $m y; x $n z; div($m, $n); in($m, f+); in($n, (f.f)+);");
  CHECK(!bounded_sat(parity.clause, *parity.store, 3, 6));
  CHECK(!bounded_sat(Clause::bottom(parity.clause.signature()), *parity.store));
}

TEST_CASE("bounded_sat respects the node bound") {
  auto b = built("features f; x f y; y f z; z f w;");
  CHECK(bounded_sat(b.clause, *b.store, 3, 4));
  CHECK(!bounded_sat(b.clause, *b.store, 3, 3));
}

TEST_CASE("bounded_sat merges nodes forced equal by functionality") {
  auto b = built("features f; sorts A, B; x f y; x f z; A(y); B(z);");
  CHECK(!bounded_sat(b.clause, *b.store));
  auto ok = built("features f; sorts A; x f y; x f z; A(y);");
  auto m = bounded_sat(ok.clause, *ok.store);
  REQUIRE(m);
  CHECK(m->valuation.fo.at(FoVar{1}) == m->valuation.fo.at(FoVar{2}));
}

TEST_CASE("property: models returned by bounded_sat evaluate to true") {
  funcert::testing::PrimeFamily family(99);
  auto store = family.store();
  int found = 0;
  for (int n = 0; n < 150; ++n) {
    auto phi = family.next();
    if (auto m = bounded_sat(phi, *store, 3, 6)) {
      ++found;
      CHECK(evaluate(phi, m->graph, m->valuation, *store));
    }
  }
  CHECK(found > 0);
}
