#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "funcert/clause.hpp"
#include "funcert/error.hpp"
#include "support.hpp"

using namespace funcert;

namespace {

struct Fixture {
  LangStore store{Alphabet({"comp", "f", "g", "obj", "topic"})};
  std::shared_ptr<Signature> sig = std::make_shared<Signature>();

  Fixture() {
    sig->sorts = {"A", "B"};
    sig->fo_names = {"x", "y", "z", "w"};
    sig->path_names = {"m", "n", "k"};
  }
  Feature feat(const char* name) const { return *store.alphabet().find(name); }
  SimpleTerm sf(const char* name) const { return SimpleTerm::of(feat(name)); }
};

const FoVar x{0}, y{1}, z{2}, w{3};
const PathVar mu{0}, nu{1}, kappa{2};

}  // namespace

TEST_CASE("path_relation trichotomy and symmetry") {
  std::mt19937 rng(17);
  Alphabet al({"f", "g"});
  auto words = funcert::testing::all_words(al, 4);
  for (const auto& u : words)
    for (const auto& v : words) {
      auto r = path_relation(u, v);
      auto back = path_relation(v, u);
      bool eq = u == v;
      bool pre = u.size() < v.size() && std::equal(u.begin(), u.end(), v.begin());
      bool suf = v.size() < u.size() && std::equal(v.begin(), v.end(), u.begin());
      REQUIRE(int(eq) + int(pre) + int(suf) <= 1);
      if (eq) REQUIRE(r == Relation::kEqual);
      else if (pre) REQUIRE(r == Relation::kProperPrefix);
      else if (suf) REQUIRE(r == Relation::kProperSuffixOf);
      else REQUIRE(r == Relation::kDiverge);
      switch (r) {
        case Relation::kEqual: REQUIRE(back == Relation::kEqual); break;
        case Relation::kProperPrefix: REQUIRE(back == Relation::kProperSuffixOf); break;
        case Relation::kProperSuffixOf: REQUIRE(back == Relation::kProperPrefix); break;
        case Relation::kDiverge: REQUIRE(back == Relation::kDiverge); break;
      }
    }
}

TEST_CASE("constraint normalisation") {
  Fixture fx;
  auto a = Constraint::div(PathTerm(nu), PathTerm(fx.feat("f")));
  auto b = Constraint::div(PathTerm(fx.feat("f")), PathTerm(nu));
  CHECK(a == b);
  CHECK(Constraint::path_eq(PathTerm(nu), PathTerm(mu)) == Constraint::path_eq(PathTerm(mu), PathTerm(nu)));
  CHECK(Constraint::prefix(PathTerm(nu), PathTerm(mu)) != Constraint::prefix(PathTerm(mu), PathTerm(nu)));
}

TEST_CASE("translate_km") {
  Fixture fx;
  auto comp = fx.feat("comp");
  auto obj = fx.feat("obj");
  auto topic = fx.feat("topic");
  auto l = fx.store.compile("comp* . obj");
  // x topic y, x comp* obj y
  Clause phi = translate_km({KmConstraint::path_of(x, {topic}, y), KmConstraint::regular(x, l, y)}, fx.sig);
  CHECK(phi.size() == 3);
  CHECK(phi.contains(Constraint::sub(x, topic, y)));
  PathVar fresh{3};
  CHECK(phi.contains(Constraint::sub(x, fresh, y)));
  CHECK(phi.contains(Constraint::restrict(fresh, l)));
  CHECK(classify(phi, fx.store).prime);

  // Multi-feature paths become chains through fresh nodes.
  Clause chain = translate_km({KmConstraint::path_of(x, {comp, obj}, y)}, fx.sig);
  FoVar mid{4};
  CHECK(chain.contains(Constraint::sub(x, comp, mid)));
  CHECK(chain.contains(Constraint::sub(mid, obj, y)));

  // Equations become bindings.
  Clause eq = translate_km({KmConstraint::sort_of(SortName{0}, x), KmConstraint::agree(x, y)}, fx.sig);
  CHECK(eq.contains(Constraint::sort_of(SortName{0}, y)));
  CHECK(eq.resolve(x) == y);
}

TEST_CASE("classify examples") {
  Fixture fx;
  auto f = fx.feat("f");
  auto g = fx.feat("g");
  auto lf = fx.store.compile("f");
  auto lfg = fx.store.compile("f|g");

  SUBCASE("prime clause") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, mu, y));
    phi.add(Constraint::restrict(mu, lfg));
    auto cl = classify(phi, fx.store);
    CHECK(cl.prime);
    CHECK(cl.admissible);
    CHECK(cl.simplified);
    CHECK(cl.presolved);
    CHECK(cl.solved);
  }
  SUBCASE("divergence blocks solved") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, mu, y));
    phi.add(Constraint::sub(x, f, z));
    phi.add(Constraint::div(PathTerm(mu), PathTerm(f)));
    auto cl = classify(phi, fx.store);
    CHECK_FALSE(cl.prime);
    CHECK(cl.admissible);
    CHECK(cl.simplified);
    CHECK(cl.presolved);
    CHECK_FALSE(cl.solved);
  }
  SUBCASE("missing divergence breaks presolved") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, mu, y));
    phi.add(Constraint::sub(x, f, z));
    auto cl = classify(phi, fx.store);
    CHECK(cl.prime);
    CHECK(cl.simplified);
    CHECK_FALSE(cl.presolved);
    CHECK_FALSE(cl.solved);
  }
  SUBCASE("sort clash is not simplified") {
    Clause phi(fx.sig);
    phi.add(Constraint::sort_of(SortName{0}, x));
    phi.add(Constraint::sort_of(SortName{1}, x));
    CHECK_FALSE(classify(phi, fx.store).simplified);
  }
  SUBCASE("feature outside its restriction") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, g, y));
    phi.add(Constraint::restrict(PathTerm(g), lf));
    CHECK_FALSE(classify(phi, fx.store).simplified);
  }
  SUBCASE("feature determinism") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, f, y));
    phi.add(Constraint::sub(x, f, z));
    CHECK_FALSE(classify(phi, fx.store).simplified);
  }
  SUBCASE("complex terms") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, mu, y));
    phi.add(Constraint::sub(x, nu, z));
    phi.add(Constraint::div(PathTerm(mu), PathTerm::concat(SimpleTerm::of(f), SimpleTerm::of(nu))));
    auto cl = classify(phi, fx.store);
    CHECK(cl.admissible);
    CHECK_FALSE(cl.simplified);
  }
  SUBCASE("bottom") {
    auto cl = classify(Clause::bottom(fx.sig), fx.store);
    CHECK(cl.solved);
  }
}

TEST_CASE("admissibility violations") {
  Fixture fx;
  auto f = fx.feat("f");
  SUBCASE("Ad1: path variable without an edge") {
    Clause phi(fx.sig);
    phi.add(Constraint::restrict(mu, fx.store.compile("f")));
    CHECK(admissibility_violation(phi) == "Ad1");
  }
  SUBCASE("Ad2: relation between terms of different nodes") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, mu, y));
    phi.add(Constraint::sub(z, nu, w));
    phi.add(Constraint::div(PathTerm(mu), PathTerm(nu)));
    CHECK(admissibility_violation(phi) == "Ad2");
  }
  SUBCASE("Ad3: prefix and path equation together") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, mu, y));
    phi.add(Constraint::sub(x, nu, z));
    phi.add(Constraint::sub(x, kappa, w));
    phi.add(Constraint::prefix(PathTerm(mu), PathTerm(nu)));
    phi.add(Constraint::path_eq(PathTerm(mu), PathTerm(kappa)));
    CHECK(admissibility_violation(phi) == "Ad3");
  }
  SUBCASE("Ad6: feature as the longer side of a prefix") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, mu, y));
    phi.add(Constraint::sub(x, f, z));
    phi.add(Constraint::prefix(PathTerm(mu), PathTerm(f)));
    CHECK(admissibility_violation(phi) == "Ad6");
  }
  SUBCASE("complex prefix") {
    Clause phi(fx.sig);
    phi.add(Constraint::sub(x, mu, y));
    phi.add(Constraint::prefix(PathTerm(f), PathTerm::concat(SimpleTerm::of(f), SimpleTerm::of(mu))));
    CHECK(admissibility_violation(phi) == "complex-prefix-or-eq");
  }
}

TEST_CASE("outgoing and tagged variable") {
  Fixture fx;
  auto f = fx.feat("f");
  Clause phi(fx.sig);
  phi.add(Constraint::sub(x, f, y));
  phi.add(Constraint::sub(x, mu, z));
  phi.add(Constraint::sub(y, nu, w));
  CHECK(outgoing(phi, x) == std::set<SimpleTerm>{fx.sf("f"), SimpleTerm::of(mu)});
  CHECK(outgoing(phi, z).empty());
  CHECK_FALSE(tagged_variable(phi));

  phi.add(Constraint::prefix(PathTerm(f), PathTerm(mu)));
  CHECK(tagged_variable(phi) == x);

  phi.add(Constraint::sub(y, kappa, z));
  phi.add(Constraint::prefix(PathTerm(kappa), PathTerm(nu)));
  CHECK_THROWS_AS(tagged_variable(phi), InvariantViolation);
  CHECK(admissibility_violation(phi) == "Ad4");
}

TEST_CASE("subst_path_var") {
  Fixture fx;
  auto f = fx.feat("f");
  Clause phi(fx.sig);
  phi.add(Constraint::sub(x, mu, y));
  phi.add(Constraint::sub(x, nu, z));
  phi.add(Constraint::div(PathTerm(mu), PathTerm(nu)));

  auto by_feature = subst_path_var(phi, mu, PathTerm(f));
  CHECK(by_feature.contains(Constraint::sub(x, f, y)));
  CHECK(by_feature.contains(Constraint::div(PathTerm(f), PathTerm(nu))));

  Clause cx(fx.sig);
  cx.add(Constraint::sub(x, nu, z));
  cx.add(Constraint::div(PathTerm::concat(SimpleTerm::of(f), SimpleTerm::of(mu)), PathTerm(nu)));
  auto inner = subst_path_var(cx, mu, PathTerm(kappa));
  CHECK(inner.contains(Constraint::div(PathTerm::concat(SimpleTerm::of(f), SimpleTerm::of(kappa)), PathTerm(nu))));
  CHECK_THROWS_AS(subst_path_var(cx, mu, PathTerm::concat(SimpleTerm::of(f), SimpleTerm::of(f))),
                  InvariantViolation);
  CHECK_THROWS_AS(subst_path_var(phi, mu, PathTerm::concat(SimpleTerm::of(f), SimpleTerm::of(kappa))),
                  InvariantViolation);
}

TEST_CASE("subst_fo_var") {
  Fixture fx;
  auto f = fx.feat("f");
  Clause phi(fx.sig);
  phi.add(Constraint::sub(x, f, y));
  phi.add(Constraint::sort_of(SortName{0}, y));
  auto out = subst_fo_var(phi, y, z);
  CHECK(out.contains(Constraint::sub(x, f, z)));
  CHECK(out.contains(Constraint::sort_of(SortName{0}, z)));
  CHECK(out.resolve(y) == z);
  auto again = subst_fo_var(out, z, w);
  CHECK(again.resolve(y) == w);
  CHECK_THROWS_AS(subst_fo_var(phi, x, x), InvariantViolation);
}

TEST_CASE("render") {
  Fixture fx;
  auto f = fx.feat("f");
  Clause phi(fx.sig);
  phi.add(Constraint::sub(x, mu, y));
  phi.add(Constraint::restrict(mu, fx.store.compile("comp* . obj")));
  phi.add(Constraint::div(PathTerm(mu), PathTerm::concat(SimpleTerm::of(f), SimpleTerm::of(nu))));
  auto text = render(phi, fx.store);
  CHECK(text.find("x <$m> y") != std::string::npos);
  CHECK(text.find("div(f.$n, $m)") != std::string::npos);
  CHECK(text.find("in($m, comp* . obj)") != std::string::npos);
  CHECK(render(Clause::bottom(fx.sig), fx.store) == "bottom\n");
}

// --- properties -----------------------------------------------------------

namespace {

Clause random_clause(std::mt19937& rng, Fixture& fx, int n_fo, int n_path, int n_constraints) {
  Clause phi(fx.sig);
  std::uniform_int_distribution<int> fo(0, n_fo - 1);
  std::uniform_int_distribution<int> pv(0, n_path - 1);
  std::uniform_int_distribution<int> kind(0, 5);
  std::uniform_int_distribution<int> feat(0, 4);
  auto simple = [&]() -> SimpleTerm {
    if (rng() % 2) return SimpleTerm::of(Feature{static_cast<std::uint16_t>(feat(rng))});
    return SimpleTerm::of(PathVar{static_cast<std::uint32_t>(pv(rng))});
  };
  auto fov = [&] { return FoVar{static_cast<std::uint32_t>(fo(rng))}; };
  std::vector<LangId> langs{fx.store.compile("f"), fx.store.compile("f|g"), fx.store.compile("comp*obj")};
  for (int i = 0; i < n_constraints; ++i) {
    switch (kind(rng)) {
      case 0: phi.add(Constraint::sort_of(SortName{static_cast<std::uint32_t>(rng() % 2)}, fov())); break;
      case 1: phi.add(Constraint::sub(fov(), simple(), fov())); break;
      case 2: phi.add(Constraint::div(simple(), PathTerm::concat(simple(), simple()))); break;
      case 3: phi.add(Constraint::prefix(simple(), simple())); break;
      case 4: phi.add(Constraint::path_eq(simple(), simple())); break;
      default: phi.add(Constraint::restrict(simple(), langs[rng() % langs.size()])); break;
    }
  }
  return phi;
}

// Applies a bijective renaming of all variables.
Clause rename(const Clause& phi, const std::vector<std::uint32_t>& fo_perm, const std::vector<std::uint32_t>& pv_perm) {
  auto st = [&](SimpleTerm s) { return s.is_var() ? SimpleTerm::of(PathVar{pv_perm[s.id]}) : s; };
  auto pt = [&](const PathTerm& t) { return t.is_complex ? PathTerm::concat(st(t.head), st(t.tail)) : PathTerm(st(t.head)); };
  auto fv = [&](FoVar v) { return FoVar{fo_perm[v.id]}; };
  Clause out(phi.signature());
  for (const auto& c : phi.constraints()) {
    switch (c.kind) {
      case ConstraintKind::kSort: out.add(Constraint::sort_of(c.sort, fv(c.x))); break;
      case ConstraintKind::kSub: out.add(Constraint::sub(fv(c.x), pt(c.p), fv(c.y))); break;
      case ConstraintKind::kDiv: out.add(Constraint::div(pt(c.p), pt(c.q))); break;
      case ConstraintKind::kPrefix: out.add(Constraint::prefix(pt(c.p), pt(c.q))); break;
      case ConstraintKind::kPathEq: out.add(Constraint::path_eq(pt(c.p), pt(c.q))); break;
      case ConstraintKind::kRestrict: out.add(Constraint::restrict(pt(c.p), c.lang)); break;
      default: break;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("property: canonicalize is invariant under renaming and separates different clauses") {
  Fixture fx;
  std::mt19937 rng(23);
  std::vector<std::uint32_t> fo_perm(4), pv_perm(3);
  for (int round = 0; round < 300; ++round) {
    auto phi = random_clause(rng, fx, 4, 3, 1 + static_cast<int>(rng() % 7));
    std::iota(fo_perm.begin(), fo_perm.end(), 0);
    std::iota(pv_perm.begin(), pv_perm.end(), 0);
    std::shuffle(fo_perm.begin(), fo_perm.end(), rng);
    std::shuffle(pv_perm.begin(), pv_perm.end(), rng);
    auto renamed = rename(phi, fo_perm, pv_perm);
    REQUIRE(canonicalize(phi) == canonicalize(renamed));

    // Dropping one constraint yields a different canonical form.
    if (phi.size() > 1) {
      Clause smaller = phi;
      smaller.erase(*phi.constraints().begin());
      REQUIRE(canonicalize(smaller) != canonicalize(phi));
    }
  }
}

TEST_CASE("property: canonicalize distinguishes non-isomorphic shapes") {
  Fixture fx;
  auto f = fx.feat("f");
  Clause a(fx.sig);
  a.add(Constraint::sub(x, f, y));
  a.add(Constraint::sub(y, f, z));
  Clause b(fx.sig);
  b.add(Constraint::sub(x, f, y));
  b.add(Constraint::sub(z, f, y));
  CHECK(canonicalize(a) != canonicalize(b));
  Clause c(fx.sig);
  c.add(Constraint::sub(z, f, w));
  c.add(Constraint::sub(w, f, x));
  CHECK(canonicalize(a) == canonicalize(c));
}

TEST_CASE("property: prime implies admissible") {
  Fixture fx;
  std::mt19937 rng(29);
  int primes = 0;
  for (int round = 0; round < 500; ++round) {
    auto phi = random_clause(rng, fx, 3, 3, 1 + static_cast<int>(rng() % 5));
    auto cl = classify(phi, fx.store);
    if (cl.prime) {
      ++primes;
      // Prime clauses may still leave a path variable without an edge; the
      // implication covers the clauses that give every variable its edge.
      bool edges_ok = true;
      for (auto v : phi.path_vars()) edges_ok &= phi.edge_of(v).has_value();
      if (edges_ok) REQUIRE(cl.admissible);
    }
    if (cl.solved) REQUIRE(cl.presolved);
    if (cl.presolved) REQUIRE(cl.simplified);
  }
  CHECK(primes > 10);
}

TEST_CASE("property: substituting a fresh variable preserves classification") {
  Fixture fx;
  std::mt19937 rng(31);
  for (int round = 0; round < 200; ++round) {
    auto phi = random_clause(rng, fx, 4, 3, 1 + static_cast<int>(rng() % 6));
    auto before = classify(phi, fx.store);
    auto renamed = subst_path_var(phi, mu, PathTerm(PathVar{7}));
    auto after = classify(renamed, fx.store);
    REQUIRE(before.prime == after.prime);
    REQUIRE(before.admissible == after.admissible);
    REQUIRE(before.simplified == after.simplified);
    REQUIRE(before.solved == after.solved);
    REQUIRE(canonicalize(phi) == canonicalize(renamed));
  }
}
