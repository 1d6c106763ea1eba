#include "funcert/oracle.hpp"

#include <algorithm>
#include <numeric>

#include "funcert/error.hpp"

namespace funcert {

namespace {

using K = ConstraintKind;

std::optional<Word> word_of(const SimpleTerm& s, const Valuation& v) {
  if (s.is_feature()) return Word{s.feature()};
  auto it = v.path.find(s.var());
  if (it == v.path.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

std::optional<Word> word_of(const PathTerm& t, const Valuation& v) {
  auto head = word_of(t.head, v);
  if (!head || !t.is_complex) return head;
  auto tail = word_of(t.tail, v);
  if (!tail) return std::nullopt;
  head->insert(head->end(), tail->begin(), tail->end());
  return head;
}

// Constraints that only depend on the path valuation.
bool path_part_holds(const Constraint& c, const Valuation& v, const LangStore& store) {
  switch (c.kind) {
    case K::kRestrict: {
      auto w = word_of(c.p, v);
      return w && store.member(c.lang, *w);
    }
    case K::kDiv:
    case K::kPrefix:
    case K::kPathEq: {
      auto a = word_of(c.p, v), b = word_of(c.q, v);
      if (!a || !b) return false;
      auto r = relate_words(*a, *b);
      if (c.kind == K::kDiv) return r == Relation::kDiverge;
      if (c.kind == K::kPrefix) return r == Relation::kProperPrefix;
      return r == Relation::kEqual;
    }
    default:
      return true;
  }
}

std::vector<Word> words_up_to(std::size_t num_features, std::size_t k) {
  std::vector<Word> out, layer{Word{}};
  for (std::size_t len = 1; len <= k; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer)
      for (std::size_t f = 0; f < num_features; ++f) {
        auto x = w;
        x.push_back(Feature{static_cast<std::uint16_t>(f)});
        next.push_back(std::move(x));
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

struct UnionFind {
  std::vector<Node> parent;
  Node make() {
    parent.push_back(static_cast<Node>(parent.size()));
    return parent.back();
  }
  Node find(Node a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  bool unite(Node a, Node b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

// The least graph forced by the valuation, or nothing if it clashes or has
// too many nodes.
std::optional<Model> build_model(const Clause& phi, const Valuation& paths, std::size_t n) {
  UnionFind uf;
  std::map<FoVar, Node> node_of;
  auto node = [&](FoVar x) {
    auto [it, inserted] = node_of.emplace(x, 0);
    if (inserted) it->second = uf.make();
    return it->second;
  };
  for (auto x : phi.fo_vars()) node(x);
  for (const auto& [from, to] : phi.bindings()) node(phi.resolve(from));

  struct Edge {
    Node from;
    Feature f;
    Node to;
  };
  std::vector<Edge> edges;
  for (const auto& c : phi.constraints()) {
    if (c.kind != K::kSub) continue;
    auto w = word_of(c.p, paths);
    if (!w) return std::nullopt;
    Node cur = node(c.x);
    for (std::size_t i = 0; i + 1 < w->size(); ++i) {
      Node nxt = uf.make();
      edges.push_back({cur, (*w)[i], nxt});
      cur = nxt;
    }
    edges.push_back({cur, w->back(), node(c.y)});
  }

  // Congruence closure: a node has at most one successor per feature.
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::pair<Node, Feature>, Node> succ;
    for (const auto& e : edges) {
      auto key = std::make_pair(uf.find(e.from), e.f);
      auto [it, inserted] = succ.emplace(key, uf.find(e.to));
      if (!inserted && uf.find(it->second) != uf.find(e.to)) changed |= uf.unite(it->second, e.to);
    }
  }

  std::map<Node, Node> renumber;
  for (Node i = 0; i < uf.parent.size(); ++i) {
    Node r = uf.find(i);
    if (!renumber.count(r)) renumber.emplace(r, static_cast<Node>(renumber.size()));
  }
  if (renumber.size() > n) return std::nullopt;

  Model m;
  for (std::size_t i = 0; i < renumber.size(); ++i) m.graph.add_node();
  for (const auto& e : edges) m.graph.set_edge(renumber[uf.find(e.from)], e.f, renumber[uf.find(e.to)]);
  for (const auto& c : phi.constraints()) {
    if (c.kind != K::kSort) continue;
    Node at = renumber[uf.find(node(c.x))];
    auto have = m.graph.sort(at);
    if (have && *have != c.sort.id) return std::nullopt;
    m.graph.set_sort(at, c.sort.id);
  }
  for (const auto& [x, nd] : node_of) {
    m.graph.anchor(x.id, renumber[uf.find(nd)]);
    m.valuation.fo[x] = renumber[uf.find(nd)];
  }
  for (const auto& [from, to] : phi.bindings()) {
    Node at = m.valuation.fo.at(phi.resolve(from));
    m.graph.anchor(from.id, at);
    m.valuation.fo[from] = at;
  }
  m.valuation.path = paths.path;
  return m;
}

}  // namespace

Relation relate_words(const Word& u, const Word& v) {
  std::size_t i = 0;
  while (i < u.size() && i < v.size() && u[i] == v[i]) ++i;
  if (i == u.size() && i == v.size()) return Relation::kEqual;
  if (i == u.size()) return Relation::kProperPrefix;
  if (i == v.size()) return Relation::kProperSuffixOf;
  return Relation::kDiverge;
}

bool holds(const Constraint& c, const FeatureGraph& g, const Valuation& v, const LangStore& store) {
  auto at = [&](FoVar x) -> std::optional<Node> {
    auto it = v.fo.find(x);
    if (it == v.fo.end()) return std::nullopt;
    return it->second;
  };
  switch (c.kind) {
    case K::kSort: {
      auto n = at(c.x);
      return n && g.sort(*n) == c.sort.id;
    }
    case K::kAgree: {
      auto a = at(c.x), b = at(c.y);
      return a && b && *a == *b;
    }
    case K::kSub: {
      auto a = at(c.x), b = at(c.y);
      auto w = word_of(c.p, v);
      if (!a || !b || !w) return false;
      auto end = g.walk(*a, *w);
      return end && *end == *b;
    }
    default:
      return path_part_holds(c, v, store);
  }
}

bool evaluate(const Clause& phi, const FeatureGraph& g, const Valuation& v, const LangStore& store) {
  if (phi.is_bottom()) return false;
  for (const auto& c : phi.constraints())
    if (!holds(c, g, v, store)) return false;
  return true;
}

std::optional<Model> bounded_sat(const Clause& phi, const LangStore& store, std::size_t k, std::size_t n) {
  if (phi.is_bottom()) return std::nullopt;
  auto all = words_up_to(store.alphabet().size(), k);
  auto var_set = phi.path_vars();
  std::vector<PathVar> vars(var_set.begin(), var_set.end());
  std::vector<std::vector<Word>> candidates;
  for (auto mu : vars) {
    std::vector<Word> ok;
    for (const auto& w : all) {
      bool fits = true;
      for (const auto& c : phi.constraints())
        if (c.kind == K::kRestrict && c.p.is_var(mu) && !store.member(c.lang, w)) fits = false;
      if (fits) ok.push_back(w);
    }
    if (ok.empty()) return std::nullopt;
    candidates.push_back(std::move(ok));
  }

  std::vector<std::size_t> idx(vars.size(), 0);
  while (true) {
    Valuation v;
    for (std::size_t i = 0; i < vars.size(); ++i) v.path[vars[i]] = candidates[i][idx[i]];
    bool ok = true;
    for (const auto& c : phi.constraints())
      if (!path_part_holds(c, v, store)) {
        ok = false;
        break;
      }
    if (ok) {
      if (auto m = build_model(phi, v, n)) {
        if (!evaluate(phi, m->graph, m->valuation, store))
          throw InvariantViolation("bounded_sat built a graph that is not a model");
        return m;
      }
    }
    std::size_t i = 0;
    while (i < vars.size() && ++idx[i] == candidates[i].size()) idx[i++] = 0;
    if (i == vars.size()) break;
  }
  return std::nullopt;
}

}  // namespace funcert
