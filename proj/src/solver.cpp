#include "funcert/solver.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "funcert/error.hpp"
#include "funcert/oracle.hpp"
#include "funcert/problem.hpp"

namespace funcert {

namespace {

using K = ConstraintKind;

std::optional<Node> anchor_node(const FeatureGraph& g, const Clause& phi, FoVar x) {
  if (auto n = g.anchor_of(x.id)) return n;
  return g.anchor_of(phi.resolve(x).id);
}

// Words of length <= max_len leading from `from` to `to` in g.
std::vector<Word> walks(const FeatureGraph& g, Node from, Node to, std::size_t max_len, std::size_t num_features) {
  std::vector<Word> out;
  Word w;
  std::function<void(Node)> go = [&](Node at) {
    if (!w.empty() && at == to) out.push_back(w);
    if (w.size() == max_len) return;
    for (std::size_t f = 0; f < num_features; ++f) {
      Feature feat{static_cast<std::uint16_t>(f)};
      auto next = g.next(at, feat);
      if (!next) continue;
      w.push_back(feat);
      go(*next);
      w.pop_back();
    }
  };
  go(from);
  std::sort(out.begin(), out.end(), [](const Word& a, const Word& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::vector<Word> all_words(std::size_t num_features, std::size_t max_len) {
  std::vector<Word> out, layer{Word{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
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

void collect_vars(const PathTerm& t, std::set<PathVar>& out) {
  if (t.head.is_var()) out.insert(t.head.var());
  if (t.is_complex && t.tail.is_var()) out.insert(t.tail.var());
}

std::set<PathVar> vars_of(const Constraint& c) {
  std::set<PathVar> out;
  if (c.kind == K::kSort || c.kind == K::kAgree) return out;
  collect_vars(c.p, out);
  if (c.is_path_constraint()) collect_vars(c.q, out);
  return out;
}

// Shortest word leading from `from` to `to` in g that every language accepts:
// breadth-first search over the product of the graph and the automata.
std::optional<Word> shortest_walk(const FeatureGraph& g, Node from, Node to, const std::vector<const Dfa*>& dfas,
                                  std::size_t num_features) {
  using State = std::pair<Node, std::vector<int>>;
  State start{from, {}};
  for (const auto* d : dfas) start.second.push_back(d->initial);
  std::map<State, std::pair<State, Feature>> parent;
  std::set<State> seen{start};
  std::vector<State> queue{start};
  for (std::size_t head = 0; head < queue.size(); ++head) {
    State cur = queue[head];
    for (std::size_t f = 0; f < num_features; ++f) {
      Feature feat{static_cast<std::uint16_t>(f)};
      auto next = g.next(cur.first, feat);
      if (!next) continue;
      State nxt{*next, {}};
      bool alive = true, accept = *next == to;
      for (std::size_t i = 0; i < dfas.size() && alive; ++i) {
        int q = dfas[i]->next(cur.second[i], feat);
        if (q == Dfa::kNone) alive = false;
        else {
          nxt.second.push_back(q);
          accept = accept && dfas[i]->final[q];
        }
      }
      if (!alive || !seen.insert(nxt).second) continue;
      parent.emplace(nxt, std::make_pair(cur, feat));
      if (accept) {
        Word w;
        for (State at = nxt; at != start; at = parent.at(at).first) w.push_back(parent.at(at).second);
        std::reverse(w.begin(), w.end());
        return w;
      }
      queue.push_back(std::move(nxt));
    }
  }
  return std::nullopt;
}

void add_unique(std::vector<Clause>& out, std::set<std::string>& seen, const Clause& c) {
  if (seen.insert(canonicalize(c)).second) out.push_back(c);
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::kSat:
      return "sat";
    case Status::kUnsat:
      return "unsat";
    case Status::kUnknown:
      return "unknown";
  }
  return "?";
}

FeatureGraph extract_witness(const Clause& solved, const LangStore& store) {
  if (solved.is_bottom()) throw InvariantViolation("no witness for bottom");
  if (!classify(solved, store).solved) throw InvariantViolation("witness requested for a non-solved clause");

  FeatureGraph g;
  Valuation v;
  auto node = [&](FoVar x) {
    auto [it, inserted] = v.fo.emplace(x, 0);
    if (inserted) {
      it->second = g.add_node();
      g.anchor(x.id, it->second);
    }
    return it->second;
  };
  for (auto x : solved.fo_vars()) node(x);

  for (auto mu : solved.path_vars()) {
    auto langs = solved.restrictions_of(PathTerm(mu));
    auto w = langs.empty() ? std::optional<Word>(Word{Feature{0}}) : store.shortest_word(langs.front());
    if (!w) throw InvariantViolation("empty restriction in a solved clause");
    v.path[mu] = *w;
  }

  for (const auto& c : solved.constraints()) {
    if (c.kind != K::kSub) continue;
    Word w = c.p.head.is_feature() ? Word{c.p.head.feature()} : v.path.at(c.p.head.var());
    Node cur = node(c.x);
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      Node nxt = g.add_node();
      g.set_edge(cur, w[i], nxt);
      cur = nxt;
    }
    g.set_edge(cur, w.back(), node(c.y));
  }
  for (const auto& c : solved.constraints())
    if (c.kind == K::kSort) g.set_sort(node(c.x), c.sort.id);

  for (const auto& [from, to] : solved.bindings()) {
    Node at = node(solved.resolve(from));
    g.anchor(from.id, at);
  }

  if (!evaluate(solved, g, v, store)) throw InvariantViolation("extracted witness does not satisfy its clause");
  return g;
}

bool check_model(const FeatureGraph& g, const Clause& phi, const LangStore& store, std::size_t max_len) {
  if (phi.is_bottom()) return false;
  if (max_len == 0) max_len = std::max<std::size_t>(2 * g.num_nodes(), 1);
  std::size_t nf = store.alphabet().size();

  Valuation v;
  for (auto x : phi.fo_vars()) {
    auto n = anchor_node(g, phi, x);
    if (!n) return false;
    v.fo[x] = *n;
  }
  for (const auto& [from, to] : phi.bindings()) {
    auto a = g.anchor_of(from.id), b = anchor_node(g, phi, to);
    if (a && b && *a != *b) return false;
  }

  // Candidate words per path variable: walks along one of its edges when it
  // has one, otherwise all short words.
  auto var_set = phi.path_vars();
  std::vector<PathVar> vars(var_set.begin(), var_set.end());
  std::vector<std::vector<Word>> candidates;
  std::set<PathVar> related;
  for (const auto& c : phi.constraints())
    if (c.is_path_constraint())
      for (auto mu : vars_of(c)) related.insert(mu);
  for (auto mu : vars) {
    std::optional<std::vector<Word>> cands;
    const Constraint* edge = nullptr;
    std::size_t edges = 0;
    for (const auto& c : phi.constraints())
      if (c.kind == K::kSub && c.p.is_var(mu) && edges++ == 0) edge = &c;
    auto langs = phi.restrictions_of(PathTerm(mu));
    if (edges == 1 && !related.count(mu)) {
      // Independent of every other variable, so the shortest fitting walk
      // decides it exactly.
      std::vector<const Dfa*> dfas;
      for (auto lang : langs) dfas.push_back(&store.dfa(lang));
      auto w = shortest_walk(g, v.fo.at(edge->x), v.fo.at(edge->y), dfas, nf);
      if (!w) return false;
      candidates.push_back({*w});
      continue;
    }
    if (edge)
      cands = walks(g, v.fo.at(edge->x), v.fo.at(edge->y), max_len, nf);
    else
      cands = all_words(nf, std::min<std::size_t>(max_len, 4));
    std::vector<Word> kept;
    for (auto& w : *cands) {
      bool ok = true;
      for (auto lang : langs)
        if (!store.member(lang, w)) ok = false;
      if (ok) kept.push_back(std::move(w));
    }
    candidates.push_back(std::move(kept));
  }

  // Each constraint is checked once the last of its path variables is set.
  std::vector<std::vector<const Constraint*>> due(vars.size() + 1);
  for (const auto& c : phi.constraints()) {
    std::size_t last = 0;
    for (auto mu : vars_of(c))
      last = std::max<std::size_t>(last, std::find(vars.begin(), vars.end(), mu) - vars.begin() + 1);
    due[last].push_back(&c);
  }
  auto ok_at = [&](std::size_t level) {
    for (const auto* c : due[level])
      if (!holds(*c, g, v, store)) return false;
    return true;
  };
  if (!ok_at(0)) return false;

  std::function<bool(std::size_t)> search = [&](std::size_t i) {
    if (i == vars.size()) return true;
    for (const auto& w : candidates[i]) {
      v.path[vars[i]] = w;
      if (ok_at(i + 1) && search(i + 1)) return true;
    }
    v.path.erase(vars[i]);
    return false;
  };
  return search(0);
}

SolveReport solve(std::string_view text, const SolveOptions& opts, const DeriveHooks& hooks) {
  auto problem = parse_problem(text);
  auto store = std::make_shared<LangStore>(alphabet_of(problem));
  auto built = build(problem, *store);
  return solve(built.clause, store, opts, hooks);
}

SolveReport solve(const Clause& input, std::shared_ptr<LangStore> store, const SolveOptions& opts,
                  const DeriveHooks& hooks) {
  SolveReport report;
  report.store = store;
  report.signature = input.signature();
  report.input = input;

  RewriteOptions rw;
  rw.strict = opts.strict;

  std::vector<Clause> presolved;
  std::set<std::string> presolved_seen;
  DeriveHooks run_hooks = hooks;
  if (opts.emit == Emit::kPresolved) {
    run_hooks.step = [&](const StepEvent& ev) {
      if (hooks.step) hooks.step(ev);
      if (is_solve(ev.instance.rule) && classify(ev.before, *store).presolved)
        add_unique(presolved, presolved_seen, ev.before);
    };
  }

  Control control = opts.control;
  auto result = derive(input, control, *store, opts.limits, rw, run_hooks);
  if (opts.auto_retry && result.loop_detected && !control.memoizes()) {
    report.diagnostics.push_back(std::string("loop detected under ") + to_string(control.kind) +
                                 " control; retried with --control quasi");
    control = Control::quasi();
    presolved.clear();
    presolved_seen.clear();
    result = derive(input, control, *store, opts.limits, rw, run_hooks);
  }
  report.control = control;
  report.stats = result.stats;
  report.loop_detected = result.loop_detected;
  report.limit_exceeded = result.limit_exceeded;

  std::vector<Clause> solved;
  std::set<std::string> solved_seen;
  bool stuck = false;
  for (const auto& t : result.terminals) {
    if (t.status != BranchStatus::kIrreducible || t.clause.is_bottom()) continue;
    auto cl = classify(t.clause, *store);
    if (opts.emit == Emit::kPresolved && cl.presolved) add_unique(presolved, presolved_seen, t.clause);
    if (cl.solved)
      add_unique(solved, solved_seen, t.clause);
    else
      stuck = true;
  }

  if (!solved.empty())
    report.status = Status::kSat;
  else if (!result.loop_detected && !result.limit_exceeded && !stuck)
    report.status = Status::kUnsat;
  else
    report.status = Status::kUnknown;

  if (result.loop_detected && !control.memoizes()) report.diagnostics.push_back("loop detected; retry with --control quasi");
  if (result.limit_exceeded)
    report.diagnostics.push_back("limit exceeded after " + std::to_string(result.stats.steps) + " steps and " +
                                 std::to_string(result.stats.visited) + " visited clauses");
  if (stuck) report.diagnostics.push_back("a branch ended in an irreducible clause that is not solved");

  report.clauses = opts.emit == Emit::kPresolved ? presolved : solved;
  if (opts.witness)
    for (const auto& c : solved) {
      report.witnesses.push_back(extract_witness(c, *store));
      report.witness_checked.push_back(check_model(report.witnesses.back(), input, *store));
      if (!report.witness_checked.back())
        report.diagnostics.push_back("witness " + std::to_string(report.witnesses.size()) + " failed the model check");
    }
  return report;
}

}  // namespace funcert
