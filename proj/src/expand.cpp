// Branch construction for each rule.

#include <algorithm>

#include "funcert/error.hpp"
#include "funcert/rewrite.hpp"

namespace funcert {

namespace {

using K = ConstraintKind;

Clause bottom_of(const Clause& phi) {
  Clause c = phi;
  c.set_bottom();
  return c;
}

std::string feature_name(const LangStore& store, Feature f) { return store.alphabet().name(f); }

void ensure_feature_edge(Clause& c, FoVar x, Feature f) {
  for (const auto& e : c.constraints())
    if (e.kind == K::kSub && e.x == x && e.p.is_simple() && e.p.head == SimpleTerm::of(f)) return;
  c.add(Constraint::sub(x, f, c.fresh_fo()));
}

// How a diverging path variable starts with a chosen feature f: either f is a
// proper prefix of it, or it denotes exactly f.
enum class Mode { kPrefix, kEqual };

const char* mode_name(Mode m) { return m == Mode::kPrefix ? "prefix" : "equal"; }

std::vector<Mode> modes(const Clause& phi, PathVar v, Feature f, LangStore& store, const RewriteOptions& options,
                        bool prune) {
  std::vector<Mode> out;
  auto ls = phi.restrictions_of(PathTerm(v));
  LangId l = ls.empty() ? store.universe() : ls.front();
  for (std::size_t i = 1; i < ls.size(); ++i) l = store.intersect(l, ls[i]);
  Word single{f};
  if (!prune || !store.is_empty(store.quotient(f, l))) out.push_back(Mode::kPrefix);
  if (!options.strict && (!prune || store.member(l, single))) out.push_back(Mode::kEqual);
  return out;
}

void add_mode(Clause& c, PathVar v, Feature f, Mode m, LangStore& store) {
  if (m == Mode::kEqual) {
    c.add(Constraint::restrict(PathTerm(v), store.single(f)));
    return;
  }
  c.add(Constraint::prefix(PathTerm(f), PathTerm(v)));
  auto edge = c.edge_of(v);
  if (!edge) throw InvariantViolation("prefix mode on a path variable without an edge");
  ensure_feature_edge(c, edge->x, f);
}

std::vector<Branch> expand_inst(const Clause& phi, const RuleInstance& r, LangStore& store,
                                const RewriteOptions& options) {
  const auto& div = r.matched.at(0);
  bool var_first = div.p.is_simple() && div.p.head.is_var();
  PathVar mu = (var_first ? div.p : div.q).head.var();
  Feature f = (var_first ? div.q : div.p).head.feature();
  auto ls = phi.restrictions_of(PathTerm(mu));
  auto firsts = ls.empty() ? store.alphabet().features() : store.first_features(ls.front());
  std::vector<Branch> out;
  for (auto g : firsts) {
    if (g == f) continue;
    for (auto m : modes(phi, mu, g, store, options, true)) {
      Clause c = phi;
      c.erase(div);
      add_mode(c, mu, g, m, store);
      out.push_back({std::move(c), RuleId::Inst, feature_name(store, g) + ":" + mode_name(m)});
    }
  }
  return out;
}

std::vector<Branch> expand_solv1(const Clause& phi, const RuleInstance& r, LangStore& store,
                                 const RewriteOptions& options) {
  const auto& div = r.matched.at(0);
  auto mu = div.p.head.var(), nu = div.q.head.var();
  std::vector<Branch> out;
  for (auto [f, g] : solve_pairs(phi, div, store).solv1)
    for (auto mf : modes(phi, mu, f, store, options, true))
      for (auto mg : modes(phi, nu, g, store, options, true)) {
        Clause c = phi;
        c.erase(div);
        add_mode(c, mu, f, mf, store);
        add_mode(c, nu, g, mg, store);
        out.push_back({std::move(c), RuleId::Solv1,
                       feature_name(store, f) + ":" + mode_name(mf) + "," + feature_name(store, g) + ":" +
                           mode_name(mg)});
      }
  return out;
}

std::vector<Branch> expand_solv2(const Clause& phi, const RuleInstance& r, LangStore& store,
                                 const RewriteOptions& options) {
  const auto& div = r.matched.at(0);
  auto mu = div.p.head.var(), nu = div.q.head.var();
  auto em = *phi.edge_of(mu), en = *phi.edge_of(nu);
  std::vector<Branch> out;
  for (auto [f, g] : solve_pairs(phi, div, store).solv2)
    for (auto mf : modes(phi, mu, f, store, options, false))
      for (auto mg : modes(phi, nu, g, store, options, false)) {
        Clause c = phi;
        c.erase(div);
        c.erase(em);
        c.erase(en);
        auto delta = c.fresh_path();
        auto u = c.fresh_fo();
        auto dt = SimpleTerm::of(delta);
        c = subst_path_var(c, mu, PathTerm::concat(dt, SimpleTerm::of(mu)));
        c = subst_path_var(c, nu, PathTerm::concat(dt, SimpleTerm::of(nu)));
        c.add(Constraint::sub(em.x, delta, u));
        c.add(Constraint::sub(u, mu, em.y));
        c.add(Constraint::sub(u, nu, en.y));
        add_mode(c, mu, f, mf, store);
        add_mode(c, nu, g, mg, store);
        out.push_back({std::move(c), RuleId::Solv2,
                       feature_name(store, f) + ":" + mode_name(mf) + "," + feature_name(store, g) + ":" +
                           mode_name(mg)});
      }
  return out;
}

Branch expand_pre(const Clause& phi, const RuleInstance& r) {
  const auto& pre = r.matched.at(0);
  const auto& s_edge = r.matched.at(1);
  const auto& mu_edge = r.matched.at(2);
  auto mu = mu_edge.p.head.var();
  FoVar x = mu_edge.x, y = s_edge.y, z = mu_edge.y;
  const auto& trail = phi.trail(mu);
  auto seen = [&](FoVar v) { return v == x || std::find(trail.begin(), trail.end(), v) != trail.end(); };
  bool loop = seen(y) || seen(z);

  Clause c = phi;
  c.erase(pre);
  c.erase(mu_edge);
  c = subst_path_var(c, mu, PathTerm::concat(pre.p.head, SimpleTerm::of(mu)));
  c.add(Constraint::sub(y, mu, z));
  c.extend_trail(mu, x);
  return {std::move(c), RuleId::Pre, {}, loop};
}

}  // namespace

std::vector<Branch> expand(const Clause& phi, const RuleInstance& r, LangStore& store, const RewriteOptions& options) {
  if (phi.is_bottom()) throw InvariantViolation("rule applied to bottom");
  for (const auto& m : r.matched)
    if (!phi.contains(m)) throw InvariantViolation(std::string("stale instance of ") + to_string(r.rule));

  auto single = [&](Clause c, std::string param = {}) {
    return std::vector<Branch>{{std::move(c), r.rule, std::move(param)}};
  };
  const auto& m0 = r.matched.at(0);
  std::vector<Branch> out;
  switch (r.rule) {
    case RuleId::Empty:
    case RuleId::FClash:
    case RuleId::SClash:
    case RuleId::DClash1:
    case RuleId::DClash2:
    case RuleId::DecClash:
      out = single(bottom_of(phi));
      break;
    case RuleId::Join: {
      Clause c = phi;
      c.erase(m0);
      c.erase(r.matched.at(1));
      c.add(Constraint::restrict(m0.p, store.intersect(m0.lang, r.matched.at(1).lang)));
      out = single(std::move(c));
      break;
    }
    case RuleId::Div1: {
      Clause c = phi;
      c.erase(m0);
      c.add(Constraint::div(PathTerm(m0.p.tail), PathTerm(m0.q.tail)));
      out = single(std::move(c));
      break;
    }
    case RuleId::Div2:
    case RuleId::Triv1:
    case RuleId::Triv2: {
      Clause c = phi;
      c.erase(m0);
      out = single(std::move(c));
      break;
    }
    case RuleId::DivInst: {
      const auto& cx = m0.p.is_complex ? m0.p : m0.q;
      const auto& g = m0.p.is_complex ? m0.q : m0.p;
      Clause c = phi;
      c.erase(m0);
      c.add(Constraint::div(PathTerm(cx.head), g));
      out = single(std::move(c));
      break;
    }
    case RuleId::RelD: {
      const auto& cx = m0.p.is_complex ? m0.p : m0.q;
      const auto& nu = m0.p.is_complex ? m0.q : m0.p;
      Clause a = phi;
      a.add(Constraint::div(PathTerm(cx.head), nu));
      Clause b = phi;
      b.add(Constraint::prefix(PathTerm(cx.head), nu));
      out.push_back({std::move(a), r.rule, "div"});
      out.push_back({std::move(b), r.rule, "prefix"});
      break;
    }
    case RuleId::Eq1: {
      Clause c = phi;
      c.add(Constraint::agree(r.matched.at(1).y, m0.y));
      out = single(std::move(c));
      break;
    }
    case RuleId::Eq2: {
      const auto& s_edge = r.matched.at(1);
      const auto& mu_edge = r.matched.at(2);
      Clause c = phi;
      c.erase(m0);
      c = subst_path_var(c, mu_edge.p.head.var(), s_edge.p);
      if (mu_edge.y != s_edge.y) c.add(Constraint::agree(mu_edge.y, s_edge.y));
      out = single(std::move(c));
      break;
    }
    case RuleId::Pre:
      out.push_back(expand_pre(phi, r));
      break;
    case RuleId::DecFeat: {
      Clause c = phi;
      c.erase(m0);
      c.add(Constraint::restrict(PathTerm(m0.p.tail), store.quotient(m0.p.head.feature(), m0.lang)));
      out = single(std::move(c));
      break;
    }
    case RuleId::DecDFun: {
      auto pairs = store.dfun(m0.lang);
      for (std::size_t i = 0; i < pairs.size(); ++i) {
        Clause c = phi;
        c.erase(m0);
        c.add(Constraint::restrict(PathTerm(m0.p.head), pairs[i].prefix));
        c.add(Constraint::restrict(PathTerm(m0.p.tail), pairs[i].suffix));
        out.push_back({std::move(c), r.rule, "q" + std::to_string(i)});
      }
      break;
    }
    case RuleId::Relate1: {
      PathTerm mu(m0.p), nu(r.matched.at(1).p);
      const std::pair<const char*, Constraint> choices[] = {
          {"eq", Constraint::path_eq(mu, nu)},
          {"succ", Constraint::prefix(nu, mu)},
          {"prefix", Constraint::prefix(mu, nu)},
          {"div", Constraint::div(mu, nu)},
      };
      for (const auto& [name, con] : choices) {
        Clause c = phi;
        c.add(con);
        out.push_back({std::move(c), r.rule, name});
      }
      break;
    }
    case RuleId::Relate2: {
      PathTerm f(m0.p), mu(r.matched.at(1).p);
      const std::pair<const char*, Constraint> choices[] = {
          {"eq", Constraint::path_eq(f, mu)},
          {"prefix", Constraint::prefix(f, mu)},
          {"div", Constraint::div(f, mu)},
      };
      for (const auto& [name, con] : choices) {
        Clause c = phi;
        c.add(con);
        out.push_back({std::move(c), r.rule, name});
      }
      break;
    }
    case RuleId::Inst:
      out = expand_inst(phi, r, store, options);
      break;
    case RuleId::Intro: {
      Clause c = phi;
      ensure_feature_edge(c, r.matched.at(1).x, m0.p.head.feature());
      out = single(std::move(c));
      break;
    }
    case RuleId::Solv1:
      out = expand_solv1(phi, r, store, options);
      break;
    case RuleId::Solv2:
      out = expand_solv2(phi, r, store, options);
      break;
    case RuleId::InstEq: {
      Clause c = phi;
      c.erase(m0);
      c = subst_path_var(c, m0.p.head.var(), PathTerm(*store.as_single_feature(m0.lang)));
      out = single(std::move(c));
      break;
    }
  }
  if (r.choice) {
    if (*r.choice >= out.size()) throw InvariantViolation("rule choice out of range");
    return {std::move(out[*r.choice])};
  }
  return out;
}

std::vector<Clause> apply(const Clause& phi, const RuleInstance& r, LangStore& store, const RewriteOptions& options) {
  std::vector<Clause> out;
  for (auto& b : expand(phi, r, store, options)) out.push_back(std::move(b.clause));
  return out;
}

}  // namespace funcert
