#include "funcert/rewrite.hpp"

#include <algorithm>
#include <sstream>

#include "funcert/error.hpp"

namespace funcert {

namespace {

constexpr const char* kRuleNames[] = {
    "Join",  "Empty", "FClash", "SClash",  "DClash1",  "DClash2", "Div1",    "Div2",    "DivInst",
    "Triv1", "RelD",  "Triv2",  "Eq1",     "Eq2",      "Pre",     "DecFeat", "DecClash", "DecDFun",
    "Relate1", "Relate2", "Inst", "Intro", "Solv1", "Solv2", "InstEq",
};

using K = ConstraintKind;

bool simple_var(const PathTerm& t) { return t.is_simple() && t.head.is_var(); }
bool simple_feat(const PathTerm& t) { return t.is_simple() && t.head.is_feature(); }

// Both orientations of a symmetric constraint.
std::array<std::pair<PathTerm, PathTerm>, 2> sides(const Constraint& c) { return {{{c.p, c.q}, {c.q, c.p}}}; }

std::optional<Constraint> edge_from(const Clause& phi, FoVar x, SimpleTerm s) {
  for (const auto& c : phi.constraints())
    if (c.kind == K::kSub && c.x == x && c.p.is_simple() && c.p.head == s) return c;
  return std::nullopt;
}

// The restriction of a path variable, if any. Several restrictions only
// coexist before Join, where the first one is a sound over-approximation.
std::optional<LangId> restriction(const Clause& phi, PathVar v) {
  auto ls = phi.restrictions_of(PathTerm(v));
  if (ls.empty()) return std::nullopt;
  return ls.front();
}

std::vector<Feature> first_of(const Clause& phi, PathVar v, const LangStore& store) {
  auto l = restriction(phi, v);
  return l ? store.first_features(*l) : store.alphabet().features();
}

std::vector<Feature> continuation_of(const Clause& phi, PathVar v, const LangStore& store) {
  auto l = restriction(phi, v);
  return l ? store.continuation_features(*l) : store.alphabet().features();
}

std::vector<std::pair<Feature, Feature>> distinct_pairs(const std::vector<Feature>& a, const std::vector<Feature>& b) {
  std::vector<std::pair<Feature, Feature>> out;
  for (auto f : a)
    for (auto g : b)
      if (f != g) out.emplace_back(f, g);
  return out;
}

RuleInstance make(RuleId r, std::vector<Constraint> matched, std::size_t pairs = 0) {
  RuleInstance inst;
  inst.rule = r;
  inst.matched = std::move(matched);
  inst.pairs = pairs;
  return inst;
}

// --- instance finders -------------------------------------------------------

void find_restrict_rules(const Clause& phi, const LangStore& store, std::vector<RuleInstance>& out) {
  std::vector<const Constraint*> rs;
  for (const auto& c : phi.constraints())
    if (c.kind == K::kRestrict) rs.push_back(&c);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const auto& c = *rs[i];
    for (std::size_t j = i + 1; j < rs.size(); ++j)
      if (rs[j]->p == c.p && rs[j]->lang != c.lang) out.push_back(make(RuleId::Join, {c, *rs[j]}));
    if (store.is_empty(c.lang)) {
      out.push_back(make(RuleId::Empty, {c}));
      continue;
    }
    if (simple_feat(c.p) && !store.props(c.lang).contains(c.p.head.feature())) out.push_back(make(RuleId::FClash, {c}));
    if (!c.p.is_complex) continue;
    if (c.p.head.is_feature()) {
      out.push_back(make(RuleId::DecFeat, {c}));
    } else if (store.props(c.lang).all_words_len1) {
      out.push_back(make(RuleId::DecClash, {c}));
    } else {
      out.push_back(make(RuleId::DecDFun, {c}));
    }
  }
}

void find_sort_clash(const Clause& phi, std::vector<RuleInstance>& out) {
  std::map<FoVar, const Constraint*> seen;
  for (const auto& c : phi.constraints()) {
    if (c.kind != K::kSort) continue;
    auto [it, inserted] = seen.emplace(c.x, &c);
    if (!inserted && it->second->sort != c.sort) out.push_back(make(RuleId::SClash, {*it->second, c}));
  }
}

void find_div_rules(const Clause& phi, std::vector<RuleInstance>& out) {
  for (const auto& c : phi.constraints()) {
    if (c.kind != K::kDiv) continue;
    if (c.p == c.q) {
      out.push_back(make(RuleId::DClash1, {c}));
      continue;
    }
    if (c.p.is_complex && c.q.is_complex) {
      if (c.p.head == c.q.head) {
        out.push_back(make(RuleId::Div1, {c}));
      } else if (c.p.head.is_feature() && c.q.head.is_feature()) {
        out.push_back(make(RuleId::Triv2, {c}));
      }
      continue;
    }
    if (c.p.is_simple() && c.q.is_simple()) {
      if (c.p.head.is_feature() && c.q.head.is_feature()) out.push_back(make(RuleId::Triv1, {c}));
      continue;
    }
    // Exactly one side is complex.
    const auto& [cx, t] = c.p.is_complex ? std::pair{c.p, c.q} : std::pair{c.q, c.p};
    PathTerm s(cx.head);
    if (s == t) {
      out.push_back(make(RuleId::DClash2, {c}));
      continue;
    }
    auto simple_div = Constraint::div(s, t);
    if (phi.contains(simple_div)) {
      out.push_back(make(RuleId::Div2, {c, simple_div}));
    } else if (t.head.is_feature()) {
      out.push_back(make(RuleId::DivInst, {c}));
    } else if (!phi.related(s, t)) {
      out.push_back(make(RuleId::RelD, {c}));
    }
  }
}

void find_eq_rules(const Clause& phi, std::vector<RuleInstance>& out) {
  std::map<std::pair<FoVar, Feature>, const Constraint*> feature_edge;
  for (const auto& c : phi.constraints()) {
    if (c.kind != K::kSub || !simple_feat(c.p)) continue;
    auto [it, inserted] = feature_edge.emplace(std::make_pair(c.x, c.p.head.feature()), &c);
    if (!inserted) out.push_back(make(RuleId::Eq1, {*it->second, c}));
  }
  for (const auto& c : phi.constraints()) {
    if (c.kind != K::kPathEq) continue;
    for (const auto& [mu_term, s] : sides(c)) {
      if (!simple_var(mu_term) || !s.is_simple() || s == mu_term) continue;
      auto mu = mu_term.head.var();
      auto mu_edge = phi.edge_of(mu);
      if (!mu_edge) continue;
      auto s_edge = edge_from(phi, mu_edge->x, s.head);
      if (!s_edge) continue;
      if (s.head.is_feature() && phi.occurs_in_complex(mu)) continue;
      out.push_back(make(RuleId::Eq2, {c, *s_edge, *mu_edge}));
      break;
    }
  }
}

void find_pre(const Clause& phi, std::vector<RuleInstance>& out) {
  for (const auto& c : phi.constraints()) {
    if (c.kind != K::kPrefix || !simple_var(c.q) || !c.p.is_simple() || c.p == c.q) continue;
    auto mu = c.q.head.var();
    if (phi.occurs_in_complex(mu)) continue;
    auto mu_edge = phi.edge_of(mu);
    if (!mu_edge) continue;
    auto s_edge = edge_from(phi, mu_edge->x, c.p.head);
    if (!s_edge) continue;
    out.push_back(make(RuleId::Pre, {c, *s_edge, *mu_edge}));
  }
}

void find_relate(const Clause& phi, std::vector<RuleInstance>& out) {
  for (auto x : phi.fo_vars()) {
    auto terms = outgoing(phi, x);
    std::vector<SimpleTerm> ts(terms.begin(), terms.end());
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        if (!ts[i].is_var() && !ts[j].is_var()) continue;
        if (phi.related(PathTerm(ts[i]), PathTerm(ts[j]))) continue;
        auto rule = ts[i].is_var() && ts[j].is_var() ? RuleId::Relate1 : RuleId::Relate2;
        out.push_back(make(rule, {*edge_from(phi, x, ts[i]), *edge_from(phi, x, ts[j])}));
      }
  }
}

void find_solve(const Clause& phi, const LangStore& store, const RewriteOptions& options,
                std::vector<RuleInstance>& out) {
  for (const auto& c : phi.constraints()) {
    if (c.kind == K::kDiv && c.p.is_simple() && c.q.is_simple()) {
      for (const auto& [a, b] : sides(c)) {
        if (!simple_var(a) || !simple_feat(b)) continue;
        auto mu = a.head.var();
        if (!phi.edge_of(mu)) continue;
        auto firsts = first_of(phi, mu, store);
        std::size_t n = std::count_if(firsts.begin(), firsts.end(), [&](Feature g) { return g != b.head.feature(); });
        out.push_back(make(RuleId::Inst, {c}, n));
      }
      if (simple_var(c.p) && simple_var(c.q)) {
        auto mu = c.p.head.var(), nu = c.q.head.var();
        auto em = phi.edge_of(mu), en = phi.edge_of(nu);
        if (!em || !en || em->x != en->x) continue;
        if (phi.occurs_in_complex(mu) || phi.occurs_in_complex(nu)) continue;
        auto n = solve_pairs(phi, c, store).total();
        out.push_back(make(RuleId::Solv1, {c}, n));
        out.push_back(make(RuleId::Solv2, {c}, n));
      }
    }
    if (c.kind == K::kPrefix && simple_feat(c.p) && simple_var(c.q)) {
      auto edge = phi.edge_of(c.q.head.var());
      if (edge && !edge_from(phi, edge->x, c.p.head)) out.push_back(make(RuleId::Intro, {c, *edge}));
    }
    if (!options.strict && c.kind == K::kRestrict && simple_var(c.p) && store.as_single_feature(c.lang)) {
      auto mu = c.p.head.var();
      auto edge = phi.edge_of(mu);
      if (edge && !phi.occurs_in_complex(mu)) out.push_back(make(RuleId::InstEq, {c, *edge}));
    }
  }
}

}  // namespace

const char* to_string(RuleId r) { return kRuleNames[static_cast<std::size_t>(r)]; }

std::optional<RuleId> rule_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kRuleCount; ++i)
    if (name == kRuleNames[i]) return static_cast<RuleId>(i);
  return std::nullopt;
}

bool is_simpl(RuleId r) { return r <= RuleId::DecDFun; }
bool is_pre(RuleId r) { return r == RuleId::Relate1 || r == RuleId::Relate2; }
bool is_solve(RuleId r) { return r >= RuleId::Inst; }

const char* to_string(Control::Kind k) {
  switch (k) {
    case Control::Kind::kBasic: return "basic";
    case Control::Kind::kQuasi: return "quasi";
    case Control::Kind::kKM: return "km";
    case Control::Kind::kHeuristic: return "heuristic";
  }
  return "?";
}

std::optional<Control::Kind> control_from_string(const std::string& name) {
  for (auto k : {Control::Kind::kBasic, Control::Kind::kQuasi, Control::Kind::kKM, Control::Kind::kHeuristic})
    if (name == to_string(k)) return k;
  return std::nullopt;
}

std::string to_string(const ThetaQuadruple& t) {
  std::ostringstream os;
  os << '(' << t.unrelated << ',' << t.constraints << ',' << t.complex_terms << ',' << t.variables << ')';
  return os.str();
}

ThetaQuadruple theta(const Clause& phi) {
  ThetaQuadruple t;
  if (phi.is_bottom()) return t;
  auto tagged = tagged_variables(phi);
  if (!tagged.empty()) {
    auto terms = outgoing(phi, tagged.front());
    std::vector<SimpleTerm> ts(terms.begin(), terms.end());
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i + 1; j < ts.size(); ++j)
        if (!phi.related(PathTerm(ts[i]), PathTerm(ts[j]))) ++t.unrelated;
  }
  t.constraints = phi.size();
  for (const auto& c : phi.constraints()) {
    if (c.p.is_complex) ++t.complex_terms;
    if (c.is_path_constraint() && c.q.is_complex) ++t.complex_terms;
  }
  t.variables = phi.fo_vars().size() + phi.path_vars().size();
  return t;
}

SolvePairs solve_pairs(const Clause& phi, const Constraint& div, const LangStore& store) {
  if (div.kind != K::kDiv || !simple_var(div.p) || !simple_var(div.q))
    throw InvariantViolation("solve_pairs expects a divergence between two path variables");
  auto mu = div.p.head.var(), nu = div.q.head.var();
  SolvePairs out;
  out.solv1 = distinct_pairs(first_of(phi, mu, store), first_of(phi, nu, store));
  out.solv2 = distinct_pairs(continuation_of(phi, mu, store), continuation_of(phi, nu, store));
  return out;
}

std::vector<RuleInstance> all_instances(const Clause& phi, const LangStore& store, const RewriteOptions& options) {
  std::vector<RuleInstance> out;
  if (phi.is_bottom()) return out;
  find_restrict_rules(phi, store, out);
  find_sort_clash(phi, out);
  find_div_rules(phi, out);
  find_eq_rules(phi, out);
  find_pre(phi, out);
  find_relate(phi, out);
  find_solve(phi, store, options, out);
  std::stable_sort(out.begin(), out.end(), [](const RuleInstance& a, const RuleInstance& b) {
    if (a.rule != b.rule) return a.rule < b.rule;
    return a.matched < b.matched;
  });
  return out;
}

namespace {

int tier(const RuleInstance& inst, const Control& control) {
  switch (inst.rule) {
    case RuleId::Empty:
    case RuleId::FClash:
    case RuleId::SClash:
    case RuleId::DClash1:
    case RuleId::DClash2:
    case RuleId::DecClash:
      return 0;
    case RuleId::Pre:
    case RuleId::InstEq:
      // The single-feature collapse is deterministic; running it before the
      // relation-guessing rules keeps Inst from re-deriving the same clause.
      return 2;
    default:
      break;
  }
  if (is_simpl(inst.rule)) return 1;
  bool pre = is_pre(inst.rule);
  switch (control.kind) {
    case Control::Kind::kBasic:
      return 3;
    case Control::Kind::kQuasi:
      return pre ? 3 : 4;
    case Control::Kind::kKM:
      return pre ? 4 : 3;
    case Control::Kind::kHeuristic:
      if (pre) return 4;
      if (inst.rule == RuleId::Intro) return 3;
      return inst.pairs <= control.delay_threshold ? 3 : 5;
  }
  return 3;
}

}  // namespace

std::vector<RuleInstance> applicable(const Clause& phi, const Control& control, const LangStore& store,
                                     const RewriteOptions& options) {
  auto all = all_instances(phi, store, options);
  if (all.empty()) return all;
  int best = tier(all.front(), control);
  for (const auto& inst : all) best = std::min(best, tier(inst, control));
  std::vector<RuleInstance> out;
  for (auto& inst : all)
    if (tier(inst, control) == best) out.push_back(std::move(inst));
  return out;
}

}  // namespace funcert
