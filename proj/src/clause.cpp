#include "funcert/clause.hpp"

#include <algorithm>
#include <sstream>

#include "funcert/error.hpp"

namespace funcert {

// ---------------------------------------------------------------------------
// Terms and constraints

PathTerm PathTerm::concat(SimpleTerm first, SimpleTerm second) {
  PathTerm t(first);
  t.is_complex = true;
  t.tail = second;
  return t;
}

bool PathTerm::mentions(PathVar v) const {
  auto s = SimpleTerm::of(v);
  return head == s || (is_complex && tail == s);
}

Constraint Constraint::sort_of(SortName s, FoVar x) {
  Constraint c;
  c.kind = ConstraintKind::kSort;
  c.sort = s;
  c.x = x;
  return c;
}

Constraint Constraint::agree(FoVar x, FoVar y) {
  Constraint c;
  c.kind = ConstraintKind::kAgree;
  c.x = x;
  c.y = y;
  return c;
}

Constraint Constraint::sub(FoVar x, PathTerm p, FoVar y) {
  Constraint c;
  c.kind = ConstraintKind::kSub;
  c.x = x;
  c.p = p;
  c.y = y;
  return c;
}

Constraint Constraint::div(PathTerm p, PathTerm q) {
  Constraint c;
  c.kind = ConstraintKind::kDiv;
  c.p = std::min(p, q);
  c.q = std::max(p, q);
  return c;
}

Constraint Constraint::prefix(PathTerm p, PathTerm q) {
  Constraint c;
  c.kind = ConstraintKind::kPrefix;
  c.p = p;
  c.q = q;
  return c;
}

Constraint Constraint::path_eq(PathTerm p, PathTerm q) {
  Constraint c;
  c.kind = ConstraintKind::kPathEq;
  c.p = std::min(p, q);
  c.q = std::max(p, q);
  return c;
}

Constraint Constraint::restrict(PathTerm p, LangId lang) {
  Constraint c;
  c.kind = ConstraintKind::kRestrict;
  c.p = p;
  c.lang = lang;
  return c;
}

bool Constraint::mentions(PathVar v) const {
  switch (kind) {
    case ConstraintKind::kSub:
    case ConstraintKind::kRestrict:
      return p.mentions(v);
    case ConstraintKind::kDiv:
    case ConstraintKind::kPrefix:
    case ConstraintKind::kPathEq:
      return p.mentions(v) || q.mentions(v);
    default:
      return false;
  }
}

bool Constraint::mentions(FoVar v) const {
  switch (kind) {
    case ConstraintKind::kSort:
      return x == v;
    case ConstraintKind::kAgree:
    case ConstraintKind::kSub:
      return x == v || y == v;
    default:
      return false;
  }
}

std::string Signature::fo_name(FoVar v) const {
  if (v.id < fo_names.size()) return fo_names[v.id];
  return "_v" + std::to_string(v.id);
}

std::string Signature::path_name(PathVar v) const {
  if (v.id < path_names.size()) return path_names[v.id];
  return "_p" + std::to_string(v.id);
}

std::optional<SortName> Signature::find_sort(const std::string& name) const {
  auto it = std::find(sorts.begin(), sorts.end(), name);
  if (it == sorts.end()) return std::nullopt;
  return SortName{static_cast<std::uint32_t>(it - sorts.begin())};
}

Relation path_relation(std::span<const Feature> u, std::span<const Feature> v) {
  std::size_t i = 0;
  while (i < u.size() && i < v.size() && u[i] == v[i]) ++i;
  if (i == u.size() && i == v.size()) return Relation::kEqual;
  if (i == u.size()) return Relation::kProperPrefix;
  if (i == v.size()) return Relation::kProperSuffixOf;
  return Relation::kDiverge;
}

const char* to_string(Relation r) {
  switch (r) {
    case Relation::kEqual:
      return "equal";
    case Relation::kProperPrefix:
      return "prefix";
    case Relation::kProperSuffixOf:
      return "suffix";
    case Relation::kDiverge:
      return "diverge";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Clause

Clause::Clause(std::shared_ptr<const Signature> signature) : signature_(std::move(signature)) {
  next_fo_ = static_cast<std::uint32_t>(signature_->fo_names.size());
  next_path_ = static_cast<std::uint32_t>(signature_->path_names.size());
}

Clause Clause::bottom(std::shared_ptr<const Signature> signature) {
  Clause c(std::move(signature));
  c.bottom_ = true;
  return c;
}

void Clause::set_bottom() {
  bottom_ = true;
  constraints_.clear();
  trails_.clear();
}

FoVar Clause::resolve(FoVar v) const {
  for (auto it = bindings_.find(v); it != bindings_.end(); it = bindings_.find(v)) v = it->second;
  return v;
}

void Clause::add(Constraint c) {
  if (bottom_) return;
  if (c.kind == ConstraintKind::kSort || c.kind == ConstraintKind::kSub || c.kind == ConstraintKind::kAgree) {
    c.x = resolve(c.x);
    if (c.kind != ConstraintKind::kSort) c.y = resolve(c.y);
  }
  if (c.kind == ConstraintKind::kAgree) {
    if (c.x != c.y) *this = subst_fo_var(*this, c.x, c.y);
    return;
  }
  constraints_.insert(c);
}

FoVar Clause::fresh_fo() { return FoVar{next_fo_++}; }
PathVar Clause::fresh_path() { return PathVar{next_path_++}; }

const std::vector<FoVar>& Clause::trail(PathVar v) const {
  static const std::vector<FoVar> kEmpty;
  auto it = trails_.find(v);
  return it == trails_.end() ? kEmpty : it->second;
}

void Clause::extend_trail(PathVar v, FoVar source) { trails_[v].push_back(source); }

std::vector<Constraint> Clause::edges() const {
  std::vector<Constraint> out;
  for (const auto& c : constraints_)
    if (c.kind == ConstraintKind::kSub) out.push_back(c);
  return out;
}

std::optional<Constraint> Clause::edge_of(PathVar v) const {
  for (const auto& c : constraints_)
    if (c.kind == ConstraintKind::kSub && c.p.is_var(v)) return c;
  return std::nullopt;
}

std::vector<LangId> Clause::restrictions_of(const PathTerm& p) const {
  std::vector<LangId> out;
  for (const auto& c : constraints_)
    if (c.kind == ConstraintKind::kRestrict && c.p == p) out.push_back(c.lang);
  return out;
}

std::set<PathVar> Clause::path_vars() const {
  std::set<PathVar> out;
  auto add_term = [&](const PathTerm& t) {
    if (t.head.is_var()) out.insert(t.head.var());
    if (t.is_complex && t.tail.is_var()) out.insert(t.tail.var());
  };
  for (const auto& c : constraints_) {
    switch (c.kind) {
      case ConstraintKind::kSub:
      case ConstraintKind::kRestrict:
        add_term(c.p);
        break;
      case ConstraintKind::kDiv:
      case ConstraintKind::kPrefix:
      case ConstraintKind::kPathEq:
        add_term(c.p);
        add_term(c.q);
        break;
      default:
        break;
    }
  }
  return out;
}

std::set<FoVar> Clause::fo_vars() const {
  std::set<FoVar> out;
  for (const auto& c : constraints_) {
    if (c.kind == ConstraintKind::kSort) out.insert(c.x);
    if (c.kind == ConstraintKind::kSub) {
      out.insert(c.x);
      out.insert(c.y);
    }
  }
  return out;
}

bool Clause::occurs_in_complex(PathVar v) const {
  for (const auto& c : constraints_) {
    if (c.p.is_complex && c.p.mentions(v)) return true;
    if (c.is_path_constraint() && c.q.is_complex && c.q.mentions(v)) return true;
  }
  return false;
}

bool Clause::related(const PathTerm& s, const PathTerm& t) const {
  for (const auto& c : constraints_) {
    if (!c.is_path_constraint()) continue;
    if ((c.p == s && c.q == t) || (c.p == t && c.q == s)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

SimpleTerm replace_simple(SimpleTerm s, PathVar v, SimpleTerm by) { return s == SimpleTerm::of(v) ? by : s; }

PathTerm replace_term(const PathTerm& term, PathVar v, const PathTerm& by) {
  if (!term.mentions(v)) return term;
  if (!term.is_complex) return by;
  if (by.is_complex) throw InvariantViolation("substitution would create a path term of length 3");
  return PathTerm::concat(replace_simple(term.head, v, by.head), replace_simple(term.tail, v, by.head));
}

}  // namespace

Clause subst_path_var(const Clause& phi, PathVar v, const PathTerm& t) {
  Clause out(phi.signature_);
  out.bindings_ = phi.bindings_;
  out.trails_ = phi.trails_;
  out.bottom_ = phi.bottom_;
  out.next_fo_ = phi.next_fo_;
  out.next_path_ = phi.next_path_;
  if (!t.mentions(v)) out.trails_.erase(v);
  for (const auto& c : phi.constraints_) {
    if (!c.mentions(v)) {
      out.constraints_.insert(c);
      continue;
    }
    switch (c.kind) {
      case ConstraintKind::kSub:
        if (t.is_complex) throw InvariantViolation("edge term would become complex");
        out.constraints_.insert(Constraint::sub(c.x, t, c.y));
        break;
      case ConstraintKind::kRestrict:
        out.constraints_.insert(Constraint::restrict(replace_term(c.p, v, t), c.lang));
        break;
      case ConstraintKind::kDiv:
        out.constraints_.insert(Constraint::div(replace_term(c.p, v, t), replace_term(c.q, v, t)));
        break;
      case ConstraintKind::kPrefix:
        out.constraints_.insert(Constraint::prefix(replace_term(c.p, v, t), replace_term(c.q, v, t)));
        break;
      case ConstraintKind::kPathEq:
        out.constraints_.insert(Constraint::path_eq(replace_term(c.p, v, t), replace_term(c.q, v, t)));
        break;
      default:
        out.constraints_.insert(c);
    }
  }
  return out;
}

Clause subst_fo_var(const Clause& phi, FoVar z, FoVar y) {
  if (z == y) throw InvariantViolation("subst_fo_var requires distinct variables");
  Clause out(phi.signature_);
  out.bottom_ = phi.bottom_;
  out.next_fo_ = phi.next_fo_;
  out.next_path_ = phi.next_path_;
  out.bindings_ = phi.bindings_;
  for (auto& [from, to] : out.bindings_)
    if (to == z) to = y;
  out.bindings_[z] = y;
  for (auto c : phi.constraints_) {
    if (c.kind == ConstraintKind::kSort || c.kind == ConstraintKind::kSub) {
      if (c.x == z) c.x = y;
      if (c.kind == ConstraintKind::kSub && c.y == z) c.y = y;
    }
    out.constraints_.insert(c);
  }
  out.trails_ = phi.trails_;
  for (auto& [var, trail] : out.trails_)
    for (auto& node : trail)
      if (node == z) node = y;
  return out;
}

// ---------------------------------------------------------------------------
// Classification

std::set<SimpleTerm> outgoing(const Clause& phi, FoVar x) {
  std::set<SimpleTerm> out;
  for (const auto& c : phi.constraints())
    if (c.kind == ConstraintKind::kSub && c.x == x && c.p.is_simple()) out.insert(c.p.head);
  return out;
}

std::vector<FoVar> tagged_variables(const Clause& phi) {
  std::vector<FoVar> out;
  for (auto x : phi.fo_vars()) {
    auto out_x = outgoing(phi, x);
    for (const auto& c : phi.constraints()) {
      if (c.kind != ConstraintKind::kPrefix || !c.p.is_simple() || !c.q.is_simple() || !c.q.head.is_var()) continue;
      if (out_x.count(c.p.head) && out_x.count(c.q.head)) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

std::optional<FoVar> tagged_variable(const Clause& phi) {
  auto tagged = tagged_variables(phi);
  if (tagged.size() > 1) throw InvariantViolation("more than one tagged variable");
  if (tagged.empty()) return std::nullopt;
  return tagged.front();
}

std::string admissibility_violation(const Clause& phi) {
  if (phi.is_bottom()) return {};
  const auto& cs = phi.constraints();
  for (const auto& c : cs)
    if ((c.kind == ConstraintKind::kPrefix || c.kind == ConstraintKind::kPathEq) && (c.p.is_complex || c.q.is_complex))
      return "complex-prefix-or-eq";
  for (auto v : phi.path_vars()) {
    int count = 0;
    for (const auto& c : cs)
      if (c.kind == ConstraintKind::kSub && c.p.is_var(v)) ++count;
    if (count != 1) return "Ad1";
  }
  std::map<FoVar, std::set<SimpleTerm>> out;
  for (auto x : phi.fo_vars()) out[x] = outgoing(phi, x);
  for (const auto& c : cs) {
    if (!c.is_path_constraint() || c.p.is_complex || c.q.is_complex) continue;
    bool found = false;
    for (const auto& [x, terms] : out)
      if (terms.count(c.p.head) && terms.count(c.q.head)) found = true;
    if (!found) return "Ad2";
  }
  bool has_prefix = false, has_eq = false;
  for (const auto& c : cs) {
    has_prefix |= c.kind == ConstraintKind::kPrefix;
    has_eq |= c.kind == ConstraintKind::kPathEq;
  }
  if (has_prefix && has_eq) return "Ad3";
  if (tagged_variables(phi).size() > 1) return "Ad4";
  std::vector<const Constraint*> prefixes;
  for (const auto& c : cs)
    if (c.kind == ConstraintKind::kPrefix) prefixes.push_back(&c);
  for (std::size_t i = 0; i < prefixes.size(); ++i)
    for (std::size_t j = i + 1; j < prefixes.size(); ++j) {
      const auto& s = prefixes[i]->p;
      const auto& t = prefixes[j]->p;
      if (!(s == t || (s.head.is_feature() && t.head.is_feature() && s != t))) return "Ad5";
    }
  for (const auto& c : cs) {
    if (c.kind == ConstraintKind::kPrefix && (c.p == c.q || (c.q.is_simple() && c.q.head.is_feature()))) return "Ad6";
    if (c.kind == ConstraintKind::kPathEq && c.p.is_simple() && c.q.is_simple() && c.p.head.is_feature() &&
        c.q.head.is_feature())
      return "Ad6";
  }
  return {};
}

Classification classify(const Clause& phi, const LangStore& store) {
  Classification cl;
  if (phi.is_bottom()) {
    // Bottom is solved by definition; the other shape conditions hold vacuously.
    cl.prime = cl.admissible = cl.simplified = cl.presolved = cl.solved = true;
    return cl;
  }
  const auto& cs = phi.constraints();

  bool all_simple = true;
  for (const auto& c : cs) {
    if (c.p.is_complex) all_simple = false;
    if (c.is_path_constraint() && c.q.is_complex) all_simple = false;
  }
  bool one_edge_per_var = true;
  for (auto v : phi.path_vars()) {
    int count = 0;
    for (const auto& c : cs)
      if (c.kind == ConstraintKind::kSub && c.p.is_var(v)) ++count;
    if (count > 1) one_edge_per_var = false;
  }
  bool no_relations = std::none_of(cs.begin(), cs.end(), [](const Constraint& c) { return c.is_path_constraint(); });
  cl.prime = all_simple && one_edge_per_var && no_relations;
  cl.admissible = admissibility_violation(phi).empty();

  bool si = all_simple;  // Si7
  std::map<FoVar, SortName> sorts;
  std::map<PathTerm, LangId> restriction;
  std::map<std::pair<FoVar, SimpleTerm>, FoVar> feature_edges;
  for (const auto& c : cs) {
    switch (c.kind) {
      case ConstraintKind::kSort: {
        auto [it, inserted] = sorts.emplace(c.x, c.sort);
        if (!inserted && it->second != c.sort) si = false;  // Si1
        break;
      }
      case ConstraintKind::kRestrict: {
        auto [it, inserted] = restriction.emplace(c.p, c.lang);
        if (!inserted && it->second != c.lang) si = false;  // Si2
        if (store.is_empty(c.lang)) si = false;              // Si3
        if (c.p.is_simple() && c.p.head.is_feature() && !store.props(c.lang).contains(c.p.head.feature()))
          si = false;  // Si4
        break;
      }
      case ConstraintKind::kSub:
        if (c.p.is_simple() && c.p.head.is_feature()) {
          auto [it, inserted] = feature_edges.emplace(std::make_pair(c.x, c.p.head), c.y);
          if (!inserted && it->second != c.y) si = false;  // Si5
        }
        break;
      case ConstraintKind::kPathEq:
      case ConstraintKind::kPrefix:
      case ConstraintKind::kAgree:
        si = false;  // Si6
        break;
      default:
        break;
    }
  }
  cl.simplified = si;

  // Ps1, read in both directions.
  bool ps = si;
  if (ps) {
    std::set<std::pair<SimpleTerm, SimpleTerm>> required;
    for (auto x : phi.fo_vars()) {
      auto terms = outgoing(phi, x);
      for (auto s : terms)
        for (auto t : terms)
          if (s < t && (s.is_var() || t.is_var())) required.emplace(s, t);
    }
    std::set<std::pair<SimpleTerm, SimpleTerm>> present;
    for (const auto& c : cs)
      if (c.kind == ConstraintKind::kDiv) present.emplace(c.p.head, c.q.head);
    ps = required == present;
  }
  cl.presolved = ps;

  bool so = si;
  if (so) {
    for (const auto& c : cs)
      if (c.kind == ConstraintKind::kDiv) so = false;  // So1
    for (const auto& c : cs) {
      if (c.kind != ConstraintKind::kSub || !c.p.head.is_var()) continue;
      auto terms = outgoing(phi, c.x);
      if (terms.size() > 1) so = false;  // So2
    }
  }
  cl.solved = so;
  return cl;
}

// ---------------------------------------------------------------------------
// Canonical form

namespace {

struct VarKey {
  bool path = false;
  std::uint32_t id = 0;
  auto operator<=>(const VarKey&) const = default;
};

struct Shape {
  std::vector<long long> templ;
  std::vector<int> refs;  // indices into the variable table
  std::vector<int> pos;   // invariant position code per ref
  // Exact layout for leaf rendering: token stream where a negative token -1-i
  // refers to refs[i]; symmetric constraints keep the operands separately.
  std::vector<long long> left;
  std::vector<long long> right;
  bool symmetric = false;
  long long head = 0;
};

class Canonicalizer {
 public:
  explicit Canonicalizer(const Clause& phi) {
    for (const auto& c : phi.constraints()) shapes_.push_back(shape_of(c));
    occurrences_.resize(vars_.size());
    for (std::size_t s = 0; s < shapes_.size(); ++s)
      for (std::size_t i = 0; i < shapes_[s].refs.size(); ++i) occurrences_[shapes_[s].refs[i]].emplace_back(s, i);
  }

  std::string run() {
    std::vector<long long> colors(vars_.size());
    for (std::size_t v = 0; v < vars_.size(); ++v) colors[v] = vars_[v].path ? 1 : 0;
    search(colors);
    return best_ ? *best_ : std::string{};
  }

 private:
  int var_index(VarKey k) {
    auto [it, inserted] = index_.emplace(k, static_cast<int>(vars_.size()));
    if (inserted) vars_.push_back(k);
    return it->second;
  }

  // Literal template of a term and the variable references it contains.
  void term(const PathTerm& t, std::vector<long long>& templ, std::vector<long long>& exact, std::vector<int>& refs,
            std::vector<int>& pos, int pos_base) {
    auto simple = [&](SimpleTerm s, int slot) {
      if (s.is_feature()) {
        templ.push_back(0);
        templ.push_back(s.id);
        exact.push_back(s.id);
      } else {
        templ.push_back(1);
        templ.push_back(-1);
        exact.push_back(-1 - static_cast<long long>(refs.size()));
        refs.push_back(var_index({true, s.id}));
        pos.push_back(pos_base + slot);
      }
    };
    templ.push_back(t.is_complex ? 2 : 1);
    exact.push_back(t.is_complex ? 1LL << 40 : (1LL << 40) + 1);
    simple(t.head, 0);
    if (t.is_complex) simple(t.tail, 1);
  }

  Shape shape_of(const Constraint& c) {
    Shape sh;
    sh.head = static_cast<long long>(c.kind);
    sh.templ.push_back(sh.head);
    auto fo = [&](FoVar v, int position) {
      sh.left.push_back(-1 - static_cast<long long>(sh.refs.size()));
      sh.refs.push_back(var_index({false, v.id}));
      sh.pos.push_back(position);
    };
    switch (c.kind) {
      case ConstraintKind::kSort:
        sh.templ.push_back(c.sort.id);
        sh.left.push_back(c.sort.id);
        fo(c.x, 0);
        break;
      case ConstraintKind::kAgree:
        fo(c.x, 0);
        fo(c.y, 0);
        sh.symmetric = true;
        break;
      case ConstraintKind::kSub: {
        fo(c.x, 0);
        std::vector<long long> t;
        term(c.p, sh.templ, sh.left, sh.refs, sh.pos, 1);
        fo(c.y, 3);
        break;
      }
      case ConstraintKind::kRestrict:
        sh.templ.push_back(c.lang.value);
        sh.left.push_back(c.lang.value);
        term(c.p, sh.templ, sh.left, sh.refs, sh.pos, 1);
        break;
      case ConstraintKind::kPrefix:
        term(c.p, sh.templ, sh.left, sh.refs, sh.pos, 1);
        term(c.q, sh.templ, sh.right, sh.refs, sh.pos, 3);
        break;
      case ConstraintKind::kDiv:
      case ConstraintKind::kPathEq: {
        sh.symmetric = true;
        std::vector<long long> tp, tq;
        std::vector<int> pp, pq;
        std::size_t before = sh.refs.size();
        term(c.p, tp, sh.left, sh.refs, pp, 1);
        std::size_t mid = sh.refs.size();
        term(c.q, tq, sh.right, sh.refs, pq, 3);
        // Operands ordered by literal template; equal templates share codes.
        if (tq < tp) {
          std::swap(tp, tq);
          for (auto& p : pp) p += 2;
          for (auto& p : pq) p -= 2;
        }
        if (tp == tq) {
          for (auto& p : pp) p = p > 2 ? p - 2 : p;
          for (auto& p : pq) p = p > 2 ? p - 2 : p;
        }
        sh.templ.insert(sh.templ.end(), tp.begin(), tp.end());
        sh.templ.insert(sh.templ.end(), tq.begin(), tq.end());
        (void)before;
        (void)mid;
        sh.pos.insert(sh.pos.end(), pp.begin(), pp.end());
        sh.pos.insert(sh.pos.end(), pq.begin(), pq.end());
        break;
      }
    }
    return sh;
  }

  // Color refinement to a fixpoint; colors are renumbered by sorted signature.
  void refine(std::vector<long long>& colors) const {
    std::size_t classes = std::set<long long>(colors.begin(), colors.end()).size();
    for (;;) {
      std::vector<std::vector<long long>> sigs(vars_.size());
      for (std::size_t v = 0; v < vars_.size(); ++v) {
        std::vector<std::vector<long long>> entries;
        for (auto [s, i] : occurrences_[v]) {
          const Shape& sh = shapes_[s];
          std::vector<long long> e = sh.templ;
          e.push_back(sh.pos[i]);
          std::vector<std::pair<int, long long>> others;
          for (std::size_t j = 0; j < sh.refs.size(); ++j) others.emplace_back(sh.pos[j], colors[sh.refs[j]]);
          std::sort(others.begin(), others.end());
          for (auto [p, col] : others) {
            e.push_back(p);
            e.push_back(col);
          }
          entries.push_back(std::move(e));
        }
        std::sort(entries.begin(), entries.end());
        sigs[v].push_back(colors[v]);
        for (auto& e : entries) {
          sigs[v].push_back(static_cast<long long>(e.size()));
          sigs[v].insert(sigs[v].end(), e.begin(), e.end());
        }
      }
      std::vector<std::vector<long long>> sorted = sigs;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (std::size_t v = 0; v < vars_.size(); ++v)
        colors[v] = std::lower_bound(sorted.begin(), sorted.end(), sigs[v]) - sorted.begin();
      if (sorted.size() == classes) return;
      classes = sorted.size();
    }
  }

  std::string render_leaf(const std::vector<long long>& colors) const {
    std::vector<std::vector<long long>> lines;
    for (const auto& sh : shapes_) {
      auto map_tokens = [&](const std::vector<long long>& in) {
        std::vector<long long> out;
        for (auto t : in) out.push_back(t < 0 ? -1 - colors[sh.refs[-1 - t]] : t);
        return out;
      };
      std::vector<long long> line{sh.head};
      auto l = map_tokens(sh.left);
      auto r = map_tokens(sh.right);
      if (sh.symmetric && sh.head == static_cast<long long>(ConstraintKind::kAgree)) {
        std::sort(l.begin(), l.end());
      } else if (sh.symmetric && r < l) {
        std::swap(l, r);
      }
      line.insert(line.end(), l.begin(), l.end());
      line.push_back(1LL << 50);
      line.insert(line.end(), r.begin(), r.end());
      lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    std::ostringstream os;
    for (const auto& line : lines) {
      for (auto t : line) os << t << ',';
      os << ';';
    }
    return os.str();
  }

  void search(std::vector<long long> colors) {
    if (leaves_ >= kMaxLeaves) return;
    refine(colors);
    std::map<long long, std::vector<int>> cells;
    for (std::size_t v = 0; v < vars_.size(); ++v) cells[colors[v]].push_back(static_cast<int>(v));
    const std::vector<int>* target = nullptr;
    for (const auto& [col, members] : cells)
      if (members.size() > 1) {
        target = &members;
        break;
      }
    if (!target) {
      ++leaves_;
      auto s = render_leaf(colors);
      if (!best_ || s < *best_) best_ = std::move(s);
      return;
    }
    for (int v : *target) {
      std::vector<long long> next(colors.size());
      for (std::size_t u = 0; u < colors.size(); ++u) next[u] = colors[u] * 2;
      next[v] = colors[v] * 2 - 1;
      search(std::move(next));
    }
  }

  static constexpr int kMaxLeaves = 512;

  std::vector<VarKey> vars_;
  std::map<VarKey, int> index_;
  std::vector<Shape> shapes_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> occurrences_;
  std::optional<std::string> best_;
  int leaves_ = 0;
};

}  // namespace

std::string canonicalize(const Clause& phi) {
  if (phi.is_bottom()) return "bottom";
  return Canonicalizer(phi).run();
}

// ---------------------------------------------------------------------------
// Rendering

std::string render(const PathTerm& t, const Signature& sig, const Alphabet& alphabet) {
  auto simple = [&](SimpleTerm s) {
    return s.is_feature() ? alphabet.name(s.feature()) : "$" + sig.path_name(s.var());
  };
  return t.is_complex ? simple(t.head) + "." + simple(t.tail) : simple(t.head);
}

std::string render(const Constraint& c, const Signature& sig, const LangStore& store) {
  const auto& al = store.alphabet();
  switch (c.kind) {
    case ConstraintKind::kSort:
      return sig.sorts.at(c.sort.id) + "(" + sig.fo_name(c.x) + ")";
    case ConstraintKind::kAgree:
      return sig.fo_name(c.x) + " = " + sig.fo_name(c.y);
    case ConstraintKind::kSub:
      return sig.fo_name(c.x) + " <" + render(c.p, sig, al) + "> " + sig.fo_name(c.y);
    case ConstraintKind::kDiv:
      return "div(" + render(c.p, sig, al) + ", " + render(c.q, sig, al) + ")";
    case ConstraintKind::kPrefix:
      return "prefix(" + render(c.p, sig, al) + ", " + render(c.q, sig, al) + ")";
    case ConstraintKind::kPathEq:
      return "patheq(" + render(c.p, sig, al) + ", " + render(c.q, sig, al) + ")";
    case ConstraintKind::kRestrict:
      return "in(" + render(c.p, sig, al) + ", " + store.describe(c.lang) + ")";
  }
  return {};
}

std::string render(const Clause& phi, const LangStore& store) {
  if (phi.is_bottom()) return "bottom\n";
  std::vector<std::string> lines;
  for (const auto& c : phi.constraints()) lines.push_back(render(c, *phi.signature(), store));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Translation

Clause translate_km(const std::vector<KmConstraint>& km, std::shared_ptr<const Signature> signature) {
  Clause phi(std::move(signature));
  for (const auto& k : km) {
    switch (k.kind) {
      case KmConstraint::Kind::kSort:
        phi.add(Constraint::sort_of(k.sort, k.x));
        break;
      case KmConstraint::Kind::kAgree:
        phi.add(Constraint::agree(k.x, k.y));
        break;
      case KmConstraint::Kind::kPath: {
        if (k.path.empty()) {
          phi.add(Constraint::agree(k.x, k.y));
          break;
        }
        FoVar cur = k.x;
        for (std::size_t i = 0; i < k.path.size(); ++i) {
          FoVar next = i + 1 == k.path.size() ? k.y : phi.fresh_fo();
          phi.add(Constraint::sub(cur, k.path[i], next));
          cur = next;
        }
        break;
      }
      case KmConstraint::Kind::kRegular: {
        PathVar mu = phi.fresh_path();
        phi.add(Constraint::sub(k.x, mu, k.y));
        phi.add(Constraint::restrict(mu, k.lang));
        break;
      }
    }
  }
  return phi;
}

}  // namespace funcert
