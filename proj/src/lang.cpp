#include "funcert/lang.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <mutex>
#include <queue>
#include <set>

#include "funcert/error.hpp"

namespace funcert {

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  if (names_.size() > 0xffff) throw Error("feature alphabet too large");
}

std::optional<Feature> Alphabet::find(std::string_view name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) return std::nullopt;
  return Feature{static_cast<std::uint16_t>(it - names_.begin())};
}

std::vector<Feature> Alphabet::features() const {
  std::vector<Feature> out;
  for (std::size_t i = 0; i < names_.size(); ++i) out.push_back(Feature{static_cast<std::uint16_t>(i)});
  return out;
}

std::string Alphabet::render(std::span<const Feature> word) const {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += '.';
    out += name(word[i]);
  }
  return out;
}

Word Alphabet::parse_word(std::string_view dotted) const {
  Word out;
  std::size_t start = 0;
  while (start <= dotted.size()) {
    auto dot = dotted.find('.', start);
    auto piece = dotted.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    auto f = find(piece);
    if (!f) throw Error("unknown feature '" + std::string(piece) + "'");
    out.push_back(*f);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regex AST and parser

RegexAst RegexAst::literal(std::string name) {
  RegexAst a;
  a.kind = Kind::kFeature;
  a.feature = std::move(name);
  return a;
}

RegexAst RegexAst::concat(std::vector<RegexAst> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  RegexAst a;
  a.kind = parts.empty() ? Kind::kEpsilon : Kind::kConcat;
  a.children = std::move(parts);
  return a;
}

RegexAst RegexAst::alternation(std::vector<RegexAst> parts) {
  if (parts.size() == 1) return std::move(parts.front());
  RegexAst a;
  a.kind = parts.empty() ? Kind::kEmpty : Kind::kUnion;
  a.children = std::move(parts);
  return a;
}

RegexAst RegexAst::star(RegexAst inner) {
  RegexAst a;
  a.kind = Kind::kStar;
  a.children.push_back(std::move(inner));
  return a;
}

RegexAst RegexAst::plus(RegexAst inner) {
  RegexAst a;
  a.kind = Kind::kPlus;
  a.children.push_back(std::move(inner));
  return a;
}

RegexAst RegexAst::empty() { return RegexAst{}; }

RegexAst RegexAst::epsilon() {
  RegexAst a;
  a.kind = Kind::kEpsilon;
  return a;
}

namespace {

class RegexParser {
 public:
  explicit RegexParser(std::string_view text) : text_(text) {}

  RegexAst parse() {
    skip_space();
    if (pos_ == text_.size()) fail("empty regular expression");
    auto ast = parse_union();
    skip_space();
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return ast;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, 1, pos_ + 1); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool starts_atom() {
    skip_space();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return c == '(' || c == '{' || std::islower(static_cast<unsigned char>(c));
  }

  std::string identifier() {
    skip_space();
    if (pos_ >= text_.size() || !std::islower(static_cast<unsigned char>(text_[pos_]))) fail("expected feature name");
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  RegexAst parse_union() {
    std::vector<RegexAst> parts;
    parts.push_back(parse_concat());
    while (peek('|')) {
      ++pos_;
      parts.push_back(parse_concat());
    }
    return RegexAst::alternation(std::move(parts));
  }

  RegexAst parse_concat() {
    std::vector<RegexAst> parts;
    parts.push_back(parse_postfix());
    for (;;) {
      if (peek('.')) {
        ++pos_;
        parts.push_back(parse_postfix());
      } else if (starts_atom()) {
        parts.push_back(parse_postfix());
      } else {
        break;
      }
    }
    return RegexAst::concat(std::move(parts));
  }

  RegexAst parse_postfix() {
    auto atom = parse_atom();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        atom = RegexAst::star(std::move(atom));
      } else if (peek('+')) {
        ++pos_;
        atom = RegexAst::plus(std::move(atom));
      } else {
        return atom;
      }
    }
  }

  RegexAst parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of regular expression");
    if (text_[pos_] == '(') {
      ++pos_;
      if (peek(')')) {
        ++pos_;
        return RegexAst::epsilon();
      }
      auto inner = parse_union();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (text_[pos_] == '{') {
      ++pos_;
      std::vector<RegexAst> parts;
      parts.push_back(RegexAst::literal(identifier()));
      while (peek(',')) {
        ++pos_;
        parts.push_back(RegexAst::literal(identifier()));
      }
      if (!peek('}')) fail("expected '}'");
      ++pos_;
      return RegexAst::alternation(std::move(parts));
    }
    return RegexAst::literal(identifier());
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

// Thompson construction; symbol -1 is an epsilon move.
struct Nfa {
  std::vector<std::vector<std::pair<int, int>>> moves;

  int add_state() {
    moves.emplace_back();
    return static_cast<int>(moves.size()) - 1;
  }
  void add(int from, int symbol, int to) { moves[from].emplace_back(symbol, to); }
};

struct Fragment {
  int start;
  int accept;
};

Fragment build(Nfa& nfa, const RegexAst& ast, const Alphabet& alphabet) {
  using Kind = RegexAst::Kind;
  Fragment fr{nfa.add_state(), nfa.add_state()};
  switch (ast.kind) {
    case Kind::kFeature: {
      auto f = alphabet.find(ast.feature);
      if (!f) throw Error("unknown feature '" + ast.feature + "' in regular expression");
      nfa.add(fr.start, f->id, fr.accept);
      break;
    }
    case Kind::kEpsilon:
      nfa.add(fr.start, -1, fr.accept);
      break;
    case Kind::kEmpty:
      break;
    case Kind::kConcat: {
      int cur = fr.start;
      for (const auto& child : ast.children) {
        auto sub = build(nfa, child, alphabet);
        nfa.add(cur, -1, sub.start);
        cur = sub.accept;
      }
      nfa.add(cur, -1, fr.accept);
      break;
    }
    case Kind::kUnion:
      for (const auto& child : ast.children) {
        auto sub = build(nfa, child, alphabet);
        nfa.add(fr.start, -1, sub.start);
        nfa.add(sub.accept, -1, fr.accept);
      }
      break;
    case Kind::kStar:
    case Kind::kPlus: {
      auto sub = build(nfa, ast.children.at(0), alphabet);
      nfa.add(fr.start, -1, sub.start);
      nfa.add(sub.accept, -1, sub.start);
      nfa.add(sub.accept, -1, fr.accept);
      if (ast.kind == Kind::kStar) nfa.add(fr.start, -1, fr.accept);
      break;
    }
  }
  return fr;
}

std::vector<int> eps_closure(const Nfa& nfa, std::vector<int> states) {
  std::vector<char> seen(nfa.moves.size(), 0);
  for (int s : states) seen[s] = 1;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (auto [sym, to] : nfa.moves[states[i]]) {
      if (sym == -1 && !seen[to]) {
        seen[to] = 1;
        states.push_back(to);
      }
    }
  }
  std::sort(states.begin(), states.end());
  return states;
}

Dfa determinize(const Nfa& nfa, int start, int accept, int num_features) {
  std::map<std::vector<int>, int> ids;
  std::vector<std::vector<int>> sets;
  auto intern = [&](std::vector<int> set) {
    auto [it, inserted] = ids.emplace(set, static_cast<int>(sets.size()));
    if (inserted) sets.push_back(std::move(set));
    return it->second;
  };
  intern(eps_closure(nfa, {start}));
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    std::vector<int> row(num_features, Dfa::kNone);
    for (int f = 0; f < num_features; ++f) {
      std::vector<int> target;
      for (int s : sets[i])
        for (auto [sym, to] : nfa.moves[s])
          if (sym == f) target.push_back(to);
      if (target.empty()) continue;
      row[f] = intern(eps_closure(nfa, std::move(target)));
    }
    rows.push_back(std::move(row));
  }
  Dfa dfa = Dfa::with_states(static_cast<int>(sets.size()), num_features);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    dfa.final[i] = std::binary_search(sets[i].begin(), sets[i].end(), accept);
    std::copy(rows[i].begin(), rows[i].end(), dfa.delta.begin() + static_cast<std::ptrdiff_t>(i * num_features));
  }
  return dfa;
}

Dfa empty_canonical(int num_features) { return Dfa::with_states(1, num_features); }

std::vector<int> canonical_key(const Dfa& d) {
  std::vector<int> key;
  key.reserve(2 + d.final.size() + d.delta.size());
  key.push_back(d.num_states);
  key.push_back(d.num_features);
  for (char c : d.final) key.push_back(c);
  key.insert(key.end(), d.delta.begin(), d.delta.end());
  return key;
}

// Words of the language up to `max_len`, enumerated by DFS in lexicographic order.
void enumerate(const Dfa& d, int q, Word& prefix, std::size_t max_len, std::vector<Word>& out) {
  if (!prefix.empty() && d.final[q]) out.push_back(prefix);
  if (prefix.size() == max_len) return;
  for (int f = 0; f < d.num_features; ++f) {
    int n = d.next(q, Feature{static_cast<std::uint16_t>(f)});
    if (n == Dfa::kNone) continue;
    prefix.push_back(Feature{static_cast<std::uint16_t>(f)});
    enumerate(d, n, prefix, max_len, out);
    prefix.pop_back();
  }
}

bool has_cycle(const Dfa& d) {
  std::vector<int> color(d.num_states, 0);
  std::function<bool(int)> visit = [&](int q) {
    color[q] = 1;
    for (int f = 0; f < d.num_features; ++f) {
      int n = d.delta[static_cast<std::size_t>(q) * d.num_features + f];
      if (n == Dfa::kNone) continue;
      if (color[n] == 1) return true;
      if (color[n] == 0 && visit(n)) return true;
    }
    color[q] = 2;
    return false;
  };
  return visit(d.initial);
}


// Regex text for an automaton by state elimination. `prec` is 0 for a
// union, 1 for a concatenation, 2 for an atom or starred term.
struct Re {
  std::string text;
  int prec = 2;
  bool eps = false;
};

std::string wrap(const Re& r, int need) { return r.prec < need ? "(" + r.text + ")" : r.text; }

Re re_alt(const std::optional<Re>& a, const Re& b) {
  if (!a) return b;
  if (a->text == b.text) return b;
  if (a->eps) return {"()|" + b.text, 0};
  if (b.eps) return {a->text + "|()", 0};
  return {a->text + "|" + b.text, 0};
}

Re re_cat(const Re& a, const Re& b) {
  if (a.eps) return b;
  if (b.eps) return a;
  std::string left = wrap(a, 1);
  if (b.prec == 2 && b.text == wrap(a, 2) + "*") return {wrap(a, 2) + "+", 2};
  return {left + "." + wrap(b, 1), 1};
}

Re re_star(const Re& a) {
  if (a.eps) return a;
  return {wrap(a, 2) + "*", 2};
}

std::string dfa_to_regex(const Dfa& d, const Alphabet& alphabet) {
  const int n = d.num_states, start = n, end = n + 1;
  std::vector<std::vector<std::optional<Re>>> r(n + 2, std::vector<std::optional<Re>>(n + 2));
  r[start][d.initial] = Re{"()", 2, true};
  for (int q = 0; q < n; ++q) {
    if (d.final[q]) r[q][end] = Re{"()", 2, true};
    for (int f = 0; f < d.num_features; ++f) {
      int to = d.next(q, Feature{static_cast<std::uint16_t>(f)});
      if (to != Dfa::kNone) r[q][to] = re_alt(r[q][to], Re{alphabet.name(Feature{static_cast<std::uint16_t>(f)})});
    }
  }
  for (int k = 0; k < n; ++k) {
    std::optional<Re> loop = r[k][k] ? std::optional<Re>(re_star(*r[k][k])) : std::nullopt;
    for (int i = 0; i < n + 2; ++i) {
      if (i == k || !r[i][k]) continue;
      for (int j = 0; j < n + 2; ++j) {
        if (j == k || !r[k][j]) continue;
        Re path = loop ? re_cat(*r[i][k], re_cat(*loop, *r[k][j])) : re_cat(*r[i][k], *r[k][j]);
        r[i][j] = re_alt(r[i][j], path);
      }
    }
    for (int i = 0; i < n + 2; ++i) r[i][k].reset(), r[k][i].reset();
  }
  return r[start][end] ? r[start][end]->text : "{}";
}

}  // namespace

RegexAst parse_regex(std::string_view text) { return RegexParser(text).parse(); }

Dfa Dfa::with_states(int num_states, int num_features) {
  Dfa d;
  d.num_states = num_states;
  d.num_features = num_features;
  d.final.assign(num_states, 0);
  d.delta.assign(static_cast<std::size_t>(num_states) * num_features, kNone);
  return d;
}

// ---------------------------------------------------------------------------
// Canonicalization

Dfa canonical_dfa(const Dfa& input, int k) {
  Dfa d = input;
  // Strip epsilon: a fresh non-final copy of the initial state becomes initial.
  if (d.final[d.initial]) {
    int copy = d.num_states++;
    d.final.push_back(0);
    for (int f = 0; f < k; ++f) d.delta.push_back(d.delta[static_cast<std::size_t>(d.initial) * k + f]);
    d.initial = copy;
  }
  const int n = d.num_states;
  auto at = [&](int q, int f) { return d.delta[static_cast<std::size_t>(q) * k + f]; };

  std::vector<char> reach(n, 0), coreach(n, 0);
  std::vector<int> stack{d.initial};
  reach[d.initial] = 1;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int f = 0; f < k; ++f) {
      int t = at(q, f);
      if (t != Dfa::kNone && !reach[t]) {
        reach[t] = 1;
        stack.push_back(t);
      }
    }
  }
  std::vector<std::vector<int>> preds(n);
  for (int q = 0; q < n; ++q)
    for (int f = 0; f < k; ++f)
      if (at(q, f) != Dfa::kNone) preds[at(q, f)].push_back(q);
  for (int q = 0; q < n; ++q)
    if (d.final[q]) {
      coreach[q] = 1;
      stack.push_back(q);
    }
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int p : preds[q])
      if (!coreach[p]) {
        coreach[p] = 1;
        stack.push_back(p);
      }
  }
  if (!coreach[d.initial]) return empty_canonical(k);
  auto live = [&](int q) { return q != Dfa::kNone && reach[q] && coreach[q]; };

  // Moore refinement; the implicit sink is class -1.
  std::vector<int> cls(n, -1);
  for (int q = 0; q < n; ++q)
    if (live(q)) cls[q] = d.final[q] ? 1 : 0;
  for (;;) {
    std::map<std::vector<int>, int> sig_ids;
    std::vector<int> next(n, -1);
    for (int q = 0; q < n; ++q) {
      if (!live(q)) continue;
      std::vector<int> sig{cls[q]};
      for (int f = 0; f < k; ++f) sig.push_back(live(at(q, f)) ? cls[at(q, f)] : -1);
      next[q] = sig_ids.emplace(std::move(sig), static_cast<int>(sig_ids.size())).first->second;
    }
    std::set<int> before, after;
    for (int q = 0; q < n; ++q)
      if (live(q)) {
        before.insert(cls[q]);
        after.insert(next[q]);
      }
    cls = std::move(next);
    if (after.size() == before.size()) break;
  }

  // Breadth-first renumbering over features in id order.
  std::map<int, int> order;
  std::vector<int> rep;
  std::queue<int> queue;
  order[cls[d.initial]] = 0;
  rep.push_back(d.initial);
  queue.push(d.initial);
  while (!queue.empty()) {
    int q = queue.front();
    queue.pop();
    for (int f = 0; f < k; ++f) {
      int t = at(q, f);
      if (!live(t)) continue;
      if (order.emplace(cls[t], static_cast<int>(rep.size())).second) {
        rep.push_back(t);
        queue.push(t);
      }
    }
  }
  Dfa out = Dfa::with_states(static_cast<int>(rep.size()), k);
  out.initial = 0;
  for (std::size_t i = 0; i < rep.size(); ++i) {
    int q = rep[i];
    out.final[i] = d.final[q];
    for (int f = 0; f < k; ++f) {
      int t = at(q, f);
      if (live(t)) out.delta[i * k + f] = order.at(cls[t]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Store

LangStore::LangStore(Alphabet alphabet, std::size_t cap) : alphabet_(std::move(alphabet)), cap_(cap) {}

std::size_t LangStore::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

const LangStore::Entry& LangStore::entry(LangId lang) const {
  std::shared_lock lock(mutex_);
  if (lang.value >= entries_.size()) throw InvariantViolation("unknown language id " + std::to_string(lang.value));
  return entries_[lang.value];
}

const Dfa& LangStore::dfa(LangId lang) const { return entry(lang).dfa; }

LangId LangStore::intern(Dfa canonical, std::string source) {
  auto key = canonical_key(canonical);
  {
    std::shared_lock lock(mutex_);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
  }
  std::unique_lock lock(mutex_);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  if (entries_.size() >= cap_)
    throw ResourceLimit("language store exceeded " + std::to_string(cap_) + " distinct languages");
  LangId id{static_cast<std::uint32_t>(entries_.size())};
  entries_.push_back(Entry{std::move(canonical), std::move(source)});
  index_.emplace(std::move(key), id);
  return id;
}

LangId LangStore::admit(const Dfa& dfa) { return intern(canonical_dfa(dfa, static_cast<int>(alphabet_.size())), {}); }

LangId LangStore::compile(const RegexAst& ast) {
  Nfa nfa;
  auto fr = build(nfa, ast, alphabet_);
  const int k = static_cast<int>(alphabet_.size());
  return intern(canonical_dfa(determinize(nfa, fr.start, fr.accept, k), k), {});
}

LangId LangStore::compile(std::string_view regex_text) {
  Nfa nfa;
  auto fr = build(nfa, parse_regex(regex_text), alphabet_);
  const int k = static_cast<int>(alphabet_.size());
  auto id = intern(canonical_dfa(determinize(nfa, fr.start, fr.accept, k), k), {});
  std::unique_lock lock(mutex_);
  if (entries_[id.value].source.empty()) entries_[id.value].source = std::string(regex_text);
  return id;
}

LangId LangStore::empty() { return intern(empty_canonical(static_cast<int>(alphabet_.size())), {}); }

LangId LangStore::universe() {
  const int k = static_cast<int>(alphabet_.size());
  Dfa d = Dfa::with_states(2, k);
  d.final[1] = 1;
  for (int f = 0; f < k; ++f) {
    d.delta[f] = 1;
    d.delta[k + f] = 1;
  }
  return admit(d);
}

LangId LangStore::single(Feature f) {
  std::vector<Feature> fs{f};
  return of_features(fs);
}

LangId LangStore::of_features(std::span<const Feature> fs) {
  const int k = static_cast<int>(alphabet_.size());
  Dfa d = Dfa::with_states(2, k);
  d.final[1] = 1;
  for (auto f : fs) d.next(0, f) = 1;
  return admit(d);
}

bool LangStore::member(LangId lang, std::span<const Feature> word) const {
  if (word.empty()) return false;
  const Dfa& d = dfa(lang);
  int q = d.initial;
  for (auto f : word) {
    if (f.id >= d.num_features) return false;
    q = d.next(q, f);
    if (q == Dfa::kNone) return false;
  }
  return d.final[q] != 0;
}

bool LangStore::is_empty(LangId lang) const {
  const Dfa& d = dfa(lang);
  return d.num_states == 1 && !d.final[0] &&
         std::all_of(d.delta.begin(), d.delta.end(), [](int t) { return t == Dfa::kNone; });
}

LangId LangStore::intersect(LangId a, LangId b) {
  if (a == b) return a;
  auto key = std::minmax(a, b);
  {
    std::shared_lock lock(mutex_);
    if (auto it = intersect_cache_.find(key); it != intersect_cache_.end()) return it->second;
  }
  const Dfa& x = dfa(a);
  const Dfa& y = dfa(b);
  const int k = static_cast<int>(alphabet_.size());
  std::map<std::pair<int, int>, int> ids;
  std::vector<std::pair<int, int>> states{{x.initial, y.initial}};
  ids[states[0]] = 0;
  std::vector<int> delta;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (int f = 0; f < k; ++f) {
      Feature ft{static_cast<std::uint16_t>(f)};
      int p = x.next(states[i].first, ft);
      int q = y.next(states[i].second, ft);
      if (p == Dfa::kNone || q == Dfa::kNone) {
        delta.push_back(Dfa::kNone);
        continue;
      }
      auto [it, inserted] = ids.emplace(std::make_pair(p, q), static_cast<int>(states.size()));
      if (inserted) states.emplace_back(p, q);
      delta.push_back(it->second);
    }
  }
  Dfa prod = Dfa::with_states(static_cast<int>(states.size()), k);
  prod.delta = std::move(delta);
  for (std::size_t i = 0; i < states.size(); ++i)
    prod.final[i] = x.final[states[i].first] && y.final[states[i].second];
  LangId result = admit(prod);
  std::unique_lock lock(mutex_);
  intersect_cache_.emplace(key, result);
  return result;
}

LangId LangStore::quotient(Feature f, LangId lang) {
  auto key = std::make_pair(f, lang);
  {
    std::shared_lock lock(mutex_);
    if (auto it = quotient_cache_.find(key); it != quotient_cache_.end()) return it->second;
  }
  Dfa d = dfa(lang);
  LangId result;
  int start = d.next(d.initial, f);
  if (start == Dfa::kNone) {
    result = empty();
  } else {
    d.initial = start;
    result = admit(d);
  }
  std::unique_lock lock(mutex_);
  quotient_cache_.emplace(key, result);
  return result;
}

std::vector<Feature> LangStore::first_features(LangId lang) const {
  const Dfa& d = dfa(lang);
  std::vector<Feature> out;
  for (int f = 0; f < d.num_features; ++f) {
    Feature ft{static_cast<std::uint16_t>(f)};
    if (d.next(d.initial, ft) != Dfa::kNone) out.push_back(ft);
  }
  return out;
}

std::vector<Feature> LangStore::continuation_features(LangId lang) const {
  const Dfa& d = dfa(lang);
  std::vector<char> entered(d.num_states, 0);
  for (int q = 0; q < d.num_states; ++q)
    for (int f = 0; f < d.num_features; ++f) {
      int t = d.delta[static_cast<std::size_t>(q) * d.num_features + f];
      if (t != Dfa::kNone) entered[t] = 1;
    }
  std::vector<Feature> out;
  for (int f = 0; f < d.num_features; ++f) {
    Feature ft{static_cast<std::uint16_t>(f)};
    for (int q = 0; q < d.num_states; ++q)
      if (entered[q] && d.next(q, ft) != Dfa::kNone) {
        out.push_back(ft);
        break;
      }
  }
  return out;
}

LangProps LangStore::props(LangId lang) const {
  const Dfa& d = dfa(lang);
  LangProps p;
  p.is_empty = is_empty(lang);
  p.one_letter.assign(alphabet_.size(), 0);
  p.all_words_len1 = true;
  for (int f = 0; f < d.num_features; ++f) {
    Feature ft{static_cast<std::uint16_t>(f)};
    int t = d.next(d.initial, ft);
    if (t == Dfa::kNone) continue;
    p.one_letter[f] = d.final[t];
    for (int g = 0; g < d.num_features; ++g)
      if (d.next(t, Feature{static_cast<std::uint16_t>(g)}) != Dfa::kNone) p.all_words_len1 = false;
  }
  return p;
}

std::vector<Decomposition> LangStore::dfun(LangId lang) {
  {
    std::shared_lock lock(mutex_);
    if (auto it = dfun_cache_.find(lang); it != dfun_cache_.end()) return it->second;
  }
  if (is_empty(lang)) throw InvariantViolation("dfun of the empty language");
  const Dfa source = dfa(lang);
  std::set<Decomposition> pairs;
  for (int q = 0; q < source.num_states; ++q) {
    Dfa prefix = source;
    std::fill(prefix.final.begin(), prefix.final.end(), 0);
    prefix.final[q] = 1;
    LangId p = admit(prefix);
    if (is_empty(p)) continue;
    Dfa suffix = source;
    suffix.initial = q;
    LangId s = admit(suffix);
    if (is_empty(s)) continue;
    pairs.insert(Decomposition{p, s});
  }
  std::vector<Decomposition> out(pairs.begin(), pairs.end());
  std::unique_lock lock(mutex_);
  dfun_cache_.emplace(lang, out);
  return out;
}

std::optional<Feature> LangStore::as_single_feature(LangId lang) const {
  const Dfa& d = dfa(lang);
  if (d.num_states != 2) return std::nullopt;
  auto firsts = first_features(lang);
  if (firsts.size() != 1) return std::nullopt;
  auto p = props(lang);
  if (!p.all_words_len1 || !p.contains(firsts[0])) return std::nullopt;
  return firsts[0];
}

std::optional<Word> LangStore::shortest_word(LangId lang) const {
  const Dfa& d = dfa(lang);
  if (is_empty(lang)) return std::nullopt;
  // BFS in feature order yields the length-lexicographically least word.
  std::vector<int> parent(d.num_states, -2), via(d.num_states, -1);
  std::queue<int> queue;
  queue.push(d.initial);
  parent[d.initial] = -1;
  int hit = -1;
  // The initial state is never final after epsilon stripping, so the first
  // final state dequeued ends the search.
  while (!queue.empty() && hit < 0) {
    int q = queue.front();
    queue.pop();
    for (int f = 0; f < d.num_features && hit < 0; ++f) {
      int t = d.next(q, Feature{static_cast<std::uint16_t>(f)});
      if (t == Dfa::kNone || parent[t] != -2) continue;
      parent[t] = q;
      via[t] = f;
      if (d.final[t]) hit = t;
      queue.push(t);
    }
  }
  if (hit < 0) return std::nullopt;
  Word w;
  for (int q = hit; parent[q] != -1; q = parent[q]) w.push_back(Feature{static_cast<std::uint16_t>(via[q])});
  std::reverse(w.begin(), w.end());
  return w;
}

std::vector<Word> LangStore::words_up_to(LangId lang, std::size_t max_len) const {
  const Dfa& d = dfa(lang);
  std::vector<Word> out;
  Word prefix;
  enumerate(d, d.initial, prefix, max_len, out);
  std::sort(out.begin(), out.end(), [](const Word& a, const Word& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  return out;
}

std::optional<Word> LangStore::sample_word(LangId lang, std::mt19937& rng, std::size_t max_len) const {
  const Dfa& d = dfa(lang);
  if (is_empty(lang)) return std::nullopt;
  // Random walk; trimmed DFAs guarantee a final state stays reachable.
  for (int attempt = 0; attempt < 64; ++attempt) {
    Word w;
    int q = d.initial;
    while (w.size() < max_len) {
      std::vector<int> options;
      for (int f = 0; f < d.num_features; ++f)
        if (d.next(q, Feature{static_cast<std::uint16_t>(f)}) != Dfa::kNone) options.push_back(f);
      if (options.empty()) break;
      int f = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      w.push_back(Feature{static_cast<std::uint16_t>(f)});
      q = d.next(q, w.back());
      if (d.final[q] && std::uniform_int_distribution<int>(0, 2)(rng) == 0) return w;
    }
    if (!w.empty() && d.final[q]) return w;
  }
  return shortest_word(lang);
}

std::string LangStore::describe(LangId lang) const {
  const Entry& e = entry(lang);
  if (!e.source.empty()) return e.source;
  if (is_empty(lang)) return "{}";
  if (!has_cycle(e.dfa)) {
    std::vector<Word> words;
    Word prefix;
    enumerate(e.dfa, e.dfa.initial, prefix, static_cast<std::size_t>(e.dfa.num_states), words);
    if (words.size() <= 4) {
      std::string out;
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += '|';
        out += alphabet_.render(words[i]);
      }
      return out;
    }
  }
  return dfa_to_regex(e.dfa, alphabet_);
}

}  // namespace funcert
