#include "funcert/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "funcert/error.hpp"

namespace funcert {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Message of a ParseError without its "line:column: " prefix.
std::string bare_message(const ParseError& e) {
  std::string what = e.what();
  auto first = what.find(':');
  auto second = first == std::string::npos ? first : what.find(':', first + 1);
  return second == std::string::npos ? what : what.substr(second + 2);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Problem run() {
    Problem p;
    skip_space();
    while (!at_end()) {
      statement(p);
      skip_space();
    }
    return p;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, column()); }
  int column() const { return static_cast<int>(pos_ - line_start_ + 1); }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end()) {
      char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#' || (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/')) {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  bool accept(char c) {
    skip_space();
    if (peek() != c) return false;
    advance();
    return true;
  }

  std::string ident() {
    skip_space();
    if (!ident_start(peek())) fail("expected an identifier");
    std::size_t start = pos_;
    while (!at_end() && ident_char(peek())) advance();
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string path_var() {
    skip_space();
    if (peek() != '$') fail("expected a path variable");
    advance();
    if (!ident_start(peek())) fail("expected a path variable name after '$'");
    return ident();
  }

  // Raw text up to the closing delimiter at nesting depth zero.
  std::string raw_until(char close, int& start_column) {
    skip_space();
    start_column = column();
    std::size_t start = pos_;
    int depth = 0;
    while (!at_end()) {
      char c = peek();
      if (c == '\n') fail(std::string("expected '") + close + "' before end of line");
      if (depth == 0 && c == close) break;
      if (depth == 0 && close == ')' && c == ',') fail("unexpected ','");
      if (c == '(' || c == '{') ++depth;
      if (c == ')' || c == '}') --depth;
      advance();
    }
    if (at_end()) fail(std::string("missing '") + close + "'");
    std::string out(text_.substr(start, pos_ - start));
    while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
    advance();
    return out;
  }

  ParsedTerm simple_term(ParsedTerm t, bool second) {
    skip_space();
    bool var = peek() == '$';
    std::string name = var ? path_var() : ident();
    if (second) {
      t.second_is_path_var = var;
      t.second = name;
    } else {
      t.is_path_var = var;
      t.first = name;
    }
    return t;
  }

  ParsedTerm term() {
    ParsedTerm t = simple_term({}, false);
    skip_space();
    if (peek() == '.') {
      advance();
      t.is_complex = true;
      t = simple_term(t, true);
    }
    return t;
  }

  void declaration(std::vector<std::string>& out) {
    do {
      out.push_back(ident());
    } while (accept(','));
    expect(';');
  }

  void statement(Problem& p) {
    Statement s;
    s.line = line_;
    s.column = column();
    if (peek() == '$') fail("a statement cannot start with a path variable");
    std::string head = ident();

    if (head == "features" || head == "sorts" || head == "pathvars") {
      skip_space();
      if (peek() != '(' && peek() != '=') {
        if (head == "features") declaration(p.features);
        if (head == "sorts") declaration(p.sorts);
        if (head == "pathvars") {
          std::vector<std::string> ignored;
          do {
            ignored.push_back(path_var());
          } while (accept(','));
          expect(';');
        }
        return;
      }
    }

    skip_space();
    if (peek() == '(') {
      advance();
      static const std::map<std::string, Statement::Kind> kExpert = {
          {"div", Statement::Kind::kDiv}, {"prefix", Statement::Kind::kPrefix},
          {"patheq", Statement::Kind::kPathEq}, {"in", Statement::Kind::kIn}};
      auto it = kExpert.find(head);
      if (it == kExpert.end()) {
        s.kind = Statement::Kind::kSort;
        s.sort = head;
        s.x = ident();
        expect(')');
      } else {
        s.kind = it->second;
        s.t1 = term();
        expect(',');
        if (s.kind == Statement::Kind::kIn) {
          s.regex = raw_until(')', s.regex_column);
          if (s.regex.empty()) fail("empty regular expression");
        } else {
          s.t2 = term();
          expect(')');
        }
      }
      expect(';');
      p.statements.push_back(std::move(s));
      return;
    }

    s.x = head;
    if (accept('=')) {
      s.kind = Statement::Kind::kAgree;
      s.y = ident();
    } else if (accept('<')) {
      s.kind = Statement::Kind::kRegular;
      s.regex = raw_until('>', s.regex_column);
      if (s.regex.empty()) fail("empty regular expression");
      s.y = ident();
    } else if (peek() == '$') {
      s.kind = Statement::Kind::kEdge;
      s.t1.is_path_var = true;
      s.t1.first = path_var();
      s.y = ident();
    } else {
      s.kind = Statement::Kind::kPath;
      std::vector<std::string> names;
      skip_space();
      while (ident_start(peek())) {
        names.push_back(ident());
        skip_space();
      }
      if (names.size() < 2) fail("expected a feature path and a target variable");
      s.y = names.back();
      names.pop_back();
      s.path = std::move(names);
    }
    expect(';');
    p.statements.push_back(std::move(s));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::size_t line_start_ = 0;
};

}  // namespace

Problem parse_problem(std::string_view text) {
  Problem p = Parser(text).run();
  if (p.statements.empty()) throw ParseError("no constraints", 1, 1);
  return p;
}

Problem parse_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

Alphabet alphabet_of(const Problem& p) { return Alphabet(p.features); }

BuiltProblem build(const Problem& p, LangStore& store) {
  const auto& al = store.alphabet();
  auto sig = std::make_shared<Signature>();
  sig->sorts = p.sorts;
  std::map<std::string, FoVar> fo;
  std::map<std::string, PathVar> pv;
  auto fo_var = [&](const std::string& name) {
    auto [it, inserted] = fo.emplace(name, FoVar{static_cast<std::uint32_t>(sig->fo_names.size())});
    if (inserted) sig->fo_names.push_back(name);
    return it->second;
  };
  auto path_var = [&](const std::string& name) {
    auto [it, inserted] = pv.emplace(name, PathVar{static_cast<std::uint32_t>(sig->path_names.size())});
    if (inserted) sig->path_names.push_back(name);
    return it->second;
  };
  auto feature = [&](const std::string& name, const Statement& s) {
    auto f = al.find(name);
    if (!f) throw ParseError("undeclared feature '" + name + "'", s.line, s.column);
    return *f;
  };

  // Register every variable first so fresh ids come after the named ones.
  for (const auto& s : p.statements) {
    switch (s.kind) {
      case Statement::Kind::kSort:
        fo_var(s.x);
        break;
      case Statement::Kind::kAgree:
      case Statement::Kind::kPath:
      case Statement::Kind::kRegular:
        fo_var(s.x);
        fo_var(s.y);
        break;
      case Statement::Kind::kEdge:
        fo_var(s.x);
        path_var(s.t1.first);
        fo_var(s.y);
        break;
      default:
        for (const auto* t : {&s.t1, &s.t2}) {
          if (t->is_path_var) path_var(t->first);
          if (t->is_complex && t->second_is_path_var) path_var(t->second);
        }
    }
  }

  auto compile = [&](const Statement& s) {
    try {
      return store.compile(s.regex);
    } catch (const ParseError& e) {
      throw ParseError(bare_message(e), s.line, s.regex_column + e.column() - 1);
    } catch (const ResourceLimit&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(e.what(), s.line, s.regex_column);
    }
  };
  auto simple = [&](bool var, const std::string& name, const Statement& s) {
    return var ? SimpleTerm::of(pv.at(name)) : SimpleTerm::of(feature(name, s));
  };
  auto term = [&](const ParsedTerm& t, const Statement& s) {
    auto head = simple(t.is_path_var, t.first, s);
    return t.is_complex ? PathTerm::concat(head, simple(t.second_is_path_var, t.second, s)) : PathTerm(head);
  };

  std::vector<KmConstraint> km;
  std::vector<Constraint> extra;
  bool km_only = true;
  for (const auto& s : p.statements) {
    switch (s.kind) {
      case Statement::Kind::kSort: {
        auto sort = sig->find_sort(s.sort);
        if (!sort) throw ParseError("undeclared sort '" + s.sort + "'", s.line, s.column);
        km.push_back(KmConstraint::sort_of(*sort, fo.at(s.x)));
        break;
      }
      case Statement::Kind::kAgree:
        km.push_back(KmConstraint::agree(fo.at(s.x), fo.at(s.y)));
        break;
      case Statement::Kind::kPath: {
        Word w;
        for (const auto& f : s.path) w.push_back(feature(f, s));
        km.push_back(KmConstraint::path_of(fo.at(s.x), std::move(w), fo.at(s.y)));
        break;
      }
      case Statement::Kind::kRegular:
        km.push_back(KmConstraint::regular(fo.at(s.x), compile(s), fo.at(s.y)));
        break;
      case Statement::Kind::kEdge:
        km_only = false;
        extra.push_back(Constraint::sub(fo.at(s.x), pv.at(s.t1.first), fo.at(s.y)));
        break;
      case Statement::Kind::kDiv:
        km_only = false;
        extra.push_back(Constraint::div(term(s.t1, s), term(s.t2, s)));
        break;
      case Statement::Kind::kPrefix:
        km_only = false;
        extra.push_back(Constraint::prefix(term(s.t1, s), term(s.t2, s)));
        break;
      case Statement::Kind::kPathEq:
        km_only = false;
        extra.push_back(Constraint::path_eq(term(s.t1, s), term(s.t2, s)));
        break;
      case Statement::Kind::kIn:
        km_only = false;
        extra.push_back(Constraint::restrict(term(s.t1, s), compile(s)));
        break;
    }
  }
  Clause clause = translate_km(km, sig);
  for (const auto& c : extra) clause.add(c);
  return {sig, std::move(clause), km_only};
}

}  // namespace funcert
