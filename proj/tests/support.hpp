#pragma once

// Test-only helpers: a backtracking regex matcher that works directly on the
// AST (independent of the automaton code) and random regex generators.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "funcert/lang.hpp"

namespace funcert::testing {

// End positions reachable by matching `ast` against `word` from `start`.
inline std::set<std::size_t> match_from(const RegexAst& ast, const std::vector<std::string>& word,
                                        std::size_t start) {
  using Kind = RegexAst::Kind;
  std::set<std::size_t> out;
  switch (ast.kind) {
    case Kind::kFeature:
      if (start < word.size() && word[start] == ast.feature) out.insert(start + 1);
      break;
    case Kind::kEpsilon:
      out.insert(start);
      break;
    case Kind::kEmpty:
      break;
    case Kind::kUnion:
      for (const auto& c : ast.children) {
        auto sub = match_from(c, word, start);
        out.insert(sub.begin(), sub.end());
      }
      break;
    case Kind::kConcat: {
      std::set<std::size_t> cur{start};
      for (const auto& c : ast.children) {
        std::set<std::size_t> next;
        for (auto p : cur) {
          auto sub = match_from(c, word, p);
          next.insert(sub.begin(), sub.end());
        }
        cur = std::move(next);
      }
      out = std::move(cur);
      break;
    }
    case Kind::kStar:
    case Kind::kPlus: {
      std::set<std::size_t> frontier{start};
      std::set<std::size_t> seen;
      if (ast.kind == Kind::kStar) out.insert(start);
      while (!frontier.empty()) {
        std::set<std::size_t> next;
        for (auto p : frontier)
          for (auto e : match_from(ast.children[0], word, p))
            if (seen.insert(e).second) next.insert(e);
        out.insert(next.begin(), next.end());
        frontier = std::move(next);
      }
      break;
    }
  }
  return out;
}

/// Membership in the denotation intersected with F+.
inline bool ast_accepts(const RegexAst& ast, const std::vector<std::string>& word) {
  if (word.empty()) return false;
  return match_from(ast, word, 0).count(word.size()) != 0;
}

inline std::vector<std::string> names_of(const Alphabet& al, const Word& w) {
  std::vector<std::string> out;
  for (auto f : w) out.push_back(al.name(f));
  return out;
}

/// All words over the alphabet with length in [1, max_len].
inline std::vector<Word> all_words(const Alphabet& al, std::size_t max_len) {
  std::vector<Word> out;
  std::vector<Word> layer{Word{}};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer)
      for (auto f : al.features()) {
        auto x = w;
        x.push_back(f);
        next.push_back(x);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

inline RegexAst random_regex(std::mt19937& rng, const Alphabet& al, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 0 : 5);
  std::uniform_int_distribution<std::size_t> feat(0, al.size() - 1);
  switch (pick(rng)) {
    case 0:
    case 1:
      return RegexAst::literal(al.name(Feature{static_cast<std::uint16_t>(feat(rng))}));
    case 2:
      return RegexAst::concat({random_regex(rng, al, depth - 1), random_regex(rng, al, depth - 1)});
    case 3:
      return RegexAst::alternation({random_regex(rng, al, depth - 1), random_regex(rng, al, depth - 1)});
    case 4:
      return RegexAst::star(random_regex(rng, al, depth - 1));
    default:
      return RegexAst::plus(random_regex(rng, al, depth - 1));
  }
}

}  // namespace funcert::testing
