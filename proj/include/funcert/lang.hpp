#pragma once

// Regular path languages over a finite feature alphabet, kept as hash-consed
// canonical minimal DFAs. Every stored language is a subset of F+.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace funcert {

struct Feature {
  std::uint16_t id = 0;
  auto operator<=>(const Feature&) const = default;
};

using Word = std::vector<Feature>;

/// The declared feature alphabet. Ids follow lexicographic name order, so
/// comparing ids compares names.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<std::string> names);

  std::size_t size() const { return names_.size(); }
  std::optional<Feature> find(std::string_view name) const;
  const std::string& name(Feature f) const { return names_.at(f.id); }
  std::vector<Feature> features() const;

  std::string render(std::span<const Feature> word) const;
  Word parse_word(std::string_view dotted) const;

 private:
  std::vector<std::string> names_;
};

struct LangId {
  std::uint32_t value = 0;
  auto operator<=>(const LangId&) const = default;
};

/// Deterministic automaton with a partial transition function; a missing
/// transition goes to the implicit sink.
struct Dfa {
  static constexpr int kNone = -1;

  int num_states = 0;
  int num_features = 0;
  int initial = 0;
  std::vector<char> final;
  std::vector<int> delta;  // num_states * num_features

  int next(int q, Feature f) const { return delta[static_cast<std::size_t>(q) * num_features + f.id]; }
  int& next(int q, Feature f) { return delta[static_cast<std::size_t>(q) * num_features + f.id]; }

  static Dfa with_states(int num_states, int num_features);
};

struct RegexAst {
  enum class Kind { kFeature, kConcat, kUnion, kStar, kPlus, kEmpty, kEpsilon };

  Kind kind = Kind::kEmpty;
  std::string feature;  // kFeature only
  std::vector<RegexAst> children;

  static RegexAst literal(std::string name);
  static RegexAst concat(std::vector<RegexAst> parts);
  static RegexAst alternation(std::vector<RegexAst> parts);
  static RegexAst star(RegexAst inner);
  static RegexAst plus(RegexAst inner);
  static RegexAst empty();
  static RegexAst epsilon();
};

/// Parses the regex text syntax: identifiers, `.` or whitespace for
/// concatenation, `|`, postfix `*` and `+`, grouping, `()` for epsilon and
/// `{f,g}` for `f|g`.
RegexAst parse_regex(std::string_view text);

struct LangProps {
  bool is_empty = false;
  bool all_words_len1 = false;
  std::vector<char> one_letter;  // indexed by feature id

  bool contains(Feature f) const { return one_letter.at(f.id) != 0; }
};

struct Decomposition {
  LangId prefix;
  LangId suffix;
  auto operator<=>(const Decomposition&) const = default;
};

class LangStore {
 public:
  static constexpr std::size_t kDefaultCap = 10000;

  explicit LangStore(Alphabet alphabet, std::size_t cap = kDefaultCap);

  LangStore(const LangStore&) = delete;
  LangStore& operator=(const LangStore&) = delete;

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const;
  std::size_t cap() const { return cap_; }

  LangId compile(const RegexAst& ast);
  LangId compile(std::string_view regex_text);
  LangId empty();
  LangId universe();
  LangId single(Feature f);
  LangId of_features(std::span<const Feature> fs);

  /// Minimizes, strips epsilon, renumbers and interns an arbitrary DFA.
  LangId admit(const Dfa& dfa);

  bool member(LangId lang, std::span<const Feature> word) const;
  LangId intersect(LangId a, LangId b);
  LangId quotient(Feature f, LangId lang);
  std::vector<Feature> first_features(LangId lang) const;
  /// Features that can follow a non-empty prefix of some word.
  std::vector<Feature> continuation_features(LangId lang) const;
  LangProps props(LangId lang) const;
  std::vector<Decomposition> dfun(LangId lang);

  bool is_empty(LangId lang) const;
  /// The feature f when the language is exactly {f}.
  std::optional<Feature> as_single_feature(LangId lang) const;
  /// Length-lexicographically least word.
  std::optional<Word> shortest_word(LangId lang) const;
  std::vector<Word> words_up_to(LangId lang, std::size_t max_len) const;
  std::optional<Word> sample_word(LangId lang, std::mt19937& rng, std::size_t max_len) const;

  const Dfa& dfa(LangId lang) const;
  /// Regex text that compiles back to the same language: the source text
  /// when known, otherwise a finite word list or a state-elimination regex.
  std::string describe(LangId lang) const;

 private:
  struct Entry {
    Dfa dfa;
    std::string source;
  };

  LangId intern(Dfa canonical, std::string source);
  const Entry& entry(LangId lang) const;

  Alphabet alphabet_;
  std::size_t cap_;

  mutable std::shared_mutex mutex_;
  std::deque<Entry> entries_;
  std::map<std::vector<int>, LangId> index_;
  std::map<std::pair<LangId, LangId>, LangId> intersect_cache_;
  std::map<std::pair<Feature, LangId>, LangId> quotient_cache_;
  std::map<LangId, std::vector<Decomposition>> dfun_cache_;
};

/// Canonical form used by the store: epsilon stripped, trimmed, minimal,
/// states renumbered breadth-first over features in id order.
Dfa canonical_dfa(const Dfa& dfa, int num_features);

}  // namespace funcert
