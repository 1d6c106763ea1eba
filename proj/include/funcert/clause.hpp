#pragma once

// Constraint data model: variables, path terms, the seven constraint forms,
// clauses with variable bindings, classification and canonical forms.

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "funcert/graph.hpp"
#include "funcert/lang.hpp"

namespace funcert {

struct FoVar {
  std::uint32_t id = 0;
  auto operator<=>(const FoVar&) const = default;
};

struct PathVar {
  std::uint32_t id = 0;
  auto operator<=>(const PathVar&) const = default;
};

struct SortName {
  std::uint32_t id = 0;
  auto operator<=>(const SortName&) const = default;
};

/// Either a feature or a path variable. Features order before variables.
struct SimpleTerm {
  enum class Kind : std::uint8_t { kFeature, kPathVar };

  Kind kind = Kind::kFeature;
  std::uint32_t id = 0;

  static SimpleTerm of(Feature f) { return {Kind::kFeature, f.id}; }
  static SimpleTerm of(PathVar v) { return {Kind::kPathVar, v.id}; }

  bool is_feature() const { return kind == Kind::kFeature; }
  bool is_var() const { return kind == Kind::kPathVar; }
  Feature feature() const { return Feature{static_cast<std::uint16_t>(id)}; }
  PathVar var() const { return PathVar{id}; }

  auto operator<=>(const SimpleTerm&) const = default;
};

/// A simple term or the concatenation of exactly two simple terms. Longer
/// concatenations are not representable.
struct PathTerm {
  SimpleTerm head;
  bool is_complex = false;
  SimpleTerm tail;

  PathTerm() = default;
  PathTerm(SimpleTerm s) : head(s) {}  // NOLINT(google-explicit-constructor)
  PathTerm(Feature f) : head(SimpleTerm::of(f)) {}  // NOLINT
  PathTerm(PathVar v) : head(SimpleTerm::of(v)) {}  // NOLINT
  static PathTerm concat(SimpleTerm first, SimpleTerm second);

  bool is_simple() const { return !is_complex; }
  bool mentions(PathVar v) const;
  bool is_var(PathVar v) const { return !is_complex && head == SimpleTerm::of(v); }

  auto operator<=>(const PathTerm&) const = default;
};

enum class ConstraintKind : std::uint8_t { kSort, kAgree, kSub, kDiv, kPrefix, kPathEq, kRestrict };

/// One atomic constraint. Which fields are meaningful depends on `kind`:
///   Sort(sort, x)  Agree(x, y)  Sub(x, p, y)  Div(p, q)  Prefix(p, q)
///   PathEq(p, q)   Restrict(p, lang)
/// Div and PathEq are symmetric and stored with p <= q.
struct Constraint {
  ConstraintKind kind = ConstraintKind::kSort;
  SortName sort;
  FoVar x;
  FoVar y;
  PathTerm p;
  PathTerm q;
  LangId lang;

  static Constraint sort_of(SortName s, FoVar x);
  static Constraint agree(FoVar x, FoVar y);
  static Constraint sub(FoVar x, PathTerm p, FoVar y);
  static Constraint div(PathTerm p, PathTerm q);
  static Constraint prefix(PathTerm p, PathTerm q);
  static Constraint path_eq(PathTerm p, PathTerm q);
  static Constraint restrict(PathTerm p, LangId lang);

  bool is_path_constraint() const {
    return kind == ConstraintKind::kDiv || kind == ConstraintKind::kPrefix || kind == ConstraintKind::kPathEq;
  }
  bool mentions(PathVar v) const;
  bool mentions(FoVar v) const;

  auto operator<=>(const Constraint&) const = default;
};

/// Names of the input variables and sorts. Fresh variables created during a
/// derivation have ids beyond the tables and render as `_v<N>` / `_p<N>`.
struct Signature {
  std::vector<std::string> sorts;
  std::vector<std::string> fo_names;
  std::vector<std::string> path_names;

  std::string fo_name(FoVar v) const;
  std::string path_name(PathVar v) const;
  std::optional<SortName> find_sort(const std::string& name) const;
};

enum class Relation { kEqual, kProperPrefix, kProperSuffixOf, kDiverge };

/// Relation between two non-empty paths; exactly one holds.
Relation path_relation(std::span<const Feature> u, std::span<const Feature> v);
const char* to_string(Relation r);

class Clause {
 public:
  explicit Clause(std::shared_ptr<const Signature> signature);

  static Clause bottom(std::shared_ptr<const Signature> signature);

  const std::set<Constraint>& constraints() const { return constraints_; }
  const std::map<FoVar, FoVar>& bindings() const { return bindings_; }
  const std::shared_ptr<const Signature>& signature() const { return signature_; }
  bool is_bottom() const { return bottom_; }
  std::size_t size() const { return constraints_.size(); }
  bool contains(const Constraint& c) const { return constraints_.count(c) != 0; }

  /// Adds a constraint. Agree constraints become bindings; variables are
  /// resolved through existing bindings first.
  void add(Constraint c);
  void erase(const Constraint& c) { constraints_.erase(c); }
  void set_bottom();

  FoVar fresh_fo();
  PathVar fresh_path();
  std::uint32_t fo_counter() const { return next_fo_; }
  std::uint32_t path_counter() const { return next_path_; }

  /// Follows bindings to the representative variable.
  FoVar resolve(FoVar v) const;

  // Pre-splitting chain per path variable, used by the occurs check.
  const std::vector<FoVar>& trail(PathVar v) const;
  void extend_trail(PathVar v, FoVar source);

  // Queries.
  std::vector<Constraint> edges() const;
  std::optional<Constraint> edge_of(PathVar v) const;
  std::vector<LangId> restrictions_of(const PathTerm& p) const;
  std::set<PathVar> path_vars() const;
  std::set<FoVar> fo_vars() const;
  bool occurs_in_complex(PathVar v) const;
  /// True when some Div, Prefix or PathEq constraint relates the two terms.
  bool related(const PathTerm& s, const PathTerm& t) const;

  bool operator==(const Clause& other) const {
    return bottom_ == other.bottom_ && constraints_ == other.constraints_;
  }

 private:
  friend Clause subst_fo_var(const Clause&, FoVar, FoVar);
  friend Clause subst_path_var(const Clause&, PathVar, const PathTerm&);

  std::shared_ptr<const Signature> signature_;
  std::set<Constraint> constraints_;
  std::map<FoVar, FoVar> bindings_;
  std::map<PathVar, std::vector<FoVar>> trails_;
  bool bottom_ = false;
  std::uint32_t next_fo_ = 0;
  std::uint32_t next_path_ = 0;
};

struct Classification {
  bool prime = false;
  bool admissible = false;
  bool simplified = false;
  bool presolved = false;
  bool solved = false;
};

Classification classify(const Clause& phi, const LangStore& store);

/// Names the first failed admissibility condition ("Ad1".."Ad6" or
/// "complex-prefix-or-eq"); empty when admissible.
std::string admissibility_violation(const Clause& phi);

std::set<SimpleTerm> outgoing(const Clause& phi, FoVar x);

/// The unique tagged variable, if any. Throws InvariantViolation when more
/// than one variable is tagged.
std::optional<FoVar> tagged_variable(const Clause& phi);
std::vector<FoVar> tagged_variables(const Clause& phi);

/// Replaces every occurrence of `v` by `t`. Replacing inside an edge with a
/// complex term, or inside a complex term with a complex term, throws.
Clause subst_path_var(const Clause& phi, PathVar v, const PathTerm& t);

/// Eliminates `z` in favour of `y` and records the binding z -> y.
Clause subst_fo_var(const Clause& phi, FoVar z, FoVar y);

/// Equal strings iff the clauses are equal up to consistent renaming of
/// first-order and path variables.
std::string canonicalize(const Clause& phi);

std::string render(const PathTerm& t, const Signature& sig, const Alphabet& alphabet);
std::string render(const Constraint& c, const Signature& sig, const LangStore& store);
/// One constraint per line in canonical order; `bottom` for the inconsistent clause.
std::string render(const Clause& phi, const LangStore& store);

/// Input constraint in the plain functional-uncertainty form.
struct KmConstraint {
  enum class Kind { kSort, kAgree, kPath, kRegular };

  Kind kind = Kind::kSort;
  SortName sort;
  FoVar x;
  FoVar y;
  Word path;  // kPath
  LangId lang;  // kRegular

  static KmConstraint sort_of(SortName s, FoVar x) { return {Kind::kSort, s, x, {}, {}, {}}; }
  static KmConstraint agree(FoVar x, FoVar y) { return {Kind::kAgree, {}, x, y, {}, {}}; }
  static KmConstraint path_of(FoVar x, Word w, FoVar y) { return {Kind::kPath, {}, x, y, std::move(w), {}}; }
  static KmConstraint regular(FoVar x, LangId l, FoVar y) { return {Kind::kRegular, {}, x, y, {}, l}; }
};

/// Translates K/M constraints into a prime clause: every `x L y` becomes a
/// fresh path variable edge plus its restriction.
Clause translate_km(const std::vector<KmConstraint>& km, std::shared_ptr<const Signature> signature);

}  // namespace funcert
