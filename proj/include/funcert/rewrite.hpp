#pragma once

// The rule engine: rule instances, branch expansion, controls and the
// licensed derivation search.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "funcert/clause.hpp"
#include "funcert/lang.hpp"

namespace funcert {

enum class RuleId : std::uint8_t {
  Join, Empty, FClash, SClash, DClash1, DClash2, Div1, Div2, DivInst, Triv1, RelD, Triv2,
  Eq1, Eq2, Pre, DecFeat, DecClash, DecDFun,
  Relate1, Relate2,
  Inst, Intro, Solv1, Solv2, InstEq,
};

inline constexpr std::size_t kRuleCount = static_cast<std::size_t>(RuleId::InstEq) + 1;

const char* to_string(RuleId r);
std::optional<RuleId> rule_from_string(const std::string& name);
bool is_simpl(RuleId r);
bool is_pre(RuleId r);
bool is_solve(RuleId r);

struct RuleInstance {
  RuleId rule = RuleId::Join;
  std::vector<Constraint> matched;
  // Index into the rule's branch list; unset means "expand every choice".
  std::optional<std::size_t> choice;
  // Feature-pair count of a Solve/Inst expansion, used by the heuristic control.
  std::size_t pairs = 0;
};

struct Control {
  enum class Kind { kBasic, kQuasi, kKM, kHeuristic };
  Kind kind = Kind::kQuasi;
  std::size_t delay_threshold = 2;

  static Control basic() { return {Kind::kBasic, 2}; }
  static Control quasi() { return {Kind::kQuasi, 2}; }
  static Control km() { return {Kind::kKM, 2}; }
  static Control heuristic(std::size_t threshold = 2) { return {Kind::kHeuristic, threshold}; }

  bool memoizes() const { return kind == Kind::kQuasi || kind == Kind::kKM; }
};

const char* to_string(Control::Kind k);
std::optional<Control::Kind> control_from_string(const std::string& name);

struct RewriteOptions {
  // Disables the single-feature modes of Inst/Solve and the InstEq rule.
  bool strict = false;
};

struct ThetaQuadruple {
  std::size_t unrelated = 0;
  std::size_t constraints = 0;
  std::size_t complex_terms = 0;
  std::size_t variables = 0;

  auto operator<=>(const ThetaQuadruple&) const = default;
};

std::string to_string(const ThetaQuadruple& t);

ThetaQuadruple theta(const Clause& phi);

/// Instances of the rules that are minimal under the control. Deterministic
/// order: by rule id, then by matched constraints.
std::vector<RuleInstance> applicable(const Clause& phi, const Control& control, const LangStore& store,
                                     const RewriteOptions& options = {});

/// Every applicable instance of every rule, ignoring the control.
std::vector<RuleInstance> all_instances(const Clause& phi, const LangStore& store, const RewriteOptions& options = {});

struct Branch {
  Clause clause;
  RuleId rule;
  std::string param;
  bool loop = false;  // occurs check fired while building this branch
};

/// Applies one instance. A nondeterministic instance without a fixed choice
/// yields one branch per parameter; an inconsistent result is a bottom clause.
std::vector<Branch> expand(const Clause& phi, const RuleInstance& r, LangStore& store,
                           const RewriteOptions& options = {});
std::vector<Clause> apply(const Clause& phi, const RuleInstance& r, LangStore& store,
                          const RewriteOptions& options = {});

/// Feature pairs the Solve expansion ranges over for a divergence between
/// two path variables: empty common prefix and non-empty common prefix.
struct SolvePairs {
  std::vector<std::pair<Feature, Feature>> solv1;
  std::vector<std::pair<Feature, Feature>> solv2;
  std::size_t total() const { return solv1.size() + solv2.size(); }
};
SolvePairs solve_pairs(const Clause& phi, const Constraint& div, const LangStore& store);

enum class BranchStatus { kIrreducible, kBottom, kLoopDetected, kLimitExceeded };
const char* to_string(BranchStatus s);

struct Terminal {
  Clause clause;
  BranchStatus status;
  std::size_t branch_id = 0;
};

struct DerivationLimits {
  std::size_t max_steps = 200000;
  std::size_t max_visited = 100000;
  // Debug checks; results land in DerivationStats.
  bool check_theta = false;
  bool check_admissibility = false;
};

struct TraceRecord {
  std::size_t branch = 0;
  std::size_t parent = 0;
  RuleId rule = RuleId::Join;
  std::string param;
  std::string clause;  // the produced clause, constraints in canonical order joined by " & "
  ThetaQuadruple theta;
};

/// Called once per rule application with the clause the rule fired on.
struct StepEvent {
  const Clause& before;
  const RuleInstance& instance;
  const std::vector<Branch>& branches;
};

struct DerivationStats {
  std::size_t steps = 0;
  std::size_t branches = 0;
  std::size_t visited = 0;
  std::size_t pruned = 0;
  ThetaQuadruple max_theta;
  std::array<std::size_t, kRuleCount> fired{};
  std::size_t theta_checks = 0;
  std::size_t theta_violations = 0;
  std::map<RuleId, std::size_t> theta_violations_by_rule;
  std::size_t admissibility_checks = 0;
  std::size_t admissibility_violations = 0;
  std::string first_admissibility_violation;
};

struct DerivationResult {
  std::vector<Terminal> terminals;
  DerivationStats stats;
  bool loop_detected = false;
  bool limit_exceeded = false;
};

struct DeriveHooks {
  std::function<void(const TraceRecord&)> trace;
  std::function<void(const StepEvent&)> step;
};

DerivationResult derive(const Clause& phi, const Control& control, LangStore& store, const DerivationLimits& limits = {},
                        const RewriteOptions& options = {}, const DeriveHooks& hooks = {});

/// True iff every clause of the trace is admissible.
bool check_admissibility_chain(const std::vector<Clause>& trace);

}  // namespace funcert
