// Depth-first exploration of the branch tree under a control.

#include <unordered_set>

#include "funcert/error.hpp"
#include "funcert/rewrite.hpp"

namespace funcert {

const char* to_string(BranchStatus s) {
  switch (s) {
    case BranchStatus::kIrreducible: return "irreducible";
    case BranchStatus::kBottom: return "bottom";
    case BranchStatus::kLoopDetected: return "loop-detected";
    case BranchStatus::kLimitExceeded: return "limit-exceeded";
  }
  return "?";
}

bool check_admissibility_chain(const std::vector<Clause>& trace) {
  for (const auto& c : trace)
    if (!admissibility_violation(c).empty()) return false;
  return true;
}

namespace {

std::string one_line(const Clause& c, const LangStore& store) {
  std::string text = render(c, store), out;
  for (char ch : text) {
    if (ch != '\n') out += ch;
    else out += " & ";
  }
  return out.size() >= 3 ? out.substr(0, out.size() - 3) : out;
}

struct Frame {
  Clause clause;
  std::size_t id;
};

}  // namespace

DerivationResult derive(const Clause& phi, const Control& control, LangStore& store, const DerivationLimits& limits,
                        const RewriteOptions& options, const DeriveHooks& hooks) {
  DerivationResult result;
  auto& st = result.stats;
  std::unordered_set<std::string> visited;
  std::vector<Frame> stack;
  stack.push_back({phi, 0});
  std::size_t next_id = 1;
  st.branches = 1;

  auto finish = [&](Clause c, BranchStatus s, std::size_t id) {
    if (s == BranchStatus::kLoopDetected) result.loop_detected = true;
    if (s == BranchStatus::kLimitExceeded) result.limit_exceeded = true;
    result.terminals.push_back({std::move(c), s, id});
  };

  while (!stack.empty()) {
    Frame node = std::move(stack.back());
    stack.pop_back();
    const Clause& cur = node.clause;
    if (cur.is_bottom()) {
      finish(cur, BranchStatus::kBottom, node.id);
      continue;
    }
    if (result.limit_exceeded || st.steps >= limits.max_steps) {
      finish(cur, BranchStatus::kLimitExceeded, node.id);
      continue;
    }
    if (control.memoizes()) {
      if (!visited.insert(canonicalize(cur)).second) {
        ++st.pruned;
        continue;
      }
      st.visited = visited.size();
      if (visited.size() > limits.max_visited) {
        finish(cur, BranchStatus::kLimitExceeded, node.id);
        continue;
      }
    }
    auto before = theta(cur);
    st.max_theta = std::max(st.max_theta, before);

    auto insts = applicable(cur, control, store, options);
    if (insts.empty()) {
      finish(cur, BranchStatus::kIrreducible, node.id);
      continue;
    }
    const auto& inst = insts.front();
    std::vector<Branch> branches;
    if (inst.rule == RuleId::Solv1 || inst.rule == RuleId::Solv2) {
      // Solv1 and Solv2 expand together as one nondeterministic step.
      RuleInstance s1 = inst, s2 = inst;
      s1.rule = RuleId::Solv1;
      s2.rule = RuleId::Solv2;
      branches = expand(cur, s1, store, options);
      auto more = expand(cur, s2, store, options);
      for (auto& b : more) branches.push_back(std::move(b));
    } else {
      branches = expand(cur, inst, store, options);
    }
    ++st.steps;
    ++st.fired[static_cast<std::size_t>(inst.rule)];
    if (hooks.step) hooks.step(StepEvent{cur, inst, branches});

    if (limits.check_theta && is_simpl(inst.rule)) {
      for (const auto& b : branches) {
        ++st.theta_checks;
        if (!(theta(b.clause) < before)) {
          ++st.theta_violations;
          ++st.theta_violations_by_rule[inst.rule];
        }
      }
    }
    if (limits.check_admissibility) {
      for (const auto& b : branches) {
        ++st.admissibility_checks;
        auto v = admissibility_violation(b.clause);
        if (!v.empty()) {
          if (st.admissibility_violations == 0)
            st.first_admissibility_violation = std::string(to_string(b.rule)) + ": " + v;
          ++st.admissibility_violations;
        }
      }
    }

    if (branches.empty()) {
      // A nondeterministic rule without choices: the branch is inconsistent.
      Clause dead = cur;
      dead.set_bottom();
      finish(std::move(dead), BranchStatus::kBottom, node.id);
      continue;
    }
    std::vector<Frame> children;
    for (auto& b : branches) {
      std::size_t id = next_id++;
      ++st.branches;
      if (hooks.trace) hooks.trace({id, node.id, b.rule, b.param, one_line(b.clause, store), theta(b.clause)});
      if (b.loop && !control.memoizes()) {
        finish(std::move(b.clause), BranchStatus::kLoopDetected, id);
        continue;
      }
      children.push_back({std::move(b.clause), id});
    }
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
  }
  return result;
}

}  // namespace funcert
