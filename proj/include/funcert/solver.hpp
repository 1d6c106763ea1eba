#pragma once

// End-to-end facade: problem text in, verdict, terminal clauses and witness
// graphs out.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "funcert/clause.hpp"
#include "funcert/graph.hpp"
#include "funcert/lang.hpp"
#include "funcert/rewrite.hpp"

namespace funcert {

enum class Status { kSat, kUnsat, kUnknown };
const char* to_string(Status s);

enum class Emit { kSolved, kPresolved };

struct SolveOptions {
  Control control = Control::basic();
  // Retry under Quasi when a Basic or Heuristic run detects a loop.
  bool auto_retry = false;
  Emit emit = Emit::kSolved;
  DerivationLimits limits;
  bool strict = false;
  bool witness = false;
};

struct SolveReport {
  Status status = Status::kUnknown;
  Control control;  // the control of the run that produced the verdict
  std::shared_ptr<LangStore> store;
  std::shared_ptr<const Signature> signature;
  std::optional<Clause> input;
  // Solved, non-bottom terminals, deduplicated by canonical form. With
  // Emit::kPresolved these are the pre-solved clauses reached instead.
  std::vector<Clause> clauses;
  std::vector<FeatureGraph> witnesses;  // one per solved clause
  std::vector<bool> witness_checked;    // check_model against the input
  DerivationStats stats;
  bool loop_detected = false;
  bool limit_exceeded = false;
  std::vector<std::string> diagnostics;
};

/// Throws ParseError on malformed input.
SolveReport solve(std::string_view text, const SolveOptions& opts, const DeriveHooks& hooks = {});
SolveReport solve(const Clause& input, std::shared_ptr<LangStore> store, const SolveOptions& opts,
                  const DeriveHooks& hooks = {});

/// Lays every path-variable edge down along the shortest word of its
/// restriction. Throws InvariantViolation on a non-solved clause or bottom.
FeatureGraph extract_witness(const Clause& solved, const LangStore& store);

/// True iff some path valuation makes every constraint of `phi` hold in `g`
/// under the graph's anchors. A path variable with one edge and no relation
/// constraints is decided exactly; the others are searched with words of
/// length <= max_len (0 picks twice the node count).
bool check_model(const FeatureGraph& g, const Clause& phi, const LangStore& store, std::size_t max_len = 0);

}  // namespace funcert
