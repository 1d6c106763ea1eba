#pragma once

// Brute-force semantics, independent of the rewrite engine: direct
// evaluation of clauses and a bounded search for small models.

#include <map>
#include <optional>
#include <utility>

#include "funcert/clause.hpp"
#include "funcert/graph.hpp"
#include "funcert/lang.hpp"

namespace funcert {

struct Valuation {
  std::map<FoVar, Node> fo;
  std::map<PathVar, Word> path;  // non-empty words
};

/// The relation between two non-empty words, computed from the definitions.
Relation relate_words(const Word& u, const Word& v);

/// One constraint under the valuation.
bool holds(const Constraint& c, const FeatureGraph& g, const Valuation& v, const LangStore& store);

/// Conjunction of all constraints of `phi` under the valuation. Variables
/// missing from the valuation make the constraints that mention them false.
bool evaluate(const Clause& phi, const FeatureGraph& g, const Valuation& v, const LangStore& store);

struct Model {
  FeatureGraph graph;
  Valuation valuation;
};

/// Searches path valuations with words of length <= k (restricted to each
/// variable's languages) and builds the least graph they force. Models with
/// more than n nodes are rejected. Sound for satisfiability only.
std::optional<Model> bounded_sat(const Clause& phi, const LangStore& store, std::size_t k = 3, std::size_t n = 6);

}  // namespace funcert
