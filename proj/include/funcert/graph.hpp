#pragma once

// Finite feature graphs: the models of clauses.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "funcert/lang.hpp"

namespace funcert {

struct FoVar;
struct SortName;
struct Signature;

using Node = std::uint32_t;

class FeatureGraph {
 public:
  Node add_node();
  std::size_t num_nodes() const { return num_nodes_; }

  /// Adds an edge. Throws InvariantViolation if (from, f) already leads
  /// elsewhere.
  void set_edge(Node from, Feature f, Node to);
  std::optional<Node> next(Node from, Feature f) const;
  std::optional<Node> walk(Node from, std::span<const Feature> word) const;
  const std::map<std::pair<Node, Feature>, Node>& edges() const { return edges_; }

  /// Throws InvariantViolation on a second, different sort.
  void set_sort(Node n, std::uint32_t sort);
  std::optional<std::uint32_t> sort(Node n) const;
  const std::map<Node, std::uint32_t>& sorts() const { return sorts_; }

  void anchor(std::uint32_t fo_var, Node n) { anchors_[fo_var] = n; }
  std::optional<Node> anchor_of(std::uint32_t fo_var) const;
  const std::map<std::uint32_t, Node>& anchors() const { return anchors_; }

  void remove_edge(Node from, Feature f) { edges_.erase({from, f}); }

  /// Node/edge/sort lines for reports.
  std::string render(const Alphabet& alphabet, const Signature& sig) const;

 private:
  std::size_t num_nodes_ = 0;
  std::map<std::pair<Node, Feature>, Node> edges_;
  std::map<Node, std::uint32_t> sorts_;
  std::map<std::uint32_t, Node> anchors_;
};

}  // namespace funcert
