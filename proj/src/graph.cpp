#include "funcert/graph.hpp"

#include <sstream>

#include "funcert/clause.hpp"
#include "funcert/error.hpp"

namespace funcert {

Node FeatureGraph::add_node() { return static_cast<Node>(num_nodes_++); }

void FeatureGraph::set_edge(Node from, Feature f, Node to) {
  auto [it, inserted] = edges_.emplace(std::make_pair(from, f), to);
  if (!inserted && it->second != to) throw InvariantViolation("feature edge is not functional");
}

std::optional<Node> FeatureGraph::next(Node from, Feature f) const {
  auto it = edges_.find({from, f});
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::optional<Node> FeatureGraph::walk(Node from, std::span<const Feature> word) const {
  std::optional<Node> cur = from;
  for (auto f : word) {
    cur = next(*cur, f);
    if (!cur) return std::nullopt;
  }
  return cur;
}

void FeatureGraph::set_sort(Node n, std::uint32_t sort) {
  auto [it, inserted] = sorts_.emplace(n, sort);
  if (!inserted && it->second != sort) throw InvariantViolation("node carries two sorts");
}

std::optional<std::uint32_t> FeatureGraph::sort(Node n) const {
  auto it = sorts_.find(n);
  if (it == sorts_.end()) return std::nullopt;
  return it->second;
}

std::optional<Node> FeatureGraph::anchor_of(std::uint32_t fo_var) const {
  auto it = anchors_.find(fo_var);
  if (it == anchors_.end()) return std::nullopt;
  return it->second;
}

std::string FeatureGraph::render(const Alphabet& alphabet, const Signature& sig) const {
  std::map<Node, std::vector<std::string>> names;
  for (auto [v, n] : anchors_) names[n].push_back(sig.fo_name(FoVar{v}));
  std::ostringstream os;
  for (Node n = 0; n < num_nodes_; ++n) {
    os << "node n" << n;
    if (names.count(n)) {
      os << " [";
      for (std::size_t i = 0; i < names[n].size(); ++i) os << (i ? " " : "") << names[n][i];
      os << "]";
    }
    if (auto s = sort(n)) os << " sort " << (*s < sig.sorts.size() ? sig.sorts[*s] : std::to_string(*s));
    os << "\n";
  }
  for (const auto& [key, to] : edges_) os << "edge n" << key.first << " " << alphabet.name(key.second) << " n" << to << "\n";
  return os.str();
}

}  // namespace funcert
