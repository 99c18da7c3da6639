#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pathfx/model.hpp"

namespace pathfx {

// Causal diagram over endogenous variables: node per variable, edge j -> i
// whenever j appears in i's parent list.
struct Dag {
  std::vector<std::string> nodes;
  std::set<std::pair<std::string, std::string>> edges;

  bool has_node(std::string_view name) const;
  bool has_edge(const std::string& source, const std::string& target) const {
    return edges.count({source, target}) > 0;
  }
  // Sorted by name.
  std::vector<std::string> parents_of(const std::string& node) const;
  std::vector<std::string> children_of(const std::string& node) const;
};

// Simple directed path [A, ..., Y]; construct through validate_path.
struct CausalPath {
  std::vector<std::string> nodes;

  const std::string& head() const { return nodes.front(); }
  const std::string& tail() const { return nodes.back(); }
  bool contains_edge(const std::string& source,
                     const std::string& target) const;
  bool operator==(const CausalPath&) const = default;
};

// World tag for nodes of intervention diagrams and inference tables.
enum class World {
  Factual,
  Pi,             // counterfactual copy created by a path intervention
  Exogenous,      // noise node (augmented diagrams only)
  ExogenousCopy,  // i.i.d. noise copy feeding a Pi node
  Nested,         // recursive-substitution counterfactual (sampling output)
};

const char* world_name(World world);

struct TaggedVar {
  std::string name;
  World world = World::Factual;

  auto operator<=>(const TaggedVar&) const = default;
};

// Diagram of an intervened system. Factual-only for do/info interventions;
// path interventions add Pi-tagged nodes. pi_edges is the subset of edges
// lying on the intervened path. Literal channel values appear as node
// annotations, not edges, matching how the figures omit constants.
struct Diagram {
  std::vector<TaggedVar> nodes;
  std::vector<std::pair<TaggedVar, TaggedVar>> edges;
  std::vector<std::pair<TaggedVar, TaggedVar>> pi_edges;
  std::vector<std::pair<TaggedVar, std::string>> annotations;

  bool has_edge(const TaggedVar& source, const TaggedVar& target) const;
  bool is_pi_edge(const TaggedVar& source, const TaggedVar& target) const;
};

Dag causal_diagram(const Scm& scm);
Dag causal_diagram(const CptModel& model);

// Lexicographically-smallest topological order; throws CycleDetected.
std::vector<std::string> topological_order(const Dag& dag);

// All simple directed paths from `from` to `to`, lexicographically ordered
// by node sequence. Throws UnknownNode for unknown endpoints and
// TooManyPaths beyond 10000 paths.
std::vector<CausalPath> directed_paths(const Dag& dag, const std::string& from,
                                       const std::string& to);

// Checks that consecutive pairs are edges (NotAPath names the missing edge)
// and nodes are distinct (RepeatedNode); length >= 2 required.
CausalPath validate_path(const Dag& dag, const std::vector<std::string>& nodes);

// Nodes of the path that have a parent on the path: every node but the head.
std::set<std::string> desc_pi(const CausalPath& path);

// First node W interior to the path (in path order) with a directed route to
// the path's tail whose first edge leaves the path at W; absent when no
// interior node has such an off-path route.
std::optional<std::string> find_recanting_witness(const Dag& dag,
                                                  const CausalPath& path);

// Deterministic DOT rendering: nodes lowercase, Pi nodes suffixed "_pi",
// pi-edges color=red, all other edges color=blue, exogenous nodes dashed.
std::string to_dot(const Dag& dag);
std::string to_dot(const Diagram& diagram);

// Deterministic identifier used in DOT output and sort keys.
std::string dot_id(const TaggedVar& var);

}  // namespace pathfx
