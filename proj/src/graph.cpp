#include "pathfx/graph.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

namespace pathfx {

namespace {

constexpr std::size_t kMaxEnumeratedPaths = 10000;

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

bool Dag::has_node(std::string_view name) const {
  return std::any_of(nodes.begin(), nodes.end(),
                     [&](const auto& n) { return n == name; });
}

std::vector<std::string> Dag::parents_of(const std::string& node) const {
  std::vector<std::string> result;
  for (const auto& [s, t] : edges) {
    if (t == node) result.push_back(s);
  }
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<std::string> Dag::children_of(const std::string& node) const {
  std::vector<std::string> result;
  for (const auto& [s, t] : edges) {
    if (s == node) result.push_back(t);
  }
  std::sort(result.begin(), result.end());
  return result;
}

bool CausalPath::contains_edge(const std::string& source,
                               const std::string& target) const {
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (nodes[i] == source && nodes[i + 1] == target) return true;
  }
  return false;
}

const char* world_name(World world) {
  switch (world) {
    case World::Factual: return "factual";
    case World::Pi: return "pi";
    case World::Exogenous: return "exogenous";
    case World::ExogenousCopy: return "exogenous-copy";
    case World::Nested: return "nested";
  }
  return "unknown";
}

bool Diagram::has_edge(const TaggedVar& source, const TaggedVar& target) const {
  return std::find(edges.begin(), edges.end(),
                   std::make_pair(source, target)) != edges.end();
}

bool Diagram::is_pi_edge(const TaggedVar& source,
                         const TaggedVar& target) const {
  return std::find(pi_edges.begin(), pi_edges.end(),
                   std::make_pair(source, target)) != pi_edges.end();
}

namespace {

template <typename Model>
Dag diagram_from_parent_lists(const Model& model) {
  Dag dag;
  for (const auto& v : model.variables) dag.nodes.push_back(v.name);
  return dag;
}

}  // namespace

Dag causal_diagram(const Scm& scm) {
  Dag dag = diagram_from_parent_lists(scm);
  for (const auto& m : scm.mechanisms) {
    for (const auto& p : m.parents) dag.edges.insert({p, m.child});
  }
  return dag;
}

Dag causal_diagram(const CptModel& model) {
  Dag dag = diagram_from_parent_lists(model);
  for (const auto& c : model.cpts) {
    for (const auto& p : c.parents) dag.edges.insert({p, c.child});
  }
  return dag;
}

std::vector<std::string> topological_order(const Dag& dag) {
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& n : dag.nodes) parents[n] = {};
  for (const auto& [s, t] : dag.edges) parents[t].push_back(s);

  std::map<std::string, std::size_t> missing;
  for (const auto& [n, ps] : parents) missing[n] = ps.size();
  std::set<std::string> frontier;
  for (const auto& [n, count] : missing) {
    if (count == 0) frontier.insert(n);
  }
  std::vector<std::string> order;
  while (!frontier.empty()) {
    std::string node = *frontier.begin();
    frontier.erase(frontier.begin());
    order.push_back(node);
    for (const auto& [s, t] : dag.edges) {
      if (s == node && --missing[t] == 0) frontier.insert(t);
    }
  }
  if (order.size() != dag.nodes.size()) {
    throw Error(ErrorCode::CycleDetected, "diagram contains a cycle");
  }
  return order;
}

namespace {

void extend_paths(const Dag& dag, const std::string& node,
                  const std::string& to, std::vector<std::string>& current,
                  std::set<std::string>& on_path,
                  std::vector<CausalPath>& found) {
  if (node == to) {
    if (current.size() >= 2) {
      if (found.size() >= kMaxEnumeratedPaths) {
        throw Error(ErrorCode::TooManyPaths,
                    "more than " + std::to_string(kMaxEnumeratedPaths) +
                        " directed paths");
      }
      found.push_back(CausalPath{current});
    }
    return;
  }
  for (const auto& child : dag.children_of(node)) {
    if (on_path.count(child)) continue;
    current.push_back(child);
    on_path.insert(child);
    extend_paths(dag, child, to, current, on_path, found);
    on_path.erase(child);
    current.pop_back();
  }
}

}  // namespace

std::vector<CausalPath> directed_paths(const Dag& dag, const std::string& from,
                                       const std::string& to) {
  for (const auto* endpoint : {&from, &to}) {
    if (!dag.has_node(*endpoint)) {
      throw Error(ErrorCode::UnknownNode, "unknown node " + *endpoint);
    }
  }
  std::vector<CausalPath> found;
  std::vector<std::string> current{from};
  std::set<std::string> on_path{from};
  extend_paths(dag, from, to, current, on_path, found);
  return found;  // children_of is sorted, so DFS emits lexicographic order
}

CausalPath validate_path(const Dag& dag,
                         const std::vector<std::string>& nodes) {
  if (nodes.size() < 2) {
    throw Error(ErrorCode::NotAPath, "a path needs at least two nodes");
  }
  std::set<std::string> seen;
  for (const auto& n : nodes) {
    if (!dag.has_node(n)) {
      throw Error(ErrorCode::UnknownNode, "unknown node " + n);
    }
    if (!seen.insert(n).second) {
      throw Error(ErrorCode::RepeatedNode, "node " + n + " repeats");
    }
  }
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    if (!dag.has_edge(nodes[i], nodes[i + 1])) {
      throw Error(ErrorCode::NotAPath,
                  "missing edge " + nodes[i] + " -> " + nodes[i + 1]);
    }
  }
  return CausalPath{nodes};
}

std::set<std::string> desc_pi(const CausalPath& path) {
  return {path.nodes.begin() + 1, path.nodes.end()};
}

namespace {

bool reaches(const Dag& dag, const std::string& from, const std::string& to) {
  if (from == to) return true;
  std::set<std::string> visited{from};
  std::vector<std::string> stack{from};
  while (!stack.empty()) {
    std::string node = stack.back();
    stack.pop_back();
    for (const auto& child : dag.children_of(node)) {
      if (child == to) return true;
      if (visited.insert(child).second) stack.push_back(child);
    }
  }
  return false;
}

}  // namespace

std::optional<std::string> find_recanting_witness(const Dag& dag,
                                                  const CausalPath& path) {
  const std::string& outcome = path.tail();
  for (std::size_t i = 1; i + 1 < path.nodes.size(); ++i) {
    const std::string& witness = path.nodes[i];
    const std::string& pi_successor = path.nodes[i + 1];
    for (const auto& child : dag.children_of(witness)) {
      if (child == pi_successor) continue;  // the pi-edge out of the witness
      if (reaches(dag, child, outcome)) return witness;
    }
  }
  return std::nullopt;
}

std::string dot_id(const TaggedVar& var) {
  std::string id = lowercase(var.name);
  if (var.world == World::Pi || var.world == World::ExogenousCopy) {
    id += "_pi";
  }
  return id;
}

namespace {

void render_edge(std::ostringstream& os, const std::string& from,
                 const std::string& to, bool on_pi) {
  os << "  \"" << from << "\" -> \"" << to << "\" [color="
     << (on_pi ? "red" : "blue") << "];\n";
}

}  // namespace

std::string to_dot(const Dag& dag) {
  std::vector<std::string> ids;
  for (const auto& n : dag.nodes) ids.push_back(lowercase(n));
  std::sort(ids.begin(), ids.end());

  std::ostringstream os;
  os << "digraph G {\n";
  for (const auto& id : ids) os << "  \"" << id << "\";\n";
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& [s, t] : dag.edges) {
    edges.emplace_back(lowercase(s), lowercase(t));
  }
  std::sort(edges.begin(), edges.end());
  for (const auto& [s, t] : edges) render_edge(os, s, t, false);
  os << "}\n";
  return os.str();
}

std::string to_dot(const Diagram& diagram) {
  std::vector<std::pair<std::string, const TaggedVar*>> ids;
  for (const auto& node : diagram.nodes) {
    ids.emplace_back(dot_id(node), &node);
  }
  std::sort(ids.begin(), ids.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::map<TaggedVar, std::string> notes;
  for (const auto& [node, text] : diagram.annotations) notes[node] = text;

  std::ostringstream os;
  os << "digraph G {\n";
  for (const auto& [id, node] : ids) {
    os << "  \"" << id << "\"";
    std::vector<std::string> attrs;
    auto note = notes.find(*node);
    if (note != notes.end()) {
      attrs.push_back("label=\"" + id + "\\n" + note->second + "\"");
    }
    if (node->world == World::Exogenous ||
        node->world == World::ExogenousCopy) {
      attrs.push_back("style=dashed");
    }
    if (!attrs.empty()) {
      os << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) {
        if (i > 0) os << ", ";
        os << attrs[i];
      }
      os << "]";
    }
    os << ";\n";
  }

  std::vector<std::pair<std::pair<std::string, std::string>, bool>> edges;
  for (const auto& [s, t] : diagram.edges) {
    edges.push_back({{dot_id(s), dot_id(t)}, diagram.is_pi_edge(s, t)});
  }
  std::sort(edges.begin(), edges.end());
  for (const auto& [edge, on_pi] : edges) {
    render_edge(os, edge.first, edge.second, on_pi);
  }
  os << "}\n";
  return os.str();
}

}  // namespace pathfx
