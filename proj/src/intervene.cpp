#include "pathfx/intervene.hpp"

#include <algorithm>
#include <set>

namespace pathfx {

namespace {

// Intervention targets must name known variables and in-domain values.
template <typename Model>
void check_assignments(const Model& model,
                       const std::map<std::string, std::string>& assignments) {
  for (const auto& [name, value] : assignments) {
    if (!model.has_variable(name)) {
      throw Error(ErrorCode::UnknownVariable, "unknown variable " + name);
    }
    if (model.domain_of(name).index_of(value) < 0) {
      throw Error(ErrorCode::ValueOutOfDomain,
                  "value " + value + " is not in the domain of " + name);
    }
  }
}

void sort_diagram(Diagram& diagram) {
  std::sort(diagram.nodes.begin(), diagram.nodes.end());
  std::sort(diagram.edges.begin(), diagram.edges.end());
  std::sort(diagram.pi_edges.begin(), diagram.pi_edges.end());
  std::sort(diagram.annotations.begin(), diagram.annotations.end());
}

// Factual skeleton shared by every diagram: one node per variable and the
// base edges, minus whichever edges the intervention severs.
template <typename Model, typename KeepEdge>
Diagram factual_diagram(const Model& model, KeepEdge keep_edge) {
  Diagram diagram;
  for (const auto& v : model.variables) {
    diagram.nodes.push_back({v.name, World::Factual});
  }
  Dag dag = causal_diagram(model);
  for (const auto& [s, t] : dag.edges) {
    if (keep_edge(s, t)) {
      diagram.edges.push_back({{s, World::Factual}, {t, World::Factual}});
    }
  }
  return diagram;
}

std::string assignment_note(const char* op, const std::string& name,
                            const std::string& value) {
  return std::string(op) + "(" + name + "=" + value + ")";
}

}  // namespace

bool PathIntervenedModel::is_counterfactual(const std::string& name) const {
  return std::find(counterfactual_set.begin(), counterfactual_set.end(),
                   name) != counterfactual_set.end();
}

DoIntervenedCpt apply_do(const CptModel& model, const DoIntervention& iv) {
  check_assignments(model, iv.assignments);
  CptModel intervened = model;
  for (auto& cpt : intervened.cpts) {
    auto it = iv.assignments.find(cpt.child);
    if (it == iv.assignments.end()) continue;
    const Domain& domain = model.domain_of(cpt.child);
    std::vector<double> point(domain.size(), 0.0);
    point[domain.index_of(it->second)] = 1.0;
    cpt = Cpt{cpt.child, {}, std::move(point)};
  }
  DoIntervenedCpt result{std::move(intervened), iv, {}};
  result.diagram = intervention_diagram(result, false);
  return result;
}

DoIntervenedScm apply_do(const Scm& scm, const DoIntervention& iv) {
  check_assignments(scm, iv.assignments);
  Scm intervened = scm;
  for (auto& mech : intervened.mechanisms) {
    auto it = iv.assignments.find(mech.child);
    if (it == iv.assignments.end()) continue;
    int value = scm.domain_of(mech.child).index_of(it->second);
    std::size_t noise_size = scm.noise(mech.noise).domain.size();
    mech.parents.clear();
    mech.table.assign(noise_size, value);  // constant; the noise is ignored
  }
  DoIntervenedScm result{std::move(intervened), iv, {}};
  result.diagram = intervention_diagram(result, false);
  return result;
}

namespace {

// Rewrites every table so that arguments read from intervened parents are
// fixed at the literal value and the corresponding parent is dropped.
CptModel retabulate_info(const CptModel& model,
                         const std::map<std::string, std::string>& fixed) {
  CptModel intervened = model;
  for (auto& cpt : intervened.cpts) {
    std::vector<int> fixed_value(cpt.parents.size(), -1);
    bool any = false;
    for (std::size_t s = 0; s < cpt.parents.size(); ++s) {
      auto it = fixed.find(cpt.parents[s]);
      if (it != fixed.end()) {
        fixed_value[s] = model.domain_of(cpt.parents[s]).index_of(it->second);
        any = true;
      }
    }
    if (!any) continue;

    std::vector<std::string> kept_parents;
    std::vector<std::size_t> kept_sizes;
    std::vector<std::size_t> all_sizes;
    for (std::size_t s = 0; s < cpt.parents.size(); ++s) {
      all_sizes.push_back(model.domain_of(cpt.parents[s]).size());
      if (fixed_value[s] < 0) {
        kept_parents.push_back(cpt.parents[s]);
        kept_sizes.push_back(all_sizes.back());
      }
    }
    std::size_t child_size = model.domain_of(cpt.child).size();
    std::size_t kept_rows = 1;
    for (std::size_t s : kept_sizes) kept_rows *= s;

    std::vector<double> table(kept_rows * child_size, 0.0);
    std::vector<int> kept_digits(kept_sizes.size(), 0);
    std::vector<int> full_digits(all_sizes.size(), 0);
    for (std::size_t r = 0; r < kept_rows; ++r) {
      std::size_t k = 0;
      for (std::size_t s = 0; s < cpt.parents.size(); ++s) {
        full_digits[s] = fixed_value[s] >= 0 ? fixed_value[s] : kept_digits[k++];
      }
      std::size_t full_row = flat_index(full_digits, all_sizes);
      std::copy_n(cpt.table.begin() +
                      static_cast<std::ptrdiff_t>(full_row * child_size),
                  child_size,
                  table.begin() + static_cast<std::ptrdiff_t>(r * child_size));
      if (!kept_digits.empty()) advance_odometer(kept_digits, kept_sizes);
    }
    cpt = Cpt{cpt.child, std::move(kept_parents), std::move(table)};
  }
  return intervened;
}

}  // namespace

InfoIntervenedCpt apply_info(const CptModel& model, const InfoIntervention& iv) {
  check_assignments(model, iv.assignments);
  InfoIntervenedCpt result{retabulate_info(model, iv.assignments), iv, {}};
  result.diagram = intervention_diagram(result, false);
  return result;
}

InfoIntervenedScm apply_info(const Scm& scm, const InfoIntervention& iv) {
  check_assignments(scm, iv.assignments);
  DecomposedScm decomposed = decompose(scm);
  for (auto& channel : decomposed.channels) {
    auto it = iv.assignments.find(channel.source);
    if (it != iv.assignments.end()) {
      channel.rule = ChannelRule::LiteralValue;
      channel.literal = it->second;
    }
  }
  InfoIntervenedScm result{recompose(decomposed), iv, {}};
  result.diagram = intervention_diagram(result, false);
  return result;
}

PathIntervenedModel apply_path(const CptModel& model,
                               const PathIntervention& iv, bool keep_all) {
  Dag dag = causal_diagram(model);
  CausalPath path = validate_path(dag, iv.path.nodes);
  if (model.domain_of(path.head()).index_of(iv.value) < 0) {
    throw Error(ErrorCode::ValueOutOfDomain,
                "value " + iv.value + " is not in the domain of " +
                    path.head());
  }

  std::set<std::string> members;
  if (keep_all) {
    for (const auto& v : model.variables) members.insert(v.name);
  } else {
    members = desc_pi(path);
  }
  std::vector<std::string> counterfactual_set;
  for (const auto& name : topological_order(model)) {
    if (members.count(name)) counterfactual_set.push_back(name);
  }

  // Exactly one rule per (parent, counterfactual child) pair.
  std::map<std::string, std::vector<EdgeRule>> edge_rules;
  for (const auto& name : counterfactual_set) {
    const Cpt& cpt = model.cpt_for(name);
    std::vector<EdgeRule> rules;
    for (const auto& parent : cpt.parents) {
      if (!path.contains_edge(parent, name)) {
        rules.push_back(EdgeRule::FactualCopy);
      } else if (parent == path.head()) {
        rules.push_back(EdgeRule::LiteralHead);
      } else {
        rules.push_back(EdgeRule::CounterfactualCopy);
      }
    }
    edge_rules[name] = std::move(rules);
  }
  return PathIntervenedModel{model,       path,       iv.value,
                             counterfactual_set, edge_rules, keep_all};
}

Diagram intervention_diagram(const DoIntervenedCpt& iv, bool augmented) {
  const auto& cut = iv.intervention.assignments;
  Diagram diagram = factual_diagram(
      iv.model, [](const std::string&, const std::string&) { return true; });
  for (const auto& [name, value] : cut) {
    diagram.annotations.push_back(
        {{name, World::Factual}, assignment_note("do", name, value)});
  }
  if (augmented) {
    for (const auto& v : iv.model.variables) {
      if (cut.count(v.name)) continue;  // constant mechanism reads no noise
      diagram.nodes.push_back({"u_" + v.name, World::Exogenous});
      diagram.edges.push_back(
          {{"u_" + v.name, World::Exogenous}, {v.name, World::Factual}});
    }
  }
  sort_diagram(diagram);
  return diagram;
}

Diagram intervention_diagram(const DoIntervenedScm& iv, bool augmented) {
  const auto& cut = iv.intervention.assignments;
  Diagram diagram = factual_diagram(
      iv.model, [](const std::string&, const std::string&) { return true; });
  for (const auto& [name, value] : cut) {
    diagram.annotations.push_back(
        {{name, World::Factual}, assignment_note("do", name, value)});
  }
  if (augmented) {
    for (const auto& mech : iv.model.mechanisms) {
      if (cut.count(mech.child)) continue;
      diagram.nodes.push_back({mech.noise, World::Exogenous});
      diagram.edges.push_back(
          {{mech.noise, World::Exogenous}, {mech.child, World::Factual}});
    }
  }
  sort_diagram(diagram);
  return diagram;
}

namespace {

template <typename Model>
Diagram info_diagram(const Model& model,
                     const std::map<std::string, std::string>& assignments,
                     bool augmented) {
  // The rewritten model already dropped the severed edges from its parent
  // lists, so its factual skeleton is the diagram.
  Diagram diagram = factual_diagram(
      model, [](const std::string&, const std::string&) { return true; });
  for (const auto& [name, value] : assignments) {
    diagram.annotations.push_back(
        {{name, World::Factual}, assignment_note("sigma", name, value)});
  }
  if (augmented) {
    if constexpr (std::is_same_v<Model, Scm>) {
      for (const auto& mech : model.mechanisms) {
        diagram.nodes.push_back({mech.noise, World::Exogenous});
        diagram.edges.push_back(
            {{mech.noise, World::Exogenous}, {mech.child, World::Factual}});
      }
    } else {
      for (const auto& v : model.variables) {
        diagram.nodes.push_back({"u_" + v.name, World::Exogenous});
        diagram.edges.push_back(
            {{"u_" + v.name, World::Exogenous}, {v.name, World::Factual}});
      }
    }
  }
  sort_diagram(diagram);
  return diagram;
}

}  // namespace

Diagram intervention_diagram(const InfoIntervenedCpt& iv, bool augmented) {
  return info_diagram(iv.model, iv.intervention.assignments, augmented);
}

Diagram intervention_diagram(const InfoIntervenedScm& iv, bool augmented) {
  return info_diagram(iv.model, iv.intervention.assignments, augmented);
}

Diagram intervention_diagram(const PathIntervenedModel& iv, bool augmented) {
  Diagram diagram = factual_diagram(
      iv.base, [](const std::string&, const std::string&) { return true; });
  for (std::size_t i = 0; i + 1 < iv.path.nodes.size(); ++i) {
    diagram.pi_edges.push_back({{iv.path.nodes[i], World::Factual},
                                {iv.path.nodes[i + 1], World::Factual}});
  }

  for (const auto& name : iv.counterfactual_set) {
    TaggedVar copy{name, World::Pi};
    diagram.nodes.push_back(copy);
    const Cpt& cpt = iv.base.cpt_for(name);
    const auto& rules = iv.edge_rules.at(name);
    for (std::size_t s = 0; s < cpt.parents.size(); ++s) {
      switch (rules[s]) {
        case EdgeRule::FactualCopy:
          diagram.edges.push_back({{cpt.parents[s], World::Factual}, copy});
          break;
        case EdgeRule::CounterfactualCopy:
          diagram.edges.push_back({{cpt.parents[s], World::Pi}, copy});
          diagram.pi_edges.push_back({{cpt.parents[s], World::Pi}, copy});
          break;
        case EdgeRule::LiteralHead:
          // Constants are node annotations, not edges.
          diagram.annotations.push_back(
              {copy, iv.path.head() + ":=" + iv.value});
          break;
      }
    }
  }

  if (augmented) {
    for (const auto& v : iv.base.variables) {
      diagram.nodes.push_back({"u_" + v.name, World::Exogenous});
      diagram.edges.push_back(
          {{"u_" + v.name, World::Exogenous}, {v.name, World::Factual}});
    }
    for (const auto& name : iv.counterfactual_set) {
      diagram.nodes.push_back({"u_" + name, World::ExogenousCopy});
      diagram.edges.push_back(
          {{"u_" + name, World::ExogenousCopy}, {name, World::Pi}});
    }
  }
  sort_diagram(diagram);
  return diagram;
}

}  // namespace pathfx
