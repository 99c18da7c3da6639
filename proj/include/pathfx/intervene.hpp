#pragma once

#include <map>
#include <string>
#include <vector>

#include "pathfx/graph.hpp"
#include "pathfx/model.hpp"

namespace pathfx {

// do(v'_I): replace the mechanism of every intervened variable by the
// constant v'_i, keeping everything else.
struct DoIntervention {
  std::map<std::string, std::string> assignments;
};

// sigma(v'_I): every outgoing channel of an intervened variable carries the
// literal v'_j; the variable's own mechanism stays intact.
struct InfoIntervention {
  std::map<std::string, std::string> assignments;
};

// pi(A = a'): transfer the value a' exclusively along one causal path.
struct PathIntervention {
  CausalPath path;
  std::string value;  // a', in the domain of path.head()
};

// How a counterfactual copy reads each of its parents. Exactly one rule per
// (parent, counterfactual child) pair:
//   LiteralHead        (j,k) on the path and j is the path head  -> a'
//   CounterfactualCopy (j,k) on the path, j not the head         -> v^pi_j
//   FactualCopy        (j,k) not on the path                     -> v_j
enum class EdgeRule { FactualCopy, LiteralHead, CounterfactualCopy };

// The rewritten two-world system. The factual block is the base model
// unchanged; counterfactual copies exist for desc^pi(A) only, unless
// keep_all retains a copy of every variable (off-path copies then read all
// parents factually and draw fresh noise). Counterfactual copies sample
// from the child's own conditional table with an independent draw: the
// noise copy U' is i.i.d., so the conditional law is unchanged.
struct PathIntervenedModel {
  CptModel base;
  CausalPath path;
  std::string value;
  std::vector<std::string> counterfactual_set;  // topologically ordered
  std::map<std::string, std::vector<EdgeRule>>
      edge_rules;  // child -> rule per parent-list slot
  bool keep_all = false;

  bool is_counterfactual(const std::string& name) const;
};

struct DoIntervenedCpt {
  CptModel model;
  DoIntervention intervention;
  Diagram diagram;
};

struct DoIntervenedScm {
  Scm model;
  DoIntervention intervention;
  Diagram diagram;
};

struct InfoIntervenedCpt {
  CptModel model;
  InfoIntervention intervention;
  Diagram diagram;
};

struct InfoIntervenedScm {
  Scm model;
  InfoIntervention intervention;
  Diagram diagram;
};

DoIntervenedCpt apply_do(const CptModel& model, const DoIntervention& iv);
DoIntervenedScm apply_do(const Scm& scm, const DoIntervention& iv);

InfoIntervenedCpt apply_info(const CptModel& model, const InfoIntervention& iv);
InfoIntervenedScm apply_info(const Scm& scm, const InfoIntervention& iv);

PathIntervenedModel apply_path(const CptModel& model,
                               const PathIntervention& iv,
                               bool keep_all = false);

// Diagram of the modified mechanisms. The augmented variant adds exogenous
// nodes u_i -> v_i (dropped for do-intervened variables, whose mechanism is
// a constant) and i.i.d. copies u'_k -> v^pi_k for counterfactual nodes.
Diagram intervention_diagram(const DoIntervenedCpt& iv, bool augmented = false);
Diagram intervention_diagram(const DoIntervenedScm& iv, bool augmented = false);
Diagram intervention_diagram(const InfoIntervenedCpt& iv,
                             bool augmented = false);
Diagram intervention_diagram(const InfoIntervenedScm& iv,
                             bool augmented = false);
Diagram intervention_diagram(const PathIntervenedModel& iv,
                             bool augmented = false);

}  // namespace pathfx
