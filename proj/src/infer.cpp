#include "pathfx/infer.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>

namespace pathfx {

std::size_t JointTable::column_index(const TaggedVar& var) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == var) return i;
  }
  throw Error(ErrorCode::UnknownColumn,
              "no column " + var.name + " (" + world_name(var.world) + ")");
}

double JointTable::sum() const {
  double total = 0.0;
  for (double p : probs) total += p;
  return total;
}

namespace {

// Lexicographically-smallest topological order over tagged variables, where
// each factor's child depends on its tagged conditioners.
std::vector<TaggedVar> tagged_topological_order(
    const std::vector<Factor>& factors) {
  std::map<TaggedVar, std::set<TaggedVar>> parents;
  for (const auto& f : factors) {
    auto& deps = parents[f.child];
    for (const auto& c : f.given) {
      if (const auto* var = std::get_if<TaggedVar>(&c)) deps.insert(*var);
    }
  }
  std::map<TaggedVar, std::size_t> missing;
  for (const auto& [child, deps] : parents) {
    for (const auto& dep : deps) {
      if (!parents.count(dep)) {
        throw Error(ErrorCode::UnknownVariable,
                    "factor conditions on " + dep.name + " (" +
                        world_name(dep.world) + ") which no factor generates");
      }
    }
    missing[child] = deps.size();
  }
  std::set<TaggedVar> frontier;
  for (const auto& [node, count] : missing) {
    if (count == 0) frontier.insert(node);
  }
  std::vector<TaggedVar> order;
  while (!frontier.empty()) {
    TaggedVar node = *frontier.begin();
    frontier.erase(frontier.begin());
    order.push_back(node);
    for (const auto& [child, deps] : parents) {
      if (deps.count(node) && --missing[child] == 0) frontier.insert(child);
    }
  }
  if (order.size() != factors.size()) {
    throw Error(ErrorCode::CycleDetected,
                "factorization dependencies contain a cycle");
  }
  return order;
}

}  // namespace

Factorization observational_factorization(const CptModel& model) {
  Factorization fz;
  for (const auto& v : model.variables) {
    const Cpt& cpt = model.cpt_for(v.name);
    Factor factor{{v.name, World::Factual}, {}};
    for (const auto& p : cpt.parents) {
      factor.given.emplace_back(TaggedVar{p, World::Factual});
    }
    fz.factors.push_back(std::move(factor));
  }
  fz.order = tagged_topological_order(fz.factors);
  return fz;
}

Factorization path_factorization(const PathIntervenedModel& intervened) {
  Factorization fz;
  for (const auto& name : intervened.counterfactual_set) {
    const Cpt& cpt = intervened.base.cpt_for(name);
    const auto& rules = intervened.edge_rules.at(name);
    Factor factor{{name, World::Pi}, {}};
    for (std::size_t s = 0; s < cpt.parents.size(); ++s) {
      switch (rules[s]) {
        case EdgeRule::FactualCopy:
          factor.given.emplace_back(TaggedVar{cpt.parents[s], World::Factual});
          break;
        case EdgeRule::CounterfactualCopy:
          factor.given.emplace_back(TaggedVar{cpt.parents[s], World::Pi});
          break;
        case EdgeRule::LiteralHead:
          factor.given.emplace_back(LiteralValue{intervened.value});
          break;
      }
    }
    fz.factors.push_back(std::move(factor));
  }
  for (const auto& v : intervened.base.variables) {
    const Cpt& cpt = intervened.base.cpt_for(v.name);
    Factor factor{{v.name, World::Factual}, {}};
    for (const auto& p : cpt.parents) {
      factor.given.emplace_back(TaggedVar{p, World::Factual});
    }
    fz.factors.push_back(std::move(factor));
  }
  fz.order = tagged_topological_order(fz.factors);
  return fz;
}

Factorization pi_formula(const CptModel& model, const CausalPath& path,
                         const std::string& value, bool keep_all) {
  return path_factorization(
      apply_path(model, PathIntervention{path, value}, keep_all));
}

JointTable exact_joint(const CptModel& model, const Factorization& fz,
                       std::size_t max_states) {
  JointTable joint;
  joint.columns = fz.order;
  std::map<TaggedVar, std::size_t> column_of;
  for (std::size_t i = 0; i < joint.columns.size(); ++i) {
    joint.domains.push_back(model.domain_of(joint.columns[i].name));
    column_of[joint.columns[i]] = i;
  }
  std::vector<std::size_t> radices;
  for (const auto& d : joint.domains) radices.push_back(d.size());
  std::size_t total = checked_product(radices, max_states);

  struct ResolvedFactor {
    const Cpt* cpt;
    std::size_t child_column;
    std::size_t child_size;
    std::vector<std::size_t> parent_sizes;
    std::vector<int> slot_column;  // -1 when the slot is a literal
    std::vector<int> slot_fixed;   // literal value index when slot_column < 0
  };
  std::vector<ResolvedFactor> resolved;
  for (const auto& factor : fz.factors) {
    const Cpt& cpt = model.cpt_for(factor.child.name);
    if (factor.given.size() != cpt.parents.size()) {
      throw Error(ErrorCode::SemanticError,
                  "factor for " + factor.child.name + " has " +
                      std::to_string(factor.given.size()) +
                      " conditioners, expected " +
                      std::to_string(cpt.parents.size()));
    }
    ResolvedFactor rf{&cpt,
                      column_of.at(factor.child),
                      model.domain_of(factor.child.name).size(),
                      {},
                      {},
                      {}};
    for (std::size_t s = 0; s < factor.given.size(); ++s) {
      const Domain& parent_domain = model.domain_of(cpt.parents[s]);
      rf.parent_sizes.push_back(parent_domain.size());
      if (const auto* var = std::get_if<TaggedVar>(&factor.given[s])) {
        rf.slot_column.push_back(static_cast<int>(column_of.at(*var)));
        rf.slot_fixed.push_back(0);
      } else {
        const auto& literal = std::get<LiteralValue>(factor.given[s]);
        int index = parent_domain.index_of(literal.value);
        if (index < 0) {
          throw Error(ErrorCode::ValueOutOfDomain,
                      "literal " + literal.value +
                          " is not in the domain of " + cpt.parents[s]);
        }
        rf.slot_column.push_back(-1);
        rf.slot_fixed.push_back(index);
      }
    }
    resolved.push_back(std::move(rf));
  }

  joint.probs.assign(total, 0.0);
  std::vector<int> digits(joint.columns.size(), 0);
  for (std::size_t index = 0; index < total; ++index) {
    double p = 1.0;
    for (const auto& rf : resolved) {
      std::size_t row = 0;
      for (std::size_t s = 0; s < rf.parent_sizes.size(); ++s) {
        int digit = rf.slot_column[s] >= 0 ? digits[rf.slot_column[s]]
                                           : rf.slot_fixed[s];
        row = row * rf.parent_sizes[s] + static_cast<std::size_t>(digit);
      }
      p *= rf.cpt->table[row * rf.child_size +
                         static_cast<std::size_t>(digits[rf.child_column])];
    }
    joint.probs[index] = p;
    advance_odometer(digits, radices);
  }
  return joint;
}

JointTable marginalize(const JointTable& joint,
                       std::span<const TaggedVar> keep) {
  JointTable result;
  std::vector<std::size_t> source_of;
  std::set<TaggedVar> seen;
  for (const auto& var : keep) {
    std::size_t index = joint.column_index(var);
    if (!seen.insert(var).second) {
      throw Error(ErrorCode::DuplicateName,
                  "column " + var.name + " kept twice");
    }
    result.columns.push_back(var);
    result.domains.push_back(joint.domains[index]);
    source_of.push_back(index);
  }

  std::vector<std::size_t> source_radices;
  for (const auto& d : joint.domains) source_radices.push_back(d.size());
  std::vector<std::size_t> kept_radices;
  for (const auto& d : result.domains) kept_radices.push_back(d.size());

  std::size_t kept_total = 1;
  for (std::size_t r : kept_radices) kept_total *= r;
  result.probs.assign(kept_total, 0.0);

  std::vector<int> digits(joint.columns.size(), 0);
  std::vector<int> kept_digits(result.columns.size(), 0);
  for (std::size_t index = 0; index < joint.probs.size(); ++index) {
    for (std::size_t k = 0; k < source_of.size(); ++k) {
      kept_digits[k] = digits[source_of[k]];
    }
    result.probs[flat_index(kept_digits, kept_radices)] += joint.probs[index];
    advance_odometer(digits, source_radices);
  }
  return result;
}

namespace {

double numeric_label(const std::string& label, const std::string& owner) {
  const char* begin = label.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (label.empty() || end != begin + label.size()) {
    throw Error(ErrorCode::NonNumericDomain,
                "domain value " + label + " of " + owner +
                    " is not a decimal number");
  }
  return value;
}

}  // namespace

double expectation(const JointTable& joint, const TaggedVar& column) {
  std::vector<TaggedVar> keep{column};
  JointTable marginal = marginalize(joint, keep);
  double value = 0.0;
  for (std::size_t i = 0; i < marginal.probs.size(); ++i) {
    value += marginal.probs[i] *
             numeric_label(marginal.domains[0].values[i], column.name);
  }
  return value;
}

double expectation_contrast(const CptModel& model, const CausalPath& path,
                            const std::string& value_a,
                            const std::string& value_b,
                            const std::string& target,
                            std::size_t max_states) {
  if (!model.has_variable(target)) {
    throw Error(ErrorCode::UnknownVariable, "unknown variable " + target);
  }
  for (const auto& label : model.domain_of(target).values) {
    numeric_label(label, target);
  }
  TaggedVar column{target, desc_pi(path).count(target) ? World::Pi
                                                       : World::Factual};
  double ea = expectation(
      exact_joint(model, pi_formula(model, path, value_a), max_states),
      column);
  double eb = expectation(
      exact_joint(model, pi_formula(model, path, value_b), max_states),
      column);
  return ea - eb;
}

double round_to_12_digits(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return std::strtod(buffer, nullptr);
}

nlohmann::ordered_json to_json(const TaggedVar& var) {
  return {{"name", var.name}, {"world", world_name(var.world)}};
}

nlohmann::ordered_json to_json(const Factorization& fz) {
  nlohmann::ordered_json factors = nlohmann::ordered_json::array();
  for (const auto& factor : fz.factors) {
    nlohmann::ordered_json given = nlohmann::ordered_json::array();
    for (const auto& c : factor.given) {
      if (const auto* var = std::get_if<TaggedVar>(&c)) {
        given.push_back(to_json(*var));
      } else {
        given.push_back({{"literal", std::get<LiteralValue>(c).value}});
      }
    }
    factors.push_back(
        {{"child", to_json(factor.child)}, {"given", std::move(given)}});
  }
  return {{"factors", std::move(factors)}};
}

nlohmann::ordered_json to_json(const JointTable& joint) {
  nlohmann::ordered_json vars = nlohmann::ordered_json::array();
  for (const auto& column : joint.columns) vars.push_back(to_json(column));
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::vector<std::size_t> radices;
  for (const auto& d : joint.domains) radices.push_back(d.size());
  std::vector<int> digits(joint.columns.size(), 0);
  for (std::size_t index = 0; index < joint.probs.size(); ++index) {
    nlohmann::ordered_json values = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < joint.columns.size(); ++c) {
      values.push_back(joint.domains[c].values[digits[c]]);
    }
    rows.push_back({{"values", std::move(values)},
                    {"p", round_to_12_digits(joint.probs[index])}});
    advance_odometer(digits, radices);
  }
  return {{"vars", std::move(vars)}, {"rows", std::move(rows)}};
}

}  // namespace pathfx
