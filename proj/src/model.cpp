#include "pathfx/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace pathfx {

std::size_t flat_index(std::span<const int> digits,
                       std::span<const std::size_t> radices) {
  std::size_t index = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    index = index * radices[i] + static_cast<std::size_t>(digits[i]);
  }
  return index;
}

bool advance_odometer(std::vector<int>& digits,
                      std::span<const std::size_t> radices) {
  for (std::size_t i = digits.size(); i-- > 0;) {
    if (static_cast<std::size_t>(++digits[i]) < radices[i]) return true;
    digits[i] = 0;
  }
  return false;
}

std::size_t checked_product(std::span<const std::size_t> radices,
                            std::size_t cap) {
  std::size_t product = 1;
  for (std::size_t r : radices) {
    if (r == 0 || product > cap / r) {
      throw Error(ErrorCode::StateSpaceTooLarge,
                  "state space exceeds cap of " + std::to_string(cap) +
                      " assignments");
    }
    product *= r;
  }
  return product;
}

int Domain::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == label) return static_cast<int>(i);
  }
  return -1;
}

namespace {

// Renders an input tuple by unflattening `row` against the given domains.
// When `noise_last` is set the final slot is separated with ";", the
// spelling mechanisms use for their (parents; noise) inputs.
std::string row_label(const std::vector<const Domain*>& domains,
                      std::size_t row, bool noise_last = false) {
  std::vector<std::size_t> radices;
  for (const Domain* d : domains) radices.push_back(d->size());
  std::vector<int> digits(radices.size(), 0);
  for (std::size_t i = radices.size(); i-- > 0;) {
    digits[i] = static_cast<int>(row % radices[i]);
    row /= radices[i];
  }
  std::string text = "(";
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i > 0) text += noise_last && i + 1 == digits.size() ? "; " : ",";
    if (noise_last && digits.size() == 1) text += "; ";
    text += domains[i]->values[digits[i]];
  }
  text += ")";
  return text;
}

void check_probability_vector(std::span<const double> probs,
                              const std::string& what) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::RowNotNormalized,
                  what + " has a negative or non-finite entry");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os << what << " sums to " << sum << ", expected 1";
    throw Error(ErrorCode::RowNotNormalized, os.str());
  }
}

void check_domain(const Domain& domain, const std::string& owner) {
  if (domain.values.empty()) {
    throw Error(ErrorCode::SemanticError, "domain of " + owner + " is empty");
  }
  std::set<std::string> seen;
  for (const auto& v : domain.values) {
    if (!seen.insert(v).second) {
      throw Error(ErrorCode::DuplicateName,
                  "domain of " + owner + " repeats value " + v);
    }
  }
}

// Kahn's algorithm with a lexicographic frontier; on failure names a cycle
// found by walking unresolved nodes.
std::vector<std::string> lex_topological_order(
    const std::vector<std::string>& nodes,
    const std::map<std::string, std::vector<std::string>>& parents) {
  std::map<std::string, int> missing;
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& n : nodes) missing[n] = 0;
  for (const auto& [child, ps] : parents) {
    for (const auto& p : ps) {
      ++missing[child];
      children[p].push_back(child);
    }
  }
  std::set<std::string> frontier;
  for (const auto& [n, count] : missing) {
    if (count == 0) frontier.insert(n);
  }
  std::vector<std::string> order;
  while (!frontier.empty()) {
    std::string node = *frontier.begin();
    frontier.erase(frontier.begin());
    order.push_back(node);
    auto it = children.find(node);
    if (it == children.end()) continue;
    for (const auto& child : it->second) {
      if (--missing[child] == 0) frontier.insert(child);
    }
  }
  if (order.size() != nodes.size()) {
    // Walk parent links among unresolved nodes until one repeats.
    std::set<std::string> unresolved;
    for (const auto& [n, count] : missing) {
      if (count > 0) unresolved.insert(n);
    }
    std::vector<std::string> walk{*unresolved.begin()};
    std::set<std::string> seen{walk.back()};
    for (;;) {
      const auto& ps = parents.at(walk.back());
      std::string next;
      for (const auto& p : ps) {
        if (unresolved.count(p)) {
          next = p;
          break;
        }
      }
      if (!seen.insert(next).second) {
        std::string cycle = next;
        for (auto it2 = walk.rbegin(); it2 != walk.rend(); ++it2) {
          cycle += " -> " + *it2;
          if (*it2 == next) break;
        }
        throw Error(ErrorCode::CycleDetected, "cycle: " + cycle);
      }
      walk.push_back(next);
    }
  }
  return order;
}

}  // namespace

const VariableSpec& Scm::variable(std::string_view name) const {
  for (const auto& v : variables) {
    if (v.name == name) return v;
  }
  throw Error(ErrorCode::UnknownVariable,
              "unknown variable " + std::string(name));
}

bool Scm::has_variable(std::string_view name) const {
  return std::any_of(variables.begin(), variables.end(),
                     [&](const auto& v) { return v.name == name; });
}

const NoiseSpec& Scm::noise(std::string_view name) const {
  for (const auto& n : noises) {
    if (n.name == name) return n;
  }
  throw Error(ErrorCode::MissingNoise, "unknown noise " + std::string(name));
}

const Mechanism& Scm::mechanism_for(std::string_view child) const {
  for (const auto& m : mechanisms) {
    if (m.child == child) return m;
  }
  throw Error(ErrorCode::MissingMechanism,
              "no mechanism for " + std::string(child));
}

const VariableSpec& CptModel::variable(std::string_view name) const {
  for (const auto& v : variables) {
    if (v.name == name) return v;
  }
  throw Error(ErrorCode::UnknownVariable,
              "unknown variable " + std::string(name));
}

bool CptModel::has_variable(std::string_view name) const {
  return std::any_of(variables.begin(), variables.end(),
                     [&](const auto& v) { return v.name == name; });
}

const Cpt& CptModel::cpt_for(std::string_view child) const {
  for (const auto& c : cpts) {
    if (c.child == child) return c;
  }
  throw Error(ErrorCode::MissingCpt, "no cpt for " + std::string(child));
}

CptModel build_cpt_model(std::vector<VariableSpec> variables,
                         std::vector<Cpt> cpts) {
  CptModel model{std::move(variables), std::move(cpts)};

  std::set<std::string> names;
  for (const auto& v : model.variables) {
    check_domain(v.domain, v.name);
    if (!names.insert(v.name).second) {
      throw Error(ErrorCode::DuplicateName, "duplicate variable " + v.name);
    }
  }
  std::set<std::string> children;
  for (const auto& c : model.cpts) {
    if (!names.count(c.child)) {
      throw Error(ErrorCode::UnknownVariable,
                  "cpt for undeclared variable " + c.child);
    }
    if (!children.insert(c.child).second) {
      throw Error(ErrorCode::DuplicateName, "duplicate cpt for " + c.child);
    }
    std::set<std::string> parent_seen;
    std::vector<const Domain*> parent_domains;
    for (const auto& p : c.parents) {
      if (!names.count(p)) {
        throw Error(ErrorCode::UnknownVariable,
                    "cpt for " + c.child + " names undeclared parent " + p);
      }
      if (p == c.child || !parent_seen.insert(p).second) {
        throw Error(ErrorCode::DuplicateName,
                    "cpt for " + c.child + " repeats parent " + p);
      }
      parent_domains.push_back(&model.domain_of(p));
    }
    std::size_t child_size = model.domain_of(c.child).size();
    std::size_t rows = 1;
    for (const Domain* d : parent_domains) rows *= d->size();
    if (c.table.size() != rows * child_size) {
      throw Error(ErrorCode::SemanticError,
                  "cpt for " + c.child + " has " +
                      std::to_string(c.table.size()) + " entries, expected " +
                      std::to_string(rows * child_size));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      check_probability_vector(c.row(r, child_size),
                               "cpt row " + row_label(parent_domains, r) +
                                   " for " + c.child);
    }
  }
  for (const auto& v : model.variables) {
    if (!children.count(v.name)) {
      throw Error(ErrorCode::MissingCpt, "no cpt declared for " + v.name);
    }
  }

  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& c : model.cpts) parents[c.child] = c.parents;
  std::vector<std::string> node_names;
  for (const auto& v : model.variables) node_names.push_back(v.name);
  lex_topological_order(node_names, parents);
  return model;
}

Scm build_scm(std::vector<VariableSpec> variables,
              std::vector<NoiseSpec> noises,
              std::vector<Mechanism> mechanisms) {
  Scm scm{std::move(variables), std::move(noises), std::move(mechanisms)};

  std::set<std::string> names;
  for (const auto& v : scm.variables) {
    check_domain(v.domain, v.name);
    if (!names.insert(v.name).second) {
      throw Error(ErrorCode::DuplicateName, "duplicate variable " + v.name);
    }
  }
  std::set<std::string> noise_names;
  for (const auto& n : scm.noises) {
    check_domain(n.domain, n.name);
    if (names.count(n.name) || !noise_names.insert(n.name).second) {
      throw Error(ErrorCode::DuplicateName, "duplicate name " + n.name);
    }
    if (n.dist.size() != n.domain.size()) {
      throw Error(ErrorCode::SemanticError,
                  "noise " + n.name + " has " + std::to_string(n.dist.size()) +
                      " probabilities for " + std::to_string(n.domain.size()) +
                      " values");
    }
    check_probability_vector(n.dist, "noise " + n.name);
  }

  std::set<std::string> mech_children;
  std::set<std::string> used_noises;
  for (const auto& m : scm.mechanisms) {
    if (!names.count(m.child)) {
      throw Error(ErrorCode::UnknownVariable,
                  "mechanism for undeclared variable " + m.child);
    }
    if (!mech_children.insert(m.child).second) {
      throw Error(ErrorCode::DuplicateName,
                  "duplicate mechanism for " + m.child);
    }
    if (!noise_names.count(m.noise)) {
      throw Error(ErrorCode::MissingNoise,
                  "mechanism for " + m.child + " names undeclared noise " +
                      m.noise);
    }
    if (!used_noises.insert(m.noise).second) {
      throw Error(ErrorCode::DuplicateName,
                  "noise " + m.noise + " is used by more than one mechanism");
    }
    std::set<std::string> parent_seen;
    std::vector<const Domain*> input_domains;
    for (const auto& p : m.parents) {
      if (!names.count(p)) {
        throw Error(ErrorCode::UnknownVariable,
                    "mechanism for " + m.child + " names undeclared parent " +
                        p);
      }
      if (p == m.child || !parent_seen.insert(p).second) {
        throw Error(ErrorCode::DuplicateName,
                    "mechanism for " + m.child + " repeats parent " + p);
      }
      input_domains.push_back(&scm.domain_of(p));
    }
    const Domain& noise_domain = scm.noise(m.noise).domain;
    input_domains.push_back(&noise_domain);
    std::size_t cells = 1;
    for (const Domain* d : input_domains) cells *= d->size();
    if (m.table.size() != cells) {
      throw Error(ErrorCode::SemanticError,
                  "mechanism for " + m.child + " has " +
                      std::to_string(m.table.size()) + " entries, expected " +
                      std::to_string(cells));
    }
    std::size_t child_size = scm.domain_of(m.child).size();
    for (std::size_t cell = 0; cell < cells; ++cell) {
      int value = m.table[cell];
      if (value < 0) {
        throw Error(ErrorCode::IncompleteMechanismTable,
                    "mechanism for " + m.child + " is missing input " +
                        row_label(input_domains, cell, true));
      }
      if (static_cast<std::size_t>(value) >= child_size) {
        throw Error(ErrorCode::ValueOutOfDomain,
                    "mechanism for " + m.child + " maps input " +
                        row_label(input_domains, cell, true) +
                        " outside the child domain");
      }
    }
  }
  for (const auto& v : scm.variables) {
    if (!mech_children.count(v.name)) {
      throw Error(ErrorCode::MissingMechanism,
                  "no mechanism declared for " + v.name);
    }
  }
  for (const auto& n : scm.noises) {
    if (!used_noises.count(n.name)) {
      throw Error(ErrorCode::SemanticError, "noise " + n.name + " is unused");
    }
  }

  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& m : scm.mechanisms) parents[m.child] = m.parents;
  std::vector<std::string> node_names;
  for (const auto& v : scm.variables) node_names.push_back(v.name);
  lex_topological_order(node_names, parents);
  return scm;
}

CptModel scm_to_cpt(const Scm& scm) {
  std::vector<Cpt> cpts;
  for (const auto& v : scm.variables) {
    const Mechanism& mech = scm.mechanism_for(v.name);
    const NoiseSpec& noise = scm.noise(mech.noise);
    std::size_t child_size = v.domain.size();

    std::vector<std::size_t> parent_sizes;
    for (const auto& p : mech.parents) {
      parent_sizes.push_back(scm.domain_of(p).size());
    }
    std::size_t rows = 1;
    for (std::size_t s : parent_sizes) rows *= s;

    Cpt cpt{v.name, mech.parents, std::vector<double>(rows * child_size, 0.0)};
    std::size_t noise_size = noise.domain.size();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t u = 0; u < noise_size; ++u) {
        int value = mech.table[r * noise_size + u];
        cpt.table[r * child_size + static_cast<std::size_t>(value)] +=
            noise.dist[u];
      }
    }
    cpts.push_back(std::move(cpt));
  }
  return build_cpt_model(scm.variables, std::move(cpts));
}

DecomposedScm decompose(const Scm& scm) {
  DecomposedScm result{scm, {}};
  for (const auto& v : scm.variables) {
    const Mechanism& mech = scm.mechanism_for(v.name);
    for (const auto& p : mech.parents) {
      result.channels.push_back({p, v.name, ChannelRule::CopySource, ""});
    }
  }
  return result;
}

Scm recompose(const DecomposedScm& decomposed) {
  const Scm& base = decomposed.base;
  std::set<std::pair<std::string, std::string>> diagram_edges;
  for (const auto& mech : base.mechanisms) {
    for (const auto& p : mech.parents) diagram_edges.insert({p, mech.child});
  }
  std::map<std::pair<std::string, std::string>, const EdgeChannel*> by_edge;
  for (const auto& ch : decomposed.channels) {
    if (ch.rule == ChannelRule::CopyCounterfactual) {
      throw Error(ErrorCode::SemanticError,
                  "channel " + ch.source + " -> " + ch.target +
                      " carries a counterfactual copy outside a path "
                      "intervention");
    }
    if (!diagram_edges.count({ch.source, ch.target})) {
      throw Error(ErrorCode::SemanticError,
                  "channel " + ch.source + " -> " + ch.target +
                      " does not match a diagram edge");
    }
    if (!by_edge.emplace(std::make_pair(ch.source, ch.target), &ch).second) {
      throw Error(ErrorCode::DuplicateName,
                  "duplicate channel " + ch.source + " -> " + ch.target);
    }
  }

  std::vector<Mechanism> mechanisms;
  for (const auto& mech : base.mechanisms) {
    std::vector<int> fixed(mech.parents.size(), -1);  // -1 = still read
    bool any_fixed = false;
    for (std::size_t s = 0; s < mech.parents.size(); ++s) {
      auto it = by_edge.find({mech.parents[s], mech.child});
      if (it == by_edge.end()) {
        throw Error(ErrorCode::SemanticError,
                    "no channel for edge " + mech.parents[s] + " -> " +
                        mech.child);
      }
      if (it->second->rule == ChannelRule::LiteralValue) {
        int index = base.domain_of(mech.parents[s])
                        .index_of(it->second->literal);
        if (index < 0) {
          throw Error(ErrorCode::ValueOutOfDomain,
                      "literal " + it->second->literal +
                          " is not in the domain of " + mech.parents[s]);
        }
        fixed[s] = index;
        any_fixed = true;
      }
    }
    if (!any_fixed) {
      mechanisms.push_back(mech);
      continue;
    }

    std::vector<std::string> kept_parents;
    std::vector<std::size_t> kept_sizes;
    std::vector<std::size_t> all_sizes;
    for (std::size_t s = 0; s < mech.parents.size(); ++s) {
      all_sizes.push_back(base.domain_of(mech.parents[s]).size());
      if (fixed[s] < 0) {
        kept_parents.push_back(mech.parents[s]);
        kept_sizes.push_back(all_sizes.back());
      }
    }
    std::size_t noise_size = base.noise(mech.noise).domain.size();
    all_sizes.push_back(noise_size);
    std::vector<std::size_t> kept_with_noise = kept_sizes;
    kept_with_noise.push_back(noise_size);

    std::size_t cells = 1;
    for (std::size_t s : kept_with_noise) cells *= s;
    std::vector<int> table(cells, -1);
    std::vector<int> kept_digits(kept_with_noise.size(), 0);
    std::vector<int> full_digits(all_sizes.size(), 0);
    for (std::size_t cell = 0; cell < cells; ++cell) {
      std::size_t k = 0;
      for (std::size_t s = 0; s < mech.parents.size(); ++s) {
        full_digits[s] = fixed[s] >= 0 ? fixed[s] : kept_digits[k++];
      }
      full_digits.back() = kept_digits.back();  // noise slot
      table[cell] = mech.table[flat_index(full_digits, all_sizes)];
      advance_odometer(kept_digits, kept_with_noise);
    }
    mechanisms.push_back(
        {mech.child, std::move(kept_parents), mech.noise, std::move(table)});
  }
  return build_scm(base.variables, base.noises, std::move(mechanisms));
}

int evaluate_mechanism(const Scm& scm, const Mechanism& mech,
                       std::span<const int> parent_values, int noise_value) {
  std::vector<std::size_t> sizes;
  sizes.reserve(mech.parents.size() + 1);
  for (const auto& p : mech.parents) sizes.push_back(scm.domain_of(p).size());
  sizes.push_back(scm.noise(mech.noise).domain.size());
  std::vector<int> digits(parent_values.begin(), parent_values.end());
  digits.push_back(noise_value);
  return mech.table[flat_index(digits, sizes)];
}

std::vector<std::string> topological_order(const Scm& scm) {
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& m : scm.mechanisms) parents[m.child] = m.parents;
  std::vector<std::string> node_names;
  for (const auto& v : scm.variables) node_names.push_back(v.name);
  return lex_topological_order(node_names, parents);
}

std::vector<std::string> topological_order(const CptModel& model) {
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& c : model.cpts) parents[c.child] = c.parents;
  std::vector<std::string> node_names;
  for (const auto& v : model.variables) node_names.push_back(v.name);
  return lex_topological_order(node_names, parents);
}

}  // namespace pathfx
