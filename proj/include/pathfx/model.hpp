#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pathfx/errors.hpp"

namespace pathfx {

// Probability vectors must sum to 1 within this tolerance on input.
inline constexpr double kNormalizationTolerance = 1e-9;

// Exact-enumeration equality checks compare at this bound; two exact
// enumerations of the same distribution may differ by summation order only.
inline constexpr double kEnumerationTolerance = 1e-12;

// ---------------------------------------------------------------------------
// Mixed-radix table indexing. All tables in this library are dense vectors
// indexed odometer-style over an ordered tuple of finite domains, with the
// last position varying fastest.

std::size_t flat_index(std::span<const int> digits,
                       std::span<const std::size_t> radices);

// Advances `digits` to the next tuple; returns false when it wraps to zero.
bool advance_odometer(std::vector<int>& digits,
                      std::span<const std::size_t> radices);

// Product of radices, throwing StateSpaceTooLarge beyond `cap`.
std::size_t checked_product(std::span<const std::size_t> radices,
                            std::size_t cap);

// ---------------------------------------------------------------------------
// Core value types. All are immutable after construction through the build_*
// validators and safe for concurrent reads.

struct Domain {
  std::vector<std::string> values;  // ordered, distinct symbolic labels

  std::size_t size() const { return values.size(); }
  // Returns the index of `label`, or -1 if not a member.
  int index_of(std::string_view label) const;
  bool operator==(const Domain&) const = default;
};

struct VariableSpec {
  std::string name;
  Domain domain;
  bool operator==(const VariableSpec&) const = default;
};

struct NoiseSpec {
  std::string name;
  Domain domain;
  std::vector<double> dist;  // probability per domain value
  bool operator==(const NoiseSpec&) const = default;
};

// Deterministic mechanism v <- f(parents, noise). `table` maps every
// (parent tuple, noise value) to a child-domain index, odometer order with
// the noise position last. Entries of -1 mark unset cells and are rejected
// by build_scm, which names the missing input tuple.
struct Mechanism {
  std::string child;
  std::vector<std::string> parents;
  std::string noise;
  std::vector<int> table;
  bool operator==(const Mechanism&) const = default;
};

struct Scm {
  std::vector<VariableSpec> variables;
  std::vector<NoiseSpec> noises;
  std::vector<Mechanism> mechanisms;

  const VariableSpec& variable(std::string_view name) const;
  const NoiseSpec& noise(std::string_view name) const;
  const Mechanism& mechanism_for(std::string_view child) const;
  const Domain& domain_of(std::string_view name) const {
    return variable(name).domain;
  }
  bool has_variable(std::string_view name) const;
  bool operator==(const Scm&) const = default;
};

// Conditional table p(child | parents). `table` holds one row per parent
// tuple (odometer order), each row a probability vector over the child
// domain; row r occupies [r*|child|, (r+1)*|child|).
struct Cpt {
  std::string child;
  std::vector<std::string> parents;
  std::vector<double> table;

  std::span<const double> row(std::size_t row_index,
                              std::size_t child_size) const {
    return {table.data() + row_index * child_size, child_size};
  }
  bool operator==(const Cpt&) const = default;
};

struct CptModel {
  std::vector<VariableSpec> variables;
  std::vector<Cpt> cpts;  // exactly one per variable

  const VariableSpec& variable(std::string_view name) const;
  const Cpt& cpt_for(std::string_view child) const;
  const Domain& domain_of(std::string_view name) const {
    return variable(name).domain;
  }
  bool has_variable(std::string_view name) const;
  bool operator==(const CptModel&) const = default;
};

// ---------------------------------------------------------------------------
// Informational decomposition: each diagram edge becomes an explicit channel
// deciding what value the child mechanism reads from that edge.

enum class ChannelRule {
  CopySource,          // e_{j,i} <- v_j
  LiteralValue,        // e_{j,i} <- fixed label
  CopyCounterfactual,  // e'_{j,i} <- v^pi_j (path interventions only)
};

struct EdgeChannel {
  std::string source;
  std::string target;
  ChannelRule rule = ChannelRule::CopySource;
  std::string literal;  // set iff rule == LiteralValue
  bool operator==(const EdgeChannel&) const = default;
};

struct DecomposedScm {
  Scm base;
  std::vector<EdgeChannel> channels;  // one per diagram edge
};

// ---------------------------------------------------------------------------
// Validating constructors and model-level transforms.

CptModel build_cpt_model(std::vector<VariableSpec> variables,
                         std::vector<Cpt> cpts);

Scm build_scm(std::vector<VariableSpec> variables,
              std::vector<NoiseSpec> noises,
              std::vector<Mechanism> mechanisms);

// Marginalizes the noise out of every mechanism:
// p(v | pa) = sum_u P(u) [f(pa, u) = v]. Diagram and observational joint
// are preserved exactly.
CptModel scm_to_cpt(const Scm& scm);

// One copy-of-source channel per diagram edge; base unchanged.
DecomposedScm decompose(const Scm& scm);

// Rewrites mechanisms so every channel rule is absorbed back into the
// tables: literal channels fix the corresponding argument and drop the
// parent. CopyCounterfactual channels are rejected here (they only make
// sense inside a path intervention's two-world system).
Scm recompose(const DecomposedScm& decomposed);

// Evaluates one mechanism at explicit parent/noise value indices.
int evaluate_mechanism(const Scm& scm, const Mechanism& mech,
                       std::span<const int> parent_values, int noise_value);

// Variable names in lexicographically-smallest topological order of the
// parent graph; throws CycleDetected (naming a cycle) otherwise.
std::vector<std::string> topological_order(const Scm& scm);
std::vector<std::string> topological_order(const CptModel& model);

}  // namespace pathfx
