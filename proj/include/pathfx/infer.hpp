#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pathfx/graph.hpp"
#include "pathfx/intervene.hpp"
#include "pathfx/model.hpp"

namespace pathfx {

inline constexpr std::size_t kDefaultMaxStates = 100'000'000;

struct LiteralValue {
  std::string value;
  auto operator<=>(const LiteralValue&) const = default;
};

using Conditioner = std::variant<TaggedVar, LiteralValue>;

// One conditional factor p(child | conditioners). Conditioner slots align
// with the child's parent list in the base model; counterfactual factors
// reuse the child's table with substituted arguments.
struct Factor {
  TaggedVar child;
  std::vector<Conditioner> given;
  bool operator==(const Factor&) const = default;
};

struct Factorization {
  std::vector<Factor> factors;   // one per tagged variable
  std::vector<TaggedVar> order;  // topological over tagged variables
};

// Exhaustively enumerated joint over tagged variables, dense odometer
// layout with the last column varying fastest.
struct JointTable {
  std::vector<TaggedVar> columns;
  std::vector<Domain> domains;  // aligned with columns
  std::vector<double> probs;

  std::size_t column_index(const TaggedVar& var) const;  // UnknownColumn
  double sum() const;
};

// Factual block only: one factor per variable, conditioners = parents.
Factorization observational_factorization(const CptModel& model);

// Counterfactual factors for every counterfactual copy, conditioners
// rewritten by the edge rules of the path intervention, plus the factual
// block; this identifies the joint law over (V^pi, V).
Factorization path_factorization(const PathIntervenedModel& intervened);

// Convenience: apply_path + path_factorization.
Factorization pi_formula(const CptModel& model, const CausalPath& path,
                         const std::string& value, bool keep_all = false);

JointTable exact_joint(const CptModel& model, const Factorization& fz,
                       std::size_t max_states = kDefaultMaxStates);

// Sums out every column not in `keep`; `keep` may reorder columns.
JointTable marginalize(const JointTable& joint,
                       std::span<const TaggedVar> keep);

// E[column] with domain labels read as decimal numbers (NonNumericDomain).
double expectation(const JointTable& joint, const TaggedVar& column);

// E[target^{pi(a)}] - E[target^{pi(b)}] from two exact marginals. The target
// resolves to its counterfactual copy when it lies on the path.
double expectation_contrast(const CptModel& model, const CausalPath& path,
                            const std::string& value_a,
                            const std::string& value_b,
                            const std::string& target,
                            std::size_t max_states = kDefaultMaxStates);

nlohmann::ordered_json to_json(const TaggedVar& var);
nlohmann::ordered_json to_json(const Factorization& fz);
nlohmann::ordered_json to_json(const JointTable& joint);

// Doubles are serialized with 12 significant digits; this rounds a value to
// the double that formatting will print, keeping JSON output byte-stable.
double round_to_12_digits(double value);

}  // namespace pathfx
