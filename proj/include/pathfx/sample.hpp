#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "pathfx/infer.hpp"
#include "pathfx/intervene.hpp"
#include "pathfx/model.hpp"

namespace pathfx {

// RNG algorithm identifier recorded in output metadata. Sampling draws a
// splitmix64 stream per block of 65536 draws; block b is seeded with
// seed ^ mix64(b), so results do not depend on how blocks are scheduled
// across threads.
inline constexpr const char* kRngAlgorithm = "splitmix64";
inline constexpr std::uint64_t kSampleBlockSize = 65536;

std::uint64_t mix64(std::uint64_t x);

struct EmpiricalTable {
  std::vector<TaggedVar> columns;
  std::vector<Domain> domains;
  std::vector<std::uint64_t> counts;  // dense, odometer layout
  std::uint64_t n = 0;
  std::uint64_t seed = 0;
  std::string rng = kRngAlgorithm;

  bool operator==(const EmpiricalTable&) const = default;
};

// Recursive-substitution counterfactual Y(pi, a, a'): the head is a along
// the path and a' for every other route, all worlds sharing one noise draw.
struct NestedSpec {
  CausalPath path;
  std::string on_path_value;   // a, transferred along pi
  std::string off_path_value;  // a', used by every off-path route
};

// Ancestral sampling in topological order; factual variables draw from
// their tables, counterfactual copies from the child table with
// rule-substituted arguments and an independent draw.
EmpiricalTable sample_model(const CptModel& model, std::uint64_t n,
                            std::uint64_t seed,
                            std::size_t max_states = kDefaultMaxStates);
EmpiricalTable sample_model(const PathIntervenedModel& intervened,
                            std::uint64_t n, std::uint64_t seed,
                            std::size_t max_states = kDefaultMaxStates);

// Requires a full SCM: the worlds of the nested counterfactual share one
// noise realization, which conditional tables cannot express.
EmpiricalTable nested_counterfactual_sample(const Scm& scm,
                                            const NestedSpec& spec,
                                            std::uint64_t n,
                                            std::uint64_t seed);

// Frequencies of an empirical table as a JointTable.
JointTable to_distribution(const EmpiricalTable& table);

// 0.5 * sum |p - q| over the full product domain; ColumnMismatch unless
// both tables have identical columns and domains.
double tv_distance(const JointTable& a, const JointTable& b);
double tv_distance(const EmpiricalTable& a, const JointTable& b);
double tv_distance(const JointTable& a, const EmpiricalTable& b);
double tv_distance(const EmpiricalTable& a, const EmpiricalTable& b);

nlohmann::ordered_json to_json(const EmpiricalTable& table);

}  // namespace pathfx
