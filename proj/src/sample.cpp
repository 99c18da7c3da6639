#include "pathfx/sample.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <thread>

namespace pathfx {

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

namespace {

struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    return mix64(state);
  }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

int draw_from(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] > 0.0) last_positive = static_cast<int>(i);
    cumulative += probs[i];
    if (u < cumulative) return static_cast<int>(i);
  }
  return last_positive;  // u landed in the float dust above the row sum
}

// Resolved ancestral-sampling plan over a factorization: variables appear in
// topological order, so every conditioner is drawn before it is read.
struct SamplerPlan {
  struct Node {
    const Cpt* cpt;
    std::size_t child_size;
    std::vector<std::size_t> parent_sizes;
    std::vector<int> slot_column;  // -1 when the slot is a literal
    std::vector<int> slot_fixed;
  };
  std::vector<TaggedVar> columns;
  std::vector<Domain> domains;
  std::vector<std::size_t> radices;
  std::vector<Node> nodes;
  std::size_t cells = 0;
};

SamplerPlan make_plan(const CptModel& model, const Factorization& fz,
                      std::size_t max_states) {
  SamplerPlan plan;
  plan.columns = fz.order;
  std::map<TaggedVar, std::size_t> column_of;
  for (std::size_t i = 0; i < plan.columns.size(); ++i) {
    plan.domains.push_back(model.domain_of(plan.columns[i].name));
    plan.radices.push_back(plan.domains.back().size());
    column_of[plan.columns[i]] = i;
  }
  plan.cells = checked_product(plan.radices, max_states);

  std::map<TaggedVar, const Factor*> factor_of;
  for (const auto& factor : fz.factors) factor_of[factor.child] = &factor;
  for (const auto& column : plan.columns) {
    const Factor& factor = *factor_of.at(column);
    const Cpt& cpt = model.cpt_for(column.name);
    SamplerPlan::Node node{&cpt, model.domain_of(column.name).size(), {}, {},
                           {}};
    for (std::size_t s = 0; s < factor.given.size(); ++s) {
      const Domain& parent_domain = model.domain_of(cpt.parents[s]);
      node.parent_sizes.push_back(parent_domain.size());
      if (const auto* var = std::get_if<TaggedVar>(&factor.given[s])) {
        node.slot_column.push_back(static_cast<int>(column_of.at(*var)));
        node.slot_fixed.push_back(0);
      } else {
        const auto& literal = std::get<LiteralValue>(factor.given[s]);
        node.slot_column.push_back(-1);
        node.slot_fixed.push_back(parent_domain.index_of(literal.value));
      }
    }
    plan.nodes.push_back(std::move(node));
  }
  return plan;
}

void sample_block(const SamplerPlan& plan, std::uint64_t block_seed,
                  std::uint64_t draws, std::vector<std::uint64_t>& counts) {
  SplitMix64 stream{block_seed};
  std::vector<int> values(plan.columns.size(), 0);
  for (std::uint64_t d = 0; d < draws; ++d) {
    for (std::size_t i = 0; i < plan.nodes.size(); ++i) {
      const auto& node = plan.nodes[i];
      std::size_t row = 0;
      for (std::size_t s = 0; s < node.parent_sizes.size(); ++s) {
        int digit = node.slot_column[s] >= 0 ? values[node.slot_column[s]]
                                             : node.slot_fixed[s];
        row = row * node.parent_sizes[s] + static_cast<std::size_t>(digit);
      }
      values[i] = draw_from(node.cpt->row(row, node.child_size),
                            stream.uniform01());
    }
    ++counts[flat_index(values, plan.radices)];
  }
}

EmpiricalTable run_sampler(const SamplerPlan& plan, std::uint64_t n,
                           std::uint64_t seed) {
  if (n == 0) {
    throw Error(ErrorCode::SemanticError, "sample size must be at least 1");
  }
  EmpiricalTable table;
  table.columns = plan.columns;
  table.domains = plan.domains;
  table.counts.assign(plan.cells, 0);
  table.n = n;
  table.seed = seed;

  std::uint64_t blocks = (n + kSampleBlockSize - 1) / kSampleBlockSize;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, blocks));

  // Counts are merged by addition, so the block schedule cannot affect the
  // result; each block's stream is fixed by seed ^ mix64(block).
  std::vector<std::future<std::vector<std::uint64_t>>> futures;
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      std::vector<std::uint64_t> local(plan.cells, 0);
      for (std::uint64_t b = w; b < blocks; b += workers) {
        std::uint64_t start = b * kSampleBlockSize;
        std::uint64_t draws = std::min<std::uint64_t>(kSampleBlockSize,
                                                      n - start);
        sample_block(plan, seed ^ mix64(b), draws, local);
      }
      return local;
    }));
  }
  for (auto& future : futures) {
    std::vector<std::uint64_t> local = future.get();
    for (std::size_t i = 0; i < plan.cells; ++i) table.counts[i] += local[i];
  }
  return table;
}

}  // namespace

EmpiricalTable sample_model(const CptModel& model, std::uint64_t n,
                            std::uint64_t seed, std::size_t max_states) {
  return run_sampler(
      make_plan(model, observational_factorization(model), max_states), n,
      seed);
}

EmpiricalTable sample_model(const PathIntervenedModel& intervened,
                            std::uint64_t n, std::uint64_t seed,
                            std::size_t max_states) {
  return run_sampler(
      make_plan(intervened.base, path_factorization(intervened), max_states),
      n, seed);
}

EmpiricalTable nested_counterfactual_sample(const Scm& scm,
                                            const NestedSpec& spec,
                                            std::uint64_t n,
                                            std::uint64_t seed) {
  if (n == 0) {
    throw Error(ErrorCode::SemanticError, "sample size must be at least 1");
  }
  Dag dag = causal_diagram(scm);
  CausalPath path = validate_path(dag, spec.path.nodes);
  const Domain& head_domain = scm.domain_of(path.head());
  int on_value = head_domain.index_of(spec.on_path_value);
  int off_value = head_domain.index_of(spec.off_path_value);
  for (const auto* value : {&spec.on_path_value, &spec.off_path_value}) {
    if (head_domain.index_of(*value) < 0) {
      throw Error(ErrorCode::ValueOutOfDomain,
                  "value " + *value + " is not in the domain of " +
                      path.head());
    }
  }

  std::vector<std::string> topo = topological_order(scm);
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < topo.size(); ++i) position[topo[i]] = i;

  struct NodePlan {
    const Mechanism* mech;
    const NoiseSpec* noise;
    std::vector<std::size_t> parent_positions;
    bool is_head;
  };
  std::vector<NodePlan> nodes;
  for (const auto& name : topo) {
    const Mechanism& mech = scm.mechanism_for(name);
    NodePlan node{&mech, &scm.noise(mech.noise), {}, name == path.head()};
    for (const auto& p : mech.parents) {
      node.parent_positions.push_back(position.at(p));
    }
    nodes.push_back(std::move(node));
  }
  // Path node positions in topo indexing; on_path_parent[i] is the position
  // of the previous path node (the pi-edge source) feeding path node i.
  std::vector<std::size_t> path_positions;
  for (const auto& name : path.nodes) path_positions.push_back(position.at(name));

  const std::string& outcome = path.tail();
  EmpiricalTable table;
  table.columns = {{outcome, World::Nested}};
  table.domains = {scm.domain_of(outcome)};
  table.counts.assign(table.domains[0].size(), 0);
  table.n = n;
  table.seed = seed;

  std::uint64_t blocks = (n + kSampleBlockSize - 1) / kSampleBlockSize;
  std::vector<int> noise_values(topo.size(), 0);
  std::vector<int> world_off(topo.size(), 0);     // every route reads a'
  std::map<std::string, int> nested_value;        // path nodes only
  std::vector<int> args;

  for (std::uint64_t b = 0; b < blocks; ++b) {
    SplitMix64 stream{seed ^ mix64(b)};
    std::uint64_t start = b * kSampleBlockSize;
    std::uint64_t draws = std::min<std::uint64_t>(kSampleBlockSize, n - start);
    for (std::uint64_t d = 0; d < draws; ++d) {
      // One shared noise realization across all worlds of this draw.
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        noise_values[i] = draw_from(nodes[i].noise->dist, stream.uniform01());
      }
      // Recursive-substitution world with the head fixed to a'.
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].is_head) {
          world_off[i] = off_value;
          continue;
        }
        args.clear();
        for (std::size_t pp : nodes[i].parent_positions) {
          args.push_back(world_off[pp]);
        }
        world_off[i] =
            evaluate_mechanism(scm, *nodes[i].mech, args, noise_values[i]);
      }
      // Along the path the head carries a; off-path parents come from the
      // a'-world, sharing the same noise.
      nested_value.clear();
      nested_value[path.head()] = on_value;
      for (std::size_t k = 1; k < path.nodes.size(); ++k) {
        std::size_t pos = path_positions[k];
        const NodePlan& node = nodes[pos];
        const std::string& pi_parent = path.nodes[k - 1];
        args.clear();
        for (std::size_t s = 0; s < node.mech->parents.size(); ++s) {
          const std::string& parent = node.mech->parents[s];
          if (parent == pi_parent) {
            args.push_back(nested_value.at(parent));
          } else {
            args.push_back(world_off[node.parent_positions[s]]);
          }
        }
        nested_value[path.nodes[k]] =
            evaluate_mechanism(scm, *node.mech, args, noise_values[pos]);
      }
      ++table.counts[static_cast<std::size_t>(nested_value.at(outcome))];
    }
  }
  return table;
}

JointTable to_distribution(const EmpiricalTable& table) {
  JointTable joint;
  joint.columns = table.columns;
  joint.domains = table.domains;
  joint.probs.resize(table.counts.size());
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    joint.probs[i] = static_cast<double>(table.counts[i]) /
                     static_cast<double>(table.n);
  }
  return joint;
}

double tv_distance(const JointTable& a, const JointTable& b) {
  if (a.columns != b.columns || a.domains != b.domains) {
    throw Error(ErrorCode::ColumnMismatch,
                "tables have different columns or domains");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < a.probs.size(); ++i) {
    total += std::abs(a.probs[i] - b.probs[i]);
  }
  return 0.5 * total;
}

double tv_distance(const EmpiricalTable& a, const JointTable& b) {
  return tv_distance(to_distribution(a), b);
}

double tv_distance(const JointTable& a, const EmpiricalTable& b) {
  return tv_distance(a, to_distribution(b));
}

double tv_distance(const EmpiricalTable& a, const EmpiricalTable& b) {
  return tv_distance(to_distribution(a), to_distribution(b));
}

nlohmann::ordered_json to_json(const EmpiricalTable& table) {
  nlohmann::ordered_json j = to_json(to_distribution(table));
  j["n"] = table.n;
  j["seed"] = table.seed;
  j["rng"] = table.rng;
  return j;
}

}  // namespace pathfx
