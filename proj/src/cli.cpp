#include "pathfx/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pathfx/dsl.hpp"
#include "pathfx/graph.hpp"
#include "pathfx/infer.hpp"
#include "pathfx/intervene.hpp"
#include "pathfx/model.hpp"
#include "pathfx/sample.hpp"

namespace pathfx {

namespace {

using nlohmann::ordered_json;

struct UsageError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::SemanticError, "cannot open " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct LoadedModel {
  ModelFile file;
  std::optional<CptModel> cpt_model;
  std::optional<Scm> scm;

  bool is_scm() const { return scm.has_value(); }
  CptModel as_cpt() const {
    return cpt_model ? *cpt_model : scm_to_cpt(*scm);
  }
  Dag dag() const {
    return cpt_model ? causal_diagram(*cpt_model) : causal_diagram(*scm);
  }
};

LoadedModel load_model(const std::string& path) {
  LoadedModel loaded{parse_model(read_file(path)), {}, {}};
  if (loaded.file.kind == ModelKind::CptModel) {
    loaded.cpt_model = to_cpt_model(loaded.file);
  } else {
    loaded.scm = to_scm(loaded.file);
  }
  return loaded;
}

std::size_t max_states_from_env() {
  const char* env = std::getenv("PATHFX_MAX_STATES");
  if (env == nullptr) return kDefaultMaxStates;
  char* end = nullptr;
  unsigned long long value = std::strtoull(env, &end, 10);
  if (end == env || *end != '\0' || value == 0) {
    throw UsageError{"PATHFX_MAX_STATES must be a positive integer"};
  }
  return static_cast<std::size_t>(value);
}

std::string trim(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t");
  std::size_t end = text.find_last_not_of(" \t");
  if (begin == std::string::npos) return "";
  return text.substr(begin, end - begin + 1);
}

// "A->M->Y", spaces tolerated.
std::vector<std::string> parse_path_nodes(const std::string& text) {
  std::vector<std::string> nodes;
  std::size_t pos = 0;
  for (;;) {
    std::size_t arrow = text.find("->", pos);
    std::string node = trim(arrow == std::string::npos
                                ? text.substr(pos)
                                : text.substr(pos, arrow - pos));
    if (node.empty()) {
      throw UsageError{"malformed path '" + text + "'"};
    }
    nodes.push_back(node);
    if (arrow == std::string::npos) break;
    pos = arrow + 2;
  }
  if (nodes.size() < 2) {
    throw UsageError{"a path needs at least two nodes: '" + text + "'"};
  }
  return nodes;
}

std::map<std::string, std::string> parse_assignments(
    const std::vector<std::string>& items) {
  std::map<std::string, std::string> assignments;
  for (const auto& item : items) {
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 > item.size()) {
      throw UsageError{"expected X=v, got '" + item + "'"};
    }
    std::string name = trim(item.substr(0, eq));
    std::string value = trim(item.substr(eq + 1));
    if (name.empty() || value.empty()) {
      throw UsageError{"expected X=v, got '" + item + "'"};
    }
    if (!assignments.emplace(name, value).second) {
      throw UsageError{"variable " + name + " assigned twice"};
    }
  }
  return assignments;
}

std::string describe_assignments(const char* op,
                                 const std::map<std::string, std::string>& m) {
  std::string text = std::string(op) + "(";
  bool first = true;
  for (const auto& [name, value] : m) {
    if (!first) text += ", ";
    text += name + "=" + value;
    first = false;
  }
  return text + ")";
}

std::string describe_path(const std::vector<std::string>& nodes,
                          const std::string& value) {
  std::string text = "pi(" + nodes.front() + "=" + value + ") along ";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) text += "->";
    text += nodes[i];
  }
  return text;
}

ordered_json base_report(const std::vector<std::string>& args,
                         const std::string& model_name,
                         const std::string& intervention) {
  ordered_json report;
  report["schema"] = 1;
  report["command"] = args;
  report["model"] = model_name;
  if (intervention.empty()) {
    report["intervention"] = nullptr;
  } else {
    report["intervention"] = intervention;
  }
  return report;
}

struct InterventionFlags {
  std::vector<std::string> do_items;
  std::vector<std::string> info_items;
  std::string path_text;
  std::string path_value;

  bool has_path() const { return !path_text.empty(); }
  bool has_do_info() const { return !do_items.empty() || !info_items.empty(); }
  void check() const {
    if (has_path() && has_do_info()) {
      throw UsageError{"--path cannot be combined with --do/--info"};
    }
    if (!do_items.empty() && !info_items.empty()) {
      throw UsageError{"--do cannot be combined with --info"};
    }
    if (has_path() && path_value.empty()) {
      throw UsageError{"--path requires --value"};
    }
    if (!path_value.empty() && !has_path()) {
      throw UsageError{"--value requires --path"};
    }
  }
};

void add_intervention_flags(CLI::App* cmd, InterventionFlags& flags,
                            bool with_do_info) {
  if (with_do_info) {
    cmd->add_option("--do", flags.do_items,
                    "replace a mechanism by a constant, X=v (repeatable)");
    cmd->add_option("--info", flags.info_items,
                    "fix a variable's outgoing channels, X=v (repeatable)");
  }
  cmd->add_option("--path", flags.path_text, "causal path \"A->M->Y\"");
  cmd->add_option("--value", flags.path_value,
                  "value transferred along the path");
}

std::vector<std::string> split_targets(const std::vector<std::string>& items) {
  std::vector<std::string> names;
  for (const auto& item : items) {
    std::size_t pos = 0;
    for (;;) {
      std::size_t comma = item.find(',', pos);
      std::string name = trim(comma == std::string::npos
                                  ? item.substr(pos)
                                  : item.substr(pos, comma - pos));
      if (!name.empty()) names.push_back(name);
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
  }
  return names;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  auto started = std::chrono::steady_clock::now();

  CLI::App app{"finite structural causal models: interventions as mechanism "
               "rewrites, intervention diagrams, exact path-effect "
               "identification and Monte Carlo comparison"};
  app.name("pathfx");
  app.require_subcommand(1);

  std::optional<ordered_json> report;
  std::optional<std::string> raw_output;
  std::string ran_command;

  // --- validate ------------------------------------------------------------
  struct {
    std::string file;
  } validate_args;
  auto* validate_cmd =
      app.add_subcommand("validate", "parse a model file and check it");
  validate_cmd->add_option("file", validate_args.file, "model file")
      ->required();
  validate_cmd->callback([&] {
    ran_command = "validate";
    LoadedModel loaded = load_model(validate_args.file);
    Dag dag = loaded.dag();
    report = base_report(args, loaded.file.name, "");
    (*report)["result"] = {
        {"valid", true},
        {"kind", loaded.is_scm() ? "scm" : "cpt-model"},
        {"variables", loaded.file.vars.size()},
        {"edges", dag.edges.size()},
    };
  });

  // --- paths ---------------------------------------------------------------
  struct {
    std::string file;
    std::string from;
    std::string to;
  } paths_args;
  auto* paths_cmd =
      app.add_subcommand("paths", "enumerate simple directed paths");
  paths_cmd->add_option("file", paths_args.file, "model file")->required();
  paths_cmd->add_option("--from", paths_args.from, "start node")->required();
  paths_cmd->add_option("--to", paths_args.to, "end node")->required();
  paths_cmd->callback([&] {
    ran_command = "paths";
    LoadedModel loaded = load_model(paths_args.file);
    auto paths = directed_paths(loaded.dag(), paths_args.from, paths_args.to);
    ordered_json list = ordered_json::array();
    for (const auto& path : paths) list.push_back(path.nodes);
    report = base_report(args, loaded.file.name, "");
    (*report)["result"] = {{"from", paths_args.from},
                           {"to", paths_args.to},
                           {"paths", std::move(list)}};
  });

  // --- witness ---------------------------------------------------------------
  struct {
    std::string file;
    std::string path_text;
  } witness_args;
  auto* witness_cmd = app.add_subcommand(
      "witness", "recanting-witness verdict for a causal path");
  witness_cmd->add_option("file", witness_args.file, "model file")->required();
  witness_cmd->add_option("--path", witness_args.path_text, "causal path")
      ->required();
  witness_cmd->callback([&] {
    ran_command = "witness";
    LoadedModel loaded = load_model(witness_args.file);
    Dag dag = loaded.dag();
    CausalPath path =
        validate_path(dag, parse_path_nodes(witness_args.path_text));
    auto witness = find_recanting_witness(dag, path);
    report = base_report(args, loaded.file.name, "");
    ordered_json result = {{"path", path.nodes}};
    if (witness) {
      result["witness"] = *witness;
    } else {
      result["witness"] = nullptr;
    }
    (*report)["result"] = std::move(result);
  });

  // --- diagram ---------------------------------------------------------------
  struct {
    std::string file;
    InterventionFlags iv;
    bool augmented = false;
    std::string output;
  } diagram_args;
  auto* diagram_cmd =
      app.add_subcommand("diagram", "emit a DOT causal/intervention diagram");
  diagram_cmd->add_option("file", diagram_args.file, "model file")->required();
  add_intervention_flags(diagram_cmd, diagram_args.iv, true);
  diagram_cmd->add_flag("--augmented", diagram_args.augmented,
                        "include exogenous nodes");
  diagram_cmd->add_option("-o,--output", diagram_args.output,
                          "write DOT here and report the path as JSON");
  diagram_cmd->callback([&] {
    ran_command = "diagram";
    diagram_args.iv.check();
    LoadedModel loaded = load_model(diagram_args.file);
    std::string dot;
    std::string description;

    if (diagram_args.iv.has_path()) {
      CptModel base = loaded.as_cpt();
      auto nodes = parse_path_nodes(diagram_args.iv.path_text);
      PathIntervenedModel intervened = apply_path(
          base, {CausalPath{nodes}, diagram_args.iv.path_value}, false);
      dot = to_dot(intervention_diagram(intervened, diagram_args.augmented));
      description = describe_path(nodes, diagram_args.iv.path_value);
    } else if (!diagram_args.iv.do_items.empty()) {
      auto assignments = parse_assignments(diagram_args.iv.do_items);
      DoIntervention iv{assignments};
      dot = loaded.is_scm()
                ? to_dot(intervention_diagram(apply_do(*loaded.scm, iv),
                                              diagram_args.augmented))
                : to_dot(intervention_diagram(apply_do(*loaded.cpt_model, iv),
                                              diagram_args.augmented));
      description = describe_assignments("do", assignments);
    } else if (!diagram_args.iv.info_items.empty()) {
      auto assignments = parse_assignments(diagram_args.iv.info_items);
      InfoIntervention iv{assignments};
      dot = loaded.is_scm()
                ? to_dot(intervention_diagram(apply_info(*loaded.scm, iv),
                                              diagram_args.augmented))
                : to_dot(intervention_diagram(
                      apply_info(*loaded.cpt_model, iv),
                      diagram_args.augmented));
      description = describe_assignments("sigma", assignments);
    } else if (diagram_args.augmented) {
      // An empty info intervention leaves the model untouched but routes
      // through the exogenous-node rendering.
      InfoIntervention iv{};
      dot = loaded.is_scm()
                ? to_dot(intervention_diagram(apply_info(*loaded.scm, iv), true))
                : to_dot(intervention_diagram(apply_info(*loaded.cpt_model, iv),
                                              true));
    } else {
      dot = to_dot(loaded.dag());
    }

    if (diagram_args.output.empty()) {
      raw_output = dot;
      return;
    }
    std::ofstream file(diagram_args.output, std::ios::binary);
    if (!file) {
      throw Error(ErrorCode::SemanticError,
                  "cannot write " + diagram_args.output);
    }
    file << dot;
    report = base_report(args, loaded.file.name, description);
    (*report)["result"] = {{"dot", diagram_args.output}};
  });

  // --- infer -----------------------------------------------------------------
  struct {
    std::string file;
    InterventionFlags iv;
    std::vector<std::string> targets;
    bool keep_factual = false;
    std::string format = "json";
  } infer_args;
  auto* infer_cmd = app.add_subcommand(
      "infer", "factorization and exact joint/marginal probabilities");
  infer_cmd->add_option("file", infer_args.file, "model file")->required();
  add_intervention_flags(infer_cmd, infer_args.iv, true);
  infer_cmd->add_option("--target", infer_args.targets,
                        "variables to keep (comma-separated, repeatable)");
  infer_cmd->add_flag("--keep-factual", infer_args.keep_factual,
                      "also keep every factual column");
  infer_cmd->add_option("--format", infer_args.format, "output format (json)");
  infer_cmd->callback([&] {
    ran_command = "infer";
    infer_args.iv.check();
    if (infer_args.format != "json") {
      throw UsageError{"unsupported format '" + infer_args.format + "'"};
    }
    std::size_t max_states = max_states_from_env();
    LoadedModel loaded = load_model(infer_args.file);
    CptModel base = loaded.as_cpt();

    Factorization fz;
    CptModel lookup = base;
    std::optional<PathIntervenedModel> intervened;
    std::string description;
    ordered_json result;

    if (infer_args.iv.has_path()) {
      auto nodes = parse_path_nodes(infer_args.iv.path_text);
      intervened = apply_path(
          base, {CausalPath{nodes}, infer_args.iv.path_value}, false);
      fz = path_factorization(*intervened);
      description = describe_path(nodes, infer_args.iv.path_value);
      result["path"] = intervened->path.nodes;
      result["value"] = intervened->value;
    } else if (!infer_args.iv.do_items.empty()) {
      auto assignments = parse_assignments(infer_args.iv.do_items);
      lookup = apply_do(base, DoIntervention{assignments}).model;
      fz = observational_factorization(lookup);
      description = describe_assignments("do", assignments);
    } else if (!infer_args.iv.info_items.empty()) {
      auto assignments = parse_assignments(infer_args.iv.info_items);
      lookup = apply_info(base, InfoIntervention{assignments}).model;
      fz = observational_factorization(lookup);
      description = describe_assignments("sigma", assignments);
    } else {
      fz = observational_factorization(base);
    }

    JointTable joint = exact_joint(lookup, fz, max_states);

    std::vector<std::string> target_names = split_targets(infer_args.targets);
    if (target_names.empty() && intervened.has_value()) {
      target_names.push_back(intervened->path.tail());
    }
    JointTable table = joint;
    if (!target_names.empty()) {
      std::vector<TaggedVar> keep;
      for (const auto& name : target_names) {
        if (!lookup.has_variable(name)) {
          throw Error(ErrorCode::UnknownVariable, "unknown variable " + name);
        }
        World world = intervened && intervened->is_counterfactual(name)
                          ? World::Pi
                          : World::Factual;
        keep.push_back({name, world});
      }
      if (infer_args.keep_factual) {
        for (const auto& column : joint.columns) {
          if (column.world == World::Factual &&
              std::find(keep.begin(), keep.end(), column) == keep.end()) {
            keep.push_back(column);
          }
        }
      }
      table = marginalize(joint, keep);
    }

    result["factorization"] = to_json(fz);
    result["joint"] = to_json(table);
    report = base_report(args, loaded.file.name, description);
    (*report)["result"] = std::move(result);
  });

  // --- sample ----------------------------------------------------------------
  struct {
    std::string file;
    InterventionFlags iv;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
  } sample_args;
  auto* sample_cmd =
      app.add_subcommand("sample", "ancestral sampling, empirical table");
  sample_cmd->add_option("file", sample_args.file, "model file")->required();
  add_intervention_flags(sample_cmd, sample_args.iv, true);
  sample_cmd->add_option("--n", sample_args.n, "number of draws")->required();
  sample_cmd->add_option("--seed", sample_args.seed, "rng seed")->required();
  sample_cmd->callback([&] {
    ran_command = "sample";
    sample_args.iv.check();
    std::size_t max_states = max_states_from_env();
    LoadedModel loaded = load_model(sample_args.file);
    CptModel base = loaded.as_cpt();
    std::string description;

    EmpiricalTable table;
    if (sample_args.iv.has_path()) {
      auto nodes = parse_path_nodes(sample_args.iv.path_text);
      PathIntervenedModel intervened = apply_path(
          base, {CausalPath{nodes}, sample_args.iv.path_value}, false);
      table = sample_model(intervened, sample_args.n, sample_args.seed,
                           max_states);
      description = describe_path(nodes, sample_args.iv.path_value);
    } else if (!sample_args.iv.do_items.empty()) {
      auto assignments = parse_assignments(sample_args.iv.do_items);
      table = sample_model(apply_do(base, DoIntervention{assignments}).model,
                           sample_args.n, sample_args.seed, max_states);
      description = describe_assignments("do", assignments);
    } else if (!sample_args.iv.info_items.empty()) {
      auto assignments = parse_assignments(sample_args.iv.info_items);
      table =
          sample_model(apply_info(base, InfoIntervention{assignments}).model,
                       sample_args.n, sample_args.seed, max_states);
      description = describe_assignments("sigma", assignments);
    } else {
      table = sample_model(base, sample_args.n, sample_args.seed, max_states);
    }

    report = base_report(args, loaded.file.name, description);
    (*report)["result"] = {{"empirical", to_json(table)}};
    (*report)["n"] = sample_args.n;
    (*report)["seed"] = sample_args.seed;
    (*report)["rng"] = kRngAlgorithm;
  });

  // --- compare ---------------------------------------------------------------
  struct {
    std::string file;
    std::string path_text;
    std::string value;
    std::string nested;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
  } compare_args;
  auto* compare_cmd = app.add_subcommand(
      "compare",
      "exact marginal vs Monte Carlo vs nested-counterfactual baseline");
  compare_cmd->add_option("file", compare_args.file, "model file")->required();
  compare_cmd->add_option("--path", compare_args.path_text, "causal path")
      ->required();
  compare_cmd->add_option("--value", compare_args.value, "path value a'")
      ->required();
  compare_cmd->add_option(
      "--nested", compare_args.nested,
      "a,a' for the recursive-substitution baseline (SCM input only)");
  compare_cmd->add_option("--n", compare_args.n, "number of draws")
      ->required();
  compare_cmd->add_option("--seed", compare_args.seed, "rng seed")->required();
  compare_cmd->callback([&] {
    ran_command = "compare";
    std::size_t max_states = max_states_from_env();
    LoadedModel loaded = load_model(compare_args.file);
    CptModel base = loaded.as_cpt();
    auto nodes = parse_path_nodes(compare_args.path_text);
    PathIntervenedModel intervened =
        apply_path(base, {CausalPath{nodes}, compare_args.value}, false);

    TaggedVar target{intervened.path.tail(), World::Pi};
    std::vector<TaggedVar> keep{target};
    JointTable exact = marginalize(
        exact_joint(base, path_factorization(intervened), max_states), keep);
    EmpiricalTable sampled =
        sample_model(intervened, compare_args.n, compare_args.seed,
                     max_states);
    JointTable empirical = marginalize(to_distribution(sampled), keep);

    ordered_json result;
    result["path"] = intervened.path.nodes;
    result["value"] = intervened.value;
    result["target"] = to_json(target);
    result["exact"] = to_json(exact);
    result["empirical"] = to_json(empirical);
    result["tv"] = round_to_12_digits(tv_distance(empirical, exact));

    if (!compare_args.nested.empty()) {
      if (!loaded.is_scm()) {
        throw Error(ErrorCode::RequiresScm,
                    "--nested needs an scm input; " + loaded.file.name +
                        " declares conditional tables only");
      }
      std::size_t comma = compare_args.nested.find(',');
      if (comma == std::string::npos) {
        throw UsageError{"--nested expects a,a'"};
      }
      NestedSpec spec{CausalPath{nodes},
                      trim(compare_args.nested.substr(0, comma)),
                      trim(compare_args.nested.substr(comma + 1))};
      if (spec.on_path_value.empty() || spec.off_path_value.empty()) {
        throw UsageError{"--nested expects a,a'"};
      }
      EmpiricalTable nested = nested_counterfactual_sample(
          *loaded.scm, spec, compare_args.n, compare_args.seed);
      result["nested_spec"] = {{"on_path", spec.on_path_value},
                               {"off_path", spec.off_path_value}};
      result["nested"] = to_json(nested);
    }

    report = base_report(args, loaded.file.name,
                         describe_path(nodes, compare_args.value));
    (*report)["result"] = std::move(result);
    (*report)["n"] = compare_args.n;
    (*report)["seed"] = compare_args.seed;
    (*report)["rng"] = kRngAlgorithm;
  });

  // --- dispatch ----------------------------------------------------------
  std::vector<const char*> argv;
  argv.push_back("pathfx");
  for (const auto& arg : args) argv.push_back(arg.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 3;
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ParseError ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (report) {
    out << report->dump(2) << "\n";
  } else if (raw_output) {
    out << *raw_output;
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - started);
  err << "pathfx: " << ran_command << " finished in " << elapsed.count()
      << " ms\n";
  return 0;
}

}  // namespace pathfx
