#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pathfx/model.hpp"

namespace pathfx {

// The model-file text format (extension .scm.txt) declares either a
// CPT model (var/cpt declarations) or an SCM (var/noise/mech); mixing the
// two kinds in one file is rejected.
enum class ModelKind { CptModel, Scm };

struct VarDecl {
  std::string name;
  Domain domain;
  bool operator==(const VarDecl&) const = default;
};

struct CptDecl {
  std::string child;
  std::vector<std::string> parents;
  std::vector<double> table;  // same layout as Cpt::table
  bool operator==(const CptDecl&) const = default;
};

struct NoiseDecl {
  std::string name;
  Domain domain;
  std::vector<double> dist;
  bool operator==(const NoiseDecl&) const = default;
};

struct MechDecl {
  std::string child;
  std::vector<std::string> parents;
  std::string noise;
  std::vector<int> table;  // same layout as Mechanism::table
  bool operator==(const MechDecl&) const = default;
};

struct ModelFile {
  std::string name;
  ModelKind kind = ModelKind::CptModel;
  std::vector<VarDecl> vars;
  std::vector<CptDecl> cpts;
  std::vector<NoiseDecl> noises;
  std::vector<MechDecl> mechs;
  bool operator==(const ModelFile&) const = default;
};

// Parses model text. Throws Error with code ParseError (malformed syntax) or
// SemanticError (undeclared names, wrong arity, bad shapes, mixed kinds,
// unnormalized rows, missing table entries), always carrying a 1-based
// line/column inside the input. Never aborts on arbitrary bytes.
ModelFile parse_model(std::string_view text);

// Canonical text: comments dropped, table rows sorted by input tuple in
// domain order, probabilities printed with up to 12 significant digits,
// LF line endings. parse_model(serialize_model(m)) == m.
std::string serialize_model(const ModelFile& file);

// Bridges into the validating constructors of the model module.
CptModel to_cpt_model(const ModelFile& file);  // requires kind == CptModel
Scm to_scm(const ModelFile& file);             // requires kind == Scm

ModelFile to_model_file(const CptModel& model, std::string name);
ModelFile to_model_file(const Scm& scm, std::string name);

}  // namespace pathfx
