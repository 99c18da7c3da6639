#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "pathfx/dsl.hpp"
#include "pathfx/graph.hpp"
#include "pathfx/infer.hpp"
#include "pathfx/model.hpp"

using namespace pathfx;
namespace tt = pathfx::testing;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CptModel load_cpt(const std::string& name) {
  return to_cpt_model(parse_model(slurp(tt::fixture_path(name))));
}

Scm load_scm(const std::string& name) {
  return to_scm(parse_model(slurp(tt::fixture_path(name))));
}

Domain binary() { return Domain{{"0", "1"}}; }

}  // namespace

TEST_CASE("cpt model edges come from the parent lists") {
  CptModel f1 = load_cpt("f1.scm.txt");
  Dag dag = causal_diagram(f1);
  std::set<std::pair<std::string, std::string>> expected{
      {"A", "M"}, {"A", "Y"}, {"M", "Y"}};
  CHECK(dag.edges == expected);
  CHECK(dag.nodes == std::vector<std::string>{"A", "M", "Y"});
}

TEST_CASE("unnormalized cpt row is rejected and named") {
  auto build = [] {
    build_cpt_model({{"A", binary()}}, {{"A", {}, {0.6, 0.5}}});
  };
  CHECK(tt::error_code_of(build) == ErrorCode::RowNotNormalized);
  try {
    build();
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("A") != std::string::npos);
  }
}

TEST_CASE("two-cycle in parent lists is rejected") {
  auto build = [] {
    build_cpt_model({{"A", binary()}, {"Y", binary()}},
                    {{"A", {"Y"}, {0.5, 0.5, 0.5, 0.5}},
                     {"Y", {"A"}, {0.5, 0.5, 0.5, 0.5}}});
  };
  CHECK(tt::error_code_of(build) == ErrorCode::CycleDetected);
}

TEST_CASE("missing and duplicate cpts are rejected") {
  CHECK(tt::error_code_of([] {
          build_cpt_model({{"A", binary()}, {"B", binary()}},
                          {{"A", {}, {0.5, 0.5}}});
        }) == ErrorCode::MissingCpt);
  CHECK(tt::error_code_of([] {
          build_cpt_model({{"A", binary()}},
                          {{"A", {}, {0.5, 0.5}}, {"A", {}, {0.5, 0.5}}});
        }) == ErrorCode::DuplicateName);
}

TEST_CASE("fixture scm validates with the expected diagram") {
  Scm scm = load_scm("f1_scm.scm.txt");
  Dag dag = causal_diagram(scm);
  std::set<std::pair<std::string, std::string>> expected{
      {"A", "M"}, {"A", "Y"}, {"M", "Y"}};
  CHECK(dag.edges == expected);
}

TEST_CASE("incomplete mechanism table names the missing input") {
  auto build = [] {
    // f(a, u): the (1; 0) cell is left unset.
    build_scm({{"A", binary()}, {"B", binary()}},
              {{"U_A", binary(), {0.5, 0.5}}, {"U_B", binary(), {0.5, 0.5}}},
              {{"A", {}, "U_A", {0, 1}},
               {"B", {"A"}, "U_B", {0, 1, -1, 1}}});
  };
  CHECK(tt::error_code_of(build) == ErrorCode::IncompleteMechanismTable);
  try {
    build();
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("(1; 0)") != std::string::npos);
  }
}

TEST_CASE("mechanism output outside the child domain is rejected") {
  CHECK(tt::error_code_of([] {
          build_scm({{"A", binary()}}, {{"U_A", binary(), {0.5, 0.5}}},
                    {{"A", {}, "U_A", {0, 2}}});
        }) == ErrorCode::ValueOutOfDomain);
}

TEST_CASE("single-variable constant mechanism is a valid degenerate scm") {
  Scm scm = build_scm({{"A", binary()}}, {{"U_A", binary(), {0.3, 0.7}}},
                      {{"A", {}, "U_A", {0, 0}}});
  CptModel cpt = scm_to_cpt(scm);
  CHECK(cpt.cpt_for("A").table[0] == doctest::Approx(1.0));
  CHECK(causal_diagram(scm).edges.empty());
}

TEST_CASE("scm_to_cpt marginalizes the noise out") {
  SUBCASE("mechanism that ignores its parent") {
    // f_M(a, u) = u with P(u = 1) = 0.8.
    Scm scm = build_scm(
        {{"A", binary()}, {"M", binary()}},
        {{"U_A", binary(), {0.5, 0.5}}, {"U_M", binary(), {0.2, 0.8}}},
        {{"A", {}, "U_A", {0, 1}}, {"M", {"A"}, "U_M", {0, 1, 0, 1}}});
    CptModel cpt = scm_to_cpt(scm);
    const Cpt& m = cpt.cpt_for("M");
    CHECK(m.parents == std::vector<std::string>{"A"});  // edge kept
    CHECK(m.table[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(m.table[3] == doctest::Approx(0.8).epsilon(1e-12));
  }
  SUBCASE("xor mechanism splits by parent value") {
    // f_Y(a, u) = xor(a, u) with P(u = 1) = 0.3.
    Scm scm = build_scm(
        {{"A", binary()}, {"Y", binary()}},
        {{"U_A", binary(), {0.5, 0.5}}, {"U_Y", binary(), {0.7, 0.3}}},
        {{"A", {}, "U_A", {0, 1}}, {"Y", {"A"}, "U_Y", {0, 1, 1, 0}}});
    CptModel cpt = scm_to_cpt(scm);
    const Cpt& y = cpt.cpt_for("Y");
    CHECK(y.table[1] == doctest::Approx(0.3).epsilon(1e-12));  // p(Y=1|A=0)
    CHECK(y.table[3] == doctest::Approx(0.7).epsilon(1e-12));  // p(Y=1|A=1)
  }
}

TEST_CASE("scm_to_cpt preserves the observational joint on fixtures") {
  for (const char* name : {"f1_scm.scm.txt", "f2_scm.scm.txt"}) {
    CAPTURE(name);
    Scm scm = load_scm(name);
    tt::OracleDist oracle = tt::scm_joint_oracle(scm);
    CptModel cpt = scm_to_cpt(scm);
    JointTable joint = exact_joint(cpt, observational_factorization(cpt));
    CHECK(tt::max_abs_diff(oracle, joint) <= 1e-12);
  }
}

TEST_CASE("scm_to_cpt preserves joints and diagrams on random scms") {
  std::mt19937_64 rng(20240811);
  for (int trial = 0; trial < 30; ++trial) {
    CAPTURE(trial);
    Scm scm = tt::random_scm(rng);
    CptModel cpt = scm_to_cpt(scm);
    CHECK(causal_diagram(scm).edges == causal_diagram(cpt).edges);
    tt::OracleDist oracle = tt::scm_joint_oracle(scm);
    JointTable joint = exact_joint(cpt, observational_factorization(cpt));
    CHECK(tt::max_abs_diff(oracle, joint) <= 1e-12);
  }
}

TEST_CASE("decompose yields one copy channel per edge") {
  Scm scm = load_scm("f1_scm.scm.txt");
  DecomposedScm decomposed = decompose(scm);
  REQUIRE(decomposed.channels.size() == 3);
  for (const auto& channel : decomposed.channels) {
    CHECK(channel.rule == ChannelRule::CopySource);
  }
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& channel : decomposed.channels) {
    edges.insert({channel.source, channel.target});
  }
  CHECK(edges == causal_diagram(scm).edges);
}

TEST_CASE("decompose of a single-node model has no channels") {
  Scm scm = build_scm({{"A", binary()}}, {{"U_A", binary(), {0.4, 0.6}}},
                      {{"A", {}, "U_A", {0, 1}}});
  CHECK(decompose(scm).channels.empty());
}

TEST_CASE("recomposition reproduces the base joint") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    CAPTURE(trial);
    Scm scm = tt::random_scm(rng);
    Scm recomposed = recompose(decompose(scm));
    CHECK(recomposed == scm);
    tt::OracleDist before = tt::scm_joint_oracle(scm);
    tt::OracleDist after = tt::scm_joint_oracle(recomposed);
    for (std::size_t i = 0; i < before.probs.size(); ++i) {
      CHECK(std::abs(before.probs[i] - after.probs[i]) <= 1e-12);
    }
  }
}

TEST_CASE("noise distributions are validated") {
  CHECK(tt::error_code_of([] {
          build_scm({{"A", binary()}}, {{"U_A", binary(), {0.5, 0.6}}},
                    {{"A", {}, "U_A", {0, 1}}});
        }) == ErrorCode::RowNotNormalized);
  CHECK(tt::error_code_of([] {
          build_cpt_model({{"A", binary()}}, {{"A", {}, {-0.2, 1.2}}});
        }) == ErrorCode::RowNotNormalized);
}

TEST_CASE("counterfactual channels cannot be recomposed") {
  Scm scm = load_scm("f1_scm.scm.txt");
  DecomposedScm decomposed = decompose(scm);
  decomposed.channels[0].rule = ChannelRule::CopyCounterfactual;
  CHECK(tt::error_code_of([&] { recompose(decomposed); }) ==
        ErrorCode::SemanticError);
}
