#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "pathfx/dsl.hpp"
#include "pathfx/infer.hpp"
#include "pathfx/intervene.hpp"
#include "pathfx/sample.hpp"

using namespace pathfx;
namespace tt = pathfx::testing;

namespace {

constexpr std::uint64_t kRegressionSeed = 20250810;

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

TaggedVar fv(const std::string& name) { return {name, World::Factual}; }
TaggedVar pv(const std::string& name) { return {name, World::Pi}; }

double empirical_mean(const EmpiricalTable& table) {
  REQUIRE(table.columns.size() == 1);
  double total = 0.0;
  for (std::size_t i = 0; i < table.counts.size(); ++i) {
    total += static_cast<double>(table.counts[i]) *
             std::stod(table.domains[0].values[i]);
  }
  return total / static_cast<double>(table.n);
}

}  // namespace

TEST_CASE("path-intervened sampling converges to the exact marginal") {
  CptModel f2 = load_cpt("f2.scm.txt");
  PathIntervenedModel intervened =
      apply_path(f2, {CausalPath{{"T", "Y"}}, "1"}, false);
  EmpiricalTable table = sample_model(intervened, 200000, kRegressionSeed);
  JointTable marginal = marginalize(to_distribution(table),
                                    std::vector<TaggedVar>{pv("Y")});
  CHECK(std::abs(marginal.probs[1] - 0.75) <= 0.01);
}

TEST_CASE("sampling is reproducible") {
  CptModel f1 = load_cpt("f1.scm.txt");
  SUBCASE("a single draw is stable") {
    EmpiricalTable once = sample_model(f1, 1, 7);
    EmpiricalTable again = sample_model(f1, 1, 7);
    CHECK(once == again);
    CHECK(once.n == 1);
  }
  SUBCASE("multi-block runs are stable across invocations") {
    // 200000 draws span four blocks, so the block merge is exercised.
    EmpiricalTable once = sample_model(f1, 200000, 99);
    EmpiricalTable again = sample_model(f1, 200000, 99);
    CHECK(once == again);
  }
  SUBCASE("different seeds differ") {
    EmpiricalTable a = sample_model(f1, 1000, 1);
    EmpiricalTable b = sample_model(f1, 1000, 2);
    CHECK(a.counts != b.counts);
  }
}

TEST_CASE("tv distance basics") {
  CptModel f1 = load_cpt("f1.scm.txt");
  JointTable exact = exact_joint(f1, observational_factorization(f1));
  SUBCASE("identical tables are at distance zero") {
    CHECK(tv_distance(exact, exact) == 0.0);
  }
  SUBCASE("disjoint point masses are at distance one") {
    JointTable a;
    a.columns = {fv("V")};
    a.domains = {Domain{{"0", "1"}}};
    a.probs = {1.0, 0.0};
    JointTable b = a;
    b.probs = {0.0, 1.0};
    CHECK(tv_distance(a, b) == 1.0);
  }
  SUBCASE("empirical observational law is close to exact") {
    EmpiricalTable table = sample_model(f1, 200000, kRegressionSeed);
    CHECK(tv_distance(table, exact) <= 0.01);
  }
  SUBCASE("column mismatch is rejected") {
    JointTable y = marginalize(exact, std::vector<TaggedVar>{fv("Y")});
    JointTable m = marginalize(exact, std::vector<TaggedVar>{fv("M")});
    CHECK(tt::error_code_of([&] { tv_distance(y, m); }) ==
          ErrorCode::ColumnMismatch);
  }
}

TEST_CASE("convergence regression on every fixture path intervention") {
  struct Case {
    const char* file;
    std::vector<std::string> path;
  };
  for (const auto& c : {Case{"f1.scm.txt", {"A", "M", "Y"}},
                        Case{"f2.scm.txt", {"T", "Y"}},
                        Case{"f3.scm.txt", {"X", "A", "Y"}},
                        Case{"f4.scm.txt", {"A", "M", "Y"}}}) {
    CAPTURE(c.file);
    CptModel model = load_cpt(c.file);
    PathIntervenedModel intervened =
        apply_path(model, {CausalPath{c.path}, "1"}, false);
    JointTable exact = exact_joint(model, path_factorization(intervened));
    EmpiricalTable table =
        sample_model(intervened, 200000, kRegressionSeed);
    JointTable frequencies = to_distribution(table);
    for (const auto& name : intervened.counterfactual_set) {
      CAPTURE(name);
      std::vector<TaggedVar> keep{pv(name)};
      CHECK(tv_distance(marginalize(frequencies, keep),
                        marginalize(exact, keep)) <= 0.01);
    }
  }
}

TEST_CASE("path-intervened sampling preserves the factual block") {
  struct Case {
    const char* file;
    std::vector<std::string> path;
  };
  for (const auto& c : {Case{"f1.scm.txt", {"A", "M", "Y"}},
                        Case{"f2.scm.txt", {"T", "Y"}},
                        Case{"f3.scm.txt", {"X", "A", "Y"}},
                        Case{"f4.scm.txt", {"A", "M", "Y"}}}) {
    CAPTURE(c.file);
    CptModel model = load_cpt(c.file);
    PathIntervenedModel intervened =
        apply_path(model, {CausalPath{c.path}, "1"}, false);
    EmpiricalTable table = sample_model(intervened, 200000, kRegressionSeed);
    std::vector<TaggedVar> factual;
    for (const auto& v : model.variables) factual.push_back(fv(v.name));
    JointTable sampled_factual = marginalize(to_distribution(table), factual);
    JointTable exact_factual = marginalize(
        exact_joint(model, observational_factorization(model)), factual);
    CHECK(tv_distance(sampled_factual, exact_factual) <= 0.01);
  }
}

TEST_CASE("nested counterfactual sampling on the structural fixture") {
  Scm scm = load_scm("f1_scm.scm.txt");
  NestedSpec spec{CausalPath{{"A", "M", "Y"}}, "1", "0"};

  // Independent exact law of Y(pi, 1, 0) = f_Y(0, f_M(1, u_M), u_Y) by
  // enumerating the fixture's noise values directly.
  const Mechanism& f_m = scm.mechanism_for("M");
  const Mechanism& f_y = scm.mechanism_for("Y");
  const NoiseSpec& u_m = scm.noise(f_m.noise);
  const NoiseSpec& u_y = scm.noise(f_y.noise);
  std::vector<double> law(2, 0.0);
  for (std::size_t um = 0; um < u_m.domain.size(); ++um) {
    for (std::size_t uy = 0; uy < u_y.domain.size(); ++uy) {
      std::vector<int> m_args{1};
      int m = evaluate_mechanism(scm, f_m, m_args, static_cast<int>(um));
      std::vector<int> y_args{0, m};
      int y = evaluate_mechanism(scm, f_y, y_args, static_cast<int>(uy));
      law[static_cast<std::size_t>(y)] += u_m.dist[um] * u_y.dist[uy];
    }
  }
  CHECK(std::abs(law[1] - 0.42) <= 1e-12);

  EmpiricalTable table =
      nested_counterfactual_sample(scm, spec, 200000, kRegressionSeed);
  CHECK(table.columns[0].world == World::Nested);
  double frequency = static_cast<double>(table.counts[1]) /
                     static_cast<double>(table.n);
  CHECK(std::abs(frequency - law[1]) <= 0.01);

  SUBCASE("deterministic given the seed") {
    CHECK(nested_counterfactual_sample(scm, spec, 1000, 5) ==
          nested_counterfactual_sample(scm, spec, 1000, 5));
  }
}

TEST_CASE("nested baseline differs from the path intervention numerically") {
  Scm scm = load_scm("f1_scm.scm.txt");
  CptModel model = scm_to_cpt(scm);
  JointTable exact = exact_joint(
      model, pi_formula(model, CausalPath{{"A", "M", "Y"}}, "1"));
  double path_effect =
      expectation(exact, pv("Y"));
  EmpiricalTable nested = nested_counterfactual_sample(
      scm, {CausalPath{{"A", "M", "Y"}}, "1", "0"}, 200000, kRegressionSeed);
  CHECK(std::abs(empirical_mean(nested) - path_effect) > 0.01);
}

TEST_CASE("degenerate treatment closes the cross-world gap") {
  Scm scm = load_scm("f1_scm_deg.scm.txt");
  CptModel model = scm_to_cpt(scm);
  // With p(A=1)=1, the law of Y(pi, 0, 1) coincides with that of Y^{pi(0)}.
  EmpiricalTable nested = nested_counterfactual_sample(
      scm, {CausalPath{{"A", "M", "Y"}}, "0", "1"}, 200000, kRegressionSeed);
  JointTable exact = marginalize(
      exact_joint(model, pi_formula(model, CausalPath{{"A", "M", "Y"}}, "0")),
      std::vector<TaggedVar>{pv("Y")});
  JointTable nested_law = to_distribution(nested);
  double tv = 0.0;
  for (std::size_t i = 0; i < exact.probs.size(); ++i) {
    tv += std::abs(nested_law.probs[i] - exact.probs[i]);
  }
  CHECK(0.5 * tv <= 0.01);
}

TEST_CASE("empirical json carries its metadata") {
  CptModel f1 = load_cpt("f1.scm.txt");
  EmpiricalTable table = sample_model(f1, 100, 42);
  nlohmann::ordered_json j = to_json(table);
  CHECK(j["n"] == 100);
  CHECK(j["seed"] == 42);
  CHECK(j["rng"] == "splitmix64");
  CHECK(j.contains("vars"));
  CHECK(j.contains("rows"));
}
