#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "oracles.hpp"
#include "pathfx/cli.hpp"

using nlohmann::ordered_json;
namespace tt = pathfx::testing;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = pathfx::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const std::string& name) { return tt::fixture_path(name); }

}  // namespace

TEST_CASE("infer reports the exact effect marginal") {
  CliResult result = run({"infer", fx("f3.scm.txt"), "--path", "X->A->Y",
                          "--value", "1", "--target", "Y", "--format",
                          "json"});
  REQUIRE(result.code == 0);
  ordered_json report = ordered_json::parse(result.out);
  CHECK(report["schema"] == 1);
  CHECK(report["model"] == "f3");
  const auto& joint = report["result"]["joint"];
  CHECK(joint["vars"][0]["name"] == "Y");
  CHECK(joint["vars"][0]["world"] == "pi");
  REQUIRE(joint["rows"].size() == 2);
  CHECK(joint["rows"][1]["values"][0] == "1");
  CHECK(std::abs(joint["rows"][1]["p"].get<double>() - 0.71025) <= 1e-12);
}

TEST_CASE("witness reports the verdict with exit 0") {
  CliResult result =
      run({"witness", fx("f3.scm.txt"), "--path", "X->A->Y"});
  REQUIRE(result.code == 0);
  ordered_json report = ordered_json::parse(result.out);
  CHECK(report["result"]["witness"] == "A");

  CliResult f4 = run({"witness", fx("f4.scm.txt"), "--path", "A->M->Y"});
  REQUIRE(f4.code == 0);
  CHECK(ordered_json::parse(f4.out)["result"]["witness"] == "M");
}

TEST_CASE("witness handles spaces in the path argument") {
  CliResult result =
      run({"witness", fx("f3.scm.txt"), "--path", "X -> A -> Y"});
  CHECK(result.code == 0);
}

TEST_CASE("validate rejects the broken fixture naming line and row") {
  CliResult result = run({"validate", fx("broken.scm.txt")});
  CHECK(result.code == 1);
  CHECK(result.out.empty());
  CHECK(result.err.find("12:") != std::string::npos);   // the row's line
  CHECK(result.err.find("(0,0)") != std::string::npos);  // the row itself
}

TEST_CASE("validate summarizes a good model") {
  CliResult result = run({"validate", fx("f4.scm.txt")});
  REQUIRE(result.code == 0);
  ordered_json report = ordered_json::parse(result.out);
  CHECK(report["result"]["valid"] == true);
  CHECK(report["result"]["kind"] == "cpt-model");
  CHECK(report["result"]["variables"] == 5);
  CHECK(report["result"]["edges"] == 9);
}

TEST_CASE("parse errors exit with code 2") {
  std::string path = "/tmp/pathfx_cli_parse_error.scm.txt";
  std::ofstream(path) << "model \"m\"\nvar A : {0,1\n";
  CliResult result = run({"validate", path});
  CHECK(result.code == 2);
  CHECK(result.err.find("ParseError") != std::string::npos);
}

TEST_CASE("usage errors exit with code 3") {
  CHECK(run({"unknown-subcommand"}).code == 3);
  CHECK(run({"infer", fx("f1.scm.txt"), "--path", "A->M->Y"}).code == 3);
  CHECK(run({"infer", fx("f1.scm.txt"), "--path", "A->M->Y", "--value", "1",
             "--do", "A=1"})
            .code == 3);
  CHECK(run({"sample", fx("f1.scm.txt"), "--n", "10"}).code == 3);
  CHECK(run({"infer", fx("f1.scm.txt"), "--format", "xml"}).code == 3);
}

TEST_CASE("paths enumerates lexicographically") {
  CliResult result =
      run({"paths", fx("f3.scm.txt"), "--from", "X", "--to", "Y"});
  REQUIRE(result.code == 0);
  ordered_json report = ordered_json::parse(result.out);
  auto paths = report["result"]["paths"];
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] == ordered_json::array({"X", "A", "M", "Y"}));
  CHECK(paths[1] == ordered_json::array({"X", "A", "Y"}));
}

TEST_CASE("diagram prints dot to stdout or a file") {
  CliResult direct = run({"diagram", fx("f3.scm.txt"), "--path", "X->A->Y",
                          "--value", "1"});
  REQUIRE(direct.code == 0);
  CHECK(direct.out.rfind("digraph G {", 0) == 0);
  CHECK(direct.out.find("\"a_pi\" -> \"y_pi\" [color=red]") !=
        std::string::npos);

  std::string out_path = "/tmp/pathfx_cli_diagram.dot";
  CliResult to_file = run({"diagram", fx("f3.scm.txt"), "--path", "X->A->Y",
                           "--value", "1", "-o", out_path});
  REQUIRE(to_file.code == 0);
  ordered_json report = ordered_json::parse(to_file.out);
  CHECK(report["result"]["dot"] == out_path);
  std::ifstream in(out_path);
  std::ostringstream written;
  written << in.rdbuf();
  CHECK(written.str() == direct.out);
}

TEST_CASE("sample emits a seeded empirical table") {
  CliResult result = run({"sample", fx("f1.scm.txt"), "--path", "A->M->Y",
                          "--value", "1", "--n", "5000", "--seed", "11"});
  REQUIRE(result.code == 0);
  ordered_json report = ordered_json::parse(result.out);
  CHECK(report["seed"] == 11);
  CHECK(report["rng"] == "splitmix64");
  CHECK(report["result"]["empirical"]["n"] == 5000);
}

TEST_CASE("compare puts exact, empirical and tv side by side") {
  CliResult result = run({"compare", fx("f2.scm.txt"), "--path", "T->Y",
                          "--value", "1", "--n", "50000", "--seed", "3"});
  REQUIRE(result.code == 0);
  ordered_json report = ordered_json::parse(result.out);
  const auto& r = report["result"];
  CHECK(std::abs(r["exact"]["rows"][1]["p"].get<double>() - 0.75) <= 1e-12);
  CHECK(r["tv"].get<double>() <= 0.02);
  CHECK(!r.contains("nested"));
}

TEST_CASE("compare --nested needs a structural model") {
  CliResult cpt_input =
      run({"compare", fx("f1.scm.txt"), "--path", "A->M->Y", "--value", "1",
           "--nested", "1,0", "--n", "1000", "--seed", "1"});
  CHECK(cpt_input.code == 1);
  CHECK(cpt_input.err.find("RequiresScm") != std::string::npos);

  CliResult scm_input =
      run({"compare", fx("f1_scm.scm.txt"), "--path", "A->M->Y", "--value",
           "1", "--nested", "1,0", "--n", "20000", "--seed", "1"});
  REQUIRE(scm_input.code == 0);
  ordered_json report = ordered_json::parse(scm_input.out);
  CHECK(report["result"]["nested_spec"]["on_path"] == "1");
  CHECK(report["result"]["nested_spec"]["off_path"] == "0");
  CHECK(report["result"]["nested"]["rows"].size() == 2);
}

TEST_CASE("machine output stays on stdout and is a single json document") {
  const std::vector<std::vector<std::string>> invocations = {
      {"validate", fx("f1.scm.txt")},
      {"paths", fx("f1.scm.txt"), "--from", "A", "--to", "Y"},
      {"infer", fx("f1.scm.txt"), "--path", "A->M->Y", "--value", "1"},
  };
  for (const auto& args : invocations) {
    CAPTURE(args[0]);
    CliResult result = run(args);
    REQUIRE(result.code == 0);
    // parse() accepting the whole stream means exactly one document
    ordered_json document = ordered_json::parse(result.out);
    CHECK(document.is_object());
  }
}

TEST_CASE("identical invocations produce byte-identical stdout") {
  const std::vector<std::vector<std::string>> invocations = {
      {"infer", fx("f3.scm.txt"), "--path", "X->A->Y", "--value", "1"},
      {"sample", fx("f4.scm.txt"), "--path", "A->M->Y", "--value", "1",
       "--n", "100000", "--seed", "17"},
      {"compare", fx("f1_scm.scm.txt"), "--path", "A->M->Y", "--value", "1",
       "--nested", "1,0", "--n", "100000", "--seed", "17"},
      {"diagram", fx("f2_scm.scm.txt"), "--info", "T=1", "--augmented"},
  };
  for (const auto& args : invocations) {
    CAPTURE(args[0]);
    CliResult first = run(args);
    CliResult second = run(args);
    REQUIRE(first.code == 0);
    CHECK(first.out == second.out);
  }
}

TEST_CASE("the enumeration cap honors PATHFX_MAX_STATES") {
  setenv("PATHFX_MAX_STATES", "4", 1);
  CliResult capped = run({"infer", fx("f4.scm.txt")});
  unsetenv("PATHFX_MAX_STATES");
  CHECK(capped.code == 1);
  CHECK(capped.err.find("StateSpaceTooLarge") != std::string::npos);

  CliResult uncapped = run({"infer", fx("f4.scm.txt")});
  CHECK(uncapped.code == 0);
}

TEST_CASE("infer keep-factual retains the factual block") {
  CliResult result =
      run({"infer", fx("f2.scm.txt"), "--path", "T->Y", "--value", "1",
           "--target", "Y", "--keep-factual"});
  REQUIRE(result.code == 0);
  ordered_json report = ordered_json::parse(result.out);
  const auto& vars = report["result"]["joint"]["vars"];
  REQUIRE(vars.size() == 4);  // y^pi plus the three factual variables
  CHECK(vars[0]["world"] == "pi");
}

TEST_CASE("infer under do matches the truncated factorization") {
  CliResult result = run({"infer", fx("f2.scm.txt"), "--do", "T=1",
                          "--target", "Y"});
  REQUIRE(result.code == 0);
  ordered_json report = ordered_json::parse(result.out);
  CHECK(std::abs(report["result"]["joint"]["rows"][1]["p"].get<double>() -
                 0.75) <= 1e-12);
}
