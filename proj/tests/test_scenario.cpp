#include "condual/scenario.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace condual;

namespace {

Json sample() {
  std::ifstream in(CONDUAL_SCENARIO_DIR "/space4.json");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str());
}

Json tiny(const Json& tasks) {
  Json doc = sample();
  doc["tasks"] = tasks;
  return doc;
}

}  // namespace

TEST_CASE("tokenize honours quotes") {
  CHECK(tokenize("maximal-set F Y0 '>='") == std::vector<std::string>{"maximal-set", "F", "Y0", ">="});
  CHECK(tokenize("a \"b c\"  d") == std::vector<std::string>{"a", "b c", "d"});
  CHECK_THROWS_AS(tokenize("a 'b"), ScenarioError);
}

TEST_CASE("syntax errors carry line and column") {
  CHECK_THROWS_WITH_AS(parse_json_text("{\n  \"a\": [1,\n}"), doctest::Contains("line 3"), ScenarioError);
}

TEST_CASE("validation errors name the field") {
  Json doc = sample();
  doc["space"]["probabilities"] = {"1/2", "1/4", "1/4", "1/8"};
  CHECK_THROWS_WITH_AS(load_scenario(doc), doctest::Contains("probabilities: sum to 9/8"), ScenarioError);

  doc = sample();
  doc["points"]["x"] = {"1", "2"};
  CHECK_THROWS_WITH_AS(load_scenario(doc), doctest::Contains("points"), ScenarioError);

  CHECK_THROWS_WITH_AS(load_scenario(tiny({"polar nope"})), doctest::Contains("unknown set 'nope'"), ScenarioError);
  CHECK_THROWS_AS(load_scenario(tiny({"frobnicate box"})), ScenarioError);
}

TEST_CASE("the sample scenario passes, is deterministic and re-verifies") {
  const Scenario scenario = load_scenario(sample());
  RunOptions options;
  options.seed = 7;
  const Json a = run_scenario(scenario, options);
  CHECK(report_passed(a));
  CHECK(a["summary"]["failed"] == 0);
  CHECK(a["summary"]["tasks"] == scenario.tasks.size());

  options.parallel = true;
  const Json b = run_scenario(scenario, options);
  CHECK(a.dump() == b.dump());
  CHECK(verify_report(a).empty());

  // A forged margin no longer re-verifies.
  Json forged = a;
  for (auto& task : forged["tasks"])
    if (task["command"] == "check-separation") task["certificate"]["functional"][0] = "0/1";
  CHECK_FALSE(verify_report(forged).empty());
}

TEST_CASE("task failures become verdicts, not exceptions") {
  RunOptions options;
  const Json report = run_scenario(load_scenario(tiny({"check-separation box one"})), options);
  CHECK_FALSE(report_passed(report));
  CHECK(report["tasks"][0]["verdict"] != "pass");
}

TEST_CASE("rational lists") {
  CHECK(parse_rational_list("1,1/4,1/16") == std::vector<Rational>{q(1), q(1, 4), q(1, 16)});
  CHECK_THROWS(parse_rational_list("1,,2"));
}
