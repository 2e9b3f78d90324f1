#pragma once

// JSON scenarios and reports. Numbers travel as "p/q" strings, extended
// values as "+inf"/"-inf", atoms by their declared names.

#include "condual/conditional_set.hpp"
#include "condual/quasi_map.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace condual {

using Json = nlohmann::ordered_json;

/// Parse or validation failure. `what()` starts with the location: a
/// "line:column" pair for syntax errors, a field path for validation.
class ScenarioError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Task {
  std::string command;
  std::vector<std::string> args;
  std::map<std::string, std::string> options;  // "--key value"
  std::set<std::string> flags;                 // bare "--key"
  Json source;
};

struct Scenario {
  SpacePtr space;
  std::map<std::string, RandomVariable> points;
  std::map<std::string, ExtendedVector> levels;
  std::map<std::string, std::vector<ExtendedVector>> families;
  std::map<std::string, QuasiMap> maps;
  std::map<std::string, ConditionalSet> sets;
  std::vector<Task> tasks;
  Json source;
};

/// Parses JSON text; syntax errors are reported as "line L, column C: ...".
Json parse_json_text(const std::string& text);

/// Throws ScenarioError naming the offending field.
Scenario load_scenario(const Json& document);

/// Splits a task string on blanks, honouring single and double quotes.
std::vector<std::string> tokenize(const std::string& line);

struct RunOptions {
  std::uint64_t seed = 0;
  std::optional<std::vector<Rational>> eps;
  std::optional<std::size_t> instances;
  bool parallel = false;
};

/// Verdicts: "pass", "fail" or "counterexample".
Json run_task(const Scenario& scenario, std::size_t index, const RunOptions& options);
Json run_scenario(const Scenario& scenario, const RunOptions& options);

/// Re-checks every certificate of a report against its embedded scenario.
/// Returns one line per problem; empty means the report re-verifies.
std::vector<std::string> verify_report(const Json& report);

bool report_passed(const Json& report);

std::vector<Rational> parse_rational_list(const std::string& text);

}  // namespace condual
