// condual: run a JSON scenario and print the report, or re-verify a saved
// report.
//
// Exit status: 0 when every verdict passes (or the report re-verifies),
// 1 when some task fails, 2 on unreadable or invalid input.

#include "condual/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw condual::ScenarioError(path + ": cannot open file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

condual::Json read_document(const std::string& path) {
  try {
    return condual::parse_json_text(slurp(path));
  } catch (const condual::ScenarioError& e) {
    const std::string what = e.what();
    if (what.rfind(path, 0) == 0) throw;
    throw condual::ScenarioError(path + ": " + what);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification engine for conditional convex duality on finite probability spaces"};
  std::string scenario_path, verify_path, output_path, eps_text;
  std::uint64_t seed = 0;
  std::size_t instances = 0;
  bool parallel = false;

  app.add_option("scenario", scenario_path, "Scenario JSON file");
  app.add_option("--seed", seed, "Seed for randomized checks")->default_val(0);
  app.add_option("--eps", eps_text, "Default epsilon schedule for dual-repr, e.g. 1,1/4,1/16");
  app.add_option("--instances", instances, "Default instance count for randomized suites");
  app.add_flag("--parallel", parallel, "Run tasks concurrently");
  app.add_option("--verify", verify_path, "Re-verify the certificates of a saved report");
  app.add_option("-o,--output", output_path, "Write the report here instead of stdout");
  CLI11_PARSE(app, argc, argv);

  try {
    if (!verify_path.empty()) {
      const auto issues = condual::verify_report(read_document(verify_path));
      for (const auto& issue : issues) std::cerr << issue << '\n';
      std::cout << (issues.empty() ? "verified" : "verification failed") << '\n';
      return issues.empty() ? 0 : 1;
    }
    if (scenario_path.empty()) {
      std::cerr << "a scenario file or --verify <report> is required\n" << app.help();
      return 2;
    }

    condual::RunOptions options;
    options.seed = seed;
    options.parallel = parallel;
    if (!eps_text.empty()) {
      try {
        options.eps = condual::parse_rational_list(eps_text);
      } catch (const std::invalid_argument& e) {
        throw condual::ScenarioError(std::string("--eps: ") + e.what());
      }
    }
    if (app.count("--instances")) options.instances = instances;

    condual::Scenario scenario;
    try {
      scenario = condual::load_scenario(read_document(scenario_path));
    } catch (const condual::ScenarioError& e) {
      const std::string what = e.what();
      throw condual::ScenarioError(what.rfind(scenario_path, 0) == 0 ? what : scenario_path + ": " + what);
    }
    const condual::Json report = condual::run_scenario(scenario, options);
    const std::string text = report.dump(2) + "\n";
    if (output_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(output_path);
      out << text;
      if (!out) throw condual::ScenarioError(output_path + ": cannot write report");
    }
    return condual::report_passed(report) ? 0 : 1;
  } catch (const condual::ScenarioError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
