// splineglue: run gluing scenarios and print their check results.
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "splineglue/errors.hpp"
#include "splineglue/sampling.hpp"
#include "splineglue/scenario.hpp"

namespace fs = std::filesystem;
using namespace splineglue;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kInputError = 3;

fs::path output_root() {
  if (const char* env = std::getenv("SPLINEGLUE_OUTPUT_ROOT"); env && *env) return env;
  return "splineglue-output";
}

fs::path scenario_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("SPLINEGLUE_SCENARIO_DIR"); env && *env) return env;
  return SPLINEGLUE_SCENARIO_DIR;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// A bare name resolves against the scenario directory.
fs::path resolve_config(const std::string& arg, const std::string& dir_flag) {
  const fs::path p(arg);
  if (fs::exists(p)) return p;
  if (!p.has_parent_path()) {
    const fs::path dir = scenario_dir(dir_flag);
    for (const fs::path& cand : {dir / p, dir / (arg + ".json")}) {
      if (fs::exists(cand)) return cand;
    }
  }
  return p;
}

int execute(const std::string& command, const std::string& config, const std::string& output,
            const std::string& dir_flag, const std::vector<std::string>& only, const std::string& argv_line) {
  const auto start = std::chrono::steady_clock::now();
  Scenario s = load_scenario(resolve_config(config, dir_flag));
  const bool subset = command != "run";
  if (command == "rates") {
    s.checks = {"rates"};
  } else if (command == "certify") {
    std::vector<std::string> picked{"certify"};
    for (const std::string& c : s.checks) {
      if (c == "search" || c == "boundary_condition") picked.push_back(c);
    }
    s.checks = picked;
  }
  for (const std::string& c : only) {
    if (std::find(s.checks.begin(), s.checks.end(), c) == s.checks.end()) {
      throw ScenarioError("--check", "'" + c + "' is not declared by " + s.name);
    }
  }

  const RunResult r = run_scenario(s, only);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  fs::path dir = output.empty() ? output_root() / s.name : fs::path(output);
  if (output.empty() && subset) dir /= command;
  const nlohmann::json metadata{{"timestamp", utc_now()},
                                {"seconds", seconds},
                                {"threads", worker_count()},
                                {"version", kVersion},
                                {"command", argv_line},
                                {"source", s.source.string()}};
  write_outputs(r, dir, metadata);

  for (const CheckResult& c : r.checks) {
    std::cout << std::left << std::setw(22) << c.name << to_string(c.outcome) << "\n";
  }
  std::cout << "report: " << (dir / "report.json").string() << "\n";

  // Expectations describe full runs; a subset or --check filter may legitimately differ.
  if (!subset && only.empty()) {
    for (const std::string& m : unmet_expectations(s, r)) std::cerr << "unmet expectation: " << m << "\n";
  }
  std::cout << "exit " << r.exit_code << " (" << std::fixed << std::setprecision(1) << seconds << " s)\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spline gluing of collar metrics with curvature certification"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string config, output, dir_flag, check_name;
  std::vector<std::string> only;

  auto add_config_command = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "scenario file, or a shipped scenario name")->required();
    sub->add_option("-o,--output", output, "output directory (default: $SPLINEGLUE_OUTPUT_ROOT/<name>)");
    sub->add_option("--scenarios", dir_flag, "directory searched for bare scenario names");
    return sub;
  };
  CLI::App* run = add_config_command("run", "run every declared check");
  run->add_option("--check", only, "restrict to these checks");
  add_config_command("rates", "run the eps rate suite only");
  add_config_command("certify", "certify the configured parameters (and the search, if declared)");

  CLI::App* list = app.add_subcommand("list", "list shipped scenarios");
  list->add_option("--dir", dir_flag, "scenario directory");
  CLI::App* describe = app.add_subcommand("describe", "explain a check");
  describe->add_option("check", check_name, "check name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  std::string argv_line;
  for (int i = 0; i < argc; ++i) argv_line += (i ? " " : "") + std::string(argv[i]);

  try {
    if (list->parsed()) {
      const auto infos = list_scenarios(scenario_dir(dir_flag));
      for (const ScenarioInfo& i : infos) {
        std::cout << std::left << std::setw(24) << i.name << i.description << "\n";
      }
      return 0;
    }
    if (describe->parsed()) {
      std::cout << check_name << "\n  " << describe_check(check_name) << "\n";
      return 0;
    }
    for (CLI::App* sub : app.get_subcommands()) {
      return execute(sub->get_name(), config, output, dir_flag, only, argv_line);
    }
  } catch (const ScenarioError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kInputError;
}
