#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "splineglue/collar.hpp"
#include "splineglue/gluing.hpp"
#include "splineglue/rates.hpp"
#include "splineglue/sampling.hpp"
#include "splineglue/verifier.hpp"

namespace splineglue {

inline constexpr int kReportSchemaVersion = 1;

/// Malformed or out-of-range scenario input; `field` is a dotted path
/// ("gluing.eps") or "line N" for syntax errors.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Outcome { Pass, Fail, Inconclusive };
std::string_view to_string(Outcome o);
Outcome outcome_from_string(const std::string& s);

struct LemmaSettings {
  std::vector<double> eps_ladder{0.1, 0.05, 0.025, 0.0125};
  double structure_eps = 1e-3;
  int gauss_planes = 100;
  int convexity_pairs = 1000;
  int frames = 20;
  int rate_grid = 2;  // cross-section nodes per axis for the lemma checks
  int diameter_resolution = 8;
};

struct Scenario {
  std::string name;
  std::string description;
  std::filesystem::path source;
  nlohmann::json config;  // the document as read

  // Always set by parse_scenario; optional only because collars have no default.
  std::optional<CollarMetric> h1;
  std::optional<CollarMetric> h2;
  bool mirror = false;  // second collar declared as the mirror of the first
  GluingParams params;
  CurvatureMode mode = CurvatureMode::RicK;
  int k = 1;
  SamplingPlan plan;
  SearchSchedule schedule;
  bool stability = false;  // re-certify the search result on the doubled plan
  LemmaSettings lemmas;

  std::vector<std::string> checks;
  std::map<std::string, Outcome> expected;
  std::optional<int> expected_exit;
};

/// Check names accepted in a scenario's "checks" list, in run order.
const std::vector<std::string>& known_checks();

/// Plain-language statement of what a check verifies. ScenarioError with
/// the closest known name for anything else.
std::string describe_check(const std::string& name);

Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& source = {});
Scenario load_scenario(const std::filesystem::path& path);

struct CheckResult {
  std::string name;
  Outcome outcome = Outcome::Fail;
  nlohmann::json details;
};

struct ProfileRow {
  double t = 0.0;
  std::string region;
  double metric = 0.0;  // g_11 at the centre node
  double dt = 0.0;
  double dtt = 0.0;
  double curvature = 0.0;
};

struct RunResult {
  std::vector<CheckResult> checks;
  int exit_code = 0;
  nlohmann::json report;  // deterministic: no clocks, no paths
  std::vector<RateReport> rates;
  std::vector<ProfileRow> profile;
};

/// Runs the scenario's checks (or `only`, if non-empty, in known order).
/// Exit code: 1 if any check failed, else 2 if any was inconclusive, else 0.
/// Contract errors of the library are rethrown as ScenarioError.
RunResult run_scenario(const Scenario& s, const std::vector<std::string>& only = {});

/// Writes report.json, metadata.json and, when present, rates.csv and profile.csv.
void write_outputs(const RunResult& r, const std::filesystem::path& dir, const nlohmann::json& metadata);

/// Checks whose outcome differs from the scenario's expectations (empty if all met).
std::vector<std::string> unmet_expectations(const Scenario& s, const RunResult& r);

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::filesystem::path path;
};

/// Every *.json scenario in `dir`, sorted by name.
std::vector<ScenarioInfo> list_scenarios(const std::filesystem::path& dir);

/// Closest candidate by edit distance (empty if none within reach).
std::string closest_name(const std::string& name, const std::vector<std::string>& candidates);

}  // namespace splineglue
