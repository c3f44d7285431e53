#include "splineglue/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "splineglue/diameter.hpp"
#include "splineglue/errors.hpp"

namespace splineglue {

using json = nlohmann::json;

ScenarioError::ScenarioError(std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Pass: return "pass";
    case Outcome::Fail: return "fail";
    case Outcome::Inconclusive: return "inconclusive";
  }
  return "fail";
}

Outcome outcome_from_string(const std::string& s) {
  if (s == "pass") return Outcome::Pass;
  if (s == "fail") return Outcome::Fail;
  if (s == "inconclusive") return Outcome::Inconclusive;
  throw ScenarioError("", "unknown outcome '" + s + "' (pass, fail or inconclusive)");
}

std::string closest_name(const std::string& name, const std::vector<std::string>& candidates) {
  auto distance = [](const std::string& a, const std::string& b) {
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      std::size_t diag = row[0];
      row[0] = i;
      for (std::size_t j = 1; j <= b.size(); ++j) {
        const std::size_t up = row[j];
        row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
        diag = up;
      }
    }
    return row[b.size()];
  };
  std::string best;
  // A truncated or extended name is the likeliest slip.
  for (const auto& c : candidates) {
    const bool prefix = !name.empty() && (c.rfind(name, 0) == 0 || name.rfind(c, 0) == 0);
    if (prefix && (best.empty() || c.size() < best.size())) best = c;
  }
  if (!best.empty()) return best;
  std::size_t best_d = std::max<std::size_t>(3, (name.size() + 1) / 2) + 1;
  for (const auto& c : candidates) {
    const std::size_t d = distance(name, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{
      "boundary_condition", "c1_interface",      "smoothing",        "certify",
      "search",             "rates",             "ricci_structure",  "gauss_check",
      "convexity_kernel",   "interpolation_bound", "eta_frames",     "totally_geodesic",
      "almost_nonneg"};
  return names;
}

std::string describe_check(const std::string& name) {
  static const std::map<std::string, std::string> text{
      {"boundary_condition",
       "Strict boundary hypothesis at the gluing interface. For Ric_k: h1'(0) - h2'(0) is "
       "positive definite. For Sc_k: it is k'-positive relative to h(0), with k' = k for "
       "k <= n-2 and k' = k-1 otherwise. A margin of exactly zero is inconclusive, since the "
       "strictifying deformation is not implemented."},
      {"c1_interface",
       "The cubic spline g_t matches value and first t-derivative of the collars at t = -eps "
       "and t = eps to 1e-12; for mirror pairs g is also even in t."},
      {"smoothing",
       "Mollification of the two C^1 joins: C^1 distance to the input <= mu, band second "
       "derivatives inside the interval spanned by the endpoint values (up to mu), positive "
       "definite, and a quadrature self-check below 1e-10."},
      {"certify",
       "Grid certification of Ric_k > kappa (or Sc_k > kappa) on the C^1 glued metric and on "
       "its smoothing at the configured eps, nu, mu. The smoothed minimum must stay within half "
       "the C^1 margin of the C^1 minimum."},
      {"search",
       "Halving search for eps (C^1 certificate) and then nu (smooth certificate). Reaching a "
       "floor is inconclusive, not a refutation: the statement only asserts that small enough "
       "parameters exist."},
      {"rates",
       "Asymptotics in eps of the spline: |g_t - h(0)| and the deviation of g_t' from linear "
       "interpolation are O(eps); g_t'' - (h2'(0) - h1'(0))/2eps, the normal curvature and the "
       "Ricci tensor minus their leading terms are O(1). Fitted log-log slopes over the eps "
       "ladder."},
      {"ricci_structure",
       "At t = 0 and small eps the spectrum of 4 eps Ric approaches (tr D, eigenvalues of D), "
       "D = h1'(0) - h2'(0) relative to h(0); tolerance 10%. The run also reports 2 eps Ric."},
      {"gauss_check",
       "Gauss formula for the slices t = const: ambient K(u, v) equals the slice curvature "
       "minus (g'(u,u) g'(v,v) - g'(u,v)^2) / 4 (g(u,u) g(v,v) - g(u,v)^2). Ambient curvature "
       "comes from finite differences; residual <= 1e-6 and order >= 1.9."},
      {"convexity_kernel",
       "For every pair u, v the determinant of the 2x2 restriction of the linear interpolation "
       "of h1'(0) and h2'(0) is convex in t (second differences >= -1e-12)."},
      {"interpolation_bound",
       "Sums of sectional curvatures over frames inside the spline are bounded below by the "
       "convex combination of the boundary sums of both collars, up to a violation that "
       "vanishes at order >= 0.8 in eps."},
      {"eta_frames",
       "Frames orthonormal for g_t are eta-nearly orthonormal for h(0), with eta -> 0 at "
       "order >= 0.8 in eps."},
      {"totally_geodesic",
       "For a mirror pair the smoothed double is even in t to 1e-10 and the slice t = 0 has "
       "second fundamental form <= 1e-8."},
      {"almost_nonneg",
       "Almost non-negative curvature: search at kappa = -delta / 2 d^2 with d the graph "
       "diameter of the glued metric, then check min curvature * diam^2 >= -delta."},
  };
  const auto it = text.find(name);
  if (it != text.end()) return it->second;
  const std::string hint = closest_name(name, known_checks());
  throw ScenarioError("check", "unknown check '" + name + "'" +
                                   (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void allow_keys(const json& obj, const std::string& path, const std::vector<std::string>& keys) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(keys.begin(), keys.end(), it.key()) != keys.end()) continue;
    const std::string hint = closest_name(it.key(), keys);
    throw ScenarioError(join(path, it.key()),
                        "unknown field" + (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
  }
}

const json& object(const json& parent, const std::string& key, const std::string& path) {
  if (!parent.contains(key)) throw ScenarioError(join(path, key), "missing");
  const json& v = parent.at(key);
  if (!v.is_object()) throw ScenarioError(join(path, key), "expected an object");
  return v;
}

double number(const json& obj, const std::string& key, const std::string& path,
              std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ScenarioError(join(path, key), "missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ScenarioError(join(path, key), "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ScenarioError(join(path, key), "must be finite");
  return d;
}

int integer(const json& obj, const std::string& key, const std::string& path,
            std::optional<int> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ScenarioError(join(path, key), "missing");
  }
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ScenarioError(join(path, key), "expected an integer");
  return v.get<int>();
}

std::string text(const json& obj, const std::string& key, const std::string& path,
                 std::optional<std::string> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ScenarioError(join(path, key), "missing");
  }
  const json& v = obj.at(key);
  if (!v.is_string()) throw ScenarioError(join(path, key), "expected a string");
  return v.get<std::string>();
}

bool flag(const json& obj, const std::string& key, const std::string& path, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ScenarioError(join(path, key), "expected true or false");
  return v.get<bool>();
}

std::vector<double> numbers(const json& obj, const std::string& key, const std::string& path) {
  const std::string field = join(path, key);
  if (!obj.contains(key)) throw ScenarioError(field, "missing");
  const json& v = obj.at(key);
  if (!v.is_array()) throw ScenarioError(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw ScenarioError(field + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

std::string error_text(const Error& e) { return e.what(); }  // already prefixed with the kind

Profile parse_profile(const json& j, const std::string& path) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  const std::string kind = text(j, "kind", path);
  if (kind == "constant") {
    allow_keys(j, path, {"kind", "value"});
    return Profile::constant(number(j, "value", path));
  }
  if (kind == "polynomial") {
    allow_keys(j, path, {"kind", "coefficients"});
    return Profile::polynomial(numbers(j, "coefficients", path));
  }
  if (kind == "sine" || kind == "cosh") {
    allow_keys(j, path, {"kind", "amplitude", "frequency", "phase"});
    const double a = number(j, "amplitude", path, 1.0);
    const double w = number(j, "frequency", path, 1.0);
    const double p = number(j, "phase", path, 0.0);
    return kind == "sine" ? Profile::sine(a, w, p) : Profile::cosh(a, w, p);
  }
  if (kind == "exponential") {
    allow_keys(j, path, {"kind", "amplitude", "rate"});
    return Profile::exponential(number(j, "amplitude", path, 1.0), number(j, "rate", path));
  }
  const std::string hint =
      closest_name(kind, {"constant", "polynomial", "sine", "cosh", "exponential"});
  throw ScenarioError(join(path, "kind"), "unknown profile kind '" + kind + "'" +
                                              (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
}

Interval parse_interval(const json& j, const std::string& path) {
  const std::vector<double> v = numbers(j, "interval", path);
  if (v.size() != 2 || !(v[0] < v[1])) {
    throw ScenarioError(join(path, "interval"), "expected [lo, hi] with lo < hi");
  }
  return Interval{v[0], v[1]};
}

CollarMetric parse_collar(const json& j, const std::string& path, const CollarMetric* first) {
  if (!j.is_object()) throw ScenarioError(path, "expected an object");
  if (j.contains("mirror_of_first")) {
    allow_keys(j, path, {"mirror_of_first"});
    if (!first || !flag(j, "mirror_of_first", path, false)) {
      throw ScenarioError(join(path, "mirror_of_first"), "only `true` on the second collar");
    }
    return mirror_collar(*first);
  }
  const std::string family = text(j, "family", path);
  try {
    if (family == "warped") {
      allow_keys(j, path, {"family", "dimension", "profile", "interval"});
      return make_warped_product(parse_profile(object(j, "profile", path), join(path, "profile")),
                                 integer(j, "dimension", path), parse_interval(j, path));
    }
    if (family == "torus") {
      allow_keys(j, path, {"family", "profiles", "interval"});
      if (!j.contains("profiles") || !j.at("profiles").is_array()) {
        throw ScenarioError(join(path, "profiles"), "expected an array of profiles");
      }
      std::vector<Profile> ps;
      const json& arr = j.at("profiles");
      for (std::size_t i = 0; i < arr.size(); ++i) {
        ps.push_back(parse_profile(arr[i], join(path, "profiles[" + std::to_string(i) + "]")));
      }
      return make_diagonal_torus(ps, parse_interval(j, path));
    }
  } catch (const Error& e) {
    throw ScenarioError(path, error_text(e));
  }
  throw ScenarioError(join(path, "family"), "unknown collar family '" + family + "' (warped or torus)");
}

}  // namespace

Scenario parse_scenario(const json& doc, const std::filesystem::path& source) {
  if (!doc.is_object()) throw ScenarioError("", "scenario must be a JSON object");
  allow_keys(doc, "", {"schema_version", "name", "description", "collars", "gluing", "curvature",
                       "sampling", "search", "lemmas", "checks", "expect"});
  Scenario s;
  s.source = source;
  s.config = doc;
  const int version = integer(doc, "schema_version", "", kReportSchemaVersion);
  if (version != kReportSchemaVersion) {
    throw ScenarioError("schema_version", "unsupported version " + std::to_string(version));
  }
  s.name = text(doc, "name", "");
  s.description = text(doc, "description", "", std::string{});

  const json& collars = object(doc, "collars", "");
  allow_keys(collars, "collars", {"first", "second"});
  if (!collars.contains("first") || !collars.contains("second")) {
    throw ScenarioError("collars", "needs both `first` and `second`");
  }
  s.h1.emplace(parse_collar(collars.at("first"), "collars.first", nullptr));
  s.h2.emplace(parse_collar(collars.at("second"), "collars.second", &*s.h1));
  s.mirror = collars.at("second").contains("mirror_of_first");
  if (s.h1->side() != Side::Lower) throw ScenarioError("collars.first.interval", "must lie in t <= 0");
  if (s.h2->side() != Side::Upper) throw ScenarioError("collars.second.interval", "must lie in t >= 0");
  if (!(s.h1->cross_section() == s.h2->cross_section())) {
    throw ScenarioError("collars", "DimensionMismatch: the collars have different cross-sections");
  }

  const json& gl = object(doc, "gluing", "");
  allow_keys(gl, "gluing", {"eps", "iota", "nu", "mu", "kappa", "delta"});
  s.params.eps = number(gl, "eps", "gluing");
  s.params.iota = number(gl, "iota", "gluing");
  s.params.nu = number(gl, "nu", "gluing");
  s.params.mu = number(gl, "mu", "gluing");
  s.params.kappa = number(gl, "kappa", "gluing", 0.0);
  s.params.delta = number(gl, "delta", "gluing", 0.1);
  try {
    s.params.validate();
  } catch (const Error& e) {
    throw ScenarioError("gluing", error_text(e));
  }
  const double reach = s.params.eps + s.params.iota;
  if (!s.h1->interval().contains(-reach) || !s.h2->interval().contains(reach)) {
    throw ScenarioError("gluing", "CollarTooShallow: eps + iota = " + std::to_string(reach) +
                                      " exceeds a collar");
  }

  const json& cv = object(doc, "curvature", "");
  allow_keys(cv, "curvature", {"mode", "k"});
  try {
    s.mode = curvature_mode_from_string(text(cv, "mode", "curvature"));
  } catch (const Error& e) {
    throw ScenarioError("curvature.mode", e.what());
  }
  s.k = integer(cv, "k", "curvature");
  const int n = s.h1->dim();
  const int k_hi = s.mode == CurvatureMode::RicK ? n - 1 : n;
  if (s.k < 1 || s.k > k_hi) {
    throw ScenarioError("curvature.k", "must lie in [1, " + std::to_string(k_hi) + "] for " +
                                           std::string(to_string(s.mode)) + " in dimension " +
                                           std::to_string(n));
  }

  if (doc.contains("sampling")) {
    const json& sp = object(doc, "sampling", "");
    allow_keys(sp, "sampling", {"grid_per_axis", "t_nodes", "directions", "refine_rounds",
                                "refine_count", "refine_radius"});
    s.plan.grid_per_axis = integer(sp, "grid_per_axis", "sampling", s.plan.grid_per_axis);
    s.plan.t_nodes = integer(sp, "t_nodes", "sampling", s.plan.t_nodes);
    s.plan.directions = integer(sp, "directions", "sampling", s.plan.directions);
    s.plan.refine_rounds = integer(sp, "refine_rounds", "sampling", s.plan.refine_rounds);
    s.plan.refine_count = integer(sp, "refine_count", "sampling", s.plan.refine_count);
    s.plan.refine_radius = number(sp, "refine_radius", "sampling", s.plan.refine_radius);
  }
  try {
    s.plan.validate();
  } catch (const Error& e) {
    throw ScenarioError("sampling", error_text(e));
  }
  s.schedule.plan = s.plan;

  if (doc.contains("search")) {
    const json& se = object(doc, "search", "");
    allow_keys(se, "search", {"eps_max", "eps_min", "nu_min", "smoothing_grid", "stability"});
    s.schedule.eps_max = number(se, "eps_max", "search", 0.0);
    s.schedule.eps_min = number(se, "eps_min", "search", s.schedule.eps_min);
    s.schedule.nu_min = number(se, "nu_min", "search", s.schedule.nu_min);
    s.schedule.smoothing_grid = integer(se, "smoothing_grid", "search", s.schedule.smoothing_grid);
    s.stability = flag(se, "stability", "search", false);
    if (!(s.schedule.eps_min > 0.0) || !(s.schedule.nu_min > 0.0) || s.schedule.eps_max < 0.0) {
      throw ScenarioError("search", "eps_min and nu_min must be positive, eps_max non-negative");
    }
    if (s.schedule.smoothing_grid < 1) throw ScenarioError("search.smoothing_grid", "must be >= 1");
  }

  if (doc.contains("lemmas")) {
    const json& le = object(doc, "lemmas", "");
    allow_keys(le, "lemmas", {"eps_ladder", "structure_eps", "gauss_planes", "convexity_pairs",
                              "frames", "rate_grid", "diameter_resolution"});
    LemmaSettings& l = s.lemmas;
    if (le.contains("eps_ladder")) l.eps_ladder = numbers(le, "eps_ladder", "lemmas");
    l.structure_eps = number(le, "structure_eps", "lemmas", l.structure_eps);
    l.gauss_planes = integer(le, "gauss_planes", "lemmas", l.gauss_planes);
    l.convexity_pairs = integer(le, "convexity_pairs", "lemmas", l.convexity_pairs);
    l.frames = integer(le, "frames", "lemmas", l.frames);
    l.rate_grid = integer(le, "rate_grid", "lemmas", l.rate_grid);
    l.diameter_resolution = integer(le, "diameter_resolution", "lemmas", l.diameter_resolution);
    if (l.eps_ladder.size() < 2) throw ScenarioError("lemmas.eps_ladder", "needs at least two values");
    for (double e : l.eps_ladder) {
      if (!(e > 0.0) || !s.h1->interval().contains(-e) || !s.h2->interval().contains(e)) {
        throw ScenarioError("lemmas.eps_ladder", "every eps must be positive and inside both collars");
      }
    }
    if (l.gauss_planes < 1 || l.convexity_pairs < 1 || l.frames < 1 || l.rate_grid < 1 ||
        l.diameter_resolution < 3) {
      throw ScenarioError("lemmas", "counts must be positive (diameter_resolution >= 3)");
    }
  }

  if (!doc.contains("checks") || !doc.at("checks").is_array() || doc.at("checks").empty()) {
    throw ScenarioError("checks", "expected a non-empty array of check names");
  }
  for (const json& c : doc.at("checks")) {
    if (!c.is_string()) throw ScenarioError("checks", "expected check names");
    const std::string name = c.get<std::string>();
    const auto& known = known_checks();
    if (std::find(known.begin(), known.end(), name) == known.end()) {
      const std::string hint = closest_name(name, known);
      throw ScenarioError("checks", "unknown check '" + name + "'" +
                                        (hint.empty() ? "" : "; did you mean '" + hint + "'?"));
    }
    if (std::find(s.checks.begin(), s.checks.end(), name) == s.checks.end()) s.checks.push_back(name);
  }

  if (doc.contains("expect")) {
    const json& ex = object(doc, "expect", "");
    allow_keys(ex, "expect", {"checks", "exit_code"});
    if (ex.contains("checks")) {
      const json& ec = object(ex, "checks", "expect");
      for (auto it = ec.begin(); it != ec.end(); ++it) {
        const std::string field = "expect.checks." + it.key();
        if (std::find(s.checks.begin(), s.checks.end(), it.key()) == s.checks.end()) {
          throw ScenarioError(field, "expectation for a check that is not run");
        }
        if (!it.value().is_string()) throw ScenarioError(field, "expected pass, fail or inconclusive");
        try {
          s.expected[it.key()] = outcome_from_string(it.value().get<std::string>());
        } catch (const ScenarioError& e) {
          throw ScenarioError(field, e.what());
        }
      }
    }
    if (ex.contains("exit_code")) s.expected_exit = integer(ex, "exit_code", "expect");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, content.size());
    const auto line = 1 + std::count(content.begin(), content.begin() + static_cast<long>(byte), '\n');
    throw ScenarioError("line " + std::to_string(line), e.what());
  }
  return parse_scenario(doc, path);
}

namespace {

json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Point& p) { return {{"x", to_json(p.x)}, {"t", p.t}}; }

json to_json(const SamplingPlan& p) {
  return {{"grid_per_axis", p.grid_per_axis}, {"t_nodes", p.t_nodes},     {"directions", p.directions},
          {"refine_rounds", p.refine_rounds}, {"refine_count", p.refine_count},
          {"refine_radius", p.refine_radius}};
}

json to_json(const GluingParams& p) {
  return {{"eps", p.eps},     {"iota", p.iota},   {"nu", p.nu},
          {"mu", p.mu},       {"kappa", p.kappa}, {"delta", p.delta}};
}

json to_json(const CurvatureWitness& w) {
  json j{{"value", w.value}, {"point", to_json(w.point)}};
  if (w.direction.size() > 0) j["direction"] = to_json(w.direction);
  return j;
}

json to_json(const CurvatureCertificate& c, double reevaluated) {
  json regions = json::array();
  for (const RegionMinimum& r : c.regions) {
    regions.push_back({{"region", std::string(to_string(r.region))},
                       {"t", {r.t.lo, r.t.hi}},
                       {"points", r.points},
                       {"min_value", r.witness.value},
                       {"witness", to_json(r.witness)}});
  }
  return {{"mode", std::string(to_string(c.mode))},
          {"k", c.k},
          {"kappa", c.kappa},
          {"min_value", c.min_value},
          {"margin", c.margin()},
          {"passed", c.passed},
          {"witness", to_json(c.witness)},
          {"witness_region", std::string(to_string(c.witness_region))},
          {"witness_reevaluated", reevaluated},
          {"points", c.points},
          {"sampling", to_json(c.plan)},
          {"regions", regions}};
}

json to_json(const SmoothingReport& r) {
  return {{"nu", r.nu},
          {"mu", r.mu},
          {"radius", r.radius},
          {"halvings", r.halvings},
          {"c1_distance", r.c1_distance},
          {"second_derivative_excess", r.second_derivative_excess},
          {"interval_ok", r.interval_ok},
          {"quadrature_change", r.quadrature_change}};
}

json to_json(const BoundaryCheck& b) {
  return {{"satisfied", b.satisfied},
          {"margin", b.margin},
          {"relative_margin", b.relative_margin},
          {"k_effective", b.k_effective},
          {"witness_x", to_json(b.witness_x)}};
}

json slope_json(const std::optional<double>& s) { return s ? json(*s) : json(nullptr); }

json to_json(const SearchOutcome& o, const GluedChart* chart_for_reeval) {
  json trace = json::array();
  for (const SearchAttempt& a : o.trace) {
    json j{{"stage", a.stage}, {"eps", a.eps}, {"passed", a.passed}, {"min_value", a.min_value}};
    if (a.stage == "smooth") {
      j["nu"] = a.nu;
      j["mu"] = a.mu;
    }
    if (!a.note.empty()) j["note"] = a.note;
    trace.push_back(j);
  }
  json j{{"status", std::string(to_string(o.status))},
         {"boundary", to_json(o.boundary)},
         {"trace", trace}};
  if (!o.reason.empty()) j["reason"] = o.reason;
  if (o.status == SearchStatus::Certified) {
    j["params"] = to_json(o.params);
    j["smoothing"] = to_json(*o.smoothing);
    j["smooth_certificate"] =
        to_json(*o.smooth_certificate, reevaluate_witness(*chart_for_reeval, *o.smooth_certificate));
  }
  if (o.c1_certificate) j["c1_certificate_min_value"] = o.c1_certificate->min_value;
  return j;
}

bool is_contract_error(ErrorKind k) {
  return k == ErrorKind::InvalidInput || k == ErrorKind::DimensionMismatch ||
         k == ErrorKind::BandTooWide || k == ErrorKind::CollarTooShallow;
}

class Runner {
 public:
  explicit Runner(const Scenario& s)
      : s_(s),
        h1_(*s.h1),
        h2_(*s.h2),
        xs_(h1_.cross_section().grid(s.plan.grid_per_axis)),
        lemma_xs_(h1_.cross_section().grid(s.lemmas.rate_grid)) {}

  CheckResult run(const std::string& name) {
    CheckResult r;
    r.name = name;
    try {
      if (name == "boundary_condition") boundary(r);
      else if (name == "c1_interface") c1_interface(r);
      else if (name == "smoothing") smoothing(r);
      else if (name == "certify") certify_check(r);
      else if (name == "search") search(r);
      else if (name == "rates") rates(r);
      else if (name == "ricci_structure") ricci_structure(r);
      else if (name == "gauss_check") gauss(r);
      else if (name == "convexity_kernel") convexity(r);
      else if (name == "interpolation_bound") interpolation(r);
      else if (name == "eta_frames") eta(r);
      else if (name == "totally_geodesic") totally_geodesic(r);
      else if (name == "almost_nonneg") almost_nonneg(r);
      else throw ScenarioError("checks", "unknown check '" + name + "'");
    } catch (const Error& e) {
      if (is_contract_error(e.kind())) throw ScenarioError(name, error_text(e));
      r.outcome = Outcome::Fail;
      r.details["error"] = {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}};
    }
    r.details["outcome"] = std::string(to_string(r.outcome));
    return r;
  }

  std::vector<RateReport> rate_rows;
  std::vector<ProfileRow> profile;

 private:
  static Outcome pass_if(bool ok) { return ok ? Outcome::Pass : Outcome::Fail; }

  const GluedChart& c1() {
    if (!c1_) c1_.emplace(assemble_glued(h1_, h2_, s_.params, xs_));
    return *c1_;
  }

  const SmoothedGlued& smoothed() {
    if (smooth_error_) std::rethrow_exception(smooth_error_);
    if (!smooth_) {
      try {
        smooth_.emplace(smooth_glued(c1(), s_.params.nu, s_.params.mu,
                                     h1_.cross_section().grid(s_.schedule.smoothing_grid)));
      } catch (...) {
        smooth_error_ = std::current_exception();
        throw;
      }
    }
    return *smooth_;
  }

  SplineFamily family() const { return SplineFamily(h1_, h2_, s_.params.eps); }

  void record_profile(const GluedChart& chart) {
    const CrossSection& cs = chart.cross_section();
    Vec x0(cs.dim);
    for (int a = 0; a < cs.dim; ++a) x0(a) = 0.5 * (cs.lower(a) + cs.upper(a));
    const std::vector<double> ts = linspace(chart.t_range().lo, chart.t_range().hi, 201);
    std::vector<ProfileRow> rows(ts.size());
    parallel_for(ts.size(), [&](std::size_t i) {
      const double t = ts[i];
      const CollarJet j = chart.slice_jet(x0, t);
      const CurvatureAtPoint c = curvature_at(chart, Point{x0, t});
      ProfileRow& row = rows[i];
      row.t = t;
      row.region = std::string(to_string(chart.regions()[chart.region_index(t)].region));
      row.metric = j.value(0, 0);
      row.dt = j.dt(0, 0);
      row.dtt = j.dtt(0, 0);
      row.curvature = s_.mode == CurvatureMode::RicK ? ric_k_at(c, s_.k, s_.plan).value
                                                     : sc_k_at(c, s_.k);
    });
    profile = std::move(rows);
  }

  void boundary(CheckResult& r) {
    const BoundaryCheck b = boundary_condition_check(h1_, h2_, s_.mode, s_.k, xs_);
    constexpr double kZero = 1e-12;
    r.outcome = b.margin > kZero ? Outcome::Pass
                                 : (b.margin >= -kZero ? Outcome::Inconclusive : Outcome::Fail);
    r.details = to_json(b);
    if (r.outcome == Outcome::Inconclusive) r.details["note"] = "semi-definite boundary sum";
  }

  void c1_interface(CheckResult& r) {
    const GluedChart& g = c1();
    const auto& reg = g.regions();
    const double eps = s_.params.eps;
    double value = 0.0, first = 0.0, mirror = 0.0;
    for (const Vec& x : xs_) {
      const std::pair<std::size_t, double> joins[] = {{0, -eps}, {1, eps}};
      for (const auto& [left, t] : joins) {
        const CollarJet a = reg[left].jet(x, t);
        const CollarJet b = reg[left + 1].jet(x, t);
        const double scale = std::max(1.0, max_abs(a.value));
        value = std::max(value, max_abs(a.value - b.value) / scale);
        first = std::max(first, max_abs(a.dt - b.dt) / std::max(1.0, max_abs(a.dt)));
      }
      if (s_.mirror) {
        for (double t : linspace(0.0, eps + s_.params.iota, 41)) {
          const CollarJet a = g.slice_jet(x, t);
          const CollarJet b = g.slice_jet(x, -t);
          mirror = std::max({mirror, max_abs(a.value - b.value), max_abs(a.dt + b.dt)});
        }
      }
    }
    r.details = {{"value_mismatch", value},
                 {"first_derivative_mismatch", first},
                 {"tolerance", 1e-12},
                 {"spline_positive_definite", true}};
    if (s_.mirror) r.details["mirror_residual"] = mirror;
    r.outcome = pass_if(value <= 1e-12 && first <= 1e-12 && mirror <= 1e-12);
  }

  void smoothing(CheckResult& r) {
    const SmoothingReport& rep = smoothed().report;
    r.details = to_json(rep);
    r.outcome = pass_if(rep.c1_distance <= rep.mu && rep.interval_ok && rep.quadrature_change < 1e-10);
  }

  void certify_check(CheckResult& r) {
    const CurvatureCertificate c = certify(c1(), s_.mode, s_.k, s_.params.kappa, s_.plan);
    r.details["c1"] = to_json(c, reevaluate_witness(c1(), c));
    const GluedChart& sm = smoothed().chart;
    const CurvatureCertificate d = certify(sm, s_.mode, s_.k, s_.params.kappa, s_.plan);
    r.details["smooth"] = to_json(d, reevaluate_witness(sm, d));
    const double shift = std::abs(d.min_value - c.min_value);
    const bool stable = shift < 0.5 * c.margin();
    r.details["smoothing_shift"] = shift;
    r.details["shift_within_half_margin"] = stable;
    record_profile(sm);
    r.outcome = pass_if(c.passed && d.passed && stable);
  }

  void search(CheckResult& r) {
    const SearchOutcome o =
        epsilon_nu_search(h1_, h2_, s_.mode, s_.k, s_.params.kappa, s_.params, s_.schedule);
    r.details = to_json(o, o.chart ? &*o.chart : nullptr);
    if (o.status != SearchStatus::Certified) {
      r.outcome = Outcome::Inconclusive;
      return;
    }
    bool ok = true;
    if (s_.stability) {
      const CurvatureCertificate fine = certify(*o.chart, s_.mode, s_.k, s_.params.kappa,
                                                s_.plan.doubled());
      const double m0 = o.smooth_certificate->margin();
      const double change = std::abs(fine.margin() - m0) / std::abs(m0);
      r.details["stability"] = {{"doubled_sampling", to_json(fine.plan)},
                                {"min_value", fine.min_value},
                                {"margin", fine.margin()},
                                {"relative_margin_change", change},
                                {"passed", fine.passed && change < 0.2}};
      ok = fine.passed && change < 0.2;
    }
    record_profile(*o.chart);
    r.outcome = pass_if(ok);
  }

  void rates(CheckResult& r) {
    RateGrid grid;
    grid.xs = lemma_xs_;
    rate_rows = rate_suite(h1_, h2_, s_.lemmas.eps_ladder, grid);
    json rows = json::array();
    bool ok = true;
    for (const RateReport& q : rate_rows) {
      rows.push_back({{"quantity", q.quantity},
                      {"order", std::string(to_string(q.order))},
                      {"eps", q.eps},
                      {"deviation", q.deviation},
                      {"slope", slope_json(q.slope)},
                      {"passed", q.passed}});
      ok = ok && q.passed;
    }
    r.details["quantities"] = rows;
    r.outcome = pass_if(ok);
  }

  void ricci_structure(CheckResult& r) {
    const RicciStructure q = ricci_structure_check(h1_, h2_, s_.lemmas.structure_eps, lemma_xs_);
    double half_scaled = 0.0;
    for (int i = 0; i < q.predicted.size(); ++i) {
      half_scaled = std::max(half_scaled,
                             std::abs(0.5 * q.eigenvalues(i) - q.predicted(i)) / std::abs(q.predicted(i)));
    }
    r.details = {{"eps", q.eps},
                 {"x", to_json(q.x)},
                 {"eigenvalues_4eps_ric", to_json(q.eigenvalues)},
                 {"eigenvalues_2eps_ric", to_json(0.5 * q.eigenvalues)},
                 {"predicted", to_json(q.predicted)},
                 {"max_relative_deviation", q.max_relative_deviation},
                 {"max_relative_deviation_2eps", half_scaled},
                 {"tolerance", 0.1}};
    r.outcome = pass_if(q.passed);
  }

  void gauss(CheckResult& r) {
    const GaussReport g = gauss_check(family(), s_.lemmas.gauss_planes);
    r.details = {{"planes", g.planes},
                 {"degenerate", g.degenerate},
                 {"step", g.step},
                 {"max_residual", g.max_residual},
                 {"coarse_step", g.coarse_step},
                 {"coarse_residual", g.coarse_residual},
                 {"fine_residual", g.fine_residual},
                 {"order", g.order}};
    r.outcome = pass_if(g.planes > 0 && g.max_residual <= 1e-6 && g.order >= 1.9);
  }

  void convexity(CheckResult& r) {
    const int per_x = static_cast<int>(
        (s_.lemmas.convexity_pairs + lemma_xs_.size() - 1) / lemma_xs_.size());
    const ConvexityReport c = convexity_kernel_check(h1_, h2_, s_.params.eps, lemma_xs_, per_x);
    r.details = {{"pairs", c.pairs},
                 {"min_second_difference", c.min_second_difference},
                 {"applicable", c.applicable}};
    if (!c.applicable) {
      r.outcome = Outcome::Inconclusive;
      r.details["note"] = "h1'(0) - h2'(0) is not positive definite";
      return;
    }
    r.outcome = pass_if(c.min_second_difference >= -1e-12);
  }

  void interpolation(CheckResult& r) {
    const int m = h1_.slice_dim();
    const int k = std::clamp(s_.k, 1, m - 1);
    const InterpolationReport q = interpolation_bound_check(family(), k, s_.lemmas.frames,
                                                            s_.lemmas.eps_ladder, lemma_xs_);
    r.details = {{"k", q.k},
                 {"eps", q.eps},
                 {"min_gap", q.min_gap},
                 {"violation", q.violation},
                 {"slope", slope_json(q.slope)}};
    r.outcome = pass_if(q.passed);
  }

  void eta(CheckResult& r) {
    const EtaReport q = eta_frame_report(family(), s_.lemmas.eps_ladder, lemma_xs_, s_.lemmas.frames);
    r.details = {{"eps", q.eps}, {"eta", q.eta}, {"slope", slope_json(q.slope)}};
    r.outcome = pass_if(q.passed);
  }

  void totally_geodesic(CheckResult& r) {
    const TotallyGeodesicReport q = totally_geodesic_check(smoothed().chart, h1_, h2_, lemma_xs_);
    r.details = {{"mirror_pair", q.mirror_pair},
                 {"symmetry_residual", q.symmetry_residual},
                 {"second_fundamental_form", q.second_fundamental_form}};
    if (!q.note.empty()) r.details["note"] = q.note;
    r.outcome = pass_if(q.passed);
  }

  void almost_nonneg(CheckResult& r) {
    const AlmostNonnegReport a = almost_nonneg_check(h1_, h2_, s_.mode, s_.k, s_.params.delta,
                                                     s_.params, s_.schedule,
                                                     s_.lemmas.diameter_resolution);
    r.details = {{"delta", a.delta},
                 {"initial_diameter", a.initial_diameter},
                 {"kappa", a.kappa},
                 {"status", std::string(to_string(a.status))},
                 {"diameter_resolution", a.diameter_resolution}};
    if (!a.reason.empty()) r.details["reason"] = a.reason;
    if (a.status != SearchStatus::Certified) {
      r.outcome = Outcome::Inconclusive;
      return;
    }
    r.details["min_value"] = a.min_value;
    r.details["diameter"] = a.diameter;
    r.details["min_times_diameter_squared"] = a.scaled;
    r.details["certified_params"] = to_json(a.search->params);
    r.outcome = pass_if(a.passed);
  }

  const Scenario& s_;
  const CollarMetric& h1_;
  const CollarMetric& h2_;
  std::vector<Vec> xs_;
  std::vector<Vec> lemma_xs_;
  std::optional<GluedChart> c1_;
  std::optional<SmoothedGlued> smooth_;
  std::exception_ptr smooth_error_;
};

std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

RunResult run_scenario(const Scenario& s, const std::vector<std::string>& only) {
  std::vector<std::string> selected;
  for (const std::string& name : known_checks()) {
    const bool declared = std::find(s.checks.begin(), s.checks.end(), name) != s.checks.end();
    const bool wanted = only.empty() || std::find(only.begin(), only.end(), name) != only.end();
    if (declared && wanted) selected.push_back(name);
  }
  Runner runner(s);
  RunResult out;
  json checks = json::object();
  bool failed = false, inconclusive = false;
  for (const std::string& name : selected) {
    CheckResult r = runner.run(name);
    failed = failed || r.outcome == Outcome::Fail;
    inconclusive = inconclusive || r.outcome == Outcome::Inconclusive;
    checks[name] = r.details;
    out.checks.push_back(std::move(r));
  }
  out.exit_code = failed ? 1 : (inconclusive ? 2 : 0);
  out.rates = std::move(runner.rate_rows);
  out.profile = std::move(runner.profile);
  out.report = {{"schema_version", kReportSchemaVersion},
                {"scenario", s.name},
                {"description", s.description},
                {"config", s.config},
                {"checks", checks},
                {"exit_code", out.exit_code}};
  return out;
}

void write_outputs(const RunResult& r, const std::filesystem::path& dir, const json& metadata) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw ScenarioError("output", "cannot write " + (dir / name).string());
    f << content;
  };
  write("report.json", r.report.dump(2) + "\n");
  write("metadata.json", metadata.dump(2) + "\n");
  if (!r.rates.empty()) {
    std::ostringstream os;
    os << "quantity,order,eps,deviation,slope,passed\n";
    for (const RateReport& q : r.rates) {
      for (std::size_t i = 0; i < q.eps.size(); ++i) {
        os << q.quantity << ',' << to_string(q.order) << ',' << csv_number(q.eps[i]) << ','
           << csv_number(q.deviation[i]) << ',' << (q.slope ? csv_number(*q.slope) : "") << ','
           << (q.passed ? "true" : "false") << '\n';
      }
    }
    write("rates.csv", os.str());
  }
  if (!r.profile.empty()) {
    std::ostringstream os;
    os << "t,region,g11,g11_t,g11_tt,curvature\n";
    for (const ProfileRow& p : r.profile) {
      os << csv_number(p.t) << ',' << p.region << ',' << csv_number(p.metric) << ','
         << csv_number(p.dt) << ',' << csv_number(p.dtt) << ',' << csv_number(p.curvature) << '\n';
    }
    write("profile.csv", os.str());
  }
}

std::vector<std::string> unmet_expectations(const Scenario& s, const RunResult& r) {
  std::vector<std::string> out;
  for (const auto& [name, want] : s.expected) {
    const auto it = std::find_if(r.checks.begin(), r.checks.end(),
                                 [&](const CheckResult& c) { return c.name == name; });
    if (it == r.checks.end()) {
      out.push_back(name + ": not run");
    } else if (it->outcome != want) {
      out.push_back(name + ": expected " + std::string(to_string(want)) + ", got " +
                    std::string(to_string(it->outcome)));
    }
  }
  if (s.expected_exit && *s.expected_exit != r.exit_code) {
    out.push_back("exit code: expected " + std::to_string(*s.expected_exit) + ", got " +
                  std::to_string(r.exit_code));
  }
  return out;
}

std::vector<ScenarioInfo> list_scenarios(const std::filesystem::path& dir) {
  std::vector<ScenarioInfo> out;
  if (!std::filesystem::is_directory(dir)) throw ScenarioError("", "no scenario directory " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".json") continue;
    ScenarioInfo info{entry.path().stem().string(), "", entry.path()};
    std::ifstream in(entry.path());
    const json doc = json::parse(in, nullptr, false);
    if (doc.is_object()) {
      info.name = doc.value("name", info.name);
      info.description = doc.value("description", std::string{});
    } else {
      info.description = "(unreadable)";
    }
    out.push_back(info);
  }
  std::sort(out.begin(), out.end(),
            [](const ScenarioInfo& a, const ScenarioInfo& b) { return a.name < b.name; });
  return out;
}

}  // namespace splineglue
