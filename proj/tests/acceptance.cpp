// Acceptance run: every criterion at its stated tolerance and time limit,
// one PASS/FAIL line each. Exit status 1 if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <Eigen/QR>

#include "splineglue/chart.hpp"
#include "splineglue/curvature.hpp"
#include "splineglue/diameter.hpp"
#include "splineglue/rates.hpp"
#include "splineglue/sampling.hpp"
#include "splineglue/scenario.hpp"
#include "splineglue/smoothing.hpp"
#include "splineglue/verifier.hpp"
#include "support.hpp"

using namespace splineglue;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<Verdict()> run;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

std::vector<Scenario> shipped() {
  std::vector<Scenario> out;
  for (const ScenarioInfo& i : list_scenarios(SPLINEGLUE_SCENARIO_DIR)) out.push_back(load_scenario(i.path));
  return out;
}

Scenario scenario(const std::string& name) {
  return load_scenario(fs::path(SPLINEGLUE_SCENARIO_DIR) / (name + ".json"));
}

// 1. Product collars: the spline is the collar itself.
Verdict spline_exactness() {
  testing::Rng rng(101);
  const CollarMetric torus = make_diagonal_torus(
      {Profile::constant(1.0), Profile::constant(1.7), Profile::constant(0.6)}, {-1.0, 0.0});
  const CollarMetric cylinder = make_warped_product(Profile::constant(1.3), 4, {-1.0, 0.0});
  double worst = 0.0;
  int samples = 0;
  for (const CollarMetric* c : {&torus, &cylinder}) {
    const double eps = 0.1;
    const SplineFamily f(*c, mirror_collar(*c), eps);
    for (int i = 0; i < 500; ++i, ++samples) {
      const Vec x = rng.inside(c->cross_section());
      const double t = rng.uniform(-eps, eps);
      const CollarJet j = f.jet(x, t);
      worst = std::max({worst, max_abs(j.value - c->value(x, 0.0)), max_abs(j.dt), max_abs(j.dtt)});
    }
  }
  return {worst <= 1e-12, std::to_string(samples) + " samples, max deviation " + fmt(worst)};
}

// 2. Value and t-derivative match at t = -eps, eps in every shipped scenario.
Verdict c1_interface() {
  double worst = 0.0;
  std::string slow;
  std::size_t count = 0;
  for (const Scenario& s : shipped()) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<Vec> xs = s.h1->cross_section().grid(s.plan.grid_per_axis);
    const GluedChart g = assemble_glued(*s.h1, *s.h2, s.params, xs);
    const auto& reg = g.regions();
    for (const Vec& x : xs) {
      for (std::size_t left : {std::size_t{0}, std::size_t{1}}) {
        const double t = left == 0 ? -s.params.eps : s.params.eps;
        const CollarJet a = reg[left].jet(x, t), b = reg[left + 1].jet(x, t);
        worst = std::max({worst, max_abs(a.value - b.value) / std::max(1.0, max_abs(a.value)),
                          max_abs(a.dt - b.dt) / std::max(1.0, max_abs(a.dt))});
      }
    }
    ++count;
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (sec >= 1.0) slow += " " + s.name;
  }
  return {worst <= 1e-12 && slow.empty(),
          std::to_string(count) + " scenarios, max mismatch " + fmt(worst) + (slow.empty() ? "" : ", over 1 s:" + slow)};
}

// 3. Rate suite on the generic pair.
Verdict rate_suite_slopes() {
  const Scenario s = scenario("generic_warped_pair");
  RateGrid grid;
  grid.xs = s.h1->cross_section().grid(s.lemmas.rate_grid);
  const std::vector<double> ladder{0.1, 0.05, 0.025, 0.0125};
  const auto rows = rate_suite(*s.h1, *s.h2, ladder, grid);
  bool ok = !rows.empty();
  std::ostringstream os;
  for (const RateReport& r : rows) {
    ok = ok && r.passed;
    os << r.quantity << " " << to_string(r.order) << " " << (r.slope ? fmt(*r.slope) : "vanishing") << "; ";
  }
  // Same spectrum against the leading term with 1/2eps instead of 1/4eps, for the record.
  std::vector<double> dev;
  for (double eps : ladder) {
    const RicciStructure q = ricci_structure_check(*s.h1, *s.h2, eps, grid.xs);
    double d = 0.0;
    for (int i = 0; i < q.predicted.size(); ++i) {
      d = std::max(d, std::abs(q.eigenvalues(i) / (4.0 * eps) - q.predicted(i) / (2.0 * eps)));
    }
    dev.push_back(d);
  }
  const auto half = fit_log_slope(ladder, dev);
  os << "[with 1/2eps leading term the spectrum deviation slope would be " << (half ? fmt(*half) : "n/a") << "]";
  return {ok, os.str()};
}

// 4. Gauss formula on 100 tangential planes per scenario.
Verdict gauss_consistency() {
  double residual = 0.0, order = INFINITY;
  std::size_t count = 0;
  for (const Scenario& s : shipped()) {
    const GaussReport g = gauss_check(SplineFamily(*s.h1, *s.h2, s.params.eps), 100);
    if (g.planes != 100) return {false, s.name + ": only " + std::to_string(g.planes) + " planes"};
    residual = std::max(residual, g.max_residual);
    order = std::min(order, g.order);
    ++count;
  }
  return {residual <= 1e-6 && order >= 1.9,
          std::to_string(count) + " scenarios, max residual " + fmt(residual) + ", min order " + fmt(order)};
}

// 5. Convexity kernel on every strict-boundary scenario.
Verdict convexity_kernel() {
  double worst = INFINITY;
  std::size_t count = 0, pairs = 0;
  for (const Scenario& s : shipped()) {
    const std::vector<Vec> xs = s.h1->cross_section().grid(s.lemmas.rate_grid);
    if (!boundary_condition_check(*s.h1, *s.h2, s.mode, s.k, xs).satisfied) continue;
    const int per_x = static_cast<int>((1000 + xs.size() - 1) / xs.size());
    const ConvexityReport c = convexity_kernel_check(*s.h1, *s.h2, s.params.eps, xs, per_x);
    if (!c.applicable) continue;
    worst = std::min(worst, c.min_second_difference);
    pairs = std::max(pairs, c.pairs);
    ++count;
  }
  return {count > 0 && worst >= -1e-12,
          std::to_string(count) + " scenarios, >= " + std::to_string(pairs) + " pairs each, min second difference " +
              fmt(worst)};
}

// 6. Sum of the k smallest eigenvalues against traces over random orthonormal k-frames.
Verdict k_positivity_oracle() {
  testing::Rng rng(606);
  constexpr int n = 5;
  double worst_gap = INFINITY, worst_equality = 0.0;
  for (int op = 0; op < 100; ++op) {
    const Mat a = rng.symmetric(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    std::array<double, n + 1> eigensum{};
    for (int k = 1; k <= n; ++k) {
      eigensum[k] = k_positive_sum(a, k);
      const Mat frame = es.eigenvectors().leftCols(k);
      worst_equality = std::max(worst_equality, std::abs((frame.transpose() * a * frame).trace() - eigensum[k]));
    }
    for (int f = 0; f < 10000; ++f) {
      Mat g(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
      const Mat q = Eigen::HouseholderQR<Mat>(g).householderQ();
      const Mat aq = q.transpose() * a * q;
      double trace = 0.0;
      for (int k = 1; k <= n; ++k) {
        trace += aq(k - 1, k - 1);
        worst_gap = std::min(worst_gap, trace - eigensum[k]);
      }
    }
  }
  return {worst_gap >= -1e-12 && worst_equality <= 1e-10,
          "min(frame trace - eigensum) " + fmt(worst_gap) + ", eigenvector equality " + fmt(worst_equality)};
}

// 7. Hemisphere double: certified smooth metric with K > 0, stable under grid doubling.
Verdict hemisphere_double() {
  const Scenario s = scenario("hemisphere_double");
  const SearchOutcome o = epsilon_nu_search(*s.h1, *s.h2, CurvatureMode::RicK, 1, 0.0, s.params, s.schedule);
  if (o.status != SearchStatus::Certified) return {false, "search inconclusive: " + o.reason};
  const CurvatureCertificate& c = *o.smooth_certificate;
  const CurvatureCertificate fine = certify(*o.chart, CurvatureMode::RicK, 1, 0.0, s.plan.doubled());
  const double change = std::abs(fine.margin() - c.margin()) / c.margin();
  return {c.passed && c.min_value > 0.0 && fine.passed && change < 0.2,
          "eps " + fmt(o.params.eps) + ", nu " + fmt(o.params.nu) + ", min K " + fmt(c.min_value) + " on " +
              std::to_string(c.points) + " points, doubled grid " + fmt(fine.min_value) + " (change " +
              fmt(100 * change) + "%)"};
}

// 8. The same caps with kappa = 0.5 (certifies) and kappa = 2 (must not).
Verdict kappa_variants() {
  const Scenario s = scenario("hemisphere_double");
  const SearchOutcome half = epsilon_nu_search(*s.h1, *s.h2, CurvatureMode::RicK, 1, 0.5, s.params, s.schedule);
  const SearchOutcome two = epsilon_nu_search(*s.h1, *s.h2, CurvatureMode::RicK, 1, 2.0, s.params, s.schedule);
  const bool half_ok = half.status == SearchStatus::Certified && half.smooth_certificate->min_value > 0.5;
  const bool two_ok = two.status != SearchStatus::Certified;
  return {half_ok && two_ok,
          "kappa 0.5: " + std::string(to_string(half.status)) +
              (half.smooth_certificate ? " (min " + fmt(half.smooth_certificate->min_value) + ")" : "") +
              "; kappa 2: " + std::string(to_string(two.status))};
}

// 9. Mirror doubles: the smoothed metric is even in t and t = 0 is totally geodesic.
Verdict totally_geodesic() {
  double sym = 0.0, second = 0.0;
  std::size_t count = 0;
  for (const Scenario& s : shipped()) {
    if (!s.mirror || !boundary_condition_check(*s.h1, *s.h2, s.mode, s.k, s.h1->cross_section().grid(2)).satisfied)
      continue;
    const std::vector<Vec> xs = s.h1->cross_section().grid(s.schedule.smoothing_grid);
    const GluedChart g = assemble_glued(*s.h1, *s.h2, s.params, xs);
    const SmoothedGlued sm = smooth_glued(g, s.params.nu, s.params.mu, xs);
    const TotallyGeodesicReport r = totally_geodesic_check(sm.chart, *s.h1, *s.h2, xs);
    sym = std::max(sym, r.symmetry_residual);
    second = std::max(second, r.second_fundamental_form);
    ++count;
    if (count == 2) break;  // one round and one flat cross-section are enough for the time budget
  }
  return {count > 0 && sym <= 1e-10 && second <= 1e-8,
          std::to_string(count) + " mirror doubles, symmetry " + fmt(sym) + ", |II(0)| " + fmt(second)};
}

// 10. Canonical scalar instance f = 0, g = t^2.
Verdict smoothing_contract() {
  PiecewiseC1Scalar h{Profile::constant(0.0), Profile::polynomial({0.0, 0.0, 1.0})};
  const MollifiedScalar m = mollify_c1(h, 0.1, 0.01);
  double c1 = 0.0, lo = INFINITY, hi = -INFINITY;
  for (double t : linspace(-0.1, 0.1, 20001)) {
    const Jet1D a = m(t), b = h(t);
    c1 = std::max({c1, std::abs(a.value - b.value), std::abs(a.d1 - b.d1)});
    lo = std::min(lo, a.d2);
    hi = std::max(hi, a.d2);
  }
  return {c1 <= 0.01 && lo >= -0.01 && hi <= 2.01,
          "C^1 distance " + fmt(c1) + ", band second derivative in [" + fmt(lo) + ", " + fmt(hi) + "]"};
}

// 11. Eigenvalues of 2 eps Ric at t = 0 against the predicted diagonal, eps = 1e-3.
Verdict ricci_structure() {
  const Scenario s = scenario("generic_warped_pair");
  const std::vector<Vec> xs = s.h1->cross_section().grid(s.lemmas.rate_grid);
  const RicciStructure q = ricci_structure_check(*s.h1, *s.h2, 1e-3, xs);
  double two_eps = 0.0;
  for (int i = 0; i < q.predicted.size(); ++i) {
    two_eps = std::max(two_eps, std::abs(0.5 * q.eigenvalues(i) - q.predicted(i)) / std::abs(q.predicted(i)));
  }
  return {two_eps <= 0.1, "2 eps Ric deviation " + fmt(100 * two_eps) + "% (4 eps Ric deviation " +
                              fmt(100 * q.max_relative_deviation) + "%)"};
}

// 12. Almost non-negative Ricci on the cone double, and the S^4 diameter.
Verdict almost_nonneg() {
  const Scenario s = scenario("cylinder_double");
  const AlmostNonnegReport a = almost_nonneg_check(*s.h1, *s.h2, CurvatureMode::RicK, s.h1->dim() - 1, 0.1,
                                                   s.params, s.schedule, s.lemmas.diameter_resolution);
  const DiameterEstimate d = diameter_estimate(round_sphere_chart(4), kDefaultDiameterResolution);
  const bool diam_ok = std::abs(d.value - std::numbers::pi) <= 0.1 * std::numbers::pi;
  std::string detail = "almost_nonneg " + std::string(to_string(a.status));
  if (a.status == SearchStatus::Certified) {
    detail += " (min Ric_" + std::to_string(s.h1->dim() - 1) + " * diam^2 = " + fmt(a.scaled) + ")";
  } else {
    detail += " (" + a.reason + ")";
  }
  detail += "; S^4 diameter " + fmt(d.value) + " at resolution " + std::to_string(d.resolution);
  return {a.passed && diam_ok, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "spline exactness on product collars", 1.0, spline_exactness},
      {2, "C^1 interface in every shipped scenario", 1e9, c1_interface},
      {3, "rate suite slopes", 60.0, rate_suite_slopes},
      {4, "Gauss consistency", 60.0, gauss_consistency},
      {5, "convexity kernel", 10.0, convexity_kernel},
      {6, "k-positivity oracle", 30.0, k_positivity_oracle},
      {7, "hemisphere double, K > 0", 600.0, hemisphere_double},
      {8, "hemisphere double, kappa = 0.5 and 2", 600.0, kappa_variants},
      {9, "mirror double totally geodesic", 60.0, totally_geodesic},
      {10, "scalar smoothing contract", 1.0, smoothing_contract},
      {11, "Ricci structure at eps = 1e-3", 60.0, ricci_structure},
      {12, "almost non-negative Ricci and S^4 diameter", 300.0, almost_nonneg},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = sec < c.limit_seconds;
    const bool ok = v.passed && in_time;
    failures += ok ? 0 : 1;
    std::cout << (ok ? "PASS" : "FAIL") << "  " << std::setw(2) << c.id << "  " << c.title << "  ["
              << std::fixed << std::setprecision(2) << sec << " s" << (in_time ? "" : ", over time limit")
              << "]  " << v.detail << std::endl;
    std::cout.unsetf(std::ios::fixed);
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
