#include "doctest.h"

#include <algorithm>

#include "splineglue/errors.hpp"
#include "splineglue/sampling.hpp"
#include "splineglue/verifier.hpp"
#include "support.hpp"

using namespace splineglue;

namespace {

GluingParams cap_params() {
  GluingParams p;
  p.eps = 0.2;
  p.iota = 0.4;
  p.nu = 0.05;
  p.mu = 0.01;
  return p;
}

SamplingPlan coarse_plan() {
  SamplingPlan plan;
  plan.grid_per_axis = 3;
  plan.t_nodes = 11;
  plan.directions = 60;
  return plan;
}

}  // namespace

TEST_CASE("certificate on the C^1 cap double") {
  const CollarMetric cap = testing::round_cap();
  const SamplingPlan plan = coarse_plan();
  const GluedChart g = assemble_glued(cap, mirror_collar(cap), cap_params(), cap.cross_section().grid(3));
  const CurvatureCertificate c = certify(g, CurvatureMode::RicK, 1, 0.0, plan);
  CHECK(c.passed);
  CHECK(c.margin() > 0.0);
  // Round pieces have K = 1, and the spline only adds positive normal curvature here.
  CHECK(c.min_value <= 1.0 + 1e-9);

  SUBCASE("the minimum is the minimum of the region minima") {
    double m = INFINITY;
    std::size_t points = 0;
    for (const RegionMinimum& r : c.regions) {
      m = std::min(m, r.witness.value);
      points += r.points;
    }
    CHECK(c.min_value == m);
    CHECK(c.points == points);
  }
  SUBCASE("the witness re-evaluates to the certified value") {
    CHECK(reevaluate_witness(g, c) == doctest::Approx(c.min_value).epsilon(1e-12));
  }
  SUBCASE("certification is deterministic") {
    const CurvatureCertificate again = certify(g, CurvatureMode::RicK, 1, 0.0, plan);
    CHECK(again.min_value == c.min_value);
    CHECK(again.witness.point.t == c.witness.point.t);
  }
  SUBCASE("raising kappa above the minimum fails with the same minimum") {
    const CurvatureCertificate high = certify(g, CurvatureMode::RicK, 1, 2.0, plan);
    CHECK_FALSE(high.passed);
    CHECK(high.min_value == c.min_value);
  }
}

TEST_CASE("search trace is monotone in kappa") {
  const CollarMetric cap = testing::round_cap();
  SearchSchedule schedule;
  schedule.plan = coarse_plan();
  const SearchOutcome lo = epsilon_nu_search(cap, mirror_collar(cap), CurvatureMode::RicK, 1, -0.5,
                                             cap_params(), schedule);
  const SearchOutcome zero = epsilon_nu_search(cap, mirror_collar(cap), CurvatureMode::RicK, 1, 0.0,
                                               cap_params(), schedule);
  REQUIRE(lo.status == SearchStatus::Certified);
  REQUIRE(zero.status == SearchStatus::Certified);
  // The lower floor never needs a smaller eps or nu.
  CHECK(lo.params.eps >= zero.params.eps);
  CHECK(lo.params.nu >= zero.params.nu);
  // Attempts at the same parameters see the same curvature; only the verdict moves.
  for (const SearchAttempt& a : lo.trace) {
    for (const SearchAttempt& b : zero.trace) {
      if (a.stage == b.stage && a.eps == b.eps && a.nu == b.nu) {
        CHECK(a.min_value == b.min_value);
        CHECK(a.passed >= b.passed);
      }
    }
  }
  CHECK(zero.smooth_certificate->min_value > 0.0);
  CHECK(zero.smoothing->c1_distance <= zero.params.mu);
}

TEST_CASE("search is inconclusive without a strict boundary") {
  const CollarMetric flat = make_diagonal_torus(testing::repeated(Profile::constant(1.0), 3), {-1.0, 0.0});
  GluingParams p = cap_params();
  const SearchOutcome o =
      epsilon_nu_search(flat, mirror_collar(flat), CurvatureMode::RicK, 1, 0.0, p, SearchSchedule{});
  CHECK(o.status == SearchStatus::Inconclusive);
  CHECK(o.trace.empty());
  CHECK(o.reason.find("boundary") != std::string::npos);
}

TEST_CASE("Gauss formula residual and order on the generic pair") {
  const auto [h1, h2] = testing::generic_pair();
  const GaussReport g = gauss_check(SplineFamily(h1, h2, 0.05), 100);
  CHECK(g.planes == 100);
  CHECK(g.max_residual <= 1e-6);
  CHECK(g.order >= 1.9);
}

TEST_CASE("convexity kernel") {
  const auto [h1, h2] = testing::generic_pair();
  const std::vector<Vec> xs = h1.cross_section().grid(2);
  const ConvexityReport c = convexity_kernel_check(h1, h2, 0.05, xs, 125);
  CHECK(c.applicable);
  CHECK(c.pairs == 1000);
  CHECK(c.min_second_difference >= -1e-12);

  const CollarMetric flat = make_diagonal_torus(testing::repeated(Profile::constant(1.0), 3), {-1.0, 0.0});
  CHECK_FALSE(convexity_kernel_check(flat, mirror_collar(flat), 0.05, flat.cross_section().grid(2), 10).applicable);
}

TEST_CASE("eta and interpolation reports on the generic pair") {
  const auto [h1, h2] = testing::generic_pair();
  const SplineFamily f(h1, h2, 0.1);
  const std::vector<double> ladder{0.1, 0.05, 0.025, 0.0125};
  const std::vector<Vec> xs = h1.cross_section().grid(2);
  const EtaReport e = eta_frame_report(f, ladder, xs, 20);
  CHECK(e.passed);
  REQUIRE(e.slope);
  CHECK(*e.slope >= 0.8);
  CHECK(std::is_sorted(e.eta.rbegin(), e.eta.rend()));
  const InterpolationReport i = interpolation_bound_check(f, 1, 20, ladder, xs);
  CHECK(i.passed);
  CHECK(i.eps == ladder);
}

TEST_CASE("totally geodesic middle slice of a mirror double") {
  const CollarMetric cap = testing::round_cap();
  const CollarMetric twin = mirror_collar(cap);
  const GluingParams p = cap_params();
  const std::vector<Vec> xs = cap.cross_section().grid(2);
  const SmoothedGlued s = smooth_glued(assemble_glued(cap, twin, p, xs), p.nu, p.mu, xs);
  const TotallyGeodesicReport r = totally_geodesic_check(s.chart, cap, twin, xs);
  CHECK(r.mirror_pair);
  CHECK(r.symmetry_residual <= 1e-10);
  CHECK(r.second_fundamental_form <= 1e-8);
  CHECK(r.passed);

  const auto [h1, h2] = testing::generic_pair();
  GluingParams q = p;
  q.eps = 0.05;
  q.iota = 0.2;
  q.nu = 0.01;
  const GluedChart g = assemble_glued(h1, h2, q, xs);
  const TotallyGeodesicReport n = totally_geodesic_check(g, h1, h2, xs);
  CHECK_FALSE(n.mirror_pair);
  CHECK_FALSE(n.passed);
}

TEST_CASE("Sc_k and Ric_k argument contracts") {
  const CollarMetric cap = testing::round_cap();
  const GluedChart g = assemble_glued(cap, mirror_collar(cap), cap_params(), cap.cross_section().grid(2));
  CHECK_THROWS_AS(certify(g, CurvatureMode::RicK, 4, 0.0, coarse_plan()), Error);
  CHECK_THROWS_AS(certify(g, CurvatureMode::ScK, 0, 0.0, coarse_plan()), Error);
}
