#include "doctest.h"

#include <cmath>
#include <numbers>

#include "splineglue/chart.hpp"
#include "splineglue/diameter.hpp"
#include "splineglue/errors.hpp"

using namespace splineglue;

TEST_CASE("flat unit torus: farthest point is the cube centre") {
  const DiameterEstimate d = diameter_estimate(flat_torus_chart(3), 8);
  CHECK(d.value == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  CHECK(d.resolution == 8);
  CHECK(d.nodes == 512);
}

TEST_CASE("flat 2-torus diameter at several even resolutions") {
  for (int r : {4, 6, 10}) {
    CHECK(diameter_estimate(flat_torus_chart(2), r).value == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  }
}

TEST_CASE("round S^4 chart is within 10% of pi and stable under refinement") {
  const double coarse = diameter_estimate(round_sphere_chart(4), 8).value;
  CHECK(std::abs(coarse - std::numbers::pi) <= 0.1 * std::numbers::pi);
  const double fine = diameter_estimate(round_sphere_chart(4), 12).value;
  CHECK(std::abs(fine - std::numbers::pi) <= 0.1 * std::numbers::pi);
  CHECK(std::abs(fine - coarse) <= 0.01 * coarse);
}

TEST_CASE("scaling the metric scales the diameter") {
  // The flat torus of side 2: same lattice, all lengths doubled.
  const CollarChart unit = flat_torus_chart(2);
  const MetricOnlyChart doubled(unit.domain(), [&](const Vec& c) { return Mat(4.0 * unit.metric(Point::from_coords(c))); },
                                "doubled torus");
  CHECK(diameter_estimate(doubled, 6).value == doctest::Approx(2.0 * diameter_estimate(unit, 6).value));
}

TEST_CASE("diameter contracts") {
  CHECK_THROWS_AS(diameter_estimate(flat_torus_chart(2), 2), Error);
}
