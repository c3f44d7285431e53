#include "doctest.h"

#include <cmath>

#include "splineglue/errors.hpp"
#include "splineglue/rates.hpp"
#include "support.hpp"

using namespace splineglue;

TEST_CASE("log slope of exact power laws") {
  const std::vector<double> x{0.1, 0.05, 0.025, 0.0125};
  for (double p : {-1.0, 0.0, 1.0, 2.5}) {
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, p));
    REQUIRE(fit_log_slope(x, y));
    CHECK(*fit_log_slope(x, y) == doctest::Approx(p).epsilon(1e-12).scale(1.0));
  }
  CHECK_FALSE(fit_log_slope({0.1}, {1.0}));
  CHECK_FALSE(fit_log_slope({0.1, 0.2}, {1.0, 0.0}));
}

TEST_CASE("rate suite on the generic pair") {
  const auto [h1, h2] = testing::generic_pair();
  RateGrid grid;
  grid.xs = h1.cross_section().grid(2);
  const std::vector<RateReport> rows = rate_suite(h1, h2, {0.1, 0.05, 0.025, 0.0125}, grid);
  REQUIRE(rows.size() == 7);
  for (const RateReport& r : rows) {
    INFO(r.quantity);
    CHECK(r.passed);
    if (!r.slope) continue;
    if (r.order == RateOrder::Linear) {
      CHECK(*r.slope >= 0.8);
      CHECK(*r.slope <= 1.2);
    } else {
      CHECK(std::abs(*r.slope) <= 0.2);
    }
  }
}

TEST_CASE("predicted Ricci spectrum and the 4 eps scaling") {
  const auto [h1, h2] = testing::generic_pair();
  const Vec x = h1.cross_section().grid(2)[3];
  const Vec p = predicted_ricci_spectrum(h1, h2, x);
  // D = h1'(0) - h2'(0) = 2 sin(r) (cos(r) + sin(r)/2) S, so every relative eigenvalue is
  // 2 (cot(r) + 1/2) and the trace row is three times that.
  const double r = testing::kCapRadius;
  const double e = 2.0 * (std::cos(r) / std::sin(r) + 0.5);
  REQUIRE(p.size() == 4);
  for (int i = 0; i < 3; ++i) CHECK(p(i) == doctest::Approx(e));
  CHECK(p(3) == doctest::Approx(3.0 * e));

  const RicciStructure s = ricci_structure_check(h1, h2, 1e-3, {x});
  CHECK(s.passed);
  CHECK(s.max_relative_deviation <= 0.1);
  for (int i = 0; i < 4; ++i) CHECK(s.eigenvalues(i) == doctest::Approx(p(i)).epsilon(0.1));
}

TEST_CASE("rate suite contracts") {
  const auto [h1, h2] = testing::generic_pair();
  RateGrid grid;
  CHECK_THROWS_AS(rate_suite(h1, h2, {0.1, 0.05}, grid), Error);
  grid.xs = h1.cross_section().grid(1);
  CHECK_THROWS_AS(rate_suite(h1, h2, {}, grid), Error);
}
