#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splineglue/collar.hpp"
#include "splineglue/gluing.hpp"

namespace splineglue {

/// Least-squares slope of log(y) against log(x); empty when fewer than two
/// points or any y is not positive.
std::optional<double> fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

enum class RateOrder { Linear, Bounded };  // O(eps), O(1)
std::string_view to_string(RateOrder o);

struct RateReport {
  std::string quantity;
  RateOrder order = RateOrder::Linear;
  std::vector<double> eps;
  std::vector<double> deviation;
  /// log-log slope; empty when every deviation is at rounding level (<= 1e-10)
  std::optional<double> slope;
  bool passed = false;
};

struct RateGrid {
  std::vector<Vec> xs;
  int t_nodes = 11;
  int directions = 16;  // sampled cross-section directions u
};

/// Asymptotics of the spline in eps, each as a max over the grid:
///   metric            |g_t - h(0)|                              O(eps)
///   first_derivative  |g_t' - linear interpolation of h_i'(0)|  O(eps)
///   second_derivative |g_t'' - (h2'(0) - h1'(0)) / 2eps|        O(1)
///   slice_curvature   |K_t(u,v) - K_h(0)(u,v)|                  O(eps)
///   normal_curvature  |K(u,dt) - D(u,u) / 4eps h(0)(u,u)|       O(1)
///   ricci_spectrum    |eig Ric - predicted / 4eps|              O(1)
///   ricci_mixed       |Ric(u, dt)| for h(0)-unit u              O(1)
/// with D = h1'(0) - h2'(0) and the predicted spectrum (tr D, eig D)
/// relative to h(0). O(eps) rows pass with slope in [0.8, 1.2], O(1) rows
/// with |slope| <= 0.2; rows at rounding level pass with no slope.
std::vector<RateReport> rate_suite(const CollarMetric& h1, const CollarMetric& h2,
                                   const std::vector<double>& eps_list, const RateGrid& grid);

struct RicciStructure {
  double eps = 0.0;
  Vec x;
  Vec eigenvalues;  // of 4 eps Ric at t = 0, ascending
  Vec predicted;    // (tr D, eigenvalues of D), ascending, relative to h(0)
  double max_relative_deviation = 0.0;
  bool passed = false;
};

/// Spectrum of 4 eps Ric at t = 0 against the predicted diagonal; the worst
/// node of xs is returned. Passes when every eigenvalue is within
/// `tolerance` (relative) of its prediction.
RicciStructure ricci_structure_check(const CollarMetric& h1, const CollarMetric& h2, double eps,
                                     const std::vector<Vec>& xs, double tolerance = 0.1);

/// Predicted spectrum (tr D, eig D) of D = h1'(0) - h2'(0) relative to h(0), ascending.
Vec predicted_ricci_spectrum(const CollarMetric& h1, const CollarMetric& h2, const Vec& x);

}  // namespace splineglue
