#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <string_view>
#include <vector>

#include "splineglue/chart.hpp"
#include "splineglue/collar.hpp"

namespace splineglue {

struct GluingParams {
  double eps = 0.05;    // spline half-width
  double iota = 0.1;    // collar depth kept beyond +-eps
  double nu = 0.005;    // smoothing half-width
  double mu = 1e-4;     // C^1 closeness budget
  double kappa = 0.0;   // curvature floor
  double delta = 0.1;   // almost-nonnegativity budget

  /// InvalidInput unless eps, iota, nu, mu, delta > 0; BandTooWide if nu >= min(eps, iota).
  void validate() const;
};

/// C^1 cubic interpolation g_t on [-eps, eps] between h1 (t <= 0) and h2
/// (t >= 0), matching value and first t-derivative at both ends.
///
/// Writing A = h1(-eps), B = h2(eps), A' = h1'(-eps), B' = h2'(eps) and
/// D = (B - A) / 2eps:
///   g   = (t+eps)/2eps B - (t-eps)/2eps A
///         + (t-eps)^2 (t+eps)/4eps^2 [A' - D] + (t+eps)^2 (t-eps)/4eps^2 [B' - D]
///   g'  = D + (2(t^2-eps^2) + (t-eps)^2)/4eps^2 [A' - D]
///           + (2(t^2-eps^2) + (t+eps)^2)/4eps^2 [B' - D]
///   g'' = 3t/2eps^2 [A' + B' - (B - A)/eps] + 1/2eps [B' - A']
/// x-derivatives use the same formulas on x-derivatives of the end data.
/// Evaluation is defined for every t (the cubic extends past the ends).
class SplineFamily {
 public:
  /// CollarTooShallow if h1 does not reach -eps or h2 does not reach eps;
  /// DimensionMismatch for different cross-sections; InvalidInput for eps <= 0.
  SplineFamily(CollarMetric h1, CollarMetric h2, double eps);

  double eps() const { return eps_; }
  const CollarMetric& h1() const { return h1_; }
  const CollarMetric& h2() const { return h2_; }
  const CrossSection& cross_section() const { return h1_.cross_section(); }
  int slice_dim() const { return h1_.slice_dim(); }

  CollarJet jet(const Vec& x, double t) const;
  SymForm value(const Vec& x, double t) const;
  SymForm d1(const Vec& x, double t) const;
  SymForm d2(const Vec& x, double t) const;

  /// ((eps-t)/2eps) h1'(0) + ((eps+t)/2eps) h2'(0)
  SymForm linear_d1(const Vec& x, double t) const;

 private:
  std::pair<const CollarJet&, const CollarJet&> end_jets(const Vec& x) const;

  CollarMetric h1_;
  CollarMetric h2_;
  double eps_;
  std::uint64_t id_;  // shared by copies, which hold the same data
};

/// II_t = -1/2 g_t'
SymForm second_fundamental_form(const SplineFamily& f, const Vec& x, double t);
SymForm second_fundamental_form(const CollarMetric& c, const Vec& x, double t);

/// Sampled Cholesky of g_t on xs times `t_nodes` nodes of [-eps, eps];
/// NotPositiveDefinite with the first failing (x, t) as witness.
void check_spline_positive(const SplineFamily& f, const std::vector<Vec>& xs, int t_nodes);

/// max over the samples of ||g'(x,t) - linear_d1(x,t)||.
double spline_d1_check(const SplineFamily& f, const std::vector<Vec>& xs, int t_nodes);

enum class CurvatureMode { RicK, ScK };
std::string_view to_string(CurvatureMode mode);
CurvatureMode curvature_mode_from_string(std::string_view s);

struct BoundaryCheck {
  bool satisfied = false;
  /// RicK: smallest coordinate eigenvalue of h1'(0) - h2'(0) over the samples.
  /// ScK: smallest sum of the k' smallest h(0)-relative eigenvalues.
  double margin = 0.0;
  /// Smallest h(0)-relative eigenvalue (chart independent), for reference.
  double relative_margin = 0.0;
  int k_effective = 0;
  Vec witness_x;
};

/// Strict check of the boundary hypothesis on the cross-section samples xs.
/// ScK uses k' = k for k <= n-2 and k' = k-1 for k in {n-1, n}.
BoundaryCheck boundary_condition_check(const CollarMetric& h1, const CollarMetric& h2,
                                       CurvatureMode mode, int k, const std::vector<Vec>& xs);

enum class Region { H1, BandLower, Spline, BandUpper, H2 };
std::string_view to_string(Region r);

struct RegionSpan {
  Region region;
  Interval t;
  SliceJetFn jet;
};

/// dt^2 + g(t) assembled from regions ordered along t. A region boundary
/// belongs to the region on its right; each region's own jet function stays
/// available for one-sided evaluation.
class GluedChart : public CollarChart {
 public:
  GluedChart(CrossSection section, std::vector<RegionSpan> regions, GluingParams params,
             bool smoothed, std::string description, double smoothing_radius = 0.0);

  CollarJet slice_jet(const Vec& x, double t) const override;

  const std::vector<RegionSpan>& regions() const { return regions_; }
  std::size_t region_index(double t) const;
  const GluingParams& params() const { return params_; }
  bool smoothed() const { return smoothed_; }
  /// Mollifier radius of the bands (0 for the C^1 chart).
  double smoothing_radius() const { return smoothing_radius_; }

 private:
  std::vector<RegionSpan> regions_;
  GluingParams params_;
  bool smoothed_;
  double smoothing_radius_;
};

/// Max |h1(x,0) - h2(x,0)| over xs, relative to max(1, |h1(x,0)|).
double boundary_mismatch(const CollarMetric& h1, const CollarMetric& h2,
                         const std::vector<Vec>& xs);

/// C^1 glued metric: dt^2 + h1 on [-eps-iota, -eps], the spline on
/// [-eps, eps], dt^2 + h2 on [eps, eps+iota]. Positivity of the spline is
/// checked on xs. CollarTooShallow if eps + iota exceeds a collar.
GluedChart assemble_glued(const CollarMetric& h1, const CollarMetric& h2, const GluingParams& params,
                          const std::vector<Vec>& xs, int t_nodes = 41);

}  // namespace splineglue
