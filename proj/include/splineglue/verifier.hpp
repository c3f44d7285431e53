#pragma once

#include <optional>
#include <string>
#include <vector>

#include "splineglue/curvature.hpp"
#include "splineglue/gluing.hpp"
#include "splineglue/rates.hpp"
#include "splineglue/sampling.hpp"
#include "splineglue/smoothing.hpp"

namespace splineglue {

struct RegionMinimum {
  Region region;
  Interval t;
  std::size_t points = 0;
  CurvatureWitness witness;
};

struct CurvatureCertificate {
  CurvatureMode mode = CurvatureMode::RicK;
  int k = 1;
  double kappa = 0.0;
  double min_value = 0.0;
  CurvatureWitness witness;
  Region witness_region = Region::H1;
  SamplingPlan plan;
  std::size_t points = 0;
  std::vector<RegionMinimum> regions;
  bool passed = false;

  double margin() const { return min_value - kappa; }
};

/// Grid certification of Ric_k > kappa (RicK) or Sc_k > kappa (ScK).
///
/// Each region is sampled on its closed t-interval with its own one-sided
/// jet, so C^1 charts see both limits at +-eps. Smoothing bands get extra
/// t-nodes within three mollifier radii of their centre. The overall minimum
/// is the first minimal region in t order.
/// InvalidInput if k is out of range for the mode.
CurvatureCertificate certify(const GluedChart& chart, CurvatureMode mode, int k, double kappa,
                             const SamplingPlan& plan);

/// Curvature functional at the certificate's witness, recomputed from scratch.
double reevaluate_witness(const GluedChart& chart, const CurvatureCertificate& cert);

/// The chart restricted to one region, evaluated with that region's jet.
CollarChart region_chart(const GluedChart& chart, std::size_t region);

struct SearchSchedule {
  double eps_max = 0.0;  // 0: min(depth / 2, depth - iota) over both collars
  double eps_min = 1e-3;
  double nu_min = 1e-5;
  /// Cross-section nodes per axis used to validate the smoothing bands.
  int smoothing_grid = 3;
  SamplingPlan plan;
};

struct SearchAttempt {
  std::string stage;  // "c1" or "smooth"
  double eps = 0.0;
  double nu = 0.0;
  double mu = 0.0;
  bool passed = false;
  double min_value = 0.0;
  std::string note;
};

enum class SearchStatus { Certified, Inconclusive };
std::string_view to_string(SearchStatus s);

struct SearchOutcome {
  SearchStatus status = SearchStatus::Inconclusive;
  std::string reason;
  GluingParams params;
  BoundaryCheck boundary;
  std::vector<SearchAttempt> trace;
  std::optional<CurvatureCertificate> c1_certificate;
  std::optional<CurvatureCertificate> smooth_certificate;
  std::optional<SmoothingReport> smoothing;
  std::optional<GluedChart> chart;  // the certified smooth chart
};

/// Halves eps from the schedule's eps_max until the C^1 chart certifies,
/// then halves nu from min(eps, iota) / 2 until the smoothed chart does.
/// The C^1 budget shrinks with the band, mu = base.mu * nu / nu_0, so the
/// smoothed metric converges to the certified C^1 one as nu -> 0.
/// Inconclusive (never an error) when the boundary condition is not strict
/// or a floor is reached. `base` supplies iota and mu; the cross-section
/// samples' density is taken from the schedule.
SearchOutcome epsilon_nu_search(const CollarMetric& h1, const CollarMetric& h2, CurvatureMode mode,
                                int k, double kappa, const GluingParams& base,
                                const SearchSchedule& schedule);

struct GaussReport {
  std::size_t planes = 0;
  std::size_t degenerate = 0;
  double step = 0.0;
  double max_residual = 0.0;
  /// Plain central differences at coarse_step and coarse_step / 2.
  double coarse_step = 0.0;
  double coarse_residual = 0.0;
  double fine_residual = 0.0;
  double order = 0.0;  // infinite when the coarse residual is at rounding level (<= 1e-10)
};

/// Ambient K(u, v) of tangential planes, from finite differences of the
/// spline chart's metric, against K_t(u, v) - phi_t / psi_t with
/// phi_t = g'(u,u) g'(v,v) - g'(u,v)^2 and psi_t = 4 (g(u,u) g(v,v) - g(u,v)^2),
/// K_t the intrinsic curvature of the slice. Planes are deterministic
/// samples of (x, t, u, v); degenerate ones are skipped.
GaussReport gauss_check(const SplineFamily& f, int planes, double step = kDefaultFdStep,
                        double coarse_step = 1e-2);

struct ConvexityReport {
  std::size_t pairs = 0;
  double min_second_difference = 0.0;
  bool applicable = false;  // h1'(0) - h2'(0) positive definite on xs
};

/// t -> det of the 2x2 restriction of ((eps-t)/2eps) h1'(0) + ((eps+t)/2eps) h2'(0)
/// to span{u, v}: smallest second difference over t-nodes and sampled pairs.
ConvexityReport convexity_kernel_check(const CollarMetric& h1, const CollarMetric& h2, double eps,
                                       const std::vector<Vec>& xs, int pairs);

struct InterpolationReport {
  int k = 1;
  std::vector<double> eps;
  std::vector<double> min_gap;    // min of LHS - RHS
  std::vector<double> violation;  // max(0, -min_gap)
  std::optional<double> slope;    // log-log fit of the violation
  bool passed = false;
};

/// LHS = sum_i K_g(v, e^i) in the spline, RHS = the convex combination of
/// the same sums for h1 and h2 at t = 0, over sampled h(0)-orthonormal frames
/// (v, e^1..e^k) of the cross-section. Passes when the violation is zero or
/// vanishes at fitted order >= 0.8.
InterpolationReport interpolation_bound_check(const SplineFamily& f, int k, int frames,
                                              const std::vector<double>& eps_list,
                                              const std::vector<Vec>& xs, int t_nodes = 11);

struct EtaReport {
  std::vector<double> eps;
  std::vector<double> eta;
  std::optional<double> slope;
  bool passed = false;
};

/// eta(eps): largest deviation from the identity of the h1(0)-Gram matrix of
/// sampled g_t-orthonormal frames, t in [-eps, eps]. Passes when eta is zero
/// or decays at fitted order >= 0.8.
EtaReport eta_frame_report(const SplineFamily& f, const std::vector<double>& eps_list,
                           const std::vector<Vec>& xs, int frames, int t_nodes = 11);

struct TotallyGeodesicReport {
  bool mirror_pair = false;
  double symmetry_residual = 0.0;           // max |g(x,t) - g(x,-t)|
  double second_fundamental_form = 0.0;     // max |1/2 g'(x,0)|
  bool passed = false;
  std::string note;
};

/// For a mirror pair the glued metric must be even in t, so the slice t = 0
/// is totally geodesic.
TotallyGeodesicReport totally_geodesic_check(const GluedChart& chart, const CollarMetric& h1,
                                             const CollarMetric& h2, const std::vector<Vec>& xs,
                                             int t_nodes = 201);

struct AlmostNonnegReport {
  double delta = 0.0;
  double initial_diameter = 0.0;
  double kappa = 0.0;
  SearchStatus status = SearchStatus::Inconclusive;
  std::string reason;
  double min_value = 0.0;
  double diameter = 0.0;
  int diameter_resolution = 0;
  double scaled = 0.0;  // min_value * diameter^2
  bool passed = false;
  std::optional<SearchOutcome> search;
};

/// Runs the search at kappa = -delta / (2 d^2), d the diameter estimate of the
/// C^1 glued metric at the largest eps, and checks min * diam^2 >= -delta on
/// the certified metric. InvalidInput unless delta > 0.
AlmostNonnegReport almost_nonneg_check(const CollarMetric& h1, const CollarMetric& h2,
                                       CurvatureMode mode, int k, double delta,
                                       const GluingParams& base, const SearchSchedule& schedule,
                                       int diameter_resolution);

}  // namespace splineglue
