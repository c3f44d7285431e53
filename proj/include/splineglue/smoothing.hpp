#pragma once

#include <limits>
#include <vector>

#include "splineglue/chart.hpp"
#include "splineglue/gluing.hpp"
#include "splineglue/profile.hpp"

namespace splineglue {

/// h = left on t <= junction, right on t > junction; both pieces smooth on
/// `domain`, glued C^1 at the junction.
struct PiecewiseC1Scalar {
  Profile left;
  Profile right;
  double junction = 0.0;
  Interval domain{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};

  Jet1D operator()(double t) const { return t <= junction ? left(t) : right(t); }
  /// max(|f - g|, |f' - g'|) at the junction.
  double c1_mismatch() const;
};

/// Normalized bump exp(-1 / (1 - u^2)) on [-1, 1].
double bump_density(double u);

/// Composite 16-point Gauss-Legendre rule for the bump, taken in the
/// variable s = atanh(u) on [-3, 3]. When `split` (a kink of the integrand)
/// falls inside, the panels are divided between the two sides in proportion
/// to their length. Returns (node u, weight * density) pairs.
std::vector<std::pair<double, double>> bump_rule(double split, int panels);

/// One smoothing band around t0 of half-width nu.
///
/// With h the piecewise function, N = 1/2 sgn(t - t0) (right - left) carries
/// the kink; the output is h + chi (K_rho * N - N), chi a smooth cutoff equal
/// to 1 on |t - t0| <= nu/2 and 0 for |t - t0| >= nu. The convolution acts in
/// t only, so x-derivatives are smoothed by the same formula.
struct Band {
  double t0 = 0.0;
  double nu = 0.0;
  double rho = 0.0;
  SliceJetFn left;
  SliceJetFn right;
  int panels = 4;

  CollarJet piecewise(const Vec& x, double t) const;
  CollarJet evaluate(const Vec& x, double t) const;
};

/// Smooth cutoff chi(s) and its first two derivatives.
Jet1D band_cutoff(double s, double nu);

struct SmoothingReport {
  double nu = 0.0;
  double mu = 0.0;
  double radius = 0.0;
  int halvings = 0;
  double c1_distance = 0.0;
  /// Largest distance of a band second derivative outside
  /// [min(f''(t0-nu), g''(t0+nu)), max(...)], less the distance the
  /// unsmoothed piecewise function already has at the same node.
  double second_derivative_excess = 0.0;
  bool interval_ok = false;
  /// Largest output change when the quadrature is doubled.
  double quadrature_change = 0.0;
};

class MollifiedScalar {
 public:
  MollifiedScalar(PiecewiseC1Scalar h, Band band, SmoothingReport report);
  Jet1D operator()(double t) const;
  const SmoothingReport& report() const { return report_; }
  const Band& band() const { return band_; }
  const PiecewiseC1Scalar& original() const { return h_; }

 private:
  PiecewiseC1Scalar h_;
  Band band_;
  SmoothingReport report_;
};

/// Smooths h on [t0 - nu, t0 + nu]. The radius is halved from nu/4 until
/// the C^1 distance is <= mu and the band second derivative lies within mu
/// of the endpoint interval; BudgetInfeasible if that never happens.
/// InvalidInput if h is not C^1 at the junction; BandTooWide if the band
/// leaves the pieces' domain.
MollifiedScalar mollify_c1(const PiecewiseC1Scalar& h, double nu, double mu);

struct SmoothedGlued {
  GluedChart chart;
  SmoothingReport report;
};

/// Replaces the C^1 joins at t = -eps and t = eps by smoothing bands of
/// half-width nu with a common radius chosen so that the C^1 distance to the
/// input is <= mu on the validation nodes xs and the second-derivative
/// excess is <= mu. BandTooWide if nu >= min(eps, iota);
/// NotPositiveDefinite with witness if a smoothed metric loses definiteness.
SmoothedGlued smooth_glued(const GluedChart& glued, double nu, double mu,
                           const std::vector<Vec>& xs);

}  // namespace splineglue
