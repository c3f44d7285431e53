#pragma once

#include <memory>
#include <string>
#include <vector>

#include "splineglue/linalg.hpp"
#include "splineglue/profile.hpp"

namespace splineglue {

enum class CrossSectionKind { Round, Flat };

/// Coordinates on the cross-section X.
///
/// Round: polar chart (theta_1, ..., theta_m) on the unit sphere S^m with
/// metric diag(1, sin^2 th_1, sin^2 th_1 sin^2 th_2, ...). The first m-1
/// angles are kept in [margin, pi - margin]; the last one is periodic.
/// Flat: periodic coordinates on the unit torus R^m / Z^m.
struct CrossSection {
  CrossSectionKind kind = CrossSectionKind::Round;
  int dim = 2;
  double pole_margin = 0.1;

  double lower(int i) const;
  double upper(int i) const;
  bool periodic(int i) const;
  /// Evenly spaced nodes with `per_axis` values per coordinate.
  std::vector<Vec> grid(int per_axis) const;

  bool operator==(const CrossSection&) const = default;
};

/// Round-sphere form S(x) and its x-derivatives; dx[i], dxx[i*m + j].
struct FormJet {
  Mat value;
  std::vector<Mat> dx;
  std::vector<Mat> dxx;
};

FormJet round_form_jet(const Vec& x);

/// Derivatives of a t-family of forms h(x, t) on the cross-section, as needed
/// for the curvature of dt^2 + h(t). Mixed index layout: dxx[i*m + j].
struct CollarJet {
  Mat value, dt, dtt;
  std::vector<Mat> dx, dxt, dxx, dxxt;

  static CollarJet zero(int m);
  int slice_dim() const { return static_cast<int>(value.rows()); }

  CollarJet& operator+=(const CollarJet& o);
  CollarJet& operator-=(const CollarJet& o);
  CollarJet& operator*=(double s);
  /// this += s * o
  CollarJet& axpy(double s, const CollarJet& o);
};

CollarJet operator+(CollarJet a, const CollarJet& b);
CollarJet operator-(CollarJet a, const CollarJet& b);
CollarJet operator*(double s, CollarJet a);

/// Largest absolute difference over every component of two jets.
double max_abs_difference(const CollarJet& a, const CollarJet& b);

enum class Side { Lower, Upper };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t, double slack = 0.0) const { return t >= lo - slack && t <= hi + slack; }
};

/// One-parameter family t -> h(t) of metrics on X with exact t-derivatives.
///
/// Stored as a separable sum h(x, t) = sum_r p_r(t) B_r(x), which covers
/// warped products over round spheres and diagonal torus collars. `Lower`
/// collars occupy t <= 0 (the first manifold), `Upper` collars t >= 0.
class CollarMetric {
 public:
  int dim() const { return section_.dim + 1; }
  int slice_dim() const { return section_.dim; }
  const CrossSection& cross_section() const { return section_; }
  Side side() const { return side_; }
  const Interval& interval() const { return interval_; }
  /// Distance the collar reaches into its own half-line.
  double depth() const;
  const std::string& description() const { return description_; }

  CollarJet jet(const Vec& x, double t) const;
  SymForm value(const Vec& x, double t) const;
  /// d/dt h
  SymForm d1(const Vec& x, double t) const;
  /// d^2/dt^2 h (analytic for every family built here)
  SymForm d2(const Vec& x, double t) const;

  friend CollarMetric make_warped_product(const Profile& phi, int n, Interval interval);
  friend CollarMetric make_warped_metric(const Profile& phi, int n, Interval interval);
  friend CollarMetric make_diagonal_torus(const std::vector<Profile>& a, Interval interval);
  friend CollarMetric mirror_collar(const CollarMetric& c);

 private:
  struct Term {
    Profile coefficient;  // p_r(t)
    int basis;            // -1: round form S(x); r >= 0: E_rr
  };

  CollarMetric(CrossSection section, Interval interval, std::vector<Term> terms,
               std::string description);

  CrossSection section_;
  Interval interval_;
  Side side_;
  std::vector<Term> terms_;
  std::string description_;
};

/// h(t) = phi(t)^2 * (round metric of S^{n-1}). Rejects n < 3 or phi <= 0.
/// Every collar interval must be [-d, 0] (first manifold) or [0, d].
CollarMetric make_warped_product(const Profile& phi, int n, Interval interval);

/// Same metric on any interval, for whole-manifold charts such as the round
/// sphere; the boundary-at-zero rule is not enforced.
CollarMetric make_warped_metric(const Profile& phi, int n, Interval interval);

/// h(t) = diag(a_1(t)^2, ..., a_{n-1}(t)^2) on the flat torus.
CollarMetric make_diagonal_torus(const std::vector<Profile>& a, Interval interval);

/// value'(x, t) = value(x, -t); the copy lives on the opposite half-line.
CollarMetric mirror_collar(const CollarMetric& c);

}  // namespace splineglue
