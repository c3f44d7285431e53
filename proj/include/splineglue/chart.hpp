#pragma once

#include <functional>
#include <string>
#include <vector>

#include "splineglue/collar.hpp"
#include "splineglue/linalg.hpp"

namespace splineglue {

/// A point (x_1, ..., x_{n-1}, t). Full coordinate vectors put t last.
struct Point {
  Vec x;
  double t = 0.0;

  int dim() const { return static_cast<int>(x.size()) + 1; }
  Vec coords() const;
  static Point from_coords(const Vec& c);
};

/// Metric and its coordinate derivatives at one point:
/// dg[a] = d_a g, ddg[a*n + b] = d_a d_b g.
struct MetricJet {
  Mat g;
  std::vector<Mat> dg;
  std::vector<Mat> ddg;

  int dim() const { return static_cast<int>(g.rows()); }
  const Mat& dd(int a, int b) const { return ddg[static_cast<std::size_t>(a) * dim() + b]; }
};

/// Ambient jet of dt^2 + h(t) built from the collar jet of h.
MetricJet collar_metric_jet(const CollarJet& h);
/// Intrinsic jet of the slice metric h(t) on X (x-derivatives only).
MetricJet slice_metric_jet(const CollarJet& h);

struct Domain {
  Vec lo, hi;
  std::vector<bool> periodic;

  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const Vec& coords, double slack = 1e-9) const;
};

class Chart {
 public:
  virtual ~Chart() = default;
  int dim() const { return domain_.dim(); }
  const Domain& domain() const { return domain_; }
  const std::string& description() const { return description_; }

  /// Metric jet at p. Does not check the domain (finite differences probe
  /// slightly past the edges); use evaluate_metric for checked access.
  virtual MetricJet jet(const Point& p) const = 0;
  virtual Mat metric(const Point& p) const { return jet(p).g; }

 protected:
  Chart(Domain domain, std::string description)
      : domain_(std::move(domain)), description_(std::move(description)) {}

 private:
  Domain domain_;
  std::string description_;
};

using SliceJetFn = std::function<CollarJet(const Vec& x, double t)>;

/// Chart carrying dt^2 + h(x, t); (t, t) entry is exactly 1, (t, x_j) exactly 0.
class CollarChart : public Chart {
 public:
  CollarChart(CrossSection section, Interval t_range, SliceJetFn fn, std::string description,
              bool t_periodic = false);

  const CrossSection& cross_section() const { return section_; }
  const Interval& t_range() const { return t_range_; }
  virtual CollarJet slice_jet(const Vec& x, double t) const { return fn_(x, t); }

  MetricJet jet(const Point& p) const override;
  Mat metric(const Point& p) const override;

 private:
  CrossSection section_;
  Interval t_range_;
  SliceJetFn fn_;
};

using MetricFn = std::function<Mat(const Vec& coords)>;

/// Central-difference jet with one Richardson level (step, step / 2).
MetricJet finite_difference_jet(const MetricFn& metric, const Vec& coords, double step,
                                bool richardson = true);

// With one Richardson level the truncation error is O(h^4) and rounding in
// the second differences grows like 1/h^2; 1e-3 sits near the balance.
inline constexpr double kDefaultFdStep = 1e-3;

/// Chart known only through metric values; derivatives by finite differences.
class MetricOnlyChart : public Chart {
 public:
  MetricOnlyChart(Domain domain, MetricFn fn, std::string description,
                  double step = kDefaultFdStep, bool richardson = true);

  MetricJet jet(const Point& p) const override;
  Mat metric(const Point& p) const override;
  double step() const { return step_; }

 private:
  MetricFn fn_;
  double step_;
  bool richardson_;
};

/// Same metric as `chart`, with every derivative recomputed by finite differences.
MetricOnlyChart finite_difference_view(const Chart& chart, double step = kDefaultFdStep,
                                       bool richardson = true);

CollarChart collar_chart(const CollarMetric& c);
/// Unit S^n as dt^2 + sin(t)^2 ds^2_{n-1}, t in [margin, pi - margin].
CollarChart round_sphere_chart(int n, double margin = 0.1);
/// R^n / Z^n with the flat metric; every coordinate periodic.
CollarChart flat_torus_chart(int n);

/// Checked evaluation: OutOfDomain, NotPositiveDefinite, DimensionMismatch.
Mat evaluate_metric(const Chart& chart, const Point& p);

/// Throws NotPositiveDefinite (with `where` in the message) unless Cholesky succeeds.
void require_positive_definite(const Mat& g, const std::string& where);

}  // namespace splineglue
