#include "splineglue/collar.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>

#include "splineglue/errors.hpp"

namespace splineglue {

double CrossSection::lower(int i) const {
  if (kind == CrossSectionKind::Flat) return 0.0;
  return i + 1 < dim ? pole_margin : 0.0;
}

double CrossSection::upper(int i) const {
  if (kind == CrossSectionKind::Flat) return 1.0;
  return i + 1 < dim ? std::numbers::pi - pole_margin : 2.0 * std::numbers::pi;
}

bool CrossSection::periodic(int i) const {
  return kind == CrossSectionKind::Flat || i + 1 == dim;
}

std::vector<Vec> CrossSection::grid(int per_axis) const {
  if (per_axis < 1) fail(ErrorKind::EmptySampling, "cross-section grid needs >= 1 node per axis");
  std::vector<double> axis_nodes(static_cast<std::size_t>(dim) * per_axis);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < per_axis; ++k) {
      double s;
      if (periodic(i)) {
        s = static_cast<double>(k) / per_axis;
      } else {
        s = per_axis == 1 ? 0.5 : static_cast<double>(k) / (per_axis - 1);
      }
      axis_nodes[static_cast<std::size_t>(i) * per_axis + k] = lower(i) + s * (upper(i) - lower(i));
    }
  }
  std::size_t total = 1;
  for (int i = 0; i < dim; ++i) total *= static_cast<std::size_t>(per_axis);
  std::vector<Vec> out;
  out.reserve(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    Vec x(dim);
    std::size_t rest = flat;
    for (int i = dim - 1; i >= 0; --i) {
      x(i) = axis_nodes[static_cast<std::size_t>(i) * per_axis + rest % per_axis];
      rest /= per_axis;
    }
    out.push_back(x);
  }
  return out;
}

FormJet round_form_jet(const Vec& x) {
  const int m = static_cast<int>(x.size());
  FormJet f;
  f.value = Mat::Zero(m, m);
  f.dx.assign(m, Mat::Zero(m, m));
  f.dxx.assign(static_cast<std::size_t>(m) * m, Mat::Zero(m, m));

  Vec cot(m), csc2(m);
  for (int i = 0; i < m; ++i) {
    const double s = std::sin(x(i));
    cot(i) = std::cos(x(i)) / s;
    csc2(i) = 1.0 / (s * s);
  }
  double s_j = 1.0;
  for (int j = 0; j < m; ++j) {
    f.value(j, j) = s_j;
    for (int i = 0; i < j; ++i) {
      f.dx[i](j, j) = 2.0 * cot(i) * s_j;
      for (int l = 0; l < j; ++l) {
        const double v = i == l ? s_j * (4.0 * cot(i) * cot(i) - 2.0 * csc2(i))
                                : s_j * 4.0 * cot(i) * cot(l);
        f.dxx[static_cast<std::size_t>(i) * m + l](j, j) = v;
      }
    }
    const double sj = std::sin(x(j));
    s_j *= sj * sj;
  }
  return f;
}

CollarJet CollarJet::zero(int m) {
  CollarJet j;
  j.value = j.dt = j.dtt = Mat::Zero(m, m);
  j.dx.assign(m, Mat::Zero(m, m));
  j.dxt = j.dx;
  j.dxx.assign(static_cast<std::size_t>(m) * m, Mat::Zero(m, m));
  j.dxxt = j.dxx;
  return j;
}

namespace {

template <class Op>
void for_each_component(CollarJet& a, const CollarJet& b, Op op) {
  op(a.value, b.value);
  op(a.dt, b.dt);
  op(a.dtt, b.dtt);
  for (std::size_t i = 0; i < a.dx.size(); ++i) {
    op(a.dx[i], b.dx[i]);
    op(a.dxt[i], b.dxt[i]);
  }
  for (std::size_t i = 0; i < a.dxx.size(); ++i) {
    op(a.dxx[i], b.dxx[i]);
    op(a.dxxt[i], b.dxxt[i]);
  }
}

}  // namespace

CollarJet& CollarJet::operator+=(const CollarJet& o) {
  for_each_component(*this, o, [](Mat& a, const Mat& b) { a += b; });
  return *this;
}

CollarJet& CollarJet::operator-=(const CollarJet& o) {
  for_each_component(*this, o, [](Mat& a, const Mat& b) { a -= b; });
  return *this;
}

CollarJet& CollarJet::operator*=(double s) {
  for_each_component(*this, *this, [s](Mat& a, const Mat&) { a *= s; });
  return *this;
}

CollarJet& CollarJet::axpy(double s, const CollarJet& o) {
  for_each_component(*this, o, [s](Mat& a, const Mat& b) { a += s * b; });
  return *this;
}

CollarJet operator+(CollarJet a, const CollarJet& b) { return a += b; }
CollarJet operator-(CollarJet a, const CollarJet& b) { return a -= b; }
CollarJet operator*(double s, CollarJet a) { return a *= s; }

double max_abs_difference(const CollarJet& a, const CollarJet& b) {
  double worst = 0.0;
  CollarJet copy = a;
  for_each_component(copy, b, [&worst](Mat& x, const Mat& y) {
    worst = std::max(worst, max_abs(x - y));
  });
  return worst;
}

CollarMetric::CollarMetric(CrossSection section, Interval interval, std::vector<Term> terms,
                           std::string description)
    : section_(section),
      interval_(interval),
      side_(interval.lo + interval.hi <= 0.0 ? Side::Lower : Side::Upper),
      terms_(std::move(terms)),
      description_(std::move(description)) {}

double CollarMetric::depth() const {
  return side_ == Side::Lower ? -interval_.lo : interval_.hi;
}

CollarJet CollarMetric::jet(const Vec& x, double t) const {
  const int m = slice_dim();
  if (x.size() != m) fail(ErrorKind::DimensionMismatch, "cross-section point has wrong length");
  CollarJet out = CollarJet::zero(m);
  std::optional<FormJet> round;
  for (const Term& term : terms_) {
    const Jet1D p = term.coefficient(t);
    if (term.basis < 0) {
      if (!round) round = round_form_jet(x);
      out.value += p.value * round->value;
      out.dt += p.d1 * round->value;
      out.dtt += p.d2 * round->value;
      for (int i = 0; i < m; ++i) {
        out.dx[i] += p.value * round->dx[i];
        out.dxt[i] += p.d1 * round->dx[i];
      }
      for (std::size_t i = 0; i < out.dxx.size(); ++i) {
        out.dxx[i] += p.value * round->dxx[i];
        out.dxxt[i] += p.d1 * round->dxx[i];
      }
    } else {
      const int r = term.basis;
      out.value(r, r) += p.value;
      out.dt(r, r) += p.d1;
      out.dtt(r, r) += p.d2;
    }
  }
  return out;
}

SymForm CollarMetric::value(const Vec& x, double t) const { return jet(x, t).value; }
SymForm CollarMetric::d1(const Vec& x, double t) const { return jet(x, t).dt; }
SymForm CollarMetric::d2(const Vec& x, double t) const { return jet(x, t).dtt; }

namespace {

void require_positive(const Profile& f, Interval interval, const std::string& what) {
  if (!(interval.hi > interval.lo)) {
    fail(ErrorKind::InvalidInput, what + ": empty interval");
  }
  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const double t = interval.lo + (interval.hi - interval.lo) * i / kSamples;
    const double v = f(t).value;
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << what << " " << f.description() << " is not positive at t=" << t << " (value " << v
         << ")";
      fail(ErrorKind::InvalidInput, os.str());
    }
  }
}

void require_collar_interval(Interval interval) {
  if (!(interval.lo < interval.hi) || (interval.lo != 0.0 && interval.hi != 0.0)) {
    std::ostringstream os;
    os << "collar interval [" << interval.lo << ", " << interval.hi
       << "] must be [-d, 0] or [0, d] with d > 0 (the boundary sits at t = 0)";
    fail(ErrorKind::InvalidInput, os.str());
  }
}

}  // namespace

CollarMetric make_warped_product(const Profile& phi, int n, Interval interval) {
  require_collar_interval(interval);
  return make_warped_metric(phi, n, interval);
}

CollarMetric make_warped_metric(const Profile& phi, int n, Interval interval) {
  if (!(interval.lo < interval.hi)) fail(ErrorKind::InvalidInput, "empty interval");
  if (n < 3) fail(ErrorKind::InvalidInput, "warped product needs dimension n >= 3");
  if (n > kMaxDim) fail(ErrorKind::InvalidInput, "dimension exceeds kMaxDim");
  require_positive(phi, interval, "warping function");
  CrossSection section{CrossSectionKind::Round, n - 1, 0.1};
  std::vector<CollarMetric::Term> terms{{phi.squared(), -1}};
  return CollarMetric(section, interval, std::move(terms),
                      "warped(" + phi.description() + ", n=" + std::to_string(n) + ")");
}

CollarMetric make_diagonal_torus(const std::vector<Profile>& a, Interval interval) {
  require_collar_interval(interval);
  const int m = static_cast<int>(a.size());
  if (m < 2) fail(ErrorKind::InvalidInput, "torus collar needs n - 1 >= 2 factors");
  if (m + 1 > kMaxDim) fail(ErrorKind::InvalidInput, "dimension exceeds kMaxDim");
  std::vector<CollarMetric::Term> terms;
  std::string description = "torus(";
  for (int r = 0; r < m; ++r) {
    require_positive(a[r], interval, "torus factor a_" + std::to_string(r + 1));
    terms.push_back({a[r].squared(), r});
    description += (r ? "," : "") + a[r].description();
  }
  CrossSection section{CrossSectionKind::Flat, m, 0.0};
  return CollarMetric(section, interval, std::move(terms), description + ")");
}

CollarMetric mirror_collar(const CollarMetric& c) {
  std::vector<CollarMetric::Term> terms;
  terms.reserve(c.terms_.size());
  for (const auto& term : c.terms_) terms.push_back({term.coefficient.reflected(), term.basis});
  return CollarMetric(c.section_, Interval{-c.interval_.hi, -c.interval_.lo}, std::move(terms),
                      "mirror(" + c.description_ + ")");
}

}  // namespace splineglue
