#include "splineglue/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "splineglue/errors.hpp"
#include "splineglue/sampling.hpp"

namespace splineglue {

namespace {

using Gauss16 = boost::math::quadrature::gauss<double, 16>;

double raw_bump(double u) {
  const double q = 1.0 - u * u;
  return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

// The bump is integrated in s = atanh(u): the integrand becomes
// exp(-cosh^2 s) / cosh^2 s, smooth and negligible beyond |s| = 3.
constexpr double kSpan = 3.0;
constexpr double kNoSplit = 2.5;

void add_panels(std::vector<std::pair<double, double>>& out, double a, double b, int panels,
                double scale) {
  const auto& x = Gauss16::abscissa();
  const auto& w = Gauss16::weights();
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (double sign : {-1.0, 1.0}) {
        const double s = mid + sign * half * x[i];
        const double c = std::cosh(s);
        out.emplace_back(std::tanh(s), scale * half * w[i] * std::exp(-c * c) / (c * c));
      }
    }
  }
}

double bump_normalization() {
  std::vector<std::pair<double, double>> rule;
  add_panels(rule, -kSpan - 1.0, kSpan + 1.0, 64, 1.0);
  double mass = 0.0;
  for (const auto& [node, weight] : rule) mass += weight;
  return 1.0 / mass;
}

const double& normalization() {
  static const double c = bump_normalization();
  return c;
}

}  // namespace

double bump_density(double u) { return normalization() * raw_bump(u); }

std::vector<std::pair<double, double>> bump_rule(double split, int panels) {
  if (panels < 2) fail(ErrorKind::InvalidInput, "bump rule needs at least two panels");
  const double c = normalization();
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(panels) * 16);
  const double s = std::abs(split) < 1.0 ? std::atanh(split) : kSpan;
  if (std::abs(s) >= kNoSplit) {
    // The kink sits where the kernel is below 1e-16; no split needed.
    add_panels(out, -kSpan, kSpan, panels, c);
    return out;
  }
  // Panels in proportion to the length on each side of the split.
  const int left = std::clamp(
      static_cast<int>(std::lround(panels * (s + kSpan) / (2.0 * kSpan))), 1, panels - 1);
  add_panels(out, -kSpan, s, left, c);
  add_panels(out, s, kSpan, panels - left, c);
  return out;
}

double PiecewiseC1Scalar::c1_mismatch() const {
  const Jet1D f = left(junction);
  const Jet1D g = right(junction);
  return std::max(std::abs(f.value - g.value), std::abs(f.d1 - g.d1));
}

Jet1D band_cutoff(double s, double nu) {
  const double u = 2.0 * (nu - std::abs(s)) / nu;
  if (u >= 1.0) return {1.0, 0.0, 0.0};
  if (u <= 0.0) return {0.0, 0.0, 0.0};
  // sigma(u) = psi(u) / (psi(u) + psi(1-u)), psi(u) = exp(-1/u)
  auto psi = [](double v) { return std::exp(-1.0 / v); };
  auto dpsi = [&](double v) { return psi(v) / (v * v); };
  auto ddpsi = [&](double v) { return psi(v) * (1.0 / (v * v * v * v) - 2.0 / (v * v * v)); };
  const double a = psi(u), b = psi(1.0 - u);
  const double da = dpsi(u), db = -dpsi(1.0 - u);
  const double dda = ddpsi(u), ddb = ddpsi(1.0 - u);
  const double d = a + b, dd = da + db;
  const double p = da * b - a * db;
  const double dp = dda * b - a * ddb;
  const double sigma = a / d;
  const double dsigma = p / (d * d);
  const double ddsigma = (dp * d - 2.0 * p * dd) / (d * d * d);
  const double du = (s > 0.0 ? -2.0 : 2.0) / nu;
  return {sigma, dsigma * du, ddsigma * du * du};
}

CollarJet Band::piecewise(const Vec& x, double t) const {
  return t <= t0 ? left(x, t) : right(x, t);
}

CollarJet Band::evaluate(const Vec& x, double t) const {
  const double s = t - t0;
  if (std::abs(s) >= nu) return piecewise(x, t);
  const Jet1D chi = band_cutoff(s, nu);
  CollarJet out = piecewise(x, t);
  if (chi.value == 0.0 && chi.d1 == 0.0 && chi.d2 == 0.0) return out;

  // N(t) = 1/2 sgn(t - t0) (right - left), with the sign at t0 taken from
  // the side that owns t0 in `piecewise`.
  auto kink = [&](double tau) {
    CollarJet d = right(x, tau);
    d -= left(x, tau);
    d *= tau <= t0 ? -0.5 : 0.5;
    return d;
  };
  const CollarJet n_here = kink(t);
  CollarJet e = CollarJet::zero(out.slice_dim());
  double mass = 0.0;
  for (const auto& [u, w] : bump_rule(s / rho, panels)) {
    e.axpy(w, kink(t - rho * u));
    mass += w;
  }
  e.axpy(-mass, n_here);  // E = K_rho * N - N

  out.axpy(chi.value, e);
  out.dt += chi.d1 * e.value;
  out.dtt += chi.d2 * e.value + 2.0 * chi.d1 * e.dt;
  for (std::size_t i = 0; i < out.dx.size(); ++i) out.dxt[i] += chi.d1 * e.dx[i];
  for (std::size_t i = 0; i < out.dxx.size(); ++i) out.dxxt[i] += chi.d1 * e.dxx[i];
  return out;
}

namespace {

struct BandCheck {
  double c1 = 0.0;
  double excess = 0.0;
  double quadrature_change = 0.0;
};

std::vector<double> band_nodes(const Band& band) {
  std::vector<double> ts = linspace(band.t0 - band.nu, band.t0 + band.nu, 41);
  const double w = std::min(3.0 * band.rho, band.nu);
  for (double t : linspace(band.t0 - w, band.t0 + w, 41)) ts.push_back(t);
  // The cutoff derivatives act only where nu/2 < |t - t0| < nu.
  for (double sign : {-1.0, 1.0}) {
    for (double s : linspace(0.5 * band.nu, band.nu, 21)) ts.push_back(band.t0 + sign * s);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  return ts;
}

// Second-derivative excess of the smoothed band at (x, t) beyond that of h.
double excess_at(const Band& band, const Vec& x, double t, const Mat& lo, const Mat& hi) {
  const Mat s = band.evaluate(x, t).dtt;
  const Mat h = band.piecewise(x, t).dtt;
  const double own = std::max((lo - h).maxCoeff(), (h - hi).maxCoeff());
  const double smoothed = std::max((lo - s).maxCoeff(), (s - hi).maxCoeff());
  return smoothed - std::max(own, 0.0);
}

// Golden-section refinement of a node maximum on [a, b].
double refine_excess(const Band& band, const Vec& x, double a, double b, const Mat& lo, const Mat& hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = excess_at(band, x, c, lo, hi), fd = excess_at(band, x, d, lo, hi);
  for (int i = 0; i < 30 && b - a > 1e-12 * band.nu; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = excess_at(band, x, c, lo, hi);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = excess_at(band, x, d, lo, hi);
    }
  }
  return std::max(fc, fd);
}

BandCheck check_band(const Band& band, const std::vector<Vec>& xs) {
  BandCheck out;
  const std::vector<double> ts = band_nodes(band);
  Band doubled = band;
  doubled.panels = 2 * band.panels;
  for (const Vec& x : xs) {
    const Mat f2 = band.left(x, band.t0 - band.nu).dtt;
    const Mat g2 = band.right(x, band.t0 + band.nu).dtt;
    const Mat lo = f2.cwiseMin(g2);
    const Mat hi = f2.cwiseMax(g2);
    std::vector<double> node_excess(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double t = ts[i];
      const CollarJet s = band.evaluate(x, t);
      const CollarJet h = band.piecewise(x, t);
      out.c1 = std::max({out.c1, max_abs(s.value - h.value), max_abs(s.dt - h.dt)});
      for (std::size_t k = 0; k < s.dx.size(); ++k) out.c1 = std::max(out.c1, max_abs(s.dx[k] - h.dx[k]));
      // Only the excess beyond what h itself already has counts.
      const double own = std::max((lo - h.dtt).maxCoeff(), (h.dtt - hi).maxCoeff());
      const double smoothed = std::max((lo - s.dtt).maxCoeff(), (s.dtt - hi).maxCoeff());
      node_excess[i] = smoothed - std::max(own, 0.0);
      out.excess = std::max(out.excess, node_excess[i]);
      if (i % 8 == 0) {
        out.quadrature_change =
            std::max(out.quadrature_change, max_abs_difference(s, doubled.evaluate(x, t)));
      }
      // Scalar instances are not metrics; only forms are checked for definiteness.
      if (s.value.rows() > 1 && Eigen::LLT<Mat>(s.value).info() != Eigen::Success) {
        std::ostringstream where;
        where << "x=" << format_vector(x) << ", t=" << t << " (smoothing band around " << band.t0
              << ")";
        require_positive_definite(s.value, where.str());
      }
    }
    // The worst node only brackets the maximum; refine between its neighbours.
    const std::size_t i = static_cast<std::size_t>(
        std::max_element(node_excess.begin(), node_excess.end()) - node_excess.begin());
    if (node_excess[i] > 0.0) {
      const double a = ts[i > 0 ? i - 1 : i];
      const double b = ts[i + 1 < ts.size() ? i + 1 : i];
      if (b > a) out.excess = std::max(out.excess, refine_excess(band, x, a, b, lo, hi));
    }
  }
  return out;
}

struct SearchResult {
  double rho = 0.0;
  int halvings = 0;
  BandCheck worst;
};

SearchResult search_radius(std::vector<Band>& bands, const std::vector<Vec>& xs, double mu) {
  constexpr int kMaxHalvings = 40;
  const double nu = bands.front().nu;
  BandCheck last;
  int halving = 0;
  while (halving <= kMaxHalvings) {
    const double rho = std::ldexp(nu / 4.0, -halving);
    BandCheck worst;
    for (Band& b : bands) {
      b.rho = rho;
      const BandCheck c = check_band(b, xs);
      worst.c1 = std::max(worst.c1, c.c1);
      worst.excess = std::max(worst.excess, c.excess);
      worst.quadrature_change = std::max(worst.quadrature_change, c.quadrature_change);
    }
    last = worst;
    if (worst.c1 <= mu && worst.excess <= mu) return {rho, halving, worst};
    // The C^1 distance scales like rho and the excess like rho^2; skip the
    // halvings that cannot succeed, keeping one step of slack.
    const double factor = std::max(worst.c1 / mu, std::sqrt(worst.excess / mu));
    halving += std::max(1, static_cast<int>(std::floor(std::log2(factor))) - 1);
  }
  std::ostringstream os;
  os << "no smoothing radius down to " << std::ldexp(nu / 4.0, -kMaxHalvings) << " meets mu=" << mu
     << " (last C1 distance " << last.c1 << ", second-derivative excess " << last.excess << ")";
  fail(ErrorKind::BudgetInfeasible, os.str());
}

SliceJetFn scalar_piece(const Profile& p) {
  return [p](const Vec&, double t) {
    const Jet1D j = p(t);
    CollarJet c = CollarJet::zero(1);
    c.value(0, 0) = j.value;
    c.dt(0, 0) = j.d1;
    c.dtt(0, 0) = j.d2;
    return c;
  };
}

}  // namespace

MollifiedScalar::MollifiedScalar(PiecewiseC1Scalar h, Band band, SmoothingReport report)
    : h_(std::move(h)), band_(std::move(band)), report_(report) {}

Jet1D MollifiedScalar::operator()(double t) const {
  const CollarJet j = band_.evaluate(Vec::Zero(1), t);
  return {j.value(0, 0), j.dt(0, 0), j.dtt(0, 0)};
}

MollifiedScalar mollify_c1(const PiecewiseC1Scalar& h, double nu, double mu) {
  if (!(nu > 0.0) || !(mu > 0.0)) fail(ErrorKind::InvalidInput, "nu and mu must be positive");
  const double mismatch = h.c1_mismatch();
  if (!(mismatch <= 1e-10)) {
    fail(ErrorKind::InvalidInput, "pieces are not C^1 at the junction (mismatch " +
                                      std::to_string(mismatch) + ")");
  }
  const double reach = nu * 1.25;
  if (h.junction - reach < h.domain.lo || h.junction + reach > h.domain.hi) {
    fail(ErrorKind::BandTooWide, "smoothing band leaves the domain of the pieces");
  }
  Band band{h.junction, nu, nu / 4.0, scalar_piece(h.left), scalar_piece(h.right), 4};
  std::vector<Band> bands{band};
  const std::vector<Vec> xs{Vec::Zero(1)};
  const SearchResult r = search_radius(bands, xs, mu);
  SmoothingReport rep;
  rep.nu = nu;
  rep.mu = mu;
  rep.radius = r.rho;
  rep.halvings = r.halvings;
  rep.c1_distance = r.worst.c1;
  rep.second_derivative_excess = r.worst.excess;
  rep.interval_ok = r.worst.excess <= mu;
  rep.quadrature_change = r.worst.quadrature_change;
  return MollifiedScalar(h, bands.front(), rep);
}

SmoothedGlued smooth_glued(const GluedChart& glued, double nu, double mu, const std::vector<Vec>& xs) {
  if (glued.smoothed()) fail(ErrorKind::InvalidInput, "chart is already smoothed");
  if (!(nu > 0.0) || !(mu > 0.0)) fail(ErrorKind::InvalidInput, "nu and mu must be positive");
  GluingParams params = glued.params();
  params.nu = nu;
  params.mu = mu;
  if (nu >= params.eps || nu >= params.iota) {
    std::ostringstream os;
    os << "smoothing half-width nu=" << nu << " must be below eps=" << params.eps
       << " and iota=" << params.iota;
    fail(ErrorKind::BandTooWide, os.str());
  }
  if (xs.empty()) fail(ErrorKind::EmptySampling, "no cross-section validation nodes");
  const auto& regions = glued.regions();
  auto find = [&](Region r) -> const RegionSpan& {
    for (const auto& span : regions)
      if (span.region == r) return span;
    fail(ErrorKind::InvalidInput, "glued chart has no " + std::string(to_string(r)) + " region");
  };
  const RegionSpan& h1 = find(Region::H1);
  const RegionSpan& spline = find(Region::Spline);
  const RegionSpan& h2 = find(Region::H2);
  const double eps = params.eps;

  std::vector<Band> bands{Band{-eps, nu, nu / 4.0, h1.jet, spline.jet, 4},
                          Band{eps, nu, nu / 4.0, spline.jet, h2.jet, 4}};
  const SearchResult r = search_radius(bands, xs, mu);

  SmoothingReport rep;
  rep.nu = nu;
  rep.mu = mu;
  rep.radius = r.rho;
  rep.halvings = r.halvings;
  rep.c1_distance = r.worst.c1;
  rep.second_derivative_excess = r.worst.excess;
  rep.interval_ok = r.worst.excess <= mu;
  rep.quadrature_change = r.worst.quadrature_change;

  const Band lower = bands[0];
  const Band upper = bands[1];
  std::vector<RegionSpan> out;
  out.push_back({Region::H1, Interval{h1.t.lo, -eps - nu}, h1.jet});
  out.push_back({Region::BandLower, Interval{-eps - nu, -eps + nu},
                 [lower](const Vec& x, double t) { return lower.evaluate(x, t); }});
  out.push_back({Region::Spline, Interval{-eps + nu, eps - nu}, spline.jet});
  out.push_back({Region::BandUpper, Interval{eps - nu, eps + nu},
                 [upper](const Vec& x, double t) { return upper.evaluate(x, t); }});
  out.push_back({Region::H2, Interval{eps + nu, h2.t.hi}, h2.jet});
  return {GluedChart(glued.cross_section(), std::move(out), params, true,
                     "smoothed " + glued.description(), r.rho),
          rep};
}

}  // namespace splineglue
