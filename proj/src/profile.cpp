#include "splineglue/profile.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace splineglue {

Jet1D operator+(const Jet1D& a, const Jet1D& b) {
  return {a.value + b.value, a.d1 + b.d1, a.d2 + b.d2};
}

Jet1D operator-(const Jet1D& a, const Jet1D& b) {
  return {a.value - b.value, a.d1 - b.d1, a.d2 - b.d2};
}

Jet1D operator*(double s, const Jet1D& a) { return {s * a.value, s * a.d1, s * a.d2}; }

Profile::Profile(std::string description, Fn fn)
    : description_(std::move(description)), fn_(std::move(fn)) {}

Profile Profile::constant(double c) {
  std::ostringstream os;
  os << c;
  return Profile(os.str(), [c](double) { return Jet1D{c, 0.0, 0.0}; });
}

Profile Profile::polynomial(std::vector<double> coefficients) {
  std::ostringstream os;
  os << "poly(";
  for (std::size_t i = 0; i < coefficients.size(); ++i) os << (i ? "," : "") << coefficients[i];
  os << ")";
  return Profile(os.str(), [c = std::move(coefficients)](double t) {
    // Horner on value, d1, d2 simultaneously.
    Jet1D j;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
      j.d2 = j.d2 * t + 2.0 * j.d1;
      j.d1 = j.d1 * t + j.value;
      j.value = j.value * t + *it;
    }
    return j;
  });
}

Profile Profile::sine(double amplitude, double frequency, double phase) {
  std::ostringstream os;
  os << amplitude << "*sin(" << frequency << "*t+" << phase << ")";
  return Profile(os.str(), [=](double t) {
    const double arg = frequency * t + phase;
    const double s = std::sin(arg);
    return Jet1D{amplitude * s, amplitude * frequency * std::cos(arg),
                 -amplitude * frequency * frequency * s};
  });
}

Profile Profile::cosh(double amplitude, double frequency, double phase) {
  std::ostringstream os;
  os << amplitude << "*cosh(" << frequency << "*t+" << phase << ")";
  return Profile(os.str(), [=](double t) {
    const double arg = frequency * t + phase;
    const double c = std::cosh(arg);
    return Jet1D{amplitude * c, amplitude * frequency * std::sinh(arg),
                 amplitude * frequency * frequency * c};
  });
}

Profile Profile::exponential(double amplitude, double rate) {
  std::ostringstream os;
  os << amplitude << "*exp(" << rate << "*t)";
  return Profile(os.str(), [=](double t) {
    const double e = amplitude * std::exp(rate * t);
    return Jet1D{e, rate * e, rate * rate * e};
  });
}

Profile Profile::reflected() const {
  return Profile(description_ + "|t->-t", [fn = fn_](double t) {
    const Jet1D j = fn(-t);
    return Jet1D{j.value, -j.d1, j.d2};
  });
}

Profile Profile::squared() const {
  return Profile("(" + description_ + ")^2", [fn = fn_](double t) {
    const Jet1D j = fn(t);
    return Jet1D{j.value * j.value, 2.0 * j.value * j.d1, 2.0 * (j.d1 * j.d1 + j.value * j.d2)};
  });
}

}  // namespace splineglue
