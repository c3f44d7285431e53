#pragma once

#include <functional>
#include <string>
#include <vector>

namespace splineglue {

/// Value and first two derivatives of a scalar function at one point.
struct Jet1D {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

Jet1D operator+(const Jet1D& a, const Jet1D& b);
Jet1D operator-(const Jet1D& a, const Jet1D& b);
Jet1D operator*(double s, const Jet1D& a);

/// A smooth scalar function of the collar coordinate with exact derivatives
/// up to order two. Copies share the underlying callable.
class Profile {
 public:
  using Fn = std::function<Jet1D(double)>;

  Profile(std::string description, Fn fn);

  Jet1D operator()(double t) const { return fn_(t); }
  const std::string& description() const { return description_; }

  static Profile constant(double c);
  /// c[0] + c[1] t + c[2] t^2 + ...
  static Profile polynomial(std::vector<double> coefficients);
  /// amplitude * sin(frequency * t + phase)
  static Profile sine(double amplitude, double frequency, double phase);
  /// amplitude * cosh(frequency * t + phase)
  static Profile cosh(double amplitude, double frequency, double phase);
  /// amplitude * exp(rate * t)
  static Profile exponential(double amplitude, double rate);

  /// t -> f(-t)
  Profile reflected() const;
  /// t -> f(t)^2
  Profile squared() const;

 private:
  std::string description_;
  Fn fn_;
};

}  // namespace splineglue
