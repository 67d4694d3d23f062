#include "fracvar/gamma.hpp"

#include <cmath>
#include <string>

#include "fracvar/error.hpp"

namespace fracvar {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrtTwoPi = 2.50662827463100050242;

// Lanczos coefficients for g = 7.
constexpr double kCoef[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

double gamma_fn(double x) {
  if (!std::isfinite(x)) {
    throw DomainError("gamma: non-finite argument");
  }
  if (x <= 0.0 && x == std::floor(x)) {
    throw DomainError("gamma: pole at non-positive integer " +
                      std::to_string(x));
  }
  if (x < 0.5) {
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
  }
  const double z = x - 1.0;
  double acc = kCoef[0];
  for (int i = 1; i < 9; ++i) acc += kCoef[i] / (z + i);
  const double t = z + 7.5;
  return kSqrtTwoPi * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

}  // namespace fracvar
