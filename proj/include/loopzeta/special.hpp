#pragma once

#include <complex>

namespace loopzeta::special {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Gamma function on the complex plane (Lanczos, reflection for Re z < 1/2).
std::complex<double> gamma(std::complex<double> z);

// Reciprocal gamma; exact zero at the non-positive integers.
std::complex<double> rgamma(std::complex<double> z);

// Exponential integral E1(x) = Gamma(0, x), x > 0.
double expint_e1(double x);

// Upper incomplete gamma Gamma(s, x) for complex s and real x > 0.
// Continued fraction when x > |s| + 1, power series otherwise.
std::complex<double> upper_gamma(std::complex<double> s, double x);

// True when z is (numerically exactly) a non-positive integer.
bool is_nonpositive_integer(std::complex<double> z);

}  // namespace loopzeta::special
