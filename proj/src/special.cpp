#include "loopzeta/special.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "loopzeta/errors.hpp"
#include "loopzeta/quadrature.hpp"

namespace loopzeta::special {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 100000;

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,   676.5203681218851,      -1259.1392167224028,
    771.32342877765313,    -176.61502916214059,    12.507343278686905,
    -0.13857109526572012,  9.9843695780195716e-6,  1.5056327351493116e-7};

std::complex<double> gamma_lanczos(std::complex<double> z) {
  z -= 1.0;
  std::complex<double> x = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) x += kLanczos[i] / (z + static_cast<double>(i));
  const std::complex<double> t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// Continued fraction for Gamma(s, x), valid for x > |s| + 1.
std::complex<double> upper_gamma_cf(std::complex<double> s, double x) {
  std::complex<double> b = x + 1.0 - s;
  std::complex<double> c = 1.0 / kTiny;
  std::complex<double> d = 1.0 / b;
  std::complex<double> h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const std::complex<double> an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const std::complex<double> del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return std::exp(-x + s * std::log(x)) * h;
  }
  throw ConvergenceError("incomplete gamma continued fraction", std::abs(h));
}

// x^{-s} gamma(s, x) = sum_j (-x)^j / (j! (s + j)).
std::complex<double> lower_gamma_scaled_series(std::complex<double> s, double x) {
  std::complex<double> sum = 0.0;
  double power = 1.0;
  for (int j = 0; j < kMaxIterations; ++j) {
    const std::complex<double> term = power / (s + static_cast<double>(j));
    sum += term;
    if (j > x && std::abs(term) < kEps * std::abs(sum)) return sum;
    power *= -x / (j + 1);
  }
  throw ConvergenceError("incomplete gamma series", std::abs(sum));
}

}  // namespace

bool is_nonpositive_integer(std::complex<double> z) {
  return z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::round(z.real());
}

std::complex<double> gamma(std::complex<double> z) {
  if (is_nonpositive_integer(z)) throw PoleError("gamma function pole", z.real());
  if (z.real() < 0.5) return kPi / (std::sin(kPi * z) * gamma_lanczos(1.0 - z));
  return gamma_lanczos(z);
}

std::complex<double> rgamma(std::complex<double> z) {
  if (is_nonpositive_integer(z)) return 0.0;
  return 1.0 / gamma(z);
}

double expint_e1(double x) {
  if (!(x > 0.0)) throw ConfigError("expint_e1: argument must be positive");
  if (x <= 1.0) {
    double sum = 0.0;
    double power = 1.0;
    for (int k = 1; k < kMaxIterations; ++k) {
      power *= -x / k;
      const double term = power / k;
      sum += term;
      if (std::abs(term) < kEps * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) - sum;
  }
  return upper_gamma_cf(0.0, x).real();
}

std::complex<double> upper_gamma(std::complex<double> s, double x) {
  if (!(x > 0.0)) throw ConfigError("upper_gamma: argument must be positive");
  if (is_nonpositive_integer(s)) {
    // Gamma(s, x) = (Gamma(s + 1, x) - x^s e^{-x}) / s, started from E1.
    const int n = static_cast<int>(-std::round(s.real()));
    double value = expint_e1(x);
    for (int k = 1; k <= n; ++k) value = (value - std::pow(x, -k) * std::exp(-x)) / (-k);
    return value;
  }
  if (x > std::abs(s) + 1.0) return upper_gamma_cf(s, x);
  return gamma(s) - std::exp(s * std::log(x)) * lower_gamma_scaled_series(s, x);
}

}  // namespace loopzeta::special

namespace loopzeta::quadrature {

const GaussLegendre20& gauss_legendre20() {
  static const GaussLegendre20 rule = [] {
    GaussLegendre20 r;
    constexpr int n = 20;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(special::kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      r.nodes[i] = -x;
      r.nodes[n - 1 - i] = x;
      r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
  }();
  return rule;
}

}  // namespace loopzeta::quadrature
