#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <utility>

#include "loopzeta/errors.hpp"

namespace loopzeta::quadrature {

// 20-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre20 {
  std::array<double, 20> nodes{};
  std::array<double, 20> weights{};
};

const GaussLegendre20& gauss_legendre20();

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int panels = 0;
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }

// Composite Gauss-Legendre on [a, b] with equal panels; the panel count is
// doubled until two successive estimates differ by at most abs_tol.
template <class F>
auto integrate(F&& f, double a, double b, double abs_tol, int initial_panels = 4,
               int max_panels = 1 << 14) {
  using T = decltype(f(a));
  const auto& rule = gauss_legendre20();
  auto estimate = [&](int panels) {
    T sum{};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      T panel{};
      for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        panel += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
      sum += panel * (0.5 * h);
    }
    return sum;
  };

  int panels = initial_panels;
  T previous = estimate(panels);
  double change = 0.0;
  while (panels < max_panels) {
    panels *= 2;
    T current = estimate(panels);
    change = magnitude(current - previous);
    if (change <= abs_tol) return Result<T>{current, change, panels};
    previous = std::move(current);
  }
  throw ConvergenceError("Gauss-Legendre panel doubling did not converge", change);
}

}  // namespace loopzeta::quadrature
