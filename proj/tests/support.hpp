#pragma once

// Shared fixtures for the unit and acceptance tests: random graph
// generators and oracles that do not go through the library's numerics.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "loopzeta/graph_model.hpp"

namespace testsupport {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// Random symmetric substochastic graph on n vertices. Every vertex pair gets
// an edge with probability 0.6, every vertex a self-loop with probability
// 0.3; weights are rescaled so the largest row sum equals max_row.
inline loopzeta::GraphModel random_graph(std::mt19937_64& rng, int n, double max_row = 0.5) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<loopzeta::Edge> edges;
  for (int x = 0; x < n; ++x) {
    if (unit(rng) < 0.3) edges.push_back({x, x, 0.2 + unit(rng), 1.0, {}});
    for (int y = x + 1; y < n; ++y)
      if (unit(rng) < 0.6 || y == x + 1) edges.push_back({x, y, 0.2 + unit(rng), 1.0, {}});
  }
  std::vector<double> row(n, 0.0);
  for (const auto& e : edges) {
    row[e.from] += e.p;
    if (e.from != e.to) row[e.to] += e.p;
  }
  double top = 0.0;
  for (double r : row) top = std::max(top, r);
  for (auto& e : edges) e.p *= max_row / top;
  std::vector<double> lambda(n);
  for (double& l : lambda) l = 0.5 + unit(rng);
  return loopzeta::GraphModel(n, std::move(edges), std::move(lambda));
}

// Unimodular values that make P * Z Hermitian: free phases on proper edges,
// signs on self-loops.
inline std::vector<std::complex<double>> random_hermitian_phases(std::mt19937_64& rng,
                                                                const loopzeta::GraphModel& g) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::complex<double>> z;
  for (const auto& e : g.edges()) {
    if (e.is_self_loop())
      z.push_back(unit(rng) < 0.5 ? 1.0 : -1.0);
    else
      z.push_back(std::polar(1.0, 2.0 * kPi * unit(rng)));
  }
  return z;
}

// Haar-ish SU(2) element from a random unit quaternion.
inline Eigen::MatrixXcd random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  double q[4];
  double norm = 0.0;
  for (double& v : q) {
    v = gauss(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : q) v /= norm;
  Eigen::MatrixXcd u(2, 2);
  const std::complex<double> a(q[0], q[1]), b(q[2], q[3]);
  u << a, -std::conj(b), b, std::conj(a);
  return u;
}

// theta(t, u) = sum_k exp(-2 pi^2 t (k + u)^2), written out independently:
// the direct sum for t >= 0.1 and the Jacobi-transformed sum below.
inline double theta_oracle(double t, double u) {
  double s = 0.0;
  if (t >= 0.1) {
    for (int k = -60; k <= 60; ++k) s += std::exp(-2.0 * kPi * kPi * t * (k + u) * (k + u));
    return s;
  }
  for (int n = -40; n <= 40; ++n) s += std::exp(-n * n / (2.0 * t)) * std::cos(2.0 * kPi * n * u);
  return s / std::sqrt(2.0 * kPi * t);
}

// zeta(s) for real s > d/2 as the Mellin transform of the heat trace, by
// double-exponential quadrature.
inline double zeta_mellin_oracle(int dim, double m2, const std::vector<double>& u, double s) {
  auto trace = [&](double t) {
    double v = std::exp(-m2 * t);
    for (int i = 0; i < dim; ++i) v *= theta_oracle(t, u[i]);
    return v;
  };
  auto f = [&](double t) { return std::pow(t, s - 1.0) * trace(t); };
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> far;
  const double head = near.integrate(f, 0.0, 1.0, 1e-14);
  const double tail = far.integrate(f, 1.0, std::numeric_limits<double>::infinity(), 1e-14);
  return (head + tail) / std::tgamma(s);
}

// sum_{k in Z} (m2 + 2 pi^2 (k + u)^2)^{-s} for s > 1/2: explicit terms for
// |k| <= K and Euler-Maclaurin tails on each side.
inline double zeta_circle_direct(double m2, double u, double s, int K = 2000) {
  auto f = [&](double x) { return std::pow(m2 + 2.0 * kPi * kPi * x * x, -s); };
  auto df = [&](double x) { return -s * std::pow(m2 + 2.0 * kPi * kPi * x * x, -s - 1.0) * 4.0 * kPi * kPi * x; };
  double sum = 0.0;
  for (int k = -K; k <= K; ++k) sum += f(k + u);
  boost::math::quadrature::exp_sinh<double> far;
  for (double a : {K + u, K - u}) {
    // sum_{j > K} f(j + shift) = int_a^inf f - f(a)/2 - f'(a)/12 + ...
    const double integral = far.integrate(f, a, std::numeric_limits<double>::infinity(), 1e-15);
    sum += integral - 0.5 * f(a) - df(a) / 12.0;
  }
  return sum;
}

// Circle determinant 2 (cosh(sqrt(2) m) - cos 2 pi u).
inline double circle_det(double m, double u) {
  return 2.0 * (std::cosh(std::sqrt(2.0) * m) - std::cos(2.0 * kPi * u));
}

// d = 2 winding mass (sqrt(2) m / (pi |n|)) K_1(sqrt(2) m |n|).
inline double winding_bessel_oracle(double m, double norm) {
  const double z = std::sqrt(2.0) * m * norm;
  return std::sqrt(2.0) * m / (kPi * norm) * boost::math::cyl_bessel_k(1, z);
}

// Two-sided z-score of an empirical frequency against probability p.
inline double z_score(double count, double n, double p) {
  const double sd = std::sqrt(n * p * (1.0 - p));
  return sd > 0.0 ? (count - n * p) / sd : (count == 0.0 ? 0.0 : INFINITY);
}

}  // namespace testsupport
