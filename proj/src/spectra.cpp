#include "loopzeta/spectra.hpp"

#include <algorithm>
#include <cmath>

#include <quadmath.h>

#include "loopzeta/errors.hpp"
#include "loopzeta/special.hpp"

namespace loopzeta {

using special::kPi;

namespace {

constexpr double kRelativeCut = 1e-18;
constexpr double kThetaSwitch = 1.0;

double reduce_mod1(double u) {
  double r = u - std::floor(u);
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace

TorusModel::TorusModel(int dim, double m2) : dim_(dim), m2_(m2) {
  if (dim != 1 && dim != 2) throw ConfigError("torus dimension must be 1 or 2");
  if (!(m2 > 0.0) || !std::isfinite(m2)) throw ConfigError("killing rate m2 must be positive");
}

double TorusModel::mass() const { return std::sqrt(m2_); }

TwistForm::TwistForm(std::vector<double> u) : u_(std::move(u)) {
  for (double& x : u_) {
    if (!std::isfinite(x)) throw ConfigError("twist coordinates must be finite");
    x = reduce_mod1(x);
  }
}

bool TwistForm::is_zero() const {
  return std::all_of(u_.begin(), u_.end(), [](double x) { return x == 0.0; });
}

std::vector<SpectralPoint> torus_spectrum(const TorusModel& model, const TwistForm& twist,
                                          int cutoff) {
  if (cutoff < 0) throw ConfigError("spectrum cutoff must be non-negative");
  if (twist.dim() != model.dim()) throw ConfigError("twist dimension does not match the torus");
  const auto u = twist.coords();
  auto eigenvalue = [&](const std::vector<int>& k) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) norm2 += (k[i] + u[i]) * (k[i] + u[i]);
    return model.m2() + 2.0 * kPi * kPi * norm2;
  };

  std::vector<SpectralPoint> points;
  for (int shell = 0; shell <= cutoff; ++shell) {
    if (model.dim() == 1) {
      for (int k = -shell; k <= shell; k += std::max(1, 2 * shell)) {
        std::vector<int> idx{k};
        points.push_back({eigenvalue(idx), 1, idx});
      }
      continue;
    }
    for (int a = -shell; a <= shell; ++a) {
      for (int b = -shell; b <= shell; ++b) {
        if (std::max(std::abs(a), std::abs(b)) != shell) continue;
        std::vector<int> idx{a, b};
        points.push_back({eigenvalue(idx), 1, idx});
      }
    }
  }
  return points;
}

double theta_direct(double t, double u) {
  if (!(t > 0.0)) throw ConfigError("theta: time must be positive");
  u = reduce_mod1(u);
  const double scale = 2.0 * kPi * kPi * t;
  const int centre = -static_cast<int>(std::lround(u));
  double sum = std::exp(-scale * (centre + u) * (centre + u));
  for (int j = 1;; ++j) {
    const double up = std::exp(-scale * (centre + j + u) * (centre + j + u));
    const double down = std::exp(-scale * (centre - j + u) * (centre - j + u));
    sum += up + down;
    if (up < kRelativeCut * sum && down < kRelativeCut * sum) break;
  }
  return sum;
}

double theta_dual(double t, double u) {
  if (!(t > 0.0)) throw ConfigError("theta: time must be positive");
  u = reduce_mod1(u);
  double sum = 1.0, magnitude = 1.0;
  int terms = 0;
  for (int n = 1;; ++n) {
    const double weight = std::exp(-static_cast<double>(n) * n / (2.0 * t));
    if (weight < kRelativeCut) break;
    sum += 2.0 * weight * std::cos(2.0 * kPi * n * u);
    magnitude += 2.0 * weight;
    terms = n;
  }
  // For t well above 1 and u near 1/2 the alternating terms cancel down to
  // exp(-pi^2 t / 2); redo the sum in quad precision when the cancellation
  // would eat more than two digits.
  if (magnitude > 100.0 * std::abs(sum)) {
    using quad = __float128;
    const quad two_t = quad(2) * t;
    const quad two_pi_u = quad(2) * M_PIq * quad(u);
    quad acc = 1;
    for (int n = 1; n <= terms + 2; ++n) acc += quad(2) * expq(-quad(n) * n / two_t) * cosq(two_pi_u * n);
    sum = static_cast<double>(acc);
  }
  return sum / std::sqrt(2.0 * kPi * t);
}

double theta(double t, double u) { return t >= kThetaSwitch ? theta_direct(t, u) : theta_dual(t, u); }

std::complex<double> heat_trace(const TorusModel& model, const TwistForm& twist, double t) {
  if (!(t > 0.0)) throw ConfigError("heat_trace: time must be positive");
  if (twist.dim() != model.dim()) throw ConfigError("twist dimension does not match the torus");
  double value = std::exp(-model.m2() * t);
  for (double u : twist.coords()) value *= theta(t, u);
  return value;
}

std::vector<double> GraphSpectrum::real_eigenvalues() const {
  std::vector<double> out;
  out.reserve(eigenvalues.size());
  for (const auto& e : eigenvalues) out.push_back(e.real());
  std::sort(out.begin(), out.end());
  return out;
}

std::complex<double> GraphSpectrum::product() const {
  std::complex<double> prod = 1.0;
  for (const auto& e : eigenvalues) prod *= e;
  return prod;
}

GraphSpectrum graph_spectrum(const GraphModel& graph, const EdgeWeighting& weighting,
                             bool require_hermitian) {
  if (weighting.values().size() != graph.arcs().size())
    throw ConfigError("weighting does not match the graph's arcs");
  const bool hermitian = weighting.is_hermitian(graph);
  if (require_hermitian && !hermitian) throw ConfigError("weighting is not Hermitian");

  const int n = graph.vertex_count();
  const Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n) - weighting.weighted_transition(graph);
  GraphSpectrum spectrum;
  spectrum.hermitian = hermitian;
  if (hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) spectrum.eigenvalues.emplace_back(solver.eigenvalues()[i], 0.0);
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    for (int i = 0; i < n; ++i) spectrum.eigenvalues.push_back(solver.eigenvalues()[i]);
    std::sort(spectrum.eigenvalues.begin(), spectrum.eigenvalues.end(),
              [](const auto& a, const auto& b) {
                return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
              });
  }
  return spectrum;
}

}  // namespace loopzeta
