#pragma once

#include <complex>
#include <span>
#include <vector>

#include "loopzeta/graph_model.hpp"

namespace loopzeta {

// Brownian motion on the unit flat torus of dimension 1 or 2, killed at rate m2.
// The generator is A = Laplacian / 2 - m2.
class TorusModel {
 public:
  TorusModel(int dim, double m2);

  int dim() const { return dim_; }
  double m2() const { return m2_; }
  double mass() const;

 private:
  int dim_;
  double m2_;
};

// Point u of the Jacobian torus [0, 1)^d; the harmonic form sum u_i dx_i.
class TwistForm {
 public:
  TwistForm() = default;
  explicit TwistForm(std::vector<double> u);
  static TwistForm zero(int dim) { return TwistForm(std::vector<double>(dim, 0.0)); }

  std::span<const double> coords() const { return u_; }
  int dim() const { return static_cast<int>(u_.size()); }
  bool is_zero() const;

 private:
  std::vector<double> u_;
};

struct SpectralPoint {
  double lambda = 0.0;
  int mult = 1;
  std::vector<int> k;
};

// lambda_k = m2 + 2 pi^2 |k + u|^2 for ||k||_inf <= cutoff, ordered by shell
// then lexicographically.
std::vector<SpectralPoint> torus_spectrum(const TorusModel& model, const TwistForm& twist,
                                          int cutoff);

// theta(t, u) = sum_k exp(-2 pi^2 t (k + u)^2), summed directly.
double theta_direct(double t, double u);
// The same function through its Poisson-summed form
// (2 pi t)^{-1/2} sum_n exp(-n^2 / (2t)) cos(2 pi n u).
double theta_dual(double t, double u);
// Direct sum for t >= 1, dual sum below.
double theta(double t, double u);

// Tr(P_t^omega) = exp(-m2 t) prod_i theta(t, u_i).
std::complex<double> heat_trace(const TorusModel& model, const TwistForm& twist, double t);

struct GraphSpectrum {
  std::vector<std::complex<double>> eigenvalues;  // of I - P * Z
  bool hermitian = false;

  // Real parts, ascending; valid when hermitian.
  std::vector<double> real_eigenvalues() const;
  std::complex<double> product() const;
};

// Eigenvalues of I - P * Z. With require_hermitian the weighting must make
// P * Z a Hermitian matrix.
GraphSpectrum graph_spectrum(const GraphModel& graph, const EdgeWeighting& weighting,
                             bool require_hermitian = false);

}  // namespace loopzeta
