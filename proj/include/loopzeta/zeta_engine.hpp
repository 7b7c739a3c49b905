#pragma once

#include <complex>

#include "loopzeta/spectra.hpp"

namespace loopzeta {

// Laurent data of Gamma(s) zeta(s) = c_minus1 / s + c0 + O(s) at s = 0.
// Since 1/Gamma(s) = s + gamma_E s^2 + O(s^3):
//   zeta(0) = c_minus1,  zeta'(0) = c0 + gamma_E c_minus1.
struct ZetaContinuation {
  double c_minus1 = 0.0;
  double c0 = 0.0;
  double pole = 0.0;              // d / 2
  double quadrature_error = 0.0;  // achieved tolerance of the small-t remainder

  double zeta_at_zero() const;
  double zeta_prime_at_zero() const;
};

struct RegularizedDeterminant {
  double value = 0.0;      // det'(-A) = exp(-zeta'(0))
  double log_value = 0.0;  // -zeta'(0)
};

// Gamma(s) zeta(s) = sum_k lambda_k^{-s} Gamma(s, lambda_k)          (t > 1)
//                  + int_0^1 t^{s-1} Theta(t) dt                       (t < 1)
// with Theta replaced by its Poisson-summed form below t = 1. The n = 0 dual
// term integrates to a power series carrying the poles at d/2 - j; the n != 0
// terms are entire and integrated numerically.
std::complex<double> gamma_times_zeta(const TorusModel& model, const TwistForm& twist,
                                      std::complex<double> s);

// Continued zeta function. Throws PoleError at a pole (s = d/2, and for odd d
// also s = d/2 - j).
std::complex<double> zeta_value(const TorusModel& model, const TwistForm& twist,
                                std::complex<double> s);

ZetaContinuation zeta_continuation(const TorusModel& model, const TwistForm& twist);
double zeta_prime_at_zero(const TorusModel& model, const TwistForm& twist);
RegularizedDeterminant det_regularized(const TorusModel& model, const TwistForm& twist);

// Finite spectra: zeta(s) = sum rho_i^{-s} on principal branches, so
// zeta'(0) = -sum log rho_i and the determinant is the plain product.
std::complex<double> zeta_value(const GraphSpectrum& spectrum, std::complex<double> s);
std::complex<double> zeta_prime_at_zero(const GraphSpectrum& spectrum);
// Requires a Hermitian spectrum (real, positive).
RegularizedDeterminant det_regularized(const GraphSpectrum& spectrum);

}  // namespace loopzeta
