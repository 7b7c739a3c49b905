#include "loopzeta/zeta_engine.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "loopzeta/errors.hpp"
#include "loopzeta/quadrature.hpp"
#include "loopzeta/special.hpp"

namespace loopzeta {

using special::kEulerGamma;
using special::kPi;

namespace {

constexpr double kShellCut = 1e-18;
constexpr double kRemainderTol = 1e-13;
constexpr int kMaxShell = 64;

// Twist coordinates shifted into [-1/2, 1/2) so that every eigenvalue on
// shell r is at least m2 + 2 pi^2 (r - 1/2)^2.
std::vector<double> centred(const TwistForm& twist) {
  std::vector<double> u(twist.coords().begin(), twist.coords().end());
  for (double& x : u)
    if (x >= 0.5) x -= 1.0;
  return u;
}

template <class Term>
std::complex<double> lattice_sum(const TorusModel& model, const std::vector<double>& u, Term&& term) {
  auto lambda = [&](int a, int b) {
    double norm2 = (a + u[0]) * (a + u[0]);
    if (model.dim() == 2) norm2 += (b + u[1]) * (b + u[1]);
    return model.m2() + 2.0 * kPi * kPi * norm2;
  };
  std::complex<double> sum = 0.0;
  for (int shell = 0; shell <= kMaxShell; ++shell) {
    std::complex<double> shell_sum = 0.0;
    double shell_max = 0.0;
    auto add = [&](int a, int b) {
      const std::complex<double> v = term(lambda(a, b));
      shell_sum += v;
      shell_max = std::max(shell_max, std::abs(v));
    };
    if (model.dim() == 1) {
      add(-shell, 0);
      if (shell != 0) add(shell, 0);
    } else {
      for (int a = -shell; a <= shell; ++a)
        for (int b = -shell; b <= shell; ++b)
          if (std::max(std::abs(a), std::abs(b)) == shell) add(a, b);
    }
    sum += shell_sum;
    if (shell >= 1 && shell_max <= kShellCut * std::max(1.0, std::abs(sum))) return sum;
  }
  throw ConvergenceError("eigenvalue shell sum", std::abs(sum));
}

// (2 pi)^{-d/2} sum_j (-m2)^j / (j! (s - d/2 + j)), skipping the term that is
// singular at s when skip_singular is set.
std::complex<double> leading_dual_series(const TorusModel& model, std::complex<double> s,
                                         bool skip_singular) {
  const double half_d = 0.5 * model.dim();
  std::complex<double> sum = 0.0;
  double coeff = 1.0;  // (-m2)^j / j!
  double largest = 0.0;
  for (int j = 0; j < 100000; ++j) {
    const std::complex<double> denom = s - half_d + static_cast<double>(j);
    if (denom == 0.0) {
      if (!skip_singular) throw PoleError("pole of the continued zeta function", s.real());
    } else {
      const std::complex<double> term = coeff / denom;
      sum += term;
      largest = std::max(largest, std::abs(term));
      if (j > model.m2() && std::abs(term) <= 1e-18 * std::max(1.0, largest)) break;
    }
    coeff *= -model.m2() / (j + 1);
  }
  return sum * std::pow(2.0 * kPi, -half_d);
}

// G(t) - 1 with G the product over coordinates of the dual theta sums
// 1 + 2 sum_{n >= 1} exp(-n^2 / (2t)) cos(2 pi n u).
double dual_excess(double t, const std::vector<double>& u) {
  double product = 1.0;
  double excess = 0.0;
  for (double ui : u) {
    double eps = 0.0;
    for (int n = 1;; ++n) {
      const double w = std::exp(-static_cast<double>(n) * n / (2.0 * t));
      if (w < 1e-18) break;
      eps += 2.0 * w * std::cos(2.0 * kPi * n * ui);
    }
    excess = excess + product * eps;  // (1 + E)(1 + eps) - 1 = E + (1 + E) eps
    product *= 1.0 + eps;
  }
  return excess;
}

quadrature::Result<std::complex<double>> dual_remainder(const TorusModel& model,
                                                        const std::vector<double>& u,
                                                        std::complex<double> s) {
  const double half_d = 0.5 * model.dim();
  auto integrand = [&](double t) -> std::complex<double> {
    const double excess = dual_excess(t, u);
    if (excess == 0.0) return 0.0;
    return std::exp((s - 1.0) * std::log(t)) * std::exp(-model.m2() * t) *
           std::pow(2.0 * kPi * t, -half_d) * excess;
  };
  return quadrature::integrate(integrand, 0.0, 1.0, kRemainderTol);
}

void check_twist(const TorusModel& model, const TwistForm& twist) {
  if (twist.dim() != model.dim()) throw ConfigError("twist dimension does not match the torus");
}

}  // namespace

double ZetaContinuation::zeta_at_zero() const { return c_minus1; }

double ZetaContinuation::zeta_prime_at_zero() const { return c0 + kEulerGamma * c_minus1; }

std::complex<double> gamma_times_zeta(const TorusModel& model, const TwistForm& twist,
                                      std::complex<double> s) {
  check_twist(model, twist);
  const auto u = centred(twist);
  const auto upper = lattice_sum(model, u, [&](double lambda) {
    return std::exp(-s * std::log(lambda)) * special::upper_gamma(s, lambda);
  });
  return upper + leading_dual_series(model, s, false) + dual_remainder(model, u, s).value;
}

std::complex<double> zeta_value(const TorusModel& model, const TwistForm& twist,
                                std::complex<double> s) {
  check_twist(model, twist);
  const double half_d = 0.5 * model.dim();
  if (special::is_nonpositive_integer(s)) {
    // zeta(-n) = Res_{s=-n} Gamma(s) zeta(s) * (-1)^n n!; the residue comes from
    // the j = n + d/2 dual term and vanishes for odd d.
    if (model.dim() % 2 == 1) return 0.0;
    const int n = static_cast<int>(-std::round(s.real()));
    const int j = n + model.dim() / 2;
    double residue = std::pow(2.0 * kPi, -half_d) * std::pow(-model.m2(), j) / std::tgamma(j + 1.0);
    return residue * std::pow(-1.0, n) * std::tgamma(n + 1.0);
  }
  if (s.imag() == 0.0) {
    const double shifted = half_d - s.real();
    if (shifted >= 0.0 && shifted == std::round(shifted))
      throw PoleError("pole of the continued zeta function", s.real());
  }
  return gamma_times_zeta(model, twist, s) * special::rgamma(s);
}

ZetaContinuation zeta_continuation(const TorusModel& model, const TwistForm& twist) {
  check_twist(model, twist);
  const auto u = centred(twist);
  ZetaContinuation out;
  out.pole = 0.5 * model.dim();
  if (model.dim() % 2 == 0) {
    const int j = model.dim() / 2;
    out.c_minus1 = std::pow(2.0 * kPi, -out.pole) * std::pow(-model.m2(), j) / std::tgamma(j + 1.0);
  }
  const double upper = lattice_sum(model, u, [](double lambda) {
                         return std::complex<double>(special::expint_e1(lambda));
                       }).real();
  const double leading = leading_dual_series(model, 0.0, true).real();
  const auto remainder = dual_remainder(model, u, 0.0);
  out.c0 = upper + leading + remainder.value.real();
  out.quadrature_error = remainder.error;
  return out;
}

double zeta_prime_at_zero(const TorusModel& model, const TwistForm& twist) {
  return zeta_continuation(model, twist).zeta_prime_at_zero();
}

RegularizedDeterminant det_regularized(const TorusModel& model, const TwistForm& twist) {
  const double zp = zeta_prime_at_zero(model, twist);
  return {std::exp(-zp), -zp};
}

std::complex<double> zeta_value(const GraphSpectrum& spectrum, std::complex<double> s) {
  std::complex<double> sum = 0.0;
  for (const auto& rho : spectrum.eigenvalues) {
    if (rho == 0.0) throw PoleError("zero eigenvalue in finite spectrum", 0.0);
    sum += std::exp(-s * std::log(rho));
  }
  return sum;
}

std::complex<double> zeta_prime_at_zero(const GraphSpectrum& spectrum) {
  std::complex<double> sum = 0.0;
  for (const auto& rho : spectrum.eigenvalues) {
    if (rho == 0.0) throw PoleError("zero eigenvalue in finite spectrum", 0.0);
    sum -= std::log(rho);
  }
  return sum;
}

RegularizedDeterminant det_regularized(const GraphSpectrum& spectrum) {
  if (!spectrum.hermitian) throw ConfigError("determinant requires a Hermitian spectrum");
  double log_det = 0.0;
  for (const auto& rho : spectrum.eigenvalues) {
    if (!(rho.real() > 0.0)) throw ConfigError("finite spectrum is not positive");
    log_det += std::log(rho.real());
  }
  return {std::exp(log_det), log_det};
}

}  // namespace loopzeta
