#include "loopzeta/torus_homology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "loopzeta/errors.hpp"
#include "loopzeta/quadrature.hpp"
#include "loopzeta/special.hpp"
#include "loopzeta/zeta_engine.hpp"

namespace loopzeta {

using special::kPi;

namespace {

long long norm2(std::span<const int> n) {
  long long s = 0;
  for (int x : n) s += static_cast<long long>(x) * x;
  return s;
}

double decay_rate(const TorusModel& model) { return std::sqrt(2.0) * model.mass(); }

// int_0^inf dt/t exp(-m2 t) (2 pi t)^{-d/2} exp(-r2 / (2t)) with t = e^y.
double intensity_quadrature(const TorusModel& model, double r2) {
  const double m2 = model.m2();
  const double half_d = 0.5 * model.dim();
  auto exponent = [&](double y) { return -half_d * y - m2 * std::exp(y) - 0.5 * r2 * std::exp(-y); };
  // Peak of the exponent: -d/2 - m2 e^y + (r2/2) e^{-y} = 0.
  const double peak_t = (-half_d + std::sqrt(half_d * half_d + 2.0 * m2 * r2)) / (2.0 * m2);
  const double y_peak = std::log(peak_t);
  const double top = exponent(y_peak);
  double lo = y_peak;
  double hi = y_peak;
  while (exponent(lo) > top - 90.0) lo -= 0.5;
  while (exponent(hi) > top - 90.0) hi += 0.5;
  auto integrand = [&](double y) { return std::exp(exponent(y) - top); };
  const auto r = quadrature::integrate(integrand, lo, hi, 1e-15 * (hi - lo), 8);
  return std::exp(top) * r.value * std::pow(2.0 * kPi, -half_d);
}

// mu at |n| = r in closed form, decreasing in r.
double radial_intensity(const TorusModel& model, double r) {
  const double a = decay_rate(model);
  if (model.dim() == 1) return std::exp(-a * r) / r;
  return a / (kPi * r) * std::cyl_bessel_k(1.0, a * r);
}

// Points with |n|_inf = r.
double shell_size(int dim, int r) { return dim == 1 ? 2.0 : 8.0 * r; }

// Sum over shells r > n_max of shell_size * e^{theta r} * mu(r); the summand
// ratio is at most e^{theta - a} because e^z K_1(z) decreases.
double shell_tail(const TorusModel& model, int n_max, double theta) {
  const double q = std::exp(theta - decay_rate(model));
  double sum = 0.0;
  for (int r = n_max + 1;; ++r) {
    const double term = shell_size(model.dim(), r) * std::exp(theta * r) * radial_intensity(model, r);
    sum += term;
    if (term <= 1e-30 * std::max(sum, 1e-300) || term == 0.0) return sum + term * q / (1.0 - q);
  }
}

// Visits every n != 0 with |n|_inf <= n_max, caching mu by |n|^2.
template <class Visit>
void for_each_class(const TorusModel& model, int n_max, Visit&& visit) {
  std::map<long long, double> cache;
  auto mu = [&](std::span<const int> n) {
    const long long key = norm2(n);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, winding_intensity(model, n)).first;
    return it->second;
  };
  if (model.dim() == 1) {
    for (int a = -n_max; a <= n_max; ++a) {
      if (a == 0) continue;
      const int n[1] = {a};
      visit(std::span<const int>(n), mu(n));
    }
    return;
  }
  for (int a = -n_max; a <= n_max; ++a)
    for (int b = -n_max; b <= n_max; ++b) {
      if (a == 0 && b == 0) continue;
      const int n[2] = {a, b};
      visit(std::span<const int>(n), mu(n));
    }
}

}  // namespace

SoupParams::SoupParams(double a) : alpha(a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("soup intensity alpha must be positive");
}

double winding_intensity(const TorusModel& model, std::span<const int> n) {
  if (static_cast<int>(n.size()) != model.dim())
    throw ConfigError("homology class dimension does not match the torus");
  const long long r2 = norm2(n);
  if (r2 == 0) throw ConfigError("winding intensity of the zero class is infinite");
  if (model.dim() == 1) {
    const double r = std::sqrt(static_cast<double>(r2));
    return std::exp(-decay_rate(model) * r) / r;
  }
  return intensity_quadrature(model, static_cast<double>(r2));
}

double winding_intensity(const TorusModel& model, std::initializer_list<int> n) {
  return winding_intensity(model, std::span<const int>(n.begin(), n.size()));
}

double winding_intensity_bessel(const TorusModel& model, std::span<const int> n) {
  if (static_cast<int>(n.size()) != model.dim())
    throw ConfigError("homology class dimension does not match the torus");
  const long long r2 = norm2(n);
  if (r2 == 0) throw ConfigError("winding intensity of the zero class is infinite");
  return radial_intensity(model, std::sqrt(static_cast<double>(r2)));
}

double winding_tail_bound(const TorusModel& model, int n_max) {
  if (n_max < 0) throw ConfigError("n_max must be non-negative");
  return shell_tail(model, n_max, 0.0);
}

int winding_cutoff(const TorusModel& model, double mass_tol) {
  if (!(mass_tol > 0.0)) throw ConfigError("tail tolerance must be positive");
  int n = 1;
  while (winding_tail_bound(model, n) > mass_tol) ++n;
  return n;
}

double char_function(const TorusModel& model, const SoupParams& params, const TwistForm& twist) {
  const double base = zeta_prime_at_zero(model, TwistForm::zero(model.dim()));
  return std::exp(params.alpha * (zeta_prime_at_zero(model, twist) - base));
}

SeriesEvaluation char_function_series(const TorusModel& model, const SoupParams& params,
                                      const TwistForm& twist, double tail_tol) {
  if (twist.dim() != model.dim()) throw ConfigError("twist dimension does not match the torus");
  SeriesEvaluation out;
  // |cos - 1| <= 2, so the neglected exponent is at most 2 alpha * tail mass.
  out.n_max = winding_cutoff(model, tail_tol / (2.0 * params.alpha));
  out.tail_bound = 2.0 * params.alpha * winding_tail_bound(model, out.n_max);
  const auto u = twist.coords();
  double sum = 0.0;
  for_each_class(model, out.n_max, [&](std::span<const int> n, double mu) {
    double phase = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) phase += n[i] * u[i];
    sum += (std::cos(2.0 * kPi * phase) - 1.0) * mu;
  });
  out.exponent = params.alpha * sum;
  out.value = std::exp(out.exponent);
  return out;
}

double homology_tail_bound(const TorusModel& model, const SoupParams& params, int window) {
  if (window < 0) throw ConfigError("window must be non-negative");
  const double a = decay_rate(model);
  const int inner = std::max(1, winding_cutoff(model, 1e-3));
  double best = std::numeric_limits<double>::infinity();
  for (int step = 1; step < 20; ++step) {
    const double theta = a * step / 20.0;
    // E exp(theta h_1) = exp(alpha sum (cosh(theta n_1) - 1) mu_n).
    double exponent = 0.0;
    for (int r = 1; r <= inner; ++r) {
      // Shell r, closed-form intensities.
      auto add = [&](int n1, int n2) {
        const double rr = std::sqrt(static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2);
        exponent += (std::cosh(theta * n1) - 1.0) * radial_intensity(model, rr);
      };
      if (model.dim() == 1) {
        add(r, 0);
        add(-r, 0);
      } else {
        for (int x = -r; x <= r; ++x)
          for (int y = -r; y <= r; ++y)
            if (std::max(std::abs(x), std::abs(y)) == r) add(x, y);
      }
    }
    exponent += shell_tail(model, inner, theta);
    const double bound = 2.0 * model.dim() * std::exp(params.alpha * exponent - theta * (window + 1));
    best = std::min(best, bound);
  }
  return std::min(best, 1.0);
}

HomologyPMF homology_pmf(const TorusModel& model, const SoupParams& params,
                         const PmfOptions& options) {
  const double base = zeta_prime_at_zero(model, TwistForm::zero(model.dim()));
  PmfOptions opts = options;
  opts.symmetrize = true;
  auto phi = [&](std::span<const double> u) -> std::complex<double> {
    const TwistForm twist(std::vector<double>(u.begin(), u.end()));
    return std::exp(params.alpha * (zeta_prime_at_zero(model, twist) - base));
  };
  HomologyPMF pmf = invert_characteristic_function(model.dim(), phi, opts);
  pmf.tail_bound = homology_tail_bound(model, params, options.window);
  return pmf;
}

SoupHomologySampler::SoupHomologySampler(const TorusModel& model, const SoupParams& params,
                                         int n_max, double tail_tol)
    : dim_(model.dim()), n_max_(n_max) {
  if (n_max < 1) throw ConfigError("n_max must be at least 1");
  tail_ = params.alpha * winding_tail_bound(model, n_max);
  if (tail_ > tail_tol)
    throw TailBoundError("soup intensity beyond n_max exceeds the threshold", tail_);
  for_each_class(model, n_max, [&](std::span<const int> n, double mu) {
    total_ += params.alpha * mu;
    classes_.emplace_back(n.begin(), n.end());
    cumulative_.push_back(total_);
  });
}

HomologyClass SoupHomologySampler::sample(std::mt19937_64& rng) const {
  HomologyClass h(dim_, 0);
  std::poisson_distribution<long> count(total_);
  std::uniform_real_distribution<double> uniform(0.0, total_);
  const long loops = count(rng);
  for (long i = 0; i < loops; ++i) {
    const double x = uniform(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
    if (it == cumulative_.end()) --it;
    const auto& n = classes_[static_cast<std::size_t>(it - cumulative_.begin())];
    for (int a = 0; a < dim_; ++a) h[a] += n[a];
  }
  return h;
}

HomologyClass sample_soup_homology(const TorusModel& model, const SoupParams& params,
                                   std::mt19937_64& rng, int n_max) {
  return SoupHomologySampler(model, params, n_max).sample(rng);
}

HomologyPMF pmf_convolution_oracle(const TorusModel& model, const SoupParams& params, int window,
                                   int n_max) {
  if (model.dim() != 1) throw ConfigError("convolution oracle is implemented for d = 1");
  if (window < 0 || n_max < 1) throw ConfigError("window and n_max must be positive");
  const int support = 4 * (window + n_max);
  const int width = 2 * support + 1;
  std::vector<double> law(width, 0.0);
  law[support] = 1.0;
  double dropped = 0.0;
  double count_tail = 0.0;

  for (int n = -n_max; n <= n_max; ++n) {
    if (n == 0) continue;
    const double mean = params.alpha * winding_intensity(model, {n});
    // Poisson(mean) weights until the remaining mass is negligible.
    std::vector<double> weights;
    double w = std::exp(-mean);
    double cumulative = 0.0;
    for (int k = 0; k * std::abs(n) <= 2 * support; ++k) {
      weights.push_back(w);
      cumulative += w;
      if (k > mean && 1.0 - cumulative < 1e-17) break;
      w *= mean / (k + 1);
    }
    count_tail += std::max(0.0, 1.0 - cumulative);
    std::vector<double> next(width, 0.0);
    for (int x = 0; x < width; ++x) {
      if (law[x] == 0.0) continue;
      for (std::size_t k = 0; k < weights.size(); ++k) {
        const long long y = x + static_cast<long long>(n) * static_cast<long long>(k);
        if (y < 0 || y >= width) {
          dropped += law[x] * weights[k];
          continue;
        }
        next[y] += law[x] * weights[k];
      }
    }
    law = std::move(next);
  }

  HomologyPMF out;
  out.dim = 1;
  out.window = window;
  out.p.assign(law.begin() + (support - window), law.begin() + (support + window + 1));
  out.truncation_error = dropped + count_tail + params.alpha * winding_tail_bound(model, n_max);
  out.tail_bound = std::max(0.0, 1.0 - out.window_mass());
  out.min_raw = *std::min_element(out.p.begin(), out.p.end());
  return out;
}

}  // namespace loopzeta
