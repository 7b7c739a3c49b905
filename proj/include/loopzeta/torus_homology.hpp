#pragma once

#include <random>
#include <span>
#include <vector>

#include "loopzeta/jacobian.hpp"
#include "loopzeta/spectra.hpp"

namespace loopzeta {

using HomologyClass = std::vector<int>;

// Intensity multiplier of the loop soup.
struct SoupParams {
  explicit SoupParams(double alpha);
  double alpha;
};

// mu-mass of the loops in homology class n != 0:
//   mu_n = int_0^inf dt/t exp(-m2 t) (2 pi t)^{-d/2} exp(-|n|^2 / (2t)).
// Closed form exp(-sqrt(2) m |n|) / |n| for d = 1; adaptive quadrature for d = 2.
double winding_intensity(const TorusModel& model, std::span<const int> n);
double winding_intensity(const TorusModel& model, std::initializer_list<int> n);

// The Bessel form (sqrt(2) m / (pi |n|)) K_1(sqrt(2) m |n|) for d = 2
// (and the exponential form for d = 1).
double winding_intensity_bessel(const TorusModel& model, std::span<const int> n);

// Upper bound on sum of mu_n over |n|_inf > n_max.
double winding_tail_bound(const TorusModel& model, int n_max);
// Smallest n_max whose tail bound is at most mass_tol.
int winding_cutoff(const TorusModel& model, double mass_tol);

// E exp(2 pi i <h, u>) = exp(alpha [zeta_u'(0) - zeta'(0)]) through the
// continued zeta functions of the twisted and untwisted generators.
double char_function(const TorusModel& model, const SoupParams& params, const TwistForm& twist);

struct SeriesEvaluation {
  double value = 0.0;
  double exponent = 0.0;    // alpha sum_{n != 0} (cos 2 pi <n, u> - 1) mu_n
  double tail_bound = 0.0;  // bound on the neglected part of the exponent
  int n_max = 0;
};

// The same quantity from the winding intensities, exp(alpha sum (e^{2 pi i<n,u>} - 1) mu_n).
SeriesEvaluation char_function_series(const TorusModel& model, const SoupParams& params,
                                      const TwistForm& twist, double tail_tol = 1e-12);

// Chernoff bound on P(|h|_inf > window).
double homology_tail_bound(const TorusModel& model, const SoupParams& params, int window);

// P(h = j) = int_Jac [det'(-A) / det'(-A_u)]^alpha exp(-2 pi i <j, u>) du.
HomologyPMF homology_pmf(const TorusModel& model, const SoupParams& params,
                         const PmfOptions& options = {});

// Homology of a loop soup as a Poisson superposition over classes:
// h = sum_{0 < |n|_inf <= n_max} n N_n, N_n ~ Poisson(alpha mu_n).
class SoupHomologySampler {
 public:
  SoupHomologySampler(const TorusModel& model, const SoupParams& params, int n_max,
                      double tail_tol = 1e-8);

  HomologyClass sample(std::mt19937_64& rng) const;

  int dim() const { return dim_; }
  int n_max() const { return n_max_; }
  double total_intensity() const { return total_; }
  double tail_bound() const { return tail_; }

 private:
  int dim_;
  int n_max_;
  double total_ = 0.0;
  double tail_ = 0.0;
  std::vector<HomologyClass> classes_;
  std::vector<double> cumulative_;
};

HomologyClass sample_soup_homology(const TorusModel& model, const SoupParams& params,
                                   std::mt19937_64& rng, int n_max);

// Exact law of sum n N_n by direct convolution of truncated Poisson laws (d = 1).
// truncation_error bounds the effect of the truncations on each entry;
// tail_bound is the mass outside the window.
HomologyPMF pmf_convolution_oracle(const TorusModel& model, const SoupParams& params, int window,
                                   int n_max);

}  // namespace loopzeta
