#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "loopzeta/errors.hpp"
#include "loopzeta/torus_homology.hpp"
#include "support.hpp"

using namespace loopzeta;
using testsupport::kPi;

namespace {

double circle_char(double m, double u, double alpha) {
  const double c = std::cosh(std::sqrt(2.0) * m);
  return std::pow((c - 1.0) / (c - std::cos(2.0 * kPi * u)), alpha);
}

}  // namespace

TEST_CASE("winding intensity on the circle") {
  const TorusModel circle(1, 1.0);
  CHECK(winding_intensity(circle, {1}) == doctest::Approx(std::exp(-std::sqrt(2.0))).epsilon(1e-15));
  CHECK(winding_intensity(circle, {1}) == doctest::Approx(0.243117).epsilon(1e-6));
  CHECK(winding_intensity(circle, {-3}) == doctest::Approx(std::exp(-3.0 * std::sqrt(2.0)) / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(winding_intensity(circle, {0}), ConfigError);

  // The defining heat-kernel integral, evaluated independently.
  for (int n : {1, 2, 5}) {
    boost::math::quadrature::exp_sinh<double> q;
    const double ref = q.integrate(
        [&](double t) { return std::exp(-t - n * n / (2.0 * t)) / (t * std::sqrt(2.0 * kPi * t)); }, 0.0,
        std::numeric_limits<double>::infinity(), 1e-14);
    CHECK(winding_intensity(circle, {n}) == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("winding intensity on the square torus") {
  for (double m2 : {0.25, 1.0, 4.0}) {
    const TorusModel square(2, m2);
    for (int a = -3; a <= 3; ++a)
      for (int b = -3; b <= 3; ++b) {
        if (a == 0 && b == 0) continue;
        const std::vector<int> n{a, b};
        const double ref = testsupport::winding_bessel_oracle(std::sqrt(m2), std::hypot(a, b));
        CHECK(std::abs(winding_intensity(square, n) - ref) <= 1e-10 * ref);
        CHECK(winding_intensity(square, n) == doctest::Approx(winding_intensity_bessel(square, n)).epsilon(1e-10));
        const std::vector<int> neg{-a, -b};
        CHECK(winding_intensity(square, neg) == winding_intensity(square, n));
      }
  }
  CHECK(winding_intensity(TorusModel(2, 1.0), {1, 0}) == doctest::Approx(0.141438618123995).epsilon(1e-12));
}

TEST_CASE("winding tails bound the neglected mass") {
  for (int dim : {1, 2}) {
    const TorusModel model(dim, 1.0);
    for (int n_max : {2, 4, 6}) {
      double beyond = 0.0;
      const int far = 40;
      for (int a = -far; a <= far; ++a)
        for (int b = (dim == 2 ? -far : 0); b <= (dim == 2 ? far : 0); ++b) {
          if (std::max(std::abs(a), std::abs(b)) <= n_max) continue;
          std::vector<int> n{a};
          if (dim == 2) n.push_back(b);
          beyond += winding_intensity_bessel(model, n);
        }
      // The d = 1 bound is the exact tail, so allow for rounding.
      CHECK(beyond <= winding_tail_bound(model, n_max) * (1.0 + 1e-12));
      CHECK(winding_tail_bound(model, n_max) <= 20.0 * beyond);
    }
    const int cutoff = winding_cutoff(model, 1e-10);
    CHECK(winding_tail_bound(model, cutoff) <= 1e-10);
    CHECK(winding_tail_bound(model, cutoff - 1) > 1e-10);
  }
}

TEST_CASE("characteristic function examples") {
  const TorusModel circle(1, 1.0);
  CHECK(char_function(circle, SoupParams(1.0), TwistForm::zero(1)) == 1.0);
  CHECK(char_function(TorusModel(2, 1.0), SoupParams(2.0), TwistForm::zero(2)) == 1.0);
  const double t2 = std::pow(std::tanh(std::sqrt(2.0) / 2.0), 2);
  CHECK(char_function(circle, SoupParams(1.0), TwistForm({0.5})) == doctest::Approx(t2).epsilon(1e-12));
  CHECK(char_function(circle, SoupParams(1.0), TwistForm({0.5})) == doctest::Approx(0.37071).epsilon(1e-5));
  CHECK(char_function(circle, SoupParams(2.0), TwistForm({0.5})) == doctest::Approx(t2 * t2).epsilon(1e-12));
  CHECK(char_function_series(circle, SoupParams(1.0), TwistForm({0.5})).value ==
        doctest::Approx(std::pow((1.0 - std::exp(-std::sqrt(2.0))) / (1.0 + std::exp(-std::sqrt(2.0))), 2))
            .epsilon(1e-12));
  CHECK(char_function_series(circle, SoupParams(1.0), TwistForm::zero(1)).value == 1.0);
  CHECK_THROWS_AS(SoupParams(0.0), ConfigError);
  CHECK_THROWS_AS(SoupParams(-1.0), ConfigError);
}

TEST_CASE("three routes to the characteristic function agree") {
  for (double m : {0.5, 1.0, 2.0})
    for (double u : {0.0, 0.1, 0.25, 0.5})
      for (double alpha : {0.5, 1.0, 2.0}) {
        const TorusModel circle(1, m * m);
        const SoupParams params(alpha);
        const double zeta_route = char_function(circle, params, TwistForm({u}));
        const auto series = char_function_series(circle, params, TwistForm({u}));
        const double closed = circle_char(m, u, alpha);
        CHECK(std::abs(zeta_route - closed) <= 1e-8);
        CHECK(std::abs(series.value - closed) <= 1e-8);
        CHECK(std::abs(series.value - zeta_route) <= 1e-8);
        CHECK(series.tail_bound <= 1e-12);
      }
  // The square torus has no closed form; the two routes still have to meet.
  for (const std::vector<double>& u : {std::vector<double>{0.5, 0.0}, std::vector<double>{0.25, 0.4}}) {
    const TorusModel square(2, 1.0);
    const double zeta_route = char_function(square, SoupParams(1.5), TwistForm(u));
    CHECK(char_function_series(square, SoupParams(1.5), TwistForm(u)).value ==
          doctest::Approx(zeta_route).epsilon(1e-10));
  }
}

TEST_CASE("circle pmf: reference value, symmetry, normalization") {
  const TorusModel circle(1, 1.0);
  const auto pmf = homology_pmf(circle, SoupParams(1.0));
  CHECK(pmf.at({0}) == doctest::Approx(std::tanh(std::sqrt(2.0) / 2.0)).epsilon(1e-10));
  CHECK(pmf.at({0}) == doctest::Approx(0.60886).epsilon(1e-5));
  for (int j = 1; j <= pmf.window; ++j) CHECK(pmf.at({j}) == pmf.at({-j}));
  CHECK(std::abs(pmf.window_mass() + pmf.tail_bound - 1.0) <= 1e-8);
  CHECK(pmf.min_raw >= -1e-12);
  CHECK(pmf.max_imag <= 1e-10);
  for (double p : pmf.p) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("small intensity concentrates at zero") {
  const auto pmf = homology_pmf(TorusModel(1, 1.0), SoupParams(1e-9));
  CHECK(pmf.at({0}) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(pmf.at({1}) <= 1e-9);
  const auto exact = pmf_convolution_oracle(TorusModel(1, 1.0), SoupParams(1e-9), 10, 20);
  CHECK(exact.at({0}) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Fourier series of the pmf reproduces the characteristic function") {
  const TorusModel circle(1, 0.5);
  const SoupParams params(1.3);
  const auto pmf = homology_pmf(circle, params);
  for (double u : {0.05, 0.2, 0.45}) {
    double sum = 0.0;
    for (int j = -pmf.window; j <= pmf.window; ++j) sum += pmf.at({j}) * std::cos(2.0 * kPi * j * u);
    CHECK(std::abs(sum - char_function(circle, params, TwistForm({u}))) <= 1e-9 + pmf.tail_bound);
  }
  const TorusModel square(2, 1.0);
  PmfOptions options;
  options.window = 8;
  const auto pmf2 = homology_pmf(square, params, options);
  double sum = 0.0;
  for (std::size_t i = 0; i < pmf2.p.size(); ++i) {
    const auto j = pmf2.class_at(i);
    sum += pmf2.p[i] * std::cos(2.0 * kPi * (j[0] * 0.3 + j[1] * 0.1));
  }
  CHECK(std::abs(sum - char_function(square, params, TwistForm({0.3, 0.1}))) <= 1e-9 + pmf2.tail_bound);
}

TEST_CASE("square torus pmf is symmetric under the lattice symmetries") {
  PmfOptions options;
  options.window = 6;
  const auto pmf = homology_pmf(TorusModel(2, 1.0), SoupParams(1.0), options);
  for (int a = -6; a <= 6; ++a)
    for (int b = -6; b <= 6; ++b) {
      CHECK(pmf.at({a, b}) == pmf.at({-a, -b}));
      CHECK(pmf.at({a, b}) == doctest::Approx(pmf.at({b, a})).epsilon(1e-9));
      CHECK(pmf.at({a, b}) == doctest::Approx(pmf.at({-a, b})).epsilon(1e-9));
    }
  // A narrow window: the Chernoff bound is loose but must still cover the deficit.
  CHECK(pmf.window_mass() <= 1.0 + 1e-10);
  CHECK(pmf.window_mass() + pmf.tail_bound >= 1.0 - 1e-10);

  const auto full = homology_pmf(TorusModel(2, 1.0), SoupParams(1.0));
  CHECK(full.window == 30);
  CHECK(std::abs(full.window_mass() + full.tail_bound - 1.0) <= 1e-8);
  CHECK(full.min_raw >= -1e-12);
}

TEST_CASE("quadrature agrees with the exact convolution law") {
  for (double alpha : {0.5, 1.0, 2.0}) {
    const TorusModel circle(1, 1.0);
    const auto pmf = homology_pmf(circle, SoupParams(alpha));
    const auto exact = pmf_convolution_oracle(circle, SoupParams(alpha), 30, 30);
    CHECK(exact.truncation_error <= 1e-12);
    for (int j = -30; j <= 30; ++j) CHECK(std::abs(pmf.at({j}) - exact.at({j})) <= 1e-8);
  }
}

TEST_CASE("Chernoff tail bound dominates the actual tail") {
  const TorusModel circle(1, 1.0);
  const auto exact = pmf_convolution_oracle(circle, SoupParams(2.0), 60, 40);
  for (int w : {2, 5, 10}) {
    double outside = 0.0;
    for (int j = -60; j <= 60; ++j)
      if (std::abs(j) > w) outside += exact.at({j});
    CHECK(outside <= homology_tail_bound(circle, SoupParams(2.0), w));
  }
}

TEST_CASE("sampler is reproducible and matches the pmf") {
  const TorusModel circle(1, 1.0);
  const SoupParams params(1.0);
  const SoupHomologySampler sampler(circle, params, winding_cutoff(circle, 1e-9));
  CHECK(sampler.tail_bound() <= 1e-8);
  std::mt19937_64 a(99), b(99);
  for (int i = 0; i < 100; ++i) CHECK(sampler.sample(a) == sampler.sample(b));

  std::mt19937_64 rng(7);
  const int n = 20000;
  std::map<int, int> counts;
  double mean = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const int h = sampler.sample(rng)[0];
    ++counts[h];
    mean += h;
    sq += double(h) * h;
  }
  mean /= n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean) <= 3.0 * se);
  CHECK(std::abs(testsupport::z_score(counts[0], n, 0.6088593650139138)) <= 3.0);

  CHECK_THROWS_AS(SoupHomologySampler(circle, params, 2), TailBoundError);
  std::mt19937_64 quiet(1);
  int nonzero = 0;
  for (int i = 0; i < 1000; ++i) nonzero += sample_soup_homology(circle, SoupParams(1e-6), quiet, 20)[0] != 0;
  CHECK(nonzero <= 1);
}

TEST_CASE("pmf does not depend on the thread count") {
  PmfOptions one, many;
  one.window = many.window = 5;
  one.threads = 1;
  many.threads = 3;
  const TorusModel square(2, 0.7);
  const auto a = homology_pmf(square, SoupParams(1.2), one);
  const auto b = homology_pmf(square, SoupParams(1.2), many);
  CHECK(a.p == b.p);
  CHECK(a.grid == b.grid);
}
