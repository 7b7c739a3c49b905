#include "loopzeta/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <thread>

#include "loopzeta/errors.hpp"
#include "loopzeta/special.hpp"

namespace loopzeta {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Evaluates phi on the N^dim grid, reusing the values of the N/2 grid.
std::vector<std::complex<double>> evaluate_grid(int dim, int n, const CharacteristicFunction& phi,
                                                const std::vector<std::complex<double>>& coarse,
                                                unsigned threads) {
  const std::size_t count = ipow(n, dim);
  std::vector<std::complex<double>> values(count);
  auto coords = [&](std::size_t index) {
    std::vector<int> idx(dim);
    for (int a = dim - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(index % n);
      index /= n;
    }
    return idx;
  };
  auto work = [&](std::size_t index) {
    const auto idx = coords(index);
    if (!coarse.empty() && std::all_of(idx.begin(), idx.end(), [](int i) { return i % 2 == 0; })) {
      std::size_t c = 0;
      for (int i : idx) c = c * (n / 2) + i / 2;
      values[index] = coarse[c];
      return;
    }
    std::vector<double> u(dim);
    for (int a = 0; a < dim; ++a) u[a] = static_cast<double>(idx[a]) / n;
    values[index] = phi(u);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) work(i);
    return values;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) work(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return values;
}

// Fourier coefficients for |j|_inf <= window, one axis at a time.
std::vector<std::complex<double>> window_coefficients(int dim, int n, int window,
                                                      std::vector<std::complex<double>> data) {
  const int side = 2 * window + 1;
  std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(side) * n);
  for (int f = 0; f < side; ++f)
    for (int k = 0; k < n; ++k) {
      const long long phase = (static_cast<long long>(f - window) * k) % n;
      twiddle[static_cast<std::size_t>(f) * n + k] =
          std::polar(1.0, -2.0 * special::kPi * static_cast<double>(phase) / n);
    }

  // Shape: axes [0, a) already transformed (size side), [a, dim) raw (size n).
  for (int a = 0; a < dim; ++a) {
    const std::size_t outer = ipow(side, a);
    const std::size_t inner = ipow(n, dim - a - 1);
    std::vector<std::complex<double>> next(outer * side * inner);
    for (std::size_t o = 0; o < outer; ++o)
      for (int f = 0; f < side; ++f)
        for (std::size_t i = 0; i < inner; ++i) {
          std::complex<double> acc = 0.0;
          for (int k = 0; k < n; ++k)
            acc += data[(o * n + k) * inner + i] * twiddle[static_cast<std::size_t>(f) * n + k];
          next[(o * side + f) * inner + i] = acc;
        }
    data = std::move(next);
  }
  const double scale = 1.0 / static_cast<double>(ipow(n, dim));
  for (auto& v : data) v *= scale;
  return data;
}

}  // namespace

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<int> HomologyPMF::class_at(std::size_t index) const {
  std::vector<int> j(dim);
  for (int a = dim - 1; a >= 0; --a) {
    j[a] = static_cast<int>(index % side()) - window;
    index /= side();
  }
  return j;
}

std::size_t HomologyPMF::index_of(std::span<const int> j) const {
  if (static_cast<int>(j.size()) != dim) throw ConfigError("homology class has wrong dimension");
  std::size_t index = 0;
  for (int x : j) {
    if (std::abs(x) > window) return p.size();
    index = index * side() + static_cast<std::size_t>(x + window);
  }
  return index;
}

double HomologyPMF::at(std::span<const int> j) const {
  const std::size_t i = index_of(j);
  return i < p.size() ? p[i] : 0.0;
}

double HomologyPMF::window_mass() const {
  double sum = 0.0;
  for (double x : p) sum += x;
  return sum;
}

HomologyPMF invert_characteristic_function(int dim, const CharacteristicFunction& phi,
                                           const PmfOptions& options) {
  if (dim < 0) throw ConfigError("negative Jacobian dimension");
  if (options.window < 0) throw ConfigError("window must be non-negative");
  HomologyPMF out;
  out.dim = dim;
  out.window = options.window;
  if (dim == 0) {
    out.p = {1.0};
    return out;
  }

  int n = options.grid;
  if (n == 0) {
    n = 8;
    while (n < 2 * options.window + 2) n *= 2;
  }
  if (n < 8) throw ConfigError("quadrature grid needs at least 8 points per dimension");
  const unsigned threads = resolve_threads(options.threads);

  auto values = evaluate_grid(dim, n, phi, {}, threads);
  auto coeffs = window_coefficients(dim, n, options.window, values);
  double change = 0.0;
  while (true) {
    if (2 * n > options.max_grid)
      throw ConvergenceError("Jacobian grid doubling did not converge by N = " +
                                 std::to_string(options.max_grid),
                             change);
    n *= 2;
    values = evaluate_grid(dim, n, phi, values, threads);
    auto next = window_coefficients(dim, n, options.window, values);
    change = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) change = std::max(change, std::abs(next[i] - coeffs[i]));
    coeffs = std::move(next);
    if (change <= options.tol) break;
  }

  out.grid = n;
  out.max_change = change;
  out.p.resize(coeffs.size());
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    out.p[i] = coeffs[i].real();
    out.max_imag = std::max(out.max_imag, std::abs(coeffs[i].imag()));
  }
  if (out.max_imag > std::max(options.tol, 1e-10))
    throw ConvergenceError("Fourier inversion left an imaginary residue", out.max_imag);
  if (options.symmetrize) {
    // Index reversal maps j to -j on the symmetric box.
    const std::size_t last = out.p.size() - 1;
    for (std::size_t i = 0; i <= last / 2; ++i) {
      const double mean = 0.5 * (out.p[i] + out.p[last - i]);
      out.p[i] = out.p[last - i] = mean;
    }
  }
  out.min_raw = *std::min_element(out.p.begin(), out.p.end());
  for (double& x : out.p) x = std::max(x, 0.0);
  return out;
}

}  // namespace loopzeta
