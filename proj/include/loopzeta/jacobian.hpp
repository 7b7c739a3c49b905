#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace loopzeta {

// Law of a Z^b-valued random variable on the box |j|_inf <= window, stored
// densely (row-major, last coordinate fastest), with a bound on the mass
// that falls outside the box.
struct HomologyPMF {
  int dim = 0;
  int window = 0;
  std::vector<double> p;
  double tail_bound = 0.0;

  // Quadrature diagnostics (zero for exact or sampled laws).
  int grid = 0;
  double max_change = 0.0;
  double max_imag = 0.0;
  double min_raw = 0.0;
  // Bound on the error of each entry from truncated series (exact laws).
  double truncation_error = 0.0;

  int side() const { return 2 * window + 1; }
  std::vector<int> class_at(std::size_t index) const;
  // Index of j in p, or p.size() when j lies outside the window.
  std::size_t index_of(std::span<const int> j) const;
  double at(std::span<const int> j) const;
  double at(std::initializer_list<int> j) const { return at(std::span<const int>(j.begin(), j.size())); }
  double window_mass() const;
};

struct PmfOptions {
  int window = 30;
  int grid = 0;          // starting points per dimension; 0 picks a power of two >= 2 window + 2
  int max_grid = 4096;
  double tol = 1e-10;    // stop when successive grids change no entry by more than this
  unsigned threads = 0;  // 0 uses the hardware concurrency
  bool symmetrize = false;
};

using CharacteristicFunction = std::function<std::complex<double>(std::span<const double>)>;

// p_j = int_{[0,1)^dim} phi(u) exp(-2 pi i <j, u>) du by the periodic
// trapezoidal rule, the grid doubled until the window entries settle.
// Throws ConvergenceError when max_grid is exceeded. tail_bound is left 0.
HomologyPMF invert_characteristic_function(int dim, const CharacteristicFunction& phi,
                                           const PmfOptions& options);

unsigned resolve_threads(unsigned requested);

}  // namespace loopzeta
