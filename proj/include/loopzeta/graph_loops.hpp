#pragma once

#include <complex>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "loopzeta/graph_model.hpp"
#include "loopzeta/jacobian.hpp"

namespace loopzeta {

// log det M through the eigenvalues of M, each on its principal branch. For
// M = I - Q with spectral radius of Q below 1 this is the branch of
// -sum_k Tr(Q^k) / k.
std::complex<double> log_det(const Eigen::MatrixXcd& m);
// det M by LU with partial pivoting.
std::complex<double> det_lu(const Eigen::MatrixXcd& m);

// Total loop mass mu(1) = sum_k Tr(P^k) / k = -log det(I - P).
double loop_measure_mass(const GraphModel& graph);

// mu(T^s (exp(-<l, chi>) - 1)) = Gamma(s) [Tr((I - D P)^{-s}) - Tr((I - P)^{-s})],
// D = diag(lambda / (lambda + chi)).
double occupation_transform(const GraphModel& graph, std::span<const double> chi, double s);
// Its limit as s -> 0: log det(I - P) - log det(I - D P).
double occupation_limit(const GraphModel& graph, std::span<const double> chi);

// Gamma(s) [Tr((I - P*Z)^{-s}) - Tr((I - P)^{-s})] and its s -> 0 limit
// log det(I - P) - log det(I - P*Z). Requires |Z| <= 1.
std::complex<double> edge_transform(const GraphModel& graph, const EdgeWeighting& z, double s);
std::complex<double> edge_limit(const GraphModel& graph, const EdgeWeighting& z);

// Law of the soup homology in Z^{b1}:
// P(h = j) = int [det(I - P) / det(I - P*Z(w))]^alpha exp(-2 pi i <j, w>) dw.
HomologyPMF graph_homology_pmf(const GraphModel& graph, double alpha, const PmfOptions& options = {});
double graph_homology_tail_bound(const GraphModel& graph, double alpha, int window);

// E prod_l Tr(H(l)) = [det(I - P) / det(I - P_U)]^alpha with P_U the block
// transition matrix of the connection. Real and positive when P_U is
// Hermitian; directed self-loops can make it complex.
std::complex<double> holonomy_expectation(const GraphModel& graph, const Connection& connection,
                                          double alpha);

// A based discrete loop: arcs[i] leaves vertex i of the loop; holding[i] is
// the exponential holding time at that vertex.
struct DiscreteLoop {
  std::vector<int> arcs;
  std::vector<double> holding;

  int length() const { return static_cast<int>(arcs.size()); }
  std::vector<int> vertices(const GraphModel& graph) const;
  std::vector<double> occupation(const GraphModel& graph) const;
  std::vector<int> homology(const GraphModel& graph) const;
  double duration() const;
  std::complex<double> edge_weight(const EdgeWeighting& z) const;
  Eigen::MatrixXcd holonomy(const Connection& connection) const;
};

// Discrete loop soup of intensity alpha mu restricted to lengths <= k_max.
// Loops of length k arrive as Poisson(alpha Tr(P^k) / k); the base point is
// drawn proportional to (P^k)_{xx} and the path as a bridge.
class GraphSoupSampler {
 public:
  GraphSoupSampler(const GraphModel& graph, double alpha, int k_max, double tail_tol = 1e-8);

  std::vector<DiscreteLoop> sample(std::mt19937_64& rng) const;

  int k_max() const { return k_max_; }
  // alpha Tr(P^k) / k.
  double length_intensity(int k) const { return intensity_[k]; }
  double tail_bound() const { return tail_; }

 private:
  DiscreteLoop draw_loop(int k, std::mt19937_64& rng) const;

  const GraphModel* graph_;
  double alpha_;
  int k_max_;
  double tail_ = 0.0;
  std::vector<Eigen::MatrixXd> powers_;  // P^0 .. P^k_max
  std::vector<double> intensity_;        // index k
};

std::vector<DiscreteLoop> sample_graph_soup(const GraphModel& graph, double alpha,
                                            std::mt19937_64& rng, int k_max);

// Smallest k_max whose loop-mass tail alpha sum_{k > k_max} Tr(P^k)/k is below tol.
int graph_length_cutoff(const GraphModel& graph, double alpha, double tol);

// Functionals evaluated loop by loop during enumeration.
struct LoopFunctionals {
  std::vector<double> chi;            // occupation functional when non-empty
  std::optional<EdgeWeighting> z;     // edge functional
  std::optional<Connection> u;        // holonomy functional
  bool homology = true;
};

// Aggregate A = sum over enumerated loops of mu(l) (f(l) - 1) (or mu(l) for
// the mass), with error <= bound. The bound covers loops longer than k_max
// and pruned low-weight prefixes.
struct Bracket {
  std::complex<double> value = 0.0;
  double bound = 0.0;
  bool contains(std::complex<double> exact) const { return std::abs(exact - value) <= bound; }
};

struct EnumerationResult {
  Bracket mass;  // mass.value is a lower bound, mass.value + bound an upper bound
  std::optional<Bracket> occupation;
  std::optional<Bracket> edge;
  std::optional<Bracket> holonomy;
  std::map<std::vector<int>, double> homology_mass;  // mu-mass per class, lengths <= k_max
  long long loops = 0;
  long long pruned = 0;
  double pruned_mass_bound = 0.0;
  double length_tail_bound = 0.0;
};

struct EnumerationLimits {
  int max_vertices = 5;
  int max_length = 20;
  long long max_nodes = 400'000'000;
  double prune_weight = 1e-13;  // prefixes whose extension mass bound drops below this are cut
};

EnumerationResult enumerate_loops(const GraphModel& graph, int k_max,
                                  const LoopFunctionals& functionals = {},
                                  const EnumerationLimits& limits = {});

}  // namespace loopzeta
