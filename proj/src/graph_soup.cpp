#include <algorithm>
#include <cmath>

#include "loopzeta/errors.hpp"
#include "loopzeta/graph_loops.hpp"

namespace loopzeta {

namespace {

// alpha sum_{k > k_max} Tr(P^k) / k <= alpha n rho^{k_max+1} / ((k_max + 1)(1 - rho)).
double length_tail(const GraphModel& graph, double alpha, int k_max) {
  const double rho = graph.spectral_radius();
  if (rho == 0.0) return 0.0;
  return alpha * graph.vertex_count() * std::pow(rho, k_max + 1) / ((k_max + 1) * (1.0 - rho));
}

// Index drawn proportionally to non-negative weights.
template <class Weights>
int draw_index(const Weights& weights, double total, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(0.0, total);
  const double x = uniform(rng);
  double acc = 0.0;
  int last = -1;
  for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (x < acc) return i;
  }
  return last;
}

}  // namespace

int graph_length_cutoff(const GraphModel& graph, double alpha, double tol) {
  if (!(tol > 0.0)) throw ConfigError("tail tolerance must be positive");
  int k = 1;
  while (length_tail(graph, alpha, k) > tol) ++k;
  return k;
}

GraphSoupSampler::GraphSoupSampler(const GraphModel& graph, double alpha, int k_max, double tail_tol)
    : graph_(&graph), alpha_(alpha), k_max_(k_max) {
  if (!(alpha > 0.0)) throw ConfigError("soup intensity alpha must be positive");
  if (k_max < 1) throw ConfigError("k_max must be at least 1");
  tail_ = length_tail(graph, alpha, k_max);
  if (tail_ > tail_tol) throw TailBoundError("loop mass beyond k_max exceeds the threshold", tail_);
  const int n = graph.vertex_count();
  powers_.push_back(Eigen::MatrixXd::Identity(n, n));
  intensity_.push_back(0.0);
  for (int k = 1; k <= k_max; ++k) {
    powers_.push_back(powers_.back() * graph.transition());
    intensity_.push_back(alpha * powers_.back().trace() / k);
  }
}

DiscreteLoop GraphSoupSampler::draw_loop(int k, std::mt19937_64& rng) const {
  const GraphModel& g = *graph_;
  const Eigen::VectorXd diag = powers_[k].diagonal();
  const int base = draw_index(diag, diag.sum(), rng);
  DiscreteLoop loop;
  loop.arcs.reserve(k);
  loop.holding.reserve(k);
  int x = base;
  std::vector<double> weights;
  for (int i = 0; i < k; ++i) {
    // Bridge step: arc x -> y weighted by p (P^{k-i-1})_{y, base}.
    const auto& out = g.arcs_from(x);
    weights.assign(out.size(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j) {
      const Arc& a = g.arcs()[out[j]];
      weights[j] = g.edges()[a.edge].p * powers_[k - i - 1](a.to, base);
      total += weights[j];
    }
    const int arc = out[draw_index(weights, total, rng)];
    std::exponential_distribution<double> holding(g.holding_rates()[x]);
    loop.arcs.push_back(arc);
    loop.holding.push_back(holding(rng));
    x = g.arcs()[arc].to;
  }
  return loop;
}

std::vector<DiscreteLoop> GraphSoupSampler::sample(std::mt19937_64& rng) const {
  std::vector<DiscreteLoop> soup;
  for (int k = 1; k <= k_max_; ++k) {
    if (intensity_[k] <= 0.0) continue;
    std::poisson_distribution<long> count(intensity_[k]);
    const long loops = count(rng);
    for (long i = 0; i < loops; ++i) soup.push_back(draw_loop(k, rng));
  }
  return soup;
}

std::vector<DiscreteLoop> sample_graph_soup(const GraphModel& graph, double alpha,
                                            std::mt19937_64& rng, int k_max) {
  return GraphSoupSampler(graph, alpha, k_max).sample(rng);
}

}  // namespace loopzeta
