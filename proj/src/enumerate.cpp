#include <cmath>

#include "loopzeta/errors.hpp"
#include "loopzeta/graph_loops.hpp"

namespace loopzeta {

EnumerationResult enumerate_loops(const GraphModel& graph, int k_max,
                                  const LoopFunctionals& functionals,
                                  const EnumerationLimits& limits) {
  const int n = graph.vertex_count();
  if (n > limits.max_vertices)
    throw ConfigError("enumeration supports at most " + std::to_string(limits.max_vertices) + " vertices");
  if (k_max < 1 || k_max > limits.max_length)
    throw ConfigError("enumeration length must lie in [1, " + std::to_string(limits.max_length) + "]");

  const bool track_occ = !functionals.chi.empty();
  std::vector<double> scale(n, 1.0);
  if (track_occ) {
    if (static_cast<int>(functionals.chi.size()) != n) throw ConfigError("chi needs one value per vertex");
    for (int x = 0; x < n; ++x) {
      if (!(functionals.chi[x] >= 0.0)) throw ConfigError("chi must be non-negative");
      scale[x] = graph.holding_rates()[x] / (graph.holding_rates()[x] + functionals.chi[x]);
    }
  }
  const EdgeWeighting* z = functionals.z ? &*functionals.z : nullptr;
  const Connection* u = functionals.u ? &*functionals.u : nullptr;
  if (z && z->values().size() != graph.arcs().size()) throw ConfigError("weighting does not match the graph");
  if (z && z->max_modulus() > 1.0 + 1e-12) throw ConfigError("edge weights must satisfy |Z| <= 1");
  const int rank = u ? u->rank() : 1;

  EnumerationResult out;
  std::complex<double> occ_sum = 0.0;
  std::complex<double> edge_sum = 0.0;
  std::complex<double> hol_sum = 0.0;
  double mass = 0.0;

  const double rho = graph.spectral_radius();
  const double geometric = rho > 0.0 ? rho / (1.0 - rho) : 0.0;

  // Per-depth state of the current prefix.
  std::vector<double> weight(k_max + 1, 1.0);
  std::vector<double> occ(k_max + 1, 1.0);
  std::vector<std::complex<double>> zprod(k_max + 1, 1.0);
  std::vector<Eigen::MatrixXcd> hol(k_max + 1, Eigen::MatrixXcd::Identity(rank, rank));
  std::vector<int> homology(graph.cycle_rank(), 0);
  long long nodes = 0;
  int base = 0;

  auto visit = [&](auto&& self, int depth, int vertex) -> void {
    if (++nodes > limits.max_nodes)
      throw ConfigError("loop enumeration exceeds its node budget; lower k_max or use a sparser graph");
    if (depth >= 1 && vertex == base) {
      const double mu = weight[depth] / depth;
      mass += mu;
      if (track_occ) occ_sum += mu * (occ[depth] - 1.0);
      if (z) edge_sum += mu * (zprod[depth] - 1.0);
      if (u) hol_sum += mu * (hol[depth].trace() - 1.0);
      if (functionals.homology) out.homology_mass[homology] += mu;
      ++out.loops;
    }
    if (depth == k_max) return;
    // Loops extending this prefix have mass at most w rho / ((depth + 1)(1 - rho)).
    const double extension = weight[depth] * geometric / (depth + 1);
    if (extension < limits.prune_weight) {
      out.pruned_mass_bound += extension;
      ++out.pruned;
      return;
    }
    for (int arc : graph.arcs_from(vertex)) {
      const Arc& a = graph.arcs()[arc];
      weight[depth + 1] = weight[depth] * graph.edges()[a.edge].p;
      if (track_occ) occ[depth + 1] = occ[depth] * scale[vertex];
      if (z) zprod[depth + 1] = zprod[depth] * (*z)[arc];
      if (u) hol[depth + 1].noalias() = hol[depth] * (*u)[arc];
      const int c = graph.cycle_coordinate(a.edge);
      if (c >= 0) homology[c] += graph.arc_sign(arc);
      self(self, depth + 1, a.to);
      if (c >= 0) homology[c] -= graph.arc_sign(arc);
    }
  };
  for (base = 0; base < n; ++base) visit(visit, 0, base);

  out.length_tail_bound =
      rho > 0.0 ? n * std::pow(rho, k_max + 1) / ((k_max + 1) * (1.0 - rho)) : 0.0;
  const double missing = out.length_tail_bound + out.pruned_mass_bound;
  out.mass = {mass, missing};
  if (track_occ) out.occupation = Bracket{occ_sum, missing};
  if (z) out.edge = Bracket{edge_sum, (1.0 + z->max_modulus()) * missing};
  if (u) out.holonomy = Bracket{hol_sum, (rank + 1.0) * missing};
  return out;
}

}  // namespace loopzeta
