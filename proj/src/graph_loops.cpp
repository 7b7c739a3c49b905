#include "loopzeta/graph_loops.hpp"

#include <algorithm>
#include <cmath>

#include "loopzeta/errors.hpp"

namespace loopzeta {

namespace {

constexpr double kModulusSlack = 1e-12;

Eigen::MatrixXd identity_minus(const Eigen::MatrixXd& q) {
  return Eigen::MatrixXd::Identity(q.rows(), q.cols()) - q;
}

double real_log_det(const Eigen::MatrixXd& m) {
  const double det = Eigen::PartialPivLU<Eigen::MatrixXd>(m).determinant();
  if (!(det > 0.0)) throw ConfigError("determinant is not positive");
  return std::log(det);
}

Eigen::VectorXd symmetric_spectrum(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

// D P with D = diag(lambda / (lambda + chi)).
Eigen::VectorXd occupation_scaling(const GraphModel& graph, std::span<const double> chi) {
  const int n = graph.vertex_count();
  if (static_cast<int>(chi.size()) != n) throw ConfigError("chi needs one value per vertex");
  Eigen::VectorXd d(n);
  for (int x = 0; x < n; ++x) {
    if (!(chi[x] >= 0.0) || !std::isfinite(chi[x]))
      throw ConfigError("chi must be non-negative at vertex " + std::to_string(x));
    const double lambda = graph.holding_rates()[x];
    d[x] = lambda / (lambda + chi[x]);
  }
  return d;
}

void check_modulus(const EdgeWeighting& z) {
  if (z.max_modulus() > 1.0 + kModulusSlack) throw ConfigError("edge weights must satisfy |Z| <= 1");
}

}  // namespace

std::complex<double> log_det(const Eigen::MatrixXcd& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  std::complex<double> sum = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) sum += std::log(solver.eigenvalues()[i]);
  return sum;
}

std::complex<double> det_lu(const Eigen::MatrixXcd& m) {
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant();
}

double loop_measure_mass(const GraphModel& graph) {
  return -real_log_det(identity_minus(graph.transition()));
}

double occupation_transform(const GraphModel& graph, std::span<const double> chi, double s) {
  if (!(s > 0.0)) throw ConfigError("occupation transform needs s > 0");
  const Eigen::VectorXd d = occupation_scaling(graph, chi);
  const Eigen::VectorXd root = d.cwiseSqrt();
  // D P is similar to D^{1/2} P D^{1/2}, which is symmetric.
  const Eigen::MatrixXd scaled = root.asDiagonal() * graph.transition() * root.asDiagonal();
  const Eigen::VectorXd killed = symmetric_spectrum(identity_minus(scaled));
  const Eigen::VectorXd free = symmetric_spectrum(identity_minus(graph.transition()));
  double diff = 0.0;
  for (Eigen::Index i = 0; i < killed.size(); ++i)
    diff += std::expm1(-s * std::log(killed[i])) - std::expm1(-s * std::log(free[i]));
  return std::tgamma(s) * diff;
}

double occupation_limit(const GraphModel& graph, std::span<const double> chi) {
  const Eigen::VectorXd d = occupation_scaling(graph, chi);
  const Eigen::MatrixXd scaled = d.asDiagonal() * graph.transition();
  return real_log_det(identity_minus(graph.transition())) - real_log_det(identity_minus(scaled));
}

std::complex<double> edge_transform(const GraphModel& graph, const EdgeWeighting& z, double s) {
  if (!(s > 0.0)) throw ConfigError("edge transform needs s > 0");
  check_modulus(z);
  const int n = graph.vertex_count();
  const Eigen::MatrixXcd weighted = Eigen::MatrixXcd::Identity(n, n) - z.weighted_transition(graph);
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(weighted, false);
  const Eigen::VectorXd free = symmetric_spectrum(identity_minus(graph.transition()));
  std::complex<double> diff = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> x = -s * std::log(solver.eigenvalues()[i]);
    // expm1 on the complex exponent, accurate for small s.
    const std::complex<double> em1 =
        std::expm1(x.real()) * std::cos(x.imag()) - 2.0 * std::pow(std::sin(0.5 * x.imag()), 2) +
        std::complex<double>(0.0, std::exp(x.real()) * std::sin(x.imag()));
    diff += em1 - std::expm1(-s * std::log(free[i]));
  }
  return std::tgamma(s) * diff;
}

std::complex<double> edge_limit(const GraphModel& graph, const EdgeWeighting& z) {
  check_modulus(z);
  const int n = graph.vertex_count();
  return real_log_det(identity_minus(graph.transition())) -
         log_det(Eigen::MatrixXcd::Identity(n, n) - z.weighted_transition(graph));
}

double graph_homology_tail_bound(const GraphModel& graph, double alpha, int window) {
  if (window < 0) throw ConfigError("window must be non-negative");
  const int n = graph.vertex_count();
  const double base = real_log_det(identity_minus(graph.transition()));
  double total = 0.0;
  for (int c = 0; c < graph.cycle_rank(); ++c) {
    for (int sign : {1, -1}) {
      double best = 1.0;
      for (double theta = 0.01; theta < 60.0; theta *= 1.25) {
        // Q_theta weights the c-th coordinate's arcs by e^{+-theta}.
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < graph.arcs().size(); ++i) {
          const Arc& a = graph.arcs()[i];
          double w = graph.edges()[a.edge].p;
          if (graph.cycle_coordinate(a.edge) == c) w *= std::exp(sign * graph.arc_sign(static_cast<int>(i)) * theta);
          q(a.from, a.to) += w;
        }
        Eigen::EigenSolver<Eigen::MatrixXd> solver(q, false);
        if (solver.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) break;
        const double det = Eigen::PartialPivLU<Eigen::MatrixXd>(identity_minus(q)).determinant();
        if (!(det > 0.0)) break;
        best = std::min(best, std::exp(alpha * (base - std::log(det)) - theta * (window + 1)));
      }
      total += best;
    }
  }
  return std::min(total, 1.0);
}

HomologyPMF graph_homology_pmf(const GraphModel& graph, double alpha, const PmfOptions& options) {
  if (!(alpha > 0.0)) throw ConfigError("soup intensity alpha must be positive");
  if (graph.cycle_rank() > 3) throw ConfigError("graph homology quadrature supports b1 <= 3");
  const int n = graph.vertex_count();
  const double base = real_log_det(identity_minus(graph.transition()));
  auto phi = [&](std::span<const double> omega) -> std::complex<double> {
    const EdgeWeighting z = EdgeWeighting::from_form(graph, omega);
    return std::exp(alpha * (base - log_det(Eigen::MatrixXcd::Identity(n, n) - z.weighted_transition(graph))));
  };
  HomologyPMF pmf = invert_characteristic_function(graph.cycle_rank(), phi, options);
  pmf.tail_bound = graph_homology_tail_bound(graph, alpha, options.window);
  return pmf;
}

std::complex<double> holonomy_expectation(const GraphModel& graph, const Connection& connection,
                                          double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("soup intensity alpha must be positive");
  const Eigen::MatrixXcd block = connection.block_transition(graph);
  const auto size = block.rows();
  const double base = real_log_det(identity_minus(graph.transition()));
  return std::exp(alpha * (base - log_det(Eigen::MatrixXcd::Identity(size, size) - block)));
}

std::vector<int> DiscreteLoop::vertices(const GraphModel& graph) const {
  std::vector<int> out;
  out.reserve(arcs.size());
  for (int a : arcs) out.push_back(graph.arcs()[a].from);
  return out;
}

std::vector<double> DiscreteLoop::occupation(const GraphModel& graph) const {
  std::vector<double> out(graph.vertex_count(), 0.0);
  for (std::size_t i = 0; i < arcs.size(); ++i) out[graph.arcs()[arcs[i]].from] += holding[i];
  return out;
}

std::vector<int> DiscreteLoop::homology(const GraphModel& graph) const {
  std::vector<int> h(graph.cycle_rank(), 0);
  for (int a : arcs) {
    const int c = graph.cycle_coordinate(graph.arcs()[a].edge);
    if (c >= 0) h[c] += graph.arc_sign(a);
  }
  return h;
}

double DiscreteLoop::duration() const {
  double t = 0.0;
  for (double x : holding) t += x;
  return t;
}

std::complex<double> DiscreteLoop::edge_weight(const EdgeWeighting& z) const {
  std::complex<double> w = 1.0;
  for (int a : arcs) w *= z[a];
  return w;
}

Eigen::MatrixXcd DiscreteLoop::holonomy(const Connection& connection) const {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(connection.rank(), connection.rank());
  for (int a : arcs) h = h * connection[a];
  return h;
}

}  // namespace loopzeta
