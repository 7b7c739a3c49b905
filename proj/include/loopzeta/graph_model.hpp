#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace loopzeta {

// An undirected edge of a finite graph, or a directed self-loop when from == to.
// z and u are the multiplier and unitary attached to the forward orientation;
// the reverse orientation carries conj(z) and u^dagger.
struct Edge {
  int from = 0;
  int to = 0;
  double p = 0.0;
  std::complex<double> z{1.0, 0.0};
  Eigen::MatrixXcd u;  // empty when no connection is attached

  bool is_self_loop() const { return from == to; }
};

// One directed transition. Edges between distinct vertices yield two arcs,
// self-loops a single forward arc.
struct Arc {
  int from = 0;
  int to = 0;
  int edge = 0;
  bool forward = true;
};

// Finite graph with symmetric substochastic transition matrix
//   P(x, y) = sum of p over arcs x -> y,
// exponential holding rates per vertex, and a deterministic cycle basis
// (BFS spanning forest rooted at the lowest vertex; each non-tree edge is one
// homology coordinate, oriented along its forward arc).
class GraphModel {
 public:
  GraphModel(int vertices, std::vector<Edge> edges, std::vector<double> holding_rates = {});

  // Schema: {"vertices": n, "lambda": [...], "edges": [{"from", "to", "p",
  //          "z_re", "z_im" | "u" | "U"}, ...]}
  static GraphModel from_json_text(std::string_view text);
  static GraphModel load(const std::string& path);
  std::string to_json_text() const;

  int vertex_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Arc>& arcs() const { return arcs_; }
  const std::vector<int>& arcs_from(int vertex) const { return out_arcs_[vertex]; }
  const Eigen::MatrixXd& transition() const { return p_; }
  const std::vector<double>& holding_rates() const { return lambda_; }
  double spectral_radius() const { return radius_; }

  int cycle_rank() const { return cycle_rank_; }
  // Homology coordinate of an edge, or -1 for spanning-tree edges.
  int cycle_coordinate(int edge) const { return cycle_coord_[edge]; }
  // Signed contribution (+1 forward, -1 reverse) of an arc to its coordinate;
  // 0 for tree arcs.
  int arc_sign(int arc) const;

  // Rank of the attached edge unitaries, 0 when none are attached.
  int connection_rank() const { return connection_rank_; }

 private:
  int n_;
  std::vector<Edge> edges_;
  std::vector<double> lambda_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> out_arcs_;
  Eigen::MatrixXd p_;
  double radius_ = 0.0;
  std::vector<int> cycle_coord_;
  int cycle_rank_ = 0;
  int connection_rank_ = 0;
};

// Complex multiplier per arc, Z in P * Z.
class EdgeWeighting {
 public:
  static EdgeWeighting uniform(const GraphModel& graph, std::complex<double> z = 1.0);
  // Forward arcs carry the edge value, reverse arcs its conjugate.
  static EdgeWeighting from_edges(const GraphModel& graph);
  static EdgeWeighting from_edge_values(const GraphModel& graph,
                                        std::span<const std::complex<double>> values);
  // exp(2 pi i omega_c) on the forward arc of the c-th non-tree edge; 1 on tree edges.
  static EdgeWeighting from_form(const GraphModel& graph, std::span<const double> omega);
  static EdgeWeighting from_arcs(const GraphModel& graph, std::vector<std::complex<double>> values);

  std::complex<double> operator[](int arc) const { return z_[arc]; }
  const std::vector<std::complex<double>>& values() const { return z_; }
  double max_modulus() const;
  bool is_hermitian(const GraphModel& graph, double tol = 1e-12) const;
  Eigen::MatrixXcd weighted_transition(const GraphModel& graph) const;

 private:
  explicit EdgeWeighting(std::vector<std::complex<double>> z) : z_(std::move(z)) {}
  std::vector<std::complex<double>> z_;
};

// Unitary r x r matrix per arc with U(reverse) = U(forward)^dagger.
class Connection {
 public:
  static Connection identity(const GraphModel& graph, int rank);
  static Connection from_edges(const GraphModel& graph);
  static Connection from_edge_unitaries(const GraphModel& graph,
                                        std::span<const Eigen::MatrixXcd> per_edge);

  int rank() const { return rank_; }
  const Eigen::MatrixXcd& operator[](int arc) const { return u_[arc]; }

  // U'(x -> y) = g_x U(x -> y) g_y^{-1}.
  Connection gauge_transformed(const GraphModel& graph,
                               std::span<const Eigen::MatrixXcd> per_vertex) const;

  // n r x n r matrix whose (x, y) block is sum over arcs x -> y of p U.
  Eigen::MatrixXcd block_transition(const GraphModel& graph) const;

 private:
  Connection(int rank, std::vector<Eigen::MatrixXcd> u) : rank_(rank), u_(std::move(u)) {}
  int rank_;
  std::vector<Eigen::MatrixXcd> u_;
};

bool is_unitary(const Eigen::MatrixXcd& u, double tol = 1e-10);

}  // namespace loopzeta
