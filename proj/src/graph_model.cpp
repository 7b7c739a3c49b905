#include "loopzeta/graph_model.hpp"

#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include "json.hpp"
#include "loopzeta/errors.hpp"
#include "loopzeta/special.hpp"

namespace loopzeta {

namespace {

constexpr double kStochasticSlack = 1e-12;

std::string edge_label(int index, const Edge& e) {
  return "edge " + std::to_string(index) + " (" + std::to_string(e.from) + "->" +
         std::to_string(e.to) + ")";
}

}  // namespace

bool is_unitary(const Eigen::MatrixXcd& u, double tol) {
  if (u.rows() != u.cols() || u.rows() == 0) return false;
  return (u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols())).norm() <= tol;
}

GraphModel::GraphModel(int vertices, std::vector<Edge> edges, std::vector<double> holding_rates)
    : n_(vertices), edges_(std::move(edges)), lambda_(std::move(holding_rates)) {
  if (n_ < 1) throw ConfigError("graph must have at least one vertex");
  if (lambda_.empty()) lambda_.assign(n_, 1.0);
  if (static_cast<int>(lambda_.size()) != n_)
    throw ConfigError("lambda must have one holding rate per vertex");
  for (int x = 0; x < n_; ++x)
    if (!(lambda_[x] > 0.0) || !std::isfinite(lambda_[x]))
      throw ConfigError("holding rate of vertex " + std::to_string(x) + " must be positive");

  p_ = Eigen::MatrixXd::Zero(n_, n_);
  out_arcs_.assign(n_, {});
  for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
    const Edge& e = edges_[i];
    if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_)
      throw ConfigError(edge_label(i, e) + ": endpoint out of range");
    if (!(e.p > 0.0) || !std::isfinite(e.p))
      throw ConfigError(edge_label(i, e) + ": p must be positive");
    if (!std::isfinite(e.z.real()) || !std::isfinite(e.z.imag()))
      throw ConfigError(edge_label(i, e) + ": z must be finite");
    if (e.u.size() != 0) {
      if (!is_unitary(e.u)) throw ConfigError(edge_label(i, e) + ": U is not unitary");
      if (connection_rank_ == 0) connection_rank_ = static_cast<int>(e.u.rows());
      if (e.u.rows() != connection_rank_)
        throw ConfigError(edge_label(i, e) + ": U rank differs from other edges");
    }
    p_(e.from, e.to) += e.p;
    out_arcs_[e.from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back({e.from, e.to, i, true});
    if (!e.is_self_loop()) {
      p_(e.to, e.from) += e.p;
      out_arcs_[e.to].push_back(static_cast<int>(arcs_.size()));
      arcs_.push_back({e.to, e.from, i, false});
    }
  }
  // Edges without a unitary carry the identity once any edge has one.
  if (connection_rank_ != 0)
    for (Edge& e : edges_)
      if (e.u.size() == 0) e.u = Eigen::MatrixXcd::Identity(connection_rank_, connection_rank_);

  for (int x = 0; x < n_; ++x) {
    if (p_.row(x).sum() <= 1.0 + kStochasticSlack) continue;
    // Blame the edge whose weight first pushes the row over 1.
    double running = 0.0;
    for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
      const Edge& e = edges_[i];
      if (e.from != x && e.to != x) continue;
      running += e.p;
      if (running > 1.0 + kStochasticSlack)
        throw ConfigError(edge_label(i, e) + ": row " + std::to_string(x) + " of P sums above 1");
    }
    throw ConfigError("row " + std::to_string(x) + " of P sums above 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(p_, Eigen::EigenvaluesOnly);
  radius_ = solver.eigenvalues().cwiseAbs().maxCoeff();
  if (radius_ >= 1.0) throw ConfigError("spectral radius of P must be below 1");

  // BFS spanning forest, roots and neighbours visited in index order.
  std::vector<std::vector<int>> incident(n_);
  for (int i = 0; i < static_cast<int>(edges_.size()); ++i) {
    if (edges_[i].is_self_loop()) continue;
    incident[edges_[i].from].push_back(i);
    incident[edges_[i].to].push_back(i);
  }
  std::vector<bool> seen(n_, false);
  std::vector<bool> tree(edges_.size(), false);
  for (int root = 0; root < n_; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::queue<int> queue;
    queue.push(root);
    while (!queue.empty()) {
      const int x = queue.front();
      queue.pop();
      for (int i : incident[x]) {
        const int y = edges_[i].from == x ? edges_[i].to : edges_[i].from;
        if (seen[y]) continue;
        seen[y] = true;
        tree[i] = true;
        queue.push(y);
      }
    }
  }
  cycle_coord_.assign(edges_.size(), -1);
  for (std::size_t i = 0; i < edges_.size(); ++i)
    if (!tree[i]) cycle_coord_[i] = cycle_rank_++;
}

int GraphModel::arc_sign(int arc) const {
  const Arc& a = arcs_[arc];
  if (cycle_coord_[a.edge] < 0) return 0;
  return a.forward ? 1 : -1;
}

GraphModel GraphModel::from_json_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("graph file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc["vertices"].is_number_integer())
    throw ConfigError("graph file needs an integer \"vertices\" field");
  const int n = doc["vertices"].get<int>();
  std::vector<double> lambda;
  if (doc.contains("lambda")) {
    if (!doc["lambda"].is_array()) throw ConfigError("\"lambda\" must be an array");
    for (const auto& v : doc["lambda"]) {
      if (!v.is_number()) throw ConfigError("\"lambda\" entries must be numbers");
      lambda.push_back(v.get<double>());
    }
  }
  if (!doc.contains("edges") || !doc["edges"].is_array())
    throw ConfigError("graph file needs an \"edges\" array");

  std::vector<Edge> edges;
  int index = 0;
  for (const auto& item : doc["edges"]) {
    const std::string where = "edge " + std::to_string(index);
    if (!item.is_object()) throw ConfigError(where + ": must be an object");
    for (const char* key : {"from", "to"})
      if (!item.contains(key) || !item[key].is_number_integer())
        throw ConfigError(where + ": \"" + key + "\" must be an integer");
    if (!item.contains("p") || !item["p"].is_number())
      throw ConfigError(where + ": \"p\" must be a number");
    Edge e;
    e.from = item["from"].get<int>();
    e.to = item["to"].get<int>();
    e.p = item["p"].get<double>();
    const std::string label = edge_label(index, e);
    auto number = [&](const char* key) {
      if (!item[key].is_number()) throw ConfigError(label + ": \"" + key + "\" must be a number");
      return item[key].get<double>();
    };
    const bool has_z = item.contains("z_re") || item.contains("z_im");
    if (has_z)
      e.z = {item.contains("z_re") ? number("z_re") : 0.0, item.contains("z_im") ? number("z_im") : 0.0};
    if (item.contains("u")) {
      if (has_z) throw ConfigError(label + ": give either z_re/z_im or u, not both");
      const double phase = number("u");
      e.z = std::polar(1.0, 2.0 * special::kPi * phase);
      e.u = Eigen::MatrixXcd::Constant(1, 1, e.z);
    }
    if (item.contains("U")) {
      if (item.contains("u")) throw ConfigError(label + ": give either u or U, not both");
      const auto& rows = item["U"];
      if (!rows.is_array() || rows.empty()) throw ConfigError(label + ": \"U\" must be a matrix");
      const auto r = static_cast<Eigen::Index>(rows.size());
      e.u.resize(r, r);
      for (Eigen::Index i = 0; i < r; ++i) {
        if (!rows[i].is_array() || static_cast<Eigen::Index>(rows[i].size()) != r)
          throw ConfigError(label + ": \"U\" must be square");
        for (Eigen::Index j = 0; j < r; ++j) {
          const auto& entry = rows[i][j];
          if (entry.is_number()) {
            e.u(i, j) = entry.get<double>();
          } else if (entry.is_array() && entry.size() == 2 && entry[0].is_number() &&
                     entry[1].is_number()) {
            e.u(i, j) = {entry[0].get<double>(), entry[1].get<double>()};
          } else {
            throw ConfigError(label + ": \"U\" entries must be numbers or [re, im] pairs");
          }
        }
      }
    }
    edges.push_back(std::move(e));
    ++index;
  }
  return GraphModel(n, std::move(edges), std::move(lambda));
}

GraphModel GraphModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string GraphModel::to_json_text() const {
  nlohmann::json doc;
  doc["vertices"] = n_;
  doc["lambda"] = lambda_;
  doc["edges"] = nlohmann::json::array();
  for (const Edge& e : edges_) {
    nlohmann::json item{{"from", e.from}, {"to", e.to}, {"p", e.p}, {"z_re", e.z.real()},
                        {"z_im", e.z.imag()}};
    if (e.u.size() != 0) {
      nlohmann::json rows = nlohmann::json::array();
      for (Eigen::Index i = 0; i < e.u.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < e.u.cols(); ++j) row.push_back({e.u(i, j).real(), e.u(i, j).imag()});
        rows.push_back(row);
      }
      item["U"] = rows;
    }
    doc["edges"].push_back(item);
  }
  return doc.dump();
}

EdgeWeighting EdgeWeighting::uniform(const GraphModel& graph, std::complex<double> z) {
  return EdgeWeighting(std::vector<std::complex<double>>(graph.arcs().size(), z));
}

EdgeWeighting EdgeWeighting::from_edge_values(const GraphModel& graph,
                                              std::span<const std::complex<double>> values) {
  if (values.size() != graph.edges().size())
    throw ConfigError("need one weight per edge");
  std::vector<std::complex<double>> z;
  z.reserve(graph.arcs().size());
  for (const Arc& a : graph.arcs()) z.push_back(a.forward ? values[a.edge] : std::conj(values[a.edge]));
  return EdgeWeighting(std::move(z));
}

EdgeWeighting EdgeWeighting::from_edges(const GraphModel& graph) {
  std::vector<std::complex<double>> values;
  for (const Edge& e : graph.edges()) values.push_back(e.z);
  return from_edge_values(graph, values);
}

EdgeWeighting EdgeWeighting::from_form(const GraphModel& graph, std::span<const double> omega) {
  if (static_cast<int>(omega.size()) != graph.cycle_rank())
    throw ConfigError("form needs one coordinate per independent cycle");
  std::vector<std::complex<double>> values;
  for (int i = 0; i < static_cast<int>(graph.edges().size()); ++i) {
    const int c = graph.cycle_coordinate(i);
    values.push_back(c < 0 ? std::complex<double>(1.0) : std::polar(1.0, 2.0 * special::kPi * omega[c]));
  }
  return from_edge_values(graph, values);
}

EdgeWeighting EdgeWeighting::from_arcs(const GraphModel& graph,
                                       std::vector<std::complex<double>> values) {
  if (values.size() != graph.arcs().size()) throw ConfigError("need one weight per arc");
  return EdgeWeighting(std::move(values));
}

double EdgeWeighting::max_modulus() const {
  double m = 0.0;
  for (const auto& z : z_) m = std::max(m, std::abs(z));
  return m;
}

Eigen::MatrixXcd EdgeWeighting::weighted_transition(const GraphModel& graph) const {
  const int n = graph.vertex_count();
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < graph.arcs().size(); ++i) {
    const Arc& a = graph.arcs()[i];
    q(a.from, a.to) += graph.edges()[a.edge].p * z_[i];
  }
  return q;
}

bool EdgeWeighting::is_hermitian(const GraphModel& graph, double tol) const {
  const Eigen::MatrixXcd q = weighted_transition(graph);
  return (q - q.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

Connection Connection::identity(const GraphModel& graph, int rank) {
  if (rank < 1) throw ConfigError("representation rank must be positive");
  return Connection(rank, std::vector<Eigen::MatrixXcd>(graph.arcs().size(),
                                                        Eigen::MatrixXcd::Identity(rank, rank)));
}

Connection Connection::from_edge_unitaries(const GraphModel& graph,
                                           std::span<const Eigen::MatrixXcd> per_edge) {
  if (per_edge.size() != graph.edges().size()) throw ConfigError("need one unitary per edge");
  if (per_edge.empty()) return identity(graph, 1);
  const auto rank = per_edge.front().rows();
  for (std::size_t i = 0; i < per_edge.size(); ++i) {
    if (per_edge[i].rows() != rank || !is_unitary(per_edge[i]))
      throw ConfigError(edge_label(static_cast<int>(i), graph.edges()[i]) +
                        ": connection matrix is not a unitary of the common rank");
  }
  std::vector<Eigen::MatrixXcd> u;
  u.reserve(graph.arcs().size());
  for (const Arc& a : graph.arcs())
    u.push_back(a.forward ? per_edge[a.edge] : Eigen::MatrixXcd(per_edge[a.edge].adjoint()));
  return Connection(static_cast<int>(rank), std::move(u));
}

Connection Connection::from_edges(const GraphModel& graph) {
  if (graph.connection_rank() == 0) return identity(graph, 1);
  std::vector<Eigen::MatrixXcd> per_edge;
  for (const Edge& e : graph.edges()) per_edge.push_back(e.u);
  return from_edge_unitaries(graph, per_edge);
}

Connection Connection::gauge_transformed(const GraphModel& graph,
                                         std::span<const Eigen::MatrixXcd> per_vertex) const {
  if (static_cast<int>(per_vertex.size()) != graph.vertex_count())
    throw ConfigError("gauge transform needs one unitary per vertex");
  std::vector<Eigen::MatrixXcd> u;
  u.reserve(u_.size());
  for (std::size_t i = 0; i < u_.size(); ++i) {
    const Arc& a = graph.arcs()[i];
    u.push_back(per_vertex[a.from] * u_[i] * per_vertex[a.to].adjoint());
  }
  return Connection(rank_, std::move(u));
}

Eigen::MatrixXcd Connection::block_transition(const GraphModel& graph) const {
  const int n = graph.vertex_count();
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(n * rank_, n * rank_);
  for (std::size_t i = 0; i < u_.size(); ++i) {
    const Arc& a = graph.arcs()[i];
    q.block(a.from * rank_, a.to * rank_, rank_, rank_) += graph.edges()[a.edge].p * u_[i];
  }
  return q;
}

}  // namespace loopzeta
