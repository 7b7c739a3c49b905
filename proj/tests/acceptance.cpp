// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "loopzeta/graph_loops.hpp"
#include "loopzeta/torus_homology.hpp"
#include "loopzeta/zeta_engine.hpp"
#include "support.hpp"

using namespace loopzeta;
using testsupport::kPi;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition) {
      if (ok) detail << "first failure: " << what << "; ";
      ok = false;
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Pools classes whose expected count is below `min_expected` into a single
// bin, then returns the largest |z| over the bins.
double max_z(const std::map<std::vector<int>, long>& counts, const HomologyPMF& pmf, long n,
             double min_expected = 10.0) {
  double worst = 0.0;
  double pooled_p = 0.0;
  long pooled_count = 0;
  for (std::size_t i = 0; i < pmf.p.size(); ++i) {
    const auto j = pmf.class_at(i);
    const auto it = counts.find(j);
    const long c = it == counts.end() ? 0 : it->second;
    if (pmf.p[i] * n < min_expected) {
      pooled_p += pmf.p[i];
      pooled_count += c;
    } else {
      worst = std::max(worst, std::abs(testsupport::z_score(c, n, pmf.p[i])));
    }
  }
  long outside = 0;
  for (const auto& [j, c] : counts)
    if (pmf.index_of(j) == pmf.p.size()) outside += c;
  pooled_count += outside;
  pooled_p += pmf.tail_bound;
  if (pooled_p * n >= 1.0 || pooled_count > 0)
    worst = std::max(worst, std::abs(testsupport::z_score(pooled_count, n, std::max(pooled_p, 1e-300))));
  return worst;
}

// 1. Circle determinants against 2 (cosh(sqrt 2 m) - cos 2 pi u).
void circle_determinants(Verdict& v) {
  double worst = 0.0;
  for (double m : {0.5, 1.0, 2.0})
    for (double u : {0.0, 0.1, 0.25, 0.5}) {
      const double det = det_regularized(TorusModel(1, m * m), TwistForm({u})).value;
      worst = std::max(worst, std::abs(det / testsupport::circle_det(m, u) - 1.0));
    }
  v.require(worst <= 1e-8, "relative error " + fmt(worst));
  v.detail << "max rel err " << fmt(worst);
}

// 2. Zeta route, closed form and winding series on the (m, u, alpha) grid.
void three_way(Verdict& v) {
  double worst = 0.0;
  int points = 0;
  for (double m : {0.5, 1.0, 2.0})
    for (double u : {0.0, 0.1, 0.25, 0.5})
      for (double alpha : {0.5, 1.0, 2.0}) {
        const TorusModel circle(1, m * m);
        const SoupParams params(alpha);
        const double zeta_route = char_function(circle, params, TwistForm({u}));
        const double series = char_function_series(circle, params, TwistForm({u})).value;
        const double c = std::cosh(std::sqrt(2.0) * m);
        const double closed = std::pow((c - 1.0) / (c - std::cos(2.0 * kPi * u)), alpha);
        worst = std::max({worst, std::abs(zeta_route - closed), std::abs(series - closed),
                          std::abs(series - zeta_route)});
        ++points;
      }
  v.require(points == 36, "grid size");
  v.require(worst <= 1e-8, "pairwise difference " + fmt(worst));
  v.detail << points << " points, max pairwise diff " << fmt(worst);
}

// 3. Fourier inversion against the exact convolution law.
void circle_pmf(Verdict& v) {
  const TorusModel circle(1, 1.0);
  double worst = 0.0, norm = 0.0;
  for (double alpha : {0.5, 1.0, 2.0}) {
    const auto pmf = homology_pmf(circle, SoupParams(alpha));
    const auto exact = pmf_convolution_oracle(circle, SoupParams(alpha), 30, 30);
    for (int j = -30; j <= 30; ++j) worst = std::max(worst, std::abs(pmf.at({j}) - exact.at({j})));
    norm = std::max(norm, std::abs(pmf.window_mass() + pmf.tail_bound - 1.0));
    if (alpha == 1.0) {
      const double p0 = pmf.at({0});
      v.require(std::abs(p0 - std::tanh(std::sqrt(2.0) / 2.0)) <= 1e-8, "p0 = " + fmt(p0));
    }
  }
  v.require(worst <= 1e-8, "pmf vs convolution " + fmt(worst));
  v.require(norm <= 1e-8, "normalization " + fmt(norm));
  v.detail << "max |pmf - conv| " << fmt(worst) << ", |sum + tail - 1| " << fmt(norm);
}

// 4. Monte Carlo closure on the circle.
void circle_monte_carlo(Verdict& v) {
  const TorusModel circle(1, 1.0);
  const SoupParams params(1.0);
  const long n = 100000;
  std::mt19937_64 rng(20240607);
  const SoupHomologySampler sampler(circle, params, winding_cutoff(circle, 1e-9));
  std::map<std::vector<int>, long> counts;
  double c25 = 0.0, c25sq = 0.0, c50 = 0.0, c50sq = 0.0;
  for (long i = 0; i < n; ++i) {
    const auto h = sampler.sample(rng);
    ++counts[h];
    const double a = std::cos(2.0 * kPi * 0.25 * h[0]);
    const double b = std::cos(2.0 * kPi * 0.5 * h[0]);
    c25 += a;
    c25sq += a * a;
    c50 += b;
    c50sq += b * b;
  }
  const auto pmf = homology_pmf(circle, params);
  const double z = max_z(counts, pmf, n);
  v.require(z <= 4.0, "max z " + fmt(z));
  double worst_se = 0.0;
  for (auto [u, s1, s2] : {std::tuple{0.25, c25, c25sq}, std::tuple{0.5, c50, c50sq}}) {
    const double mean = s1 / n;
    const double se = std::sqrt((s2 / n - mean * mean) / n);
    const double gap = std::abs(mean - char_function(circle, params, TwistForm({u}))) / se;
    worst_se = std::max(worst_se, gap);
  }
  v.require(worst_se <= 3.0, "characteristic function off by " + fmt(worst_se) + " SE");
  v.detail << "max class |z| " << fmt(z) << ", char fn within " << fmt(worst_se) << " SE";
}

// 5. Enumeration brackets on random graphs and scalar references.
void graph_identities(Verdict& v) {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double widest = 0.0;
  // Prefixes whose extension mass is below 1e-11 are cut; the cut mass is
  // added to the bracket, so containment stays rigorous.
  EnumerationLimits limits;
  limits.prune_weight = 1e-11;
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = testsupport::random_graph(rng, 2 + trial % 4, 0.5);
    LoopFunctionals f;
    for (int x = 0; x < g.vertex_count(); ++x) f.chi.push_back(2.0 * unit(rng));
    f.z = EdgeWeighting::from_edge_values(g, testsupport::random_hermitian_phases(rng, g));
    std::vector<Eigen::MatrixXcd> per_edge;
    for (std::size_t e = 0; e < g.edges().size(); ++e) per_edge.push_back(testsupport::random_su2(rng));
    f.u = Connection::from_edge_unitaries(g, per_edge);
    const auto r = enumerate_loops(g, 20, f, limits);
    const std::string tag = "graph " + std::to_string(trial) + ": ";
    v.require(r.mass.contains(loop_measure_mass(g)), tag + "mass");
    v.require(r.occupation->contains(occupation_limit(g, f.chi)), tag + "occupation");
    v.require(r.edge->contains(edge_limit(g, *f.z)), tag + "edge");
    v.require(r.holonomy->contains(std::log(holonomy_expectation(g, *f.u, 1.0))), tag + "holonomy");
    widest = std::max({widest, r.mass.bound, r.holonomy->bound});
  }

  const GraphModel half(1, {{0, 0, 0.5, 1.0, {}}});
  LoopFunctionals f;
  f.chi = {1.0};
  f.z = EdgeWeighting::uniform(half, -1.0);
  Eigen::MatrixXcd u(2, 2);
  u << std::complex<double>(0, 1), 0, 0, std::complex<double>(0, -1);
  const std::vector<Eigen::MatrixXcd> per_edge{u};
  f.u = Connection::from_edge_unitaries(half, per_edge);
  const auto r = enumerate_loops(half, 20, f);
  v.require(std::abs(loop_measure_mass(half) - std::log(2.0)) <= 1e-15, "scalar mass");
  v.require(std::abs(occupation_limit(half, f.chi) - std::log(2.0 / 3.0)) <= 1e-15, "scalar occupation");
  const auto hol = holonomy_expectation(half, *f.u, 1.0);
  v.require(std::abs(hol - 0.4) <= 1e-12, "SU(2) example " + fmt(hol.real()));
  v.require(r.mass.contains(std::log(2.0)) && r.occupation->contains(std::log(2.0 / 3.0)) &&
                r.edge->contains(-std::log(3.0)) && r.holonomy->contains(std::log(0.4)),
            "scalar brackets");
  v.detail << "20 graphs + scalar, widest bracket " << fmt(widest);
}

// 6. Campbell closure for the soup on P = (1/2).
void graph_campbell(Verdict& v) {
  const GraphModel half(1, {{0, 0, 0.5, 1.0, {}}});
  const long n = 100000;
  double worst = 0.0;
  for (double alpha : {1.0, 2.0}) {
    std::mt19937_64 rng(alpha == 1.0 ? 101 : 202);
    const GraphSoupSampler sampler(half, alpha, graph_length_cutoff(half, alpha, 1e-10));
    double loops = 0.0, loops_sq = 0.0, lap = 0.0, lap_sq = 0.0;
    for (long i = 0; i < n; ++i) {
      const auto soup = sampler.sample(rng);
      double exponent = 0.0;
      for (const auto& loop : soup) exponent += loop.duration();  // chi = 1 on the single vertex
      const double c = static_cast<double>(soup.size());
      loops += c;
      loops_sq += c * c;
      const double f = std::exp(-exponent);
      lap += f;
      lap_sq += f * f;
    }
    auto gap = [&](double s1, double s2, double target) {
      const double mean = s1 / n;
      return std::abs(mean - target) / std::sqrt((s2 / n - mean * mean) / n);
    };
    const double g_loops = gap(loops, loops_sq, alpha * std::log(2.0));
    const double g_lap = gap(lap, lap_sq, std::pow(2.0 / 3.0, alpha));
    v.require(g_loops <= 3.0, "loop count off by " + fmt(g_loops) + " SE");
    v.require(g_lap <= 3.0, "Laplace functional off by " + fmt(g_lap) + " SE");
    worst = std::max({worst, g_loops, g_lap});
  }
  const auto pmf = graph_homology_pmf(half, 1.0);
  double geo = 0.0;
  for (int j = -pmf.window; j <= pmf.window; ++j)
    geo = std::max(geo, std::abs(pmf.at({j}) - (j < 0 ? 0.0 : 0.5 * std::pow(0.5, j))));
  v.require(geo <= 1e-10, "geometric law " + fmt(geo));
  v.detail << "max gap " << fmt(worst) << " SE, geometric law err " << fmt(geo);
}

// 7. Square torus: winding masses and the pmf against sampling.
void square_torus(Verdict& v) {
  const TorusModel square(2, 1.0);
  double worst = 0.0;
  for (int a = -3; a <= 3; ++a)
    for (int b = -3; b <= 3; ++b) {
      if (std::max(std::abs(a), std::abs(b)) == 0) continue;
      const std::vector<int> n{a, b};
      const double ref = testsupport::winding_bessel_oracle(1.0, std::hypot(a, b));
      worst = std::max(worst, std::abs(winding_intensity(square, n) - ref) / ref);
    }
  v.require(worst <= 1e-10, "winding rel err " + fmt(worst));

  const SoupParams params(1.0);
  PmfOptions options;
  options.window = 10;
  const auto pmf = homology_pmf(square, params, options);
  const long n = 100000;
  std::mt19937_64 rng(4242);
  const SoupHomologySampler sampler(square, params, winding_cutoff(square, 1e-9));
  std::map<std::vector<int>, long> counts;
  for (long i = 0; i < n; ++i) ++counts[sampler.sample(rng)];
  const double z = max_z(counts, pmf, n);
  v.require(z <= 4.0, "max z " + fmt(z));
  v.detail << "winding max rel err " << fmt(worst) << ", max class |z| " << fmt(z);
}

}  // namespace

int main(int argc, char** argv) {
  // Optional argument: run only the criterion with this number.
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Verdict&)> body;
  };
  const Criterion criteria[] = {
      {1, "circle determinant chain", 5.0, circle_determinants},
      {2, "characteristic function three-way agreement", 10.0, three_way},
      {3, "circle homology pmf vs convolution law", 30.0, circle_pmf},
      {4, "circle Monte Carlo closure", 60.0, circle_monte_carlo},
      {5, "graph identities vs enumeration brackets", 60.0, graph_identities},
      {6, "graph soup Campbell closure", 60.0, graph_campbell},
      {7, "square torus sanity", 120.0, square_torus},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.id != only) continue;
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(v);
    } catch (const std::exception& e) {
      v.require(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    v.require(seconds <= c.budget_s, "runtime " + fmt(seconds) + " s over budget");
    if (!v.ok) ++failures;
    std::printf("%s criterion %d: %s (%s; %.2f s of %.0f s)\n", v.ok ? "PASS" : "FAIL", c.id, c.name,
                v.detail.str().c_str(), seconds, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
