#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spinal_lab/walk.hpp"

#include "test_support.hpp"

#include <cmath>
#include <vector>

using namespace spinal_lab;
using test_support::error_kind;

namespace {

Graph path_graph(std::uint32_t n) {
  std::vector<Edge> edges;
  for (VertexId v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Graph::from_edges(std::move(edges), n);
}

// dense reference iteration in the graph's own vertex order
std::vector<double> brute_distribution(const Graph& g, VertexId start,
                                       std::uint32_t t_max) {
  std::vector<double> p(g.vertex_count(), 0.0), q(g.vertex_count());
  p[start] = 1.0;
  for (std::uint32_t t = 0; t < t_max; ++t) {
    std::fill(q.begin(), q.end(), 0.0);
    for (VertexId u = 0; u < g.vertex_count(); ++u)
      for (VertexId v : g.neighbors(u)) q[v] += p[u] / g.degree(u);
    p.swap(q);
  }
  return p;
}

}  // namespace

TEST_CASE("return probabilities on K4, by hand") {
  Graph k4 = Graph::from_edges({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, 4);
  ReturnProbSeries s = return_probabilities_exact(k4, 0, 4);
  CHECK(s.exact);
  CHECK(s.start == 0);
  REQUIRE(s.entries.size() == 3);
  CHECK(s.entries[0] == std::pair<std::uint32_t, double>{0, 1.0});
  CHECK(s.entries[1].first == 2);
  CHECK(s.entries[1].second == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(s.entries[2].first == 4);
  CHECK(s.entries[2].second == doctest::Approx(7.0 / 27.0).epsilon(1e-15));
  CHECK(s.max_mass_defect < 1e-15);
  CHECK(s.boundary_error == 0.0);
}

TEST_CASE("bipartite graphs return with certainty at even times") {
  ReturnProbSeries s = return_probabilities_exact(path_graph(3), 1, 6);
  for (const auto& [t, p] : s.entries) CHECK(p == 1.0);
}

TEST_CASE("ball-prefix iteration matches the dense reference") {
  Graph g = path_graph(9);
  std::uint32_t start = 2;  // asymmetric, so the distance reindexing matters
  for (std::uint32_t t : {2u, 4u, 6u, 8u}) {
    ReturnProbSeries s = return_probabilities_exact(g, start, t);
    std::vector<double> ref = brute_distribution(g, start, t);
    CHECK(s.entries.back().second == doctest::Approx(ref[start]).epsilon(1e-14));
  }
}

TEST_CASE("boundary monitor aborts exactly when mass lands on the rim") {
  Graph g = path_graph(9);
  std::vector<VertexId> rim{8};
  // from vertex 0 the first visit to 8 happens at step 8, with mass 2^-7
  ReturnProbSeries safe = return_probabilities_exact(g, 0, 7, rim);
  CHECK(safe.boundary_error == 0.0);
  CHECK(error_kind([&] { return_probabilities_exact(g, 0, 8, rim); }) ==
        "BoundaryReached");

  // a loose tolerance lets the run continue and reports the bound instead
  ReturnProbSeries loose = return_probabilities_exact(g, 0, 8, rim, 0.5);
  CHECK(loose.boundary_error == doctest::Approx(2.0 / 128.0));

  std::vector<VertexId> bogus{42};
  CHECK(error_kind([&] { return_probabilities_exact(g, 0, 4, bogus); }) ==
        "DomainError");
  CHECK(error_kind([&] { return_probabilities_exact(g, 42, 4); }) == "DomainError");
}

TEST_CASE("monte carlo agrees with the exact series and is seed-stable") {
  Graph k4 = Graph::from_edges({{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}, 4);
  ReturnProbSeries mc = return_probabilities_mc(k4, 0, 4, 200000, 9);
  CHECK_FALSE(mc.exact);
  REQUIRE(mc.entries.size() == 3);
  CHECK(mc.entries[0].second == 1.0);
  CHECK(mc.entries[1].second == doctest::Approx(1.0 / 3.0).epsilon(0.02));
  CHECK(mc.entries[2].second == doctest::Approx(7.0 / 27.0).epsilon(0.02));

  ReturnProbSeries again = return_probabilities_mc(k4, 0, 4, 200000, 9);
  CHECK(mc.entries == again.entries);

  CHECK(error_kind([&] { return_probabilities_mc(k4, 0, 4, 0, 1); }) ==
        "DomainError");
  CHECK(error_kind([&] { return_probabilities_mc(k4, 9, 4, 10, 1); }) ==
        "DomainError");
}

TEST_CASE("decay slope on the line is one half") {
  Graph g = path_graph(2001);
  ReturnProbSeries s = return_probabilities_exact(g, 1000, 400);
  CHECK(s.max_mass_defect < 1e-13);
  ExponentFit fit = decay_fit(s, 100, 400);
  CHECK(fit.slope == doctest::Approx(-0.5).epsilon(0.06));
  // the window [100, 400] holds the even times 100, 102, ..., 400
  CHECK(fit.points == 151);

  // t = 0 never enters a fit, whatever the window
  ExponentFit all = decay_fit(s, 0, 400);
  CHECK(all.points == 200);
}
