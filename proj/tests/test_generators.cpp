#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spinal_lab/generators.hpp"

#include "test_support.hpp"

#include <numeric>
#include <set>
#include <vector>

using namespace spinal_lab;
using test_support::error_kind;

TEST_CASE("vicsek vertex sets match the digit-string oracle") {
  for (std::uint32_t dim : {1u, 2u, 3u}) {
    for (std::uint32_t level = 0; level <= 3; ++level) {
      VicsekGraph g = vicsek(dim, level);
      std::uint64_t rays = 1ull << dim;
      std::uint64_t closed_form = rays;
      for (std::uint32_t k = 0; k < level; ++k) closed_form *= rays + 1;
      ++closed_form;
      CAPTURE(dim);
      CAPTURE(level);
      CHECK(g.sg.graph().vertex_count() == closed_form);

      auto oracle = test_support::vicsek_vertex_oracle(dim, level);
      CHECK(oracle.size() == closed_form);
      std::set<std::array<std::int32_t, 4>> produced(g.coords.begin(),
                                                     g.coords.end());
      CHECK(produced == oracle);
    }
  }
}

TEST_CASE("vicsek geometry: center, corners, spine, level prefixes") {
  VicsekGraph g = vicsek(2, 2);
  CHECK(g.extent == 9);
  CHECK(g.coords[g.center] == std::array<std::int32_t, 4>{0, 0, 0, 0});
  CHECK(g.sg.graph().degree(g.center) == 4);
  CHECK(g.corners.size() == 4);
  for (VertexId c : g.corners) {
    CHECK(distance(g.sg.graph(), g.center, c) == 9);
    CHECK(g.sg.graph().degree(c) == 1);
    CHECK(g.sg.on_spine(c));
  }
  // spine = the two full diagonals: 2 (2*9+1) - 1 shared center
  CHECK(g.sg.spine().size() == 37);
  for (VertexId s : g.sg.spine()) {
    auto& c = g.coords[s];
    CHECK(std::abs(c[0]) == std::abs(c[1]));
  }
  CHECK(g.level_counts == std::vector<std::size_t>{5, 21, 101});
}

TEST_CASE("spinal sets of the center are exactly the level prefixes") {
  VicsekGraph g = vicsek(2, 3);
  for (std::uint32_t k = 0; k <= 3; ++k) {
    std::uint32_t radius = 1;
    for (std::uint32_t i = 0; i < k; ++i) radius *= 3;
    std::vector<VertexId> expected(g.level_counts[k]);
    std::iota(expected.begin(), expected.end(), 0);
    CHECK(g.sg.spinal_set(g.center, radius) == expected);
  }
}

TEST_CASE("vicsek guards dimension and size") {
  CHECK(error_kind([] { vicsek(0, 1); }) == "DomainError");
  CHECK(error_kind([] { vicsek(5, 1); }) == "DomainError");
  CHECK(error_kind([] { vicsek(2, 10); }) == "SizeBudgetExceeded");
  CHECK(error_kind([] { vicsek(4, 5); }) == "SizeBudgetExceeded");
  CHECK(error_kind([] { vicsek(4, 5, 30'000'000); }) == "");
}

TEST_CASE("lattice ball closed form matches a cube scan") {
  for (unsigned delta = 1; delta <= 4; ++delta)
    for (int r = 0; r <= 8; ++r)
      CHECK(lattice_ball_count(delta, static_cast<std::uint32_t>(r)) ==
            test_support::cube_scan_ball_count(delta, r));
}

TEST_CASE("lattice plate is the induced l1 ball with its shell marked") {
  LatticePlate plate = lattice_plate(2, 3);
  CHECK(plate.graph.vertex_count() == 25);
  CHECK(plate.coords[plate.origin] == std::array<std::int16_t, 4>{0, 0, 0, 0});
  CHECK(plate.graph.degree(plate.origin) == 4);
  CHECK(plate.shell.size() == 12);
  for (VertexId v : plate.shell)
    CHECK(std::abs(plate.coords[v][0]) + std::abs(plate.coords[v][1]) == 3);

  // edge set equals the brute neighbor scan over coordinates
  std::set<std::array<std::int16_t, 4>> points(plate.coords.begin(),
                                               plate.coords.end());
  std::size_t expected_edges = 0;
  for (const auto& p : plate.coords)
    for (unsigned axis = 0; axis < 2; ++axis) {
      auto q = p;
      ++q[axis];
      if (points.count(q)) ++expected_edges;
    }
  CHECK(plate.graph.edge_count() == expected_edges);

  LatticePlate again = lattice_plate(2, 3);
  CHECK(again.graph.edges() == plate.graph.edges());

  CHECK(error_kind([] { lattice_plate(0, 1); }) == "DomainError");
  CHECK(error_kind([] { lattice_plate(3, 4000); }) == "SizeBudgetExceeded");
}

TEST_CASE("plate fiber radii floor the power law despite float dust") {
  CHECK(plate_fiber_radius(16, 0.25) == 2);
  CHECK(plate_fiber_radius(15, 0.25) == 1);
  CHECK(plate_fiber_radius(8, 1.0 / 3.0) == 2);
  CHECK(plate_fiber_radius(1, 0.9) == 1);
  CHECK(plate_fiber_radius(0, 0.5) == 0);
  CHECK(plate_fiber_radius(81, 0.5) == 9);
}

TEST_CASE("plates lays fibers out in skeleton order") {
  PlateGraph pg = plates(PlateSpec{1.5, 2, 8, 0});
  CHECK(pg.alpha == doctest::Approx(0.25));
  CHECK(pg.safe_radius == 4);
  CHECK(pg.sg.spine().size() == 8);
  CHECK(pg.boundary_spine == pg.sg.spine().back());
  std::uint64_t total = 0;
  for (std::uint32_t n = 0; n < 8; ++n) {
    std::uint32_t radius = plate_fiber_radius(n, pg.alpha);
    CHECK(pg.sg.fiber(n).size() == lattice_ball_count(2, radius));
    total += lattice_ball_count(2, radius);
  }
  CHECK(pg.sg.graph().vertex_count() == total);
  // consecutive spine vertices are adjacent: the skeleton is a ray
  CHECK(pg.sg.skeleton().edges() ==
        std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}});

  CHECK(error_kind([] { plates(PlateSpec{1.0, 2, 8, 0}); }) == "DomainError");
  CHECK(error_kind([] { plates(PlateSpec{2.5, 1, 8, 0}); }) == "DomainError");
  CHECK(error_kind([] { plates(PlateSpec{1.5, 2, 1, 0}); }) == "DomainError");
  CHECK(error_kind([] { plates(PlateSpec{2.0, 2, 5000, 0}, 1000); }) ==
        "SizeBudgetExceeded");
}

TEST_CASE("plates accepts a custom fiber provider") {
  auto paths = [](std::uint32_t n, std::uint32_t) {
    std::vector<Edge> edges;
    for (VertexId v = 0; v + 1 < n + 1; ++v) edges.emplace_back(v, v + 1);
    return Fiber{Graph::from_edges(std::move(edges), n + 1),
                 static_cast<VertexId>(n)};  // glue at the far end
  };
  PlateGraph pg = plates(PlateSpec{1.5, 2, 4, 0}, paths);
  CHECK(pg.sg.graph().vertex_count() == 1 + 2 + 3 + 4);
  for (std::uint32_t n = 0; n < 4; ++n) CHECK(pg.sg.fiber(n).size() == n + 1);
  // the distinguished vertex leads its block
  CHECK(pg.sg.spine() == std::vector<VertexId>{0, 1, 3, 6});
}

TEST_CASE("random generators are seed-deterministic") {
  Rng a(42), b(42), c(43);
  Graph ga = random_connected_graph(a, 12, 4);
  Graph gb = random_connected_graph(b, 12, 4);
  Graph gc = random_connected_graph(c, 12, 4);
  CHECK(ga.edges() == gb.edges());
  CHECK(ga.edges() != gc.edges());

  GluedSample sa = random_glued(7, 6, 4);
  GluedSample sb = random_glued(7, 6, 4);
  CHECK(sa.sg.graph().edges() == sb.sg.graph().edges());
  CHECK(sa.sg.pi_map() == sb.sg.pi_map());
  CHECK(sa.skeleton.vertex_count() == 6);
  CHECK(sa.fibers.size() == 6);

  bool any_thick = false;
  for (const Fiber& f : sa.fibers) any_thick |= f.graph.vertex_count() >= 2;
  CHECK(any_thick);

  GluedSample tiny = random_glued(3, 1, 1);
  CHECK(tiny.sg.graph().vertex_count() == 1);
  CHECK(error_kind([] { random_glued(0, 0, 1); }) == "DomainError");
}
