#pragma once

// Graph family constructors: Vicsek graphs with their diagonal spine,
// lattice plates (l1 balls in Z^delta), the plate-over-a-ray construction,
// and seeded random glued graphs for property tests.

#include "spinal_lab/spinal.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace spinal_lab {

namespace detail {

// Coordinates are packed into one 64-bit key (16 bits per axis, biased).
// This bounds every generator here to 4 axes and coordinates in [-32767, 32767].
inline std::uint64_t pack_coords(const std::array<std::int32_t, 4>& c) {
  std::uint64_t key = 0;
  for (int i = 0; i < 4; ++i)
    key |= static_cast<std::uint64_t>(static_cast<std::uint16_t>(c[i] + 32768))
           << (16 * i);
  return key;
}

inline std::uint64_t pow_u64(std::uint64_t base, std::uint32_t exp) {
  std::uint64_t out = 1;
  while (exp--) out *= base;
  return out;
}

}  // namespace detail

/// A level-m Vicsek graph in Z^dim: level 0 is a center joined to the 2^dim
/// corners of the cube [-1,1]^dim, and level k attaches a translated copy of
/// level k-1 at each extreme corner. The spine is the set of vertices with
/// all coordinates of equal absolute value (the 2^dim diagonals), and pi
/// sends each off-spine vertex to the unique spine vertex its component of
/// G minus the spine hangs from.
struct VicsekGraph {
  std::uint32_t dim = 1;
  std::uint32_t level = 0;
  VertexId center = 0;
  std::uint32_t extent = 1;  // 3^level; also the safe radius about the center
  std::vector<std::array<std::int32_t, 4>> coords;
  std::vector<VertexId> corners;           // the 2^dim extreme diagonal vertices
  std::vector<std::size_t> level_counts;   // vertex count of each level prefix
  SpinalGraph sg;
};

inline VicsekGraph vicsek(std::uint32_t dim, std::uint32_t level,
                          std::uint64_t vertex_budget = 4'000'000) {
  if (dim < 1 || dim > 4)
    fail("DomainError", "vicsek dimension must be in [1, 4], got " + std::to_string(dim));
  std::uint64_t side = detail::pow_u64(3, level);
  if (side > 19683)
    fail("SizeBudgetExceeded", "vicsek level " + std::to_string(level) +
                                   " exceeds the coordinate range (level <= 9)");
  std::uint64_t rays = detail::pow_u64(2, dim);
  std::uint64_t expected = rays * detail::pow_u64(rays + 1, level) + 1;
  if (expected > vertex_budget)
    fail("SizeBudgetExceeded",
         "vicsek(" + std::to_string(dim) + ", " + std::to_string(level) + ") has " +
             std::to_string(expected) + " vertices, budget " +
             std::to_string(vertex_budget));

  std::vector<std::array<std::int32_t, 4>> coords;
  std::unordered_map<std::uint64_t, VertexId> index;
  coords.reserve(expected);
  index.reserve(2 * expected);
  auto intern = [&](const std::array<std::int32_t, 4>& c) -> VertexId {
    auto [it, fresh] = index.try_emplace(detail::pack_coords(c),
                                         static_cast<VertexId>(coords.size()));
    if (fresh) coords.push_back(c);
    return it->second;
  };

  // Level 0: center plus the corners of the unit cube.
  std::vector<Edge> edges;
  edges.reserve(expected);  // the graph is a tree
  std::array<std::int32_t, 4> origin{0, 0, 0, 0};
  VertexId center = intern(origin);
  for (std::uint64_t mask = 0; mask < rays; ++mask) {
    std::array<std::int32_t, 4> c{0, 0, 0, 0};
    for (std::uint32_t i = 0; i < dim; ++i) c[i] = (mask >> i & 1) ? 1 : -1;
    edges.emplace_back(center, intern(c));
  }
  std::vector<std::size_t> level_counts{coords.size()};

  std::vector<VertexId> remap;
  for (std::uint32_t k = 1; k <= level; ++k) {
    std::size_t base_vertices = coords.size();
    std::size_t base_edges = edges.size();
    std::int32_t shift = 2 * static_cast<std::int32_t>(detail::pow_u64(3, k - 1));
    for (std::uint64_t mask = 0; mask < rays; ++mask) {
      remap.assign(base_vertices, 0);
      for (std::size_t v = 0; v < base_vertices; ++v) {
        std::array<std::int32_t, 4> c = coords[v];
        for (std::uint32_t i = 0; i < dim; ++i)
          c[i] += (mask >> i & 1) ? shift : -shift;
        remap[v] = intern(c);  // the shared corner is the only repeat
      }
      for (std::size_t e = 0; e < base_edges; ++e)
        edges.emplace_back(remap[edges[e].first], remap[edges[e].second]);
    }
    level_counts.push_back(coords.size());
  }

  Graph g = Graph::from_edges(std::move(edges), coords.size());

  std::vector<VertexId> spine;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    bool diagonal = true;
    for (std::uint32_t i = 1; i < dim; ++i)
      if (std::abs(coords[v][i]) != std::abs(coords[v][0])) diagonal = false;
    if (diagonal) spine.push_back(v);
  }

  // pi: sweep the components of G minus the spine; each must hang from
  // exactly one spine vertex.
  std::vector<VertexId> pi(g.vertex_count());
  std::vector<bool> on_spine(g.vertex_count(), false);
  for (VertexId s : spine) {
    on_spine[s] = true;
    pi[s] = s;
  }
  std::vector<bool> seen(g.vertex_count(), false);
  std::vector<VertexId> component, queue;
  for (VertexId v0 = 0; v0 < g.vertex_count(); ++v0) {
    if (on_spine[v0] || seen[v0]) continue;
    component.assign(1, v0);
    queue.assign(1, v0);
    seen[v0] = true;
    VertexId attach = 0;
    std::uint32_t attach_count = 0;
    while (!queue.empty()) {
      VertexId u = queue.back();
      queue.pop_back();
      for (VertexId w : g.neighbors(u)) {
        if (on_spine[w]) {
          if (attach_count == 0 || attach != w) {
            ++attach_count;
            attach = w;
          }
        } else if (!seen[w]) {
          seen[w] = true;
          component.push_back(w);
          queue.push_back(w);
        }
      }
    }
    if (attach_count != 1)
      fail("InternalCheck", "off-spine component of vertex " + std::to_string(v0) +
                                " touches " + std::to_string(attach_count) +
                                " spine vertices");
    for (VertexId u : component) pi[u] = attach;
  }

  std::vector<VertexId> corners;
  for (std::uint64_t mask = 0; mask < rays; ++mask) {
    std::array<std::int32_t, 4> c{0, 0, 0, 0};
    auto reach = static_cast<std::int32_t>(side);
    for (std::uint32_t i = 0; i < dim; ++i) c[i] = (mask >> i & 1) ? reach : -reach;
    corners.push_back(index.at(detail::pack_coords(c)));
  }

  return VicsekGraph{dim,
                     level,
                     center,
                     static_cast<std::uint32_t>(side),
                     std::move(coords),
                     std::move(corners),
                     std::move(level_counts),
                     SpinalGraph(std::move(g), std::move(spine), std::move(pi))};
}

/// Closed-form size of the l1 ball of radius r in Z^delta.
inline std::uint64_t lattice_ball_count(std::uint32_t delta, std::uint32_t r) {
  // sum over i of 2^i C(delta, i) C(r, i): choose the nonzero axes and sign them.
  long double total = 0;
  for (std::uint32_t i = 0; i <= delta; ++i) {
    long double term = 1;
    for (std::uint32_t j = 0; j < i; ++j)
      term *= 2.0L * (delta - j) / (j + 1) * (r - j);
    for (std::uint32_t j = 2; j <= i; ++j) term /= j;
    if (i <= r) total += term;
  }
  return static_cast<std::uint64_t>(total + 0.5L);
}

/// Induced subgraph of Z^delta on the l1 ball of radius r about the origin.
/// Vertices are numbered in lexicographic coordinate order, so the layout is
/// a pure function of (delta, r).
struct LatticePlate {
  std::uint32_t delta = 1;
  std::uint32_t radius = 0;
  VertexId origin = 0;
  std::vector<std::array<std::int16_t, 4>> coords;
  std::vector<VertexId> shell;  // vertices with |x|_1 == radius
  Graph graph;
};

inline LatticePlate lattice_plate(std::uint32_t delta, std::uint32_t r,
                                  std::uint64_t vertex_budget = 4'000'000) {
  if (delta < 1 || delta > 4)
    fail("DomainError", "lattice dimension must be in [1, 4], got " + std::to_string(delta));
  if (r > 32000)
    fail("SizeBudgetExceeded", "lattice radius " + std::to_string(r) +
                                   " exceeds the coordinate range");
  std::uint64_t expected = lattice_ball_count(delta, r);
  if (expected > vertex_budget)
    fail("SizeBudgetExceeded", "lattice ball has " + std::to_string(expected) +
                                   " vertices, budget " + std::to_string(vertex_budget));

  std::vector<std::array<std::int16_t, 4>> coords;
  coords.reserve(expected);
  std::unordered_map<std::uint64_t, VertexId> index;
  index.reserve(2 * expected);
  std::array<std::int16_t, 4> point{0, 0, 0, 0};
  auto enumerate = [&](auto&& self, std::uint32_t axis, std::int32_t left) -> void {
    if (axis == delta) {
      index.emplace(detail::pack_coords({point[0], point[1], point[2], point[3]}),
                    static_cast<VertexId>(coords.size()));
      coords.push_back(point);
      return;
    }
    for (std::int32_t c = -left; c <= left; ++c) {
      point[axis] = static_cast<std::int16_t>(c);
      self(self, axis + 1, left - std::abs(c));
    }
    point[axis] = 0;
  };
  enumerate(enumerate, 0, static_cast<std::int32_t>(r));

  std::vector<Edge> edges;
  std::vector<VertexId> shell;
  for (VertexId v = 0; v < coords.size(); ++v) {
    std::int32_t norm = 0;
    for (std::uint32_t i = 0; i < delta; ++i) norm += std::abs(coords[v][i]);
    if (norm == static_cast<std::int32_t>(r)) shell.push_back(v);
    for (std::uint32_t i = 0; i < delta; ++i) {
      std::array<std::int32_t, 4> up{coords[v][0], coords[v][1], coords[v][2],
                                     coords[v][3]};
      ++up[i];
      auto it = index.find(detail::pack_coords(up));
      if (it != index.end()) edges.emplace_back(v, it->second);
    }
  }
  std::array<std::int32_t, 4> zero{0, 0, 0, 0};
  VertexId origin = index.at(detail::pack_coords(zero));
  return LatticePlate{delta,          r,     origin, std::move(coords),
                      std::move(shell), Graph::from_edges(std::move(edges), expected)};
}

/// Parameters of the plate construction: a ray skeleton whose fiber at n is
/// an l1 ball of radius floor(n^alpha) in Z^delta, alpha = (D-1)/delta.
/// The result has spine-ball growth exponent 1 and spinal-set growth
/// exponent D.
struct PlateSpec {
  double D = 1.5;
  std::uint32_t delta = 2;
  std::uint32_t length = 64;  // skeleton vertices, indexed 0..length-1
  std::uint64_t seed = 0;     // recorded for provenance; unused by the default plates
};

inline std::uint32_t plate_fiber_radius(std::uint32_t n, double alpha) {
  // The nudge absorbs values like pow(16, 0.25) = 1.9999...; true non-integer
  // radii sit far enough from integers that it never rounds one up.
  return static_cast<std::uint32_t>(std::floor(std::pow(n, alpha) * (1.0 + 1e-12)));
}

struct PlateGraph {
  PlateSpec spec;
  double alpha = 0.25;
  std::uint32_t safe_radius = 0;   // length / 2
  VertexId boundary_spine = 0;     // the truncated end of the ray
  SpinalGraph sg;
};

/// Fiber provider signature: given the skeleton index and the target radius,
/// produce a connected fiber of comparable growth.
using PlateProvider = std::function<Fiber(std::uint32_t n, std::uint32_t radius)>;

inline PlateGraph plates(const PlateSpec& spec, const PlateProvider& provider,
                         std::uint64_t vertex_budget = 16'000'000) {
  if (!(spec.D > 1.0))
    fail("DomainError", "plate dimension D must exceed 1");
  if (spec.delta < 1 || static_cast<double>(spec.delta) <= spec.D - 1.0)
    fail("DomainError", "plate exponent delta must exceed D - 1 to keep alpha < 1");
  if (spec.length < 2)
    fail("DomainError", "plate skeleton needs at least 2 vertices");
  double alpha = (spec.D - 1.0) / spec.delta;

  // Assemble the glued graph directly, using the same block numbering as
  // glue(): fiber n occupies a block starting at offset[n], distinguished
  // vertex first.
  std::vector<Edge> edges;
  std::vector<VertexId> offset{0};
  offset.reserve(spec.length + 1);
  std::uint64_t total = 0;
  for (std::uint32_t n = 0; n < spec.length; ++n) {
    Fiber fiber = provider(n, plate_fiber_radius(n, alpha));
    if (fiber.z >= fiber.graph.vertex_count())
      fail("BadDistinguishedVertex",
           "plate fiber " + std::to_string(n) + " has no vertex " + std::to_string(fiber.z));
    total += fiber.graph.vertex_count();
    if (total > vertex_budget)
      fail("SizeBudgetExceeded", "plate graph exceeds " + std::to_string(vertex_budget) +
                                     " vertices at fiber " + std::to_string(n));
    VertexId base = offset.back();
    VertexId z = fiber.z;
    for (const auto& [u, v] : fiber.graph.edges()) {
      auto relabel = [&](VertexId y) -> VertexId {
        if (y == z) return base;
        return base + (y < z ? y + 1 : y);
      };
      edges.emplace_back(relabel(u), relabel(v));
    }
    offset.push_back(base + static_cast<VertexId>(fiber.graph.vertex_count()));
    if (n > 0) edges.emplace_back(offset[n - 1], offset[n]);
  }

  Graph g = Graph::from_edges(std::move(edges), offset.back());
  std::vector<VertexId> spine(spec.length);
  std::vector<VertexId> pi(offset.back());
  for (std::uint32_t n = 0; n < spec.length; ++n) {
    spine[n] = offset[n];
    for (VertexId v = offset[n]; v < offset[n + 1]; ++v) pi[v] = offset[n];
  }
  return PlateGraph{spec, alpha, spec.length / 2, spine[spec.length - 1],
                    SpinalGraph(std::move(g), std::move(spine), std::move(pi))};
}

inline PlateGraph plates(const PlateSpec& spec,
                         std::uint64_t vertex_budget = 16'000'000) {
  return plates(
      spec,
      [&](std::uint32_t, std::uint32_t radius) {
        LatticePlate plate = lattice_plate(spec.delta, radius, vertex_budget);
        return Fiber{std::move(plate.graph), plate.origin};
      },
      vertex_budget);
}

/// Random connected graph: a random attachment tree plus extra edges.
inline Graph random_connected_graph(Rng& rng, std::uint32_t n,
                                    std::uint32_t extra_edges) {
  if (n == 0) fail("DomainError", "graph needs at least one vertex");
  std::set<Edge> edge_set;
  for (VertexId v = 1; v < n; ++v) {
    auto parent = static_cast<VertexId>(rng.below(v));
    edge_set.emplace(parent, v);
  }
  for (std::uint32_t i = 0; i < extra_edges && n >= 2; ++i) {
    auto u = static_cast<VertexId>(rng.below(n));
    auto v = static_cast<VertexId>(rng.below(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    edge_set.emplace(u, v);  // duplicates collapse; fewer extras is fine
  }
  std::vector<Edge> edges(edge_set.begin(), edge_set.end());
  return Graph::from_edges(std::move(edges), n);
}

/// Seeded random glued graph, returned with the parts it was glued from so
/// round-trip tests can compare against them.
struct GluedSample {
  Graph skeleton;
  std::vector<Fiber> fibers;
  SpinalGraph sg;
};

inline GluedSample random_glued(std::uint64_t seed, std::uint32_t skeleton_size,
                                std::uint32_t max_fiber_size) {
  if (skeleton_size < 1 || max_fiber_size < 1)
    fail("DomainError", "glued sample sizes must be at least 1");
  Rng rng(seed);
  Graph skeleton = skeleton_size == 1
                       ? Graph::from_edges({}, 1)
                       : random_connected_graph(rng, skeleton_size, skeleton_size / 3);
  std::vector<std::uint32_t> sizes(skeleton_size);
  bool any_thick = false;
  for (auto& s : sizes) {
    s = 1 + static_cast<std::uint32_t>(rng.below(max_fiber_size));
    any_thick = any_thick || s >= 2;
  }
  if (max_fiber_size >= 2 && !any_thick) sizes[0] = 2;

  std::vector<Fiber> fibers;
  fibers.reserve(skeleton_size);
  for (std::uint32_t s : sizes) {
    Graph fg = s == 1 ? Graph::from_edges({}, 1)
                      : random_connected_graph(rng, s, static_cast<std::uint32_t>(rng.below(s)));
    auto z = static_cast<VertexId>(rng.below(s));
    fibers.push_back(Fiber{std::move(fg), z});
  }
  SpinalGraph sg = glue(skeleton, fibers);
  return GluedSample{std::move(skeleton), std::move(fibers), std::move(sg)};
}

}  // namespace spinal_lab
