#pragma once

// Spinal structure on top of a graph: a spine subset and a projection map,
// their validation (fast structural form and path-enumeration form), the
// glue/decompose pair, spinal distance and spinal sets, fiber geodesics,
// and the cutoff test functions used by the functional-inequality checks.

#include "spinal_lab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spinal_lab {

struct SpinalViolation {
  std::string kind;  // "ProjectionOffSpine", "SpineNotFixed", "CrossFiberEdge", ...
  VertexId u = 0;
  VertexId v = 0;
  std::string detail;
};

struct ValidationReport {
  bool ok = true;
  std::vector<SpinalViolation> violations;

  void add(std::string kind, VertexId u, VertexId v, std::string detail) {
    ok = false;
    violations.push_back({std::move(kind), u, v, std::move(detail)});
  }
};

namespace detail {

inline std::vector<VertexId> sorted_unique(std::span<const VertexId> ids) {
  std::vector<VertexId> out(ids.begin(), ids.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Shared sanity layer for both validators: the projection must be total,
// land on the spine, and fix it pointwise.
inline void check_projection_basics(const Graph& g,
                                    const std::vector<VertexId>& spine,
                                    std::span<const VertexId> pi,
                                    ValidationReport& report) {
  std::size_t n = g.vertex_count();
  if (spine.empty()) {
    report.add("EmptySpine", 0, 0, "spine has no vertices");
    return;
  }
  for (VertexId s : spine)
    if (s >= n) {
      report.add("BadSpineVertex", s, s, "spine vertex out of range");
      return;
    }
  if (pi.size() != n) {
    report.add("BadProjection", 0, 0, "projection must assign every vertex");
    return;
  }
  for (VertexId v = 0; v < n; ++v) {
    if (pi[v] >= n || !std::binary_search(spine.begin(), spine.end(), pi[v]))
      report.add("ProjectionOffSpine", v, pi[v],
                 "pi(" + std::to_string(v) + ") is not a spine vertex");
  }
  if (!report.ok) return;
  for (VertexId s : spine)
    if (pi[s] != s)
      report.add("SpineNotFixed", s, pi[s],
                 "pi must fix spine vertex " + std::to_string(s));
}

}  // namespace detail

/// Edge-level characterization of the spinal property: every edge joining
/// two fibers joins the fibers' own spine vertices, and each fiber induces
/// a connected subgraph. On connected graphs this is equivalent to the
/// path-based definition that `validate_bruteforce` checks directly.
inline ValidationReport validate_structural(const Graph& g,
                                            std::span<const VertexId> spine_in,
                                            std::span<const VertexId> pi) {
  ValidationReport report;
  std::vector<VertexId> spine = detail::sorted_unique(spine_in);
  detail::check_projection_basics(g, spine, pi, report);
  if (!report.ok) return report;

  std::size_t n = g.vertex_count();
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v : g.neighbors(u)) {
      if (v < u) continue;
      if (pi[u] == pi[v]) continue;
      if (u != pi[u] || v != pi[v])
        report.add("CrossFiberEdge", u, v,
                   "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                       ") joins distinct fibers away from their spine vertices");
    }

  // Fiber connectivity, one local sweep per fiber.
  std::vector<std::vector<VertexId>> members(spine.size());
  for (VertexId v = 0; v < n; ++v) {
    std::size_t s = static_cast<std::size_t>(
        std::lower_bound(spine.begin(), spine.end(), pi[v]) - spine.begin());
    members[s].push_back(v);
  }
  std::vector<std::int32_t> local_dist;
  std::vector<VertexId> queue;
  for (std::size_t s = 0; s < spine.size(); ++s) {
    const auto& fiber = members[s];
    auto local_of = [&](VertexId w) -> std::int64_t {
      auto it = std::lower_bound(fiber.begin(), fiber.end(), w);
      return (it != fiber.end() && *it == w)
                 ? static_cast<std::int64_t>(it - fiber.begin())
                 : -1;
    };
    local_dist.assign(fiber.size(), -1);
    queue.clear();
    std::int64_t root = local_of(spine[s]);
    local_dist[static_cast<std::size_t>(root)] = 0;
    queue.push_back(static_cast<VertexId>(root));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      VertexId lu = queue[head];
      for (VertexId w : g.neighbors(fiber[lu])) {
        if (pi[w] != spine[s]) continue;
        std::int64_t lw = local_of(w);
        if (local_dist[static_cast<std::size_t>(lw)] < 0) {
          local_dist[static_cast<std::size_t>(lw)] = local_dist[lu] + 1;
          queue.push_back(static_cast<VertexId>(lw));
        }
      }
    }
    for (std::size_t i = 0; i < fiber.size(); ++i)
      if (local_dist[i] < 0)
        report.add("DisconnectedFiber", spine[s], fiber[i],
                   "fiber of " + std::to_string(spine[s]) +
                       " does not reach member " + std::to_string(fiber[i]));
  }
  return report;
}

/// Path-based validation by exhaustive enumeration of simple paths: for
/// every pair with pi(a) != pi(b), each simple path from a to b must pass
/// through pi(a) no later than pi(b). A small-graph oracle; throws
/// BudgetExceeded when enumeration outgrows `step_budget`.
inline bool validate_bruteforce(const Graph& g,
                                std::span<const VertexId> spine_in,
                                std::span<const VertexId> pi,
                                std::uint32_t max_path_len = 0,
                                std::uint64_t step_budget = 10'000'000) {
  ValidationReport basics;
  std::vector<VertexId> spine = detail::sorted_unique(spine_in);
  detail::check_projection_basics(g, spine, pi, basics);
  if (!basics.ok) return false;

  std::size_t n = g.vertex_count();
  std::uint32_t max_len = max_path_len ? max_path_len : static_cast<std::uint32_t>(n);
  std::uint64_t steps = 0;

  std::vector<std::int32_t> position(n, -1);
  std::vector<VertexId> path;
  // Iterative DFS over simple paths from a; the condition is evaluated at
  // every endpoint b > a with a different projection. Each path is simple,
  // so each vertex has a single position along it.
  std::vector<std::size_t> cursor;
  for (VertexId a = 0; a < n; ++a) {
    bool any_pair = false;
    for (VertexId b = a + 1; b < n && !any_pair; ++b)
      if (pi[a] != pi[b]) any_pair = true;
    if (!any_pair) continue;

    path.assign(1, a);
    position[a] = 0;
    cursor.assign(1, 0);
    while (!path.empty()) {
      VertexId u = path.back();
      auto nb = g.neighbors(u);
      if (cursor.back() >= nb.size()) {
        position[u] = -1;
        path.pop_back();
        cursor.pop_back();
        continue;
      }
      VertexId w = nb[cursor.back()++];
      if (position[w] >= 0) continue;
      if (++steps > step_budget)
        fail("BudgetExceeded", "simple-path enumeration passed " +
                                   std::to_string(step_budget) + " steps");
      position[w] = static_cast<std::int32_t>(path.size());
      path.push_back(w);
      cursor.push_back(0);
      if (w > a && pi[w] != pi[a]) {
        // Path from a to w must contain pi(a) at or before pi(w).
        std::int32_t pa = position[pi[a]];
        std::int32_t pw = position[pi[w]];
        if (pa < 0 || pw < 0 || pa > pw) {
          for (VertexId v : path) position[v] = -1;
          return false;
        }
      }
      if (path.size() > max_len + 1ull) {
        position[w] = -1;
        path.pop_back();
        cursor.pop_back();
      }
    }
  }
  return true;
}

/// A validated spinal graph: ambient graph, sorted spine, projection, and
/// the derived skeleton (subgraph induced on the spine) plus fiber tables.
class SpinalGraph {
public:
  SpinalGraph(Graph g, std::vector<VertexId> spine, std::vector<VertexId> pi)
      : g_(std::move(g)), spine_(detail::sorted_unique(spine)), pi_(std::move(pi)) {
    ValidationReport report = validate_structural(g_, spine_, pi_);
    if (!report.ok) {
      const auto& first = report.violations.front();
      fail("InvalidSpinalGraph",
           first.kind + " (" + first.detail + ")" +
               (report.violations.size() > 1
                    ? " and " + std::to_string(report.violations.size() - 1) + " more"
                    : ""));
    }

    skel_of_.resize(g_.vertex_count());
    fibers_.resize(spine_.size());
    for (VertexId v = 0; v < g_.vertex_count(); ++v) {
      auto s = static_cast<std::uint32_t>(
          std::lower_bound(spine_.begin(), spine_.end(), pi_[v]) - spine_.begin());
      skel_of_[v] = s;
      fibers_[s].push_back(v);  // ascending v keeps each fiber sorted
    }

    std::vector<Edge> skeleton_edges;
    for (VertexId s : spine_)
      for (VertexId w : g_.neighbors(s))
        if (w > s && pi_[w] == w)
          skeleton_edges.emplace_back(skel_of_[s], skel_of_[w]);
    skeleton_ = Graph::from_edges(std::move(skeleton_edges), spine_.size());
  }

  const Graph& graph() const { return g_; }
  const std::vector<VertexId>& spine() const { return spine_; }
  const std::vector<VertexId>& pi_map() const { return pi_; }
  VertexId pi(VertexId v) const { return pi_[v]; }
  bool on_spine(VertexId v) const { return pi_[v] == v; }

  /// Skeleton vertex s corresponds to spine()[s].
  const Graph& skeleton() const { return skeleton_; }
  std::uint32_t skeleton_id(VertexId v) const { return skel_of_[v]; }
  VertexId spine_vertex(std::uint32_t skeleton_id) const { return spine_[skeleton_id]; }

  /// Ambient members of the fiber over spine()[skeleton_id], ascending.
  std::span<const VertexId> fiber(std::uint32_t skeleton_id) const {
    return fibers_[skeleton_id];
  }

  /// Spinal distance [x, y]: skeleton distance between the projections.
  std::uint32_t spinal_distance(VertexId x, VertexId y) const {
    Bfs bfs;
    bfs.run(skeleton_, skel_of_[x], -1, skel_of_[y]);
    return static_cast<std::uint32_t>(bfs.dist(skel_of_[y]));
  }

  /// Skeleton distances from pi(x0), indexed by skeleton id.
  std::vector<std::int32_t> skeleton_distances(VertexId x0) const {
    Bfs bfs;
    bfs.run(skeleton_, skel_of_[x0]);
    return bfs.distances();
  }

  /// Spinal set D(x, r): union of the fibers within spinal distance
  /// floor(r) of x. Ids ascending.
  std::vector<VertexId> spinal_set(VertexId x, double r) const {
    if (r < 0) fail("DomainError", "spinal set radius must be nonnegative");
    Bfs bfs;
    bfs.run(skeleton_, skel_of_[x], static_cast<std::int64_t>(std::floor(r)));
    std::vector<VertexId> out;
    for (VertexId s : bfs.order())
      out.insert(out.end(), fibers_[s].begin(), fibers_[s].end());
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  Graph g_;
  std::vector<VertexId> spine_;
  std::vector<VertexId> pi_;
  Graph skeleton_;
  std::vector<std::uint32_t> skel_of_;
  std::vector<std::vector<VertexId>> fibers_;
};

/// |B_Sigma(pi(x0), r)| and |D(x0, r)| for every r = 0..r_max, from one
/// skeleton sweep. Entries saturate once the skeleton is exhausted.
struct SpinalProfile {
  std::vector<std::uint64_t> spine_ball;
  std::vector<std::uint64_t> spinal_set;
};

inline SpinalProfile spinal_volume_profile(const SpinalGraph& sg, VertexId x0,
                                           std::uint32_t r_max) {
  Bfs bfs;
  bfs.run(sg.skeleton(), sg.skeleton_id(x0), r_max);
  SpinalProfile profile;
  profile.spine_ball.assign(r_max + 1ull, 0);
  profile.spinal_set.assign(r_max + 1ull, 0);
  for (VertexId s : bfs.order()) {
    auto d = static_cast<std::uint32_t>(bfs.dist(s));
    profile.spine_ball[d] += 1;
    profile.spinal_set[d] += sg.fiber(s).size();
  }
  for (std::size_t r = 1; r <= r_max; ++r) {
    profile.spine_ball[r] += profile.spine_ball[r - 1];
    profile.spinal_set[r] += profile.spinal_set[r - 1];
  }
  return profile;
}

/// One fiber of a glued graph: a connected graph with the distinguished
/// vertex that lands on the spine.
struct Fiber {
  Graph graph;
  VertexId z = 0;
};

/// Glues one fiber over each skeleton vertex, identifying fiber i's
/// distinguished vertex with skeleton vertex i. Vertex numbering is
/// deterministic: fibers occupy consecutive blocks in skeleton order, the
/// distinguished vertex first, remaining fiber vertices in their original
/// order.
inline SpinalGraph glue(const Graph& skeleton, const std::vector<Fiber>& fibers) {
  if (fibers.size() != skeleton.vertex_count())
    fail("DomainError", "need exactly one fiber per skeleton vertex, got " +
                            std::to_string(fibers.size()) + " for " +
                            std::to_string(skeleton.vertex_count()));
  std::vector<VertexId> offset(fibers.size() + 1, 0);
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    if (fibers[i].z >= fibers[i].graph.vertex_count())
      fail("BadDistinguishedVertex",
           "fiber " + std::to_string(i) + " has no vertex " + std::to_string(fibers[i].z));
    offset[i + 1] = offset[i] + static_cast<VertexId>(fibers[i].graph.vertex_count());
  }

  std::vector<Edge> edges;
  std::size_t total_edges = skeleton.edge_count();
  for (const auto& f : fibers) total_edges += f.graph.edge_count();
  edges.reserve(total_edges);

  for (std::size_t i = 0; i < fibers.size(); ++i) {
    const VertexId z = fibers[i].z;
    auto relabel = [&](VertexId y) -> VertexId {
      if (y == z) return offset[i];
      return offset[i] + (y < z ? y + 1 : y);
    };
    for (const auto& [u, v] : fibers[i].graph.edges())
      edges.emplace_back(relabel(u), relabel(v));
  }
  for (const auto& [s, t] : skeleton.edges())
    edges.emplace_back(offset[s], offset[t]);

  Graph g = Graph::from_edges(std::move(edges), offset.back());
  std::vector<VertexId> spine(fibers.size());
  std::vector<VertexId> pi(offset.back());
  for (std::size_t i = 0; i < fibers.size(); ++i) {
    spine[i] = offset[i];
    for (VertexId v = offset[i]; v < offset[i + 1]; ++v) pi[v] = offset[i];
  }
  return SpinalGraph(std::move(g), std::move(spine), std::move(pi));
}

/// Inverse view of a spinal graph: its skeleton, one fiber per skeleton
/// vertex (members relabeled 0..k-1 in ascending ambient order), and the
/// maps back to ambient ids.
struct FiberDecomposition {
  Graph skeleton;
  std::vector<Fiber> fibers;
  std::vector<VertexId> skeleton_to_ambient;            // spine vertex per skeleton id
  std::vector<std::vector<VertexId>> fiber_to_ambient;  // local id -> ambient id
};

inline FiberDecomposition decompose(const SpinalGraph& sg) {
  FiberDecomposition out;
  out.skeleton = sg.skeleton();
  out.skeleton_to_ambient = sg.spine();
  out.fibers.resize(sg.spine().size());
  out.fiber_to_ambient.resize(sg.spine().size());
  for (std::uint32_t s = 0; s < sg.spine().size(); ++s) {
    auto fiber = sg.fiber(s);
    std::vector<VertexId> members(fiber.begin(), fiber.end());
    auto local_of = [&](VertexId w) {
      return static_cast<VertexId>(
          std::lower_bound(members.begin(), members.end(), w) - members.begin());
    };
    std::vector<Edge> edges;
    for (VertexId v : members)
      for (VertexId w : sg.graph().neighbors(v))
        if (w > v && sg.pi(w) == sg.pi(v)) edges.emplace_back(local_of(v), local_of(w));
    out.fibers[s].graph = Graph::from_edges(std::move(edges), members.size());
    out.fibers[s].z = local_of(sg.spine_vertex(s));
    out.fiber_to_ambient[s] = std::move(members);
  }
  return out;
}

inline SpinalGraph glue(const FiberDecomposition& parts) {
  return glue(parts.skeleton, parts.fibers);
}

/// Deterministic renumbering: spine vertices first in ascending original
/// order, then each fiber's remaining vertices in breadth-first order from
/// its spine vertex (ties broken by ascending original id). Two spinal
/// graphs that differ only by such a relabeling canonicalize identically.
inline SpinalGraph canonical_form(const SpinalGraph& sg) {
  const Graph& g = sg.graph();
  std::size_t n = g.vertex_count();
  std::size_t S = sg.spine().size();
  constexpr VertexId kUnset = static_cast<VertexId>(-1);
  std::vector<VertexId> new_of(n, kUnset);
  for (std::uint32_t s = 0; s < S; ++s) new_of[sg.spine()[s]] = s;

  VertexId next = static_cast<VertexId>(S);
  std::vector<std::int32_t> local_dist;
  std::vector<VertexId> queue;
  for (std::uint32_t s = 0; s < S; ++s) {
    auto fiber = sg.fiber(s);
    auto local_of = [&](VertexId w) {
      return static_cast<std::size_t>(
          std::lower_bound(fiber.begin(), fiber.end(), w) - fiber.begin());
    };
    local_dist.assign(fiber.size(), -1);
    queue.clear();
    std::size_t root = local_of(sg.spine_vertex(s));
    local_dist[root] = 0;
    queue.push_back(static_cast<VertexId>(root));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      VertexId lu = queue[head];
      VertexId u = fiber[lu];
      if (u != sg.spine_vertex(s)) new_of[u] = next++;
      for (VertexId w : g.neighbors(u)) {
        if (sg.pi(w) != sg.pi(u)) continue;
        std::size_t lw = local_of(w);
        if (local_dist[lw] < 0) {
          local_dist[lw] = local_dist[lu] + 1;
          queue.push_back(static_cast<VertexId>(lw));
        }
      }
    }
  }

  std::vector<Edge> edges;
  edges.reserve(g.edge_count());
  for (const auto& [u, v] : g.edges()) edges.emplace_back(new_of[u], new_of[v]);
  std::vector<VertexId> spine(S);
  for (std::uint32_t s = 0; s < S; ++s) spine[s] = s;
  std::vector<VertexId> pi(n);
  for (VertexId v = 0; v < n; ++v) pi[new_of[v]] = new_of[sg.pi(v)];
  return SpinalGraph(Graph::from_edges(std::move(edges), n), std::move(spine),
                     std::move(pi));
}

inline bool structurally_equal(const SpinalGraph& a, const SpinalGraph& b) {
  return a.graph().vertex_count() == b.graph().vertex_count() &&
         a.graph().edges() == b.graph().edges() && a.spine() == b.spine() &&
         a.pi_map() == b.pi_map();
}

/// Fiber-geodesic audit: ambient distances between same-fiber vertices must
/// be realized inside the fiber. Works on raw (graph, spine, pi) data so
/// deliberately corrupted inputs can be audited too.
struct FiberGeodesicViolation {
  VertexId a = 0;
  VertexId b = 0;
  std::uint32_t ambient = 0;
  std::uint32_t within_fiber = 0;  // distance through the fiber alone
};

struct FiberGeodesicReport {
  std::uint64_t sources_checked = 0;
  std::uint64_t vertices_compared = 0;
  std::vector<FiberGeodesicViolation> violations;
  bool ok() const { return violations.empty(); }
};

inline FiberGeodesicReport check_fiber_geodesics(
    const Graph& g, std::span<const VertexId> spine_in,
    std::span<const VertexId> pi, std::span<const VertexId> sources) {
  std::vector<VertexId> spine = detail::sorted_unique(spine_in);
  {
    ValidationReport basics;
    detail::check_projection_basics(g, spine, pi, basics);
    if (!basics.ok)
      fail("DomainError", "fiber geodesics need a total projection onto the spine");
  }
  FiberGeodesicReport report;
  Bfs ambient;
  std::vector<std::int32_t> fiber_dist;
  std::vector<VertexId> queue;
  std::vector<VertexId> seen;
  for (VertexId a : sources) {
    ++report.sources_checked;
    // Members of a's fiber, ascending.
    std::vector<VertexId> members;
    for (VertexId v = 0; v < g.vertex_count(); ++v)
      if (pi[v] == pi[a]) members.push_back(v);
    auto local_of = [&](VertexId w) -> std::int64_t {
      auto it = std::lower_bound(members.begin(), members.end(), w);
      return (it != members.end() && *it == w)
                 ? static_cast<std::int64_t>(it - members.begin())
                 : -1;
    };
    ambient.run(g, a);
    fiber_dist.assign(members.size(), -1);
    queue.clear();
    fiber_dist[static_cast<std::size_t>(local_of(a))] = 0;
    queue.push_back(static_cast<VertexId>(local_of(a)));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      VertexId lu = queue[head];
      for (VertexId w : g.neighbors(members[lu])) {
        std::int64_t lw = local_of(w);
        if (lw >= 0 && fiber_dist[static_cast<std::size_t>(lw)] < 0) {
          fiber_dist[static_cast<std::size_t>(lw)] = fiber_dist[lu] + 1;
          queue.push_back(static_cast<VertexId>(lw));
        }
      }
    }
    for (std::size_t i = 0; i < members.size(); ++i) {
      ++report.vertices_compared;
      std::int32_t da = ambient.dist(members[i]);
      std::int32_t df = fiber_dist[i];
      if (da != df)
        report.violations.push_back(
            {a, members[i], static_cast<std::uint32_t>(da),
             df < 0 ? static_cast<std::uint32_t>(-1) : static_cast<std::uint32_t>(df)});
    }
  }
  return report;
}

inline FiberGeodesicReport check_fiber_geodesics(const SpinalGraph& sg,
                                                 std::span<const VertexId> sources) {
  return check_fiber_geodesics(sg.graph(), sg.spine(), sg.pi_map(), sources);
}

/// Seeded sample of fibers with at least two members; returns one source
/// vertex per drawn fiber (duplicates possible across draws).
inline std::vector<VertexId> sample_fiber_sources(const SpinalGraph& sg,
                                                  std::size_t count,
                                                  std::uint64_t seed) {
  std::vector<std::uint32_t> rich;
  for (std::uint32_t s = 0; s < sg.spine().size(); ++s)
    if (sg.fiber(s).size() >= 2) rich.push_back(s);
  std::vector<VertexId> out;
  if (rich.empty()) return out;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    auto fiber = sg.fiber(rich[rng.index(rich.size())]);
    out.push_back(fiber[rng.index(fiber.size())]);
  }
  return out;
}

/// Cutoff profile g_n(x) = max(0, n - [x, x0]) / n, stored as exact integer
/// numerators over the common denominator n. Constant on each fiber; its
/// gradient lives on the spine within spinal distance n of x0.
struct TestFunction {
  VertexId center = 0;
  std::uint32_t denominator = 1;
  std::vector<std::int64_t> numerators;

  double value(VertexId v) const {
    return static_cast<double>(numerators[v]) / denominator;
  }
  std::vector<double> values() const {
    std::vector<double> out(numerators.size());
    for (std::size_t v = 0; v < out.size(); ++v)
      out[v] = static_cast<double>(numerators[v]) / denominator;
    return out;
  }
};

inline TestFunction test_function(const SpinalGraph& sg, VertexId x0,
                                  std::uint32_t n) {
  if (n == 0) fail("DomainError", "test function needs n >= 1");
  if (!sg.on_spine(x0))
    fail("NotOnSpine", "vertex " + std::to_string(x0) + " is not a spine vertex");
  std::vector<std::int32_t> skel_dist = sg.skeleton_distances(x0);
  TestFunction f;
  f.center = x0;
  f.denominator = n;
  f.numerators.resize(sg.graph().vertex_count());
  for (VertexId v = 0; v < f.numerators.size(); ++v) {
    std::int64_t d = skel_dist[sg.skeleton_id(v)];
    f.numerators[v] = std::max<std::int64_t>(0, static_cast<std::int64_t>(n) - d);
  }
  return f;
}

}  // namespace spinal_lab
