#pragma once

// Immutable undirected simple graphs in compressed adjacency form, plus the
// breadth-first machinery the rest of the library leans on: distances,
// balls, volume tables, doubling measurements, and ball-intersection scans.

#include "spinal_lab/util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spinal_lab {

using Edge = std::pair<VertexId, VertexId>;

class Graph {
public:
  Graph() = default;

  /// Builds a graph from unordered vertex-id pairs. Ids must cover 0..n-1
  /// with n inferred from the largest id unless `vertex_count` is given
  /// (required for the single-vertex graph, which has no edges). Rejects
  /// self-loops, repeated edges, uncovered ids, and disconnected inputs.
  static Graph from_edges(std::vector<Edge> edges,
                          std::optional<std::size_t> vertex_count = {});

  std::size_t vertex_count() const { return offsets_.size() - 1; }
  std::size_t edge_count() const { return adjacency_.size() / 2; }

  std::uint32_t degree(VertexId v) const {
    return offsets_[v + 1] - offsets_[v];
  }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }

  bool has_edge(VertexId u, VertexId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Edge list with u < v, lexicographically sorted.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (VertexId u = 0; u < vertex_count(); ++u)
      for (VertexId w : neighbors(u))
        if (w > u) out.emplace_back(u, w);
    return out;
  }

private:
  std::vector<std::uint64_t> offsets_{0};
  std::vector<VertexId> adjacency_;
};

inline Graph Graph::from_edges(std::vector<Edge> edges,
                               std::optional<std::size_t> vertex_count) {
  std::size_t n = 0;
  if (vertex_count) {
    n = *vertex_count;
    if (n == 0) fail("IdGap", "graph needs at least one vertex");
  } else {
    if (edges.empty())
      fail("IdGap", "no edges given and no vertex count to infer ids from");
    for (const auto& [u, v] : edges) n = std::max<std::size_t>({n, u + 1ull, v + 1ull});
  }

  for (auto& [u, v] : edges) {
    if (u == v) fail("SelfLoop", "edge (" + std::to_string(u) + ", " + std::to_string(v) + ")");
    if (u >= n || v >= n)
      fail("IdGap", "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                        ") exceeds vertex range 0.." + std::to_string(n - 1));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (edges[i] == edges[i - 1])
      fail("DuplicateEdge", "edge (" + std::to_string(edges[i].first) + ", " +
                                std::to_string(edges[i].second) + ") repeats");

  Graph g;
  g.offsets_.assign(n + 1, 0);
  for (const auto& [u, v] : edges) {
    ++g.offsets_[u + 1];
    ++g.offsets_[v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (n > 1 && g.offsets_[i + 1] == 0)
      fail("IdGap", "vertex " + std::to_string(i) + " has no incident edges");
    g.offsets_[i + 1] += g.offsets_[i];
  }
  g.adjacency_.resize(edges.size() * 2);
  std::vector<std::uint64_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& [u, v] : edges) {
    g.adjacency_[cursor[u]++] = v;
    g.adjacency_[cursor[v]++] = u;
  }
  // Filling from the sorted edge list leaves each neighbor run sorted for
  // the smaller endpoint only; normalize both.
  for (std::size_t i = 0; i < n; ++i)
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));

  // Connectivity sweep.
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<VertexId> queue{0};
  seen[0] = 1;
  std::size_t reached = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    for (VertexId w : g.neighbors(queue[head]))
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        queue.push_back(w);
      }
  }
  if (reached != n) {
    VertexId missing = 0;
    while (seen[missing]) ++missing;
    fail("Disconnected", "vertex " + std::to_string(missing) +
                             " is not reachable from vertex 0");
  }
  return g;
}

/// Reusable breadth-first search. `dist` keeps -1 for unreached vertices;
/// `order` lists reached vertices by nondecreasing distance. The workspace
/// survives between runs so repeated sweeps cost O(touched), not O(n).
class Bfs {
public:
  /// radius_cap < 0 means unbounded; stop_at, when reached, ends the scan
  /// after its layer is recorded.
  void run(const Graph& g, VertexId src, std::int64_t radius_cap = -1,
           std::int64_t stop_at = -1) {
    prepare(g.vertex_count());
    dist_[src] = 0;
    order_.push_back(src);
    for (std::size_t head = 0; head < order_.size(); ++head) {
      VertexId u = order_[head];
      if (static_cast<std::int64_t>(u) == stop_at) return;
      std::int32_t du = dist_[u];
      if (radius_cap >= 0 && du >= radius_cap) continue;
      for (VertexId w : g.neighbors(u))
        if (dist_[w] < 0) {
          dist_[w] = du + 1;
          order_.push_back(w);
        }
    }
  }

  /// Same sweep restricted to vertices with mask[v] != 0.
  void run_masked(const Graph& g, VertexId src,
                  const std::vector<std::uint8_t>& mask,
                  std::int64_t radius_cap = -1) {
    prepare(g.vertex_count());
    if (!mask[src]) return;
    dist_[src] = 0;
    order_.push_back(src);
    for (std::size_t head = 0; head < order_.size(); ++head) {
      VertexId u = order_[head];
      std::int32_t du = dist_[u];
      if (radius_cap >= 0 && du >= radius_cap) continue;
      for (VertexId w : g.neighbors(u))
        if (mask[w] && dist_[w] < 0) {
          dist_[w] = du + 1;
          order_.push_back(w);
        }
    }
  }

  std::int32_t dist(VertexId v) const { return dist_[v]; }
  const std::vector<std::int32_t>& distances() const { return dist_; }
  std::span<const VertexId> order() const { return order_; }

private:
  void prepare(std::size_t n) {
    if (dist_.size() != n) {
      dist_.assign(n, -1);
    } else {
      for (VertexId v : order_) dist_[v] = -1;
    }
    order_.clear();
  }

  std::vector<std::int32_t> dist_;
  std::vector<VertexId> order_;
};

inline std::uint32_t distance(const Graph& g, VertexId x, VertexId y) {
  Bfs bfs;
  bfs.run(g, x, -1, y);
  std::int32_t d = bfs.dist(y);
  if (d < 0) fail("Disconnected", "no path between " + std::to_string(x) +
                                      " and " + std::to_string(y));
  return static_cast<std::uint32_t>(d);
}

/// Closed metric ball around x; real radii are floored. Ids ascending.
inline std::vector<VertexId> ball(const Graph& g, VertexId x, double r) {
  if (r < 0) fail("DomainError", "ball radius must be nonnegative");
  Bfs bfs;
  bfs.run(g, x, static_cast<std::int64_t>(std::floor(r)));
  std::vector<VertexId> out(bfs.order().begin(), bfs.order().end());
  std::sort(out.begin(), out.end());
  return out;
}

struct VolumeTable {
  VertexId center = 0;
  std::vector<std::uint64_t> volumes;  // volumes[r] = |B(center, r)|, r = 0..r_max
};

inline VolumeTable volume_table(const Graph& g, VertexId x, std::uint32_t r_max) {
  Bfs bfs;
  bfs.run(g, x, r_max);
  VolumeTable table;
  table.center = x;
  table.volumes.assign(r_max + 1ull, 0);
  for (VertexId v : bfs.order()) ++table.volumes[static_cast<std::uint32_t>(bfs.dist(v))];
  for (std::size_t r = 1; r <= r_max; ++r) table.volumes[r] += table.volumes[r - 1];
  return table;
}

/// Volume-doubling scan. For each grid exponent nu the induced constant is
/// the largest |B(x,R)| / (|B(x,r)| (R/r)^nu) over sampled centers and
/// r_min <= r < R <= r_max; the reported pair takes the smallest grid nu
/// whose constant stays within `cap`, falling back to the top of the grid.
struct DoublingEstimate {
  double nu = 0;
  double c_d = 0;
  bool feasible = false;
  double cap = 0;
  std::uint32_t r_min = 1;
  std::uint32_t r_max = 1;
  std::vector<VertexId> centers;
  std::vector<std::pair<double, double>> per_nu;  // (nu, induced constant)
};

namespace detail {
inline double doubling_constant_for(const std::vector<VolumeTable>& tables,
                                    std::uint32_t r_min, std::uint32_t r_max,
                                    double nu) {
  double worst = 0;
  for (const auto& table : tables)
    for (std::uint32_t r = r_min; r < r_max; ++r)
      for (std::uint32_t R = r + 1; R <= r_max; ++R) {
        double ratio = static_cast<double>(table.volumes[R]) /
                       static_cast<double>(table.volumes[r]);
        double c = ratio * std::pow(static_cast<double>(r) / R, nu);
        worst = std::max(worst, c);
      }
  return worst;
}
}  // namespace detail

inline DoublingEstimate measure_doubling(const Graph& g,
                                         std::span<const VertexId> centers,
                                         std::uint32_t r_min, std::uint32_t r_max,
                                         double cap = 8.0) {
  if (centers.empty()) fail("EmptySample", "measure_doubling needs at least one center");
  if (r_min < 1 || r_min >= r_max)
    fail("DomainError", "need 1 <= r_min < r_max");

  std::vector<VolumeTable> tables(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) {
    tables[i] = volume_table(g, centers[i], r_max);
  });

  DoublingEstimate est;
  est.cap = cap;
  est.r_min = r_min;
  est.r_max = r_max;
  est.centers.assign(centers.begin(), centers.end());
  est.per_nu.resize(60);
  parallel_for(est.per_nu.size(), [&](std::size_t i) {
    double nu = static_cast<double>(i + 1) / 10.0;
    est.per_nu[i] = {nu, detail::doubling_constant_for(tables, r_min, r_max, nu)};
  });
  est.nu = est.per_nu.back().first;
  est.c_d = est.per_nu.back().second;
  for (const auto& [nu, c] : est.per_nu)
    if (c <= cap) {
      est.nu = nu;
      est.c_d = c;
      est.feasible = true;
      break;
    }
  return est;
}

/// Certificate replay: re-check |B(x,R)| <= (C_d + slack) (R/r)^nu |B(x,r)|
/// on every sampled triple of the estimate.
inline bool doubling_holds(const Graph& g, const DoublingEstimate& est,
                           double slack = 1e-9) {
  for (VertexId x : est.centers) {
    VolumeTable table = volume_table(g, x, est.r_max);
    for (std::uint32_t r = est.r_min; r < est.r_max; ++r)
      for (std::uint32_t R = r + 1; R <= est.r_max; ++R) {
        double lhs = static_cast<double>(table.volumes[R]);
        double rhs = (est.c_d + slack) *
                     std::pow(static_cast<double>(R) / r, est.nu) *
                     static_cast<double>(table.volumes[r]);
        if (lhs > rhs) return false;
      }
  }
  return true;
}

/// Minimum of |B(x,r) ∩ B(y,R)| / |B(x,r)| over sampled y, listed R,
/// x in B(y,R), and r in 1..min(2R, r_cap). Tuples split into case 1
/// (r > 2 d(x,y)) and case 2 (r <= 2 d(x,y)). The scan is exhaustive until
/// `x_budget` inner sweeps would be exceeded, then falls back to seeded
/// sampling of x per (y, R) pair.
struct BallIntersectionReport {
  double min_ratio = 1.0;
  VertexId arg_y = 0;
  VertexId arg_x = 0;
  std::uint32_t arg_R = 0;
  std::uint32_t arg_r = 0;
  std::uint64_t case1_tuples = 0;
  std::uint64_t case2_tuples = 0;
  std::uint64_t x_evaluations = 0;
  bool exhaustive = true;
};

inline double ball_intersection_ratio(const Graph& g, VertexId x, VertexId y,
                                      std::uint32_t r, std::uint32_t R) {
  Bfs from_y, from_x;
  from_y.run(g, y, R);
  from_x.run(g, x, r);
  std::uint64_t inside = 0;
  for (VertexId v : from_x.order())
    if (from_y.dist(v) >= 0) ++inside;
  return static_cast<double>(inside) / static_cast<double>(from_x.order().size());
}

inline BallIntersectionReport ball_intersection_min_ratio(
    const Graph& g, std::span<const VertexId> ys,
    std::span<const std::uint32_t> R_list, std::uint32_t r_cap,
    std::uint64_t x_budget, std::uint64_t seed) {
  if (ys.empty() || R_list.empty())
    fail("EmptySample", "ball_intersection_min_ratio needs centers and radii");
  std::uint32_t R_max = *std::max_element(R_list.begin(), R_list.end());

  // First pass: total exhaustive x count, to decide whether to sample.
  std::uint64_t total_x = 0;
  {
    Bfs from_y;
    for (VertexId y : ys) {
      from_y.run(g, y, R_max);
      for (std::uint32_t R : R_list) {
        std::uint64_t in_ball = 0;
        for (VertexId v : from_y.order())
          if (from_y.dist(v) <= static_cast<std::int32_t>(R)) ++in_ball;
        total_x += in_ball;
      }
    }
  }
  bool exhaustive = total_x <= x_budget;

  BallIntersectionReport report;
  report.exhaustive = exhaustive;
  report.min_ratio = std::numeric_limits<double>::infinity();
  Rng rng(seed);

  Bfs from_y, from_x;
  std::vector<std::uint64_t> in_x, in_both;
  std::vector<VertexId> pool;
  for (VertexId y : ys) {
    from_y.run(g, y, R_max);
    for (std::uint32_t R : R_list) {
      pool.clear();
      for (VertexId v : from_y.order())
        if (from_y.dist(v) <= static_cast<std::int32_t>(R)) pool.push_back(v);
      std::size_t take = pool.size();
      if (!exhaustive) {
        double share = static_cast<double>(pool.size()) / static_cast<double>(total_x);
        take = std::max<std::size_t>(1, static_cast<std::size_t>(share * static_cast<double>(x_budget)));
        take = std::min(take, pool.size());
        // Partial Fisher-Yates: the first `take` slots become the sample.
        for (std::size_t i = 0; i < take; ++i)
          std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
      }
      for (std::size_t i = 0; i < take; ++i) {
        VertexId x = pool[i];
        std::uint32_t d_xy = static_cast<std::uint32_t>(from_y.dist(x));
        std::uint32_t r_top = std::min(2 * R, r_cap ? r_cap : 2 * R);
        from_x.run(g, x, r_top);
        ++report.x_evaluations;
        in_x.assign(r_top + 1ull, 0);
        in_both.assign(r_top + 1ull, 0);
        for (VertexId v : from_x.order()) {
          auto d = static_cast<std::uint32_t>(from_x.dist(v));
          ++in_x[d];
          if (from_y.dist(v) >= 0 && from_y.dist(v) <= static_cast<std::int32_t>(R))
            ++in_both[d];
        }
        for (std::uint32_t r = 1; r <= r_top; ++r) {
          in_x[r] += in_x[r - 1];
          in_both[r] += in_both[r - 1];
          double ratio = static_cast<double>(in_both[r]) / static_cast<double>(in_x[r]);
          if (r > 2 * d_xy)
            ++report.case1_tuples;
          else
            ++report.case2_tuples;
          if (ratio < report.min_ratio) {
            report.min_ratio = ratio;
            report.arg_y = y;
            report.arg_x = x;
            report.arg_R = R;
            report.arg_r = r;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace spinal_lab
