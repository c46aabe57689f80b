#pragma once

// Return probabilities p_t(x,x) of the simple random walk, computed by exact
// vector iteration on the ball the walk can have reached (with a boundary
// monitor for truncated graphs) or by seeded Monte Carlo, plus the log-log
// decay fit.

#include "spinal_lab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spinal_lab {

struct ReturnProbSeries {
  VertexId start = 0;
  bool exact = true;
  std::uint32_t t_max = 0;
  double max_mass_defect = 0;  // exact mode: max over t of |1 - total mass|
  double boundary_error = 0;   // exact mode: 2 x cumulative boundary mass
  std::vector<std::pair<std::uint32_t, double>> entries;  // even t, including 0
};

/// Exact distribution iteration. At time t the walk is supported on
/// B(start, t), so the state vector only ever touches that prefix of a
/// distance-ordered layout. `boundary` lists vertices whose neighborhoods
/// the truncation clipped; accumulated mass on them bounds the error against
/// the untruncated graph, and exceeding `boundary_tol` aborts the run.
inline ReturnProbSeries return_probabilities_exact(
    const Graph& g, VertexId start, std::uint32_t t_max,
    std::span<const VertexId> boundary = {}, double boundary_tol = 1e-12) {
  std::size_t n = g.vertex_count();
  if (start >= n) fail("DomainError", "start vertex out of range");

  Bfs bfs;
  bfs.run(g, start);
  std::vector<VertexId> order(n);
  for (VertexId v = 0; v < n; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return std::pair(bfs.dist(a), a) < std::pair(bfs.dist(b), b);
  });
  std::vector<VertexId> local_of(n);
  for (std::size_t i = 0; i < n; ++i) local_of[order[i]] = static_cast<VertexId>(i);

  auto max_dist = static_cast<std::uint32_t>(bfs.dist(order.back()));
  std::vector<std::size_t> reach_prefix(max_dist + 1, 0);
  for (std::size_t i = 0; i < n; ++i)
    reach_prefix[static_cast<std::uint32_t>(bfs.dist(order[i]))] = i + 1;
  for (std::uint32_t d = 1; d <= max_dist; ++d)
    reach_prefix[d] = std::max(reach_prefix[d], reach_prefix[d - 1]);

  // Reindexed adjacency and reciprocal degrees, laid out in walk order.
  std::vector<std::uint64_t> offsets(n + 1, 0);
  std::vector<VertexId> adjacency;
  adjacency.reserve(2 * g.edge_count());
  std::vector<double> inv_degree(n);
  for (std::size_t i = 0; i < n; ++i) {
    VertexId v = order[i];
    inv_degree[i] = 1.0 / static_cast<double>(g.degree(v));
    for (VertexId w : g.neighbors(v)) adjacency.push_back(local_of[w]);
    offsets[i + 1] = adjacency.size();
  }

  std::vector<bool> is_boundary(n, false);
  for (VertexId b : boundary) {
    if (b >= n) fail("DomainError", "boundary vertex out of range");
    is_boundary[local_of[b]] = true;
  }

  // Both buffers start as exact time-0 and time-(-1) states; outside the
  // written prefix each buffer always holds exact zeros for its time.
  std::vector<double> current(n, 0.0), next(n, 0.0);
  current[0] = 1.0;

  ReturnProbSeries series;
  series.start = start;
  series.t_max = t_max;
  series.entries.emplace_back(0, 1.0);

  detail::CompensatedSum boundary_mass;
  for (std::uint32_t t = 1; t <= t_max; ++t) {
    std::size_t limit = reach_prefix[std::min(t, max_dist)];
    for (std::size_t v = 0; v < limit; ++v) {
      double acc = 0;
      for (std::uint64_t e = offsets[v]; e < offsets[v + 1]; ++e) {
        VertexId u = adjacency[e];
        acc += current[u] * inv_degree[u];
      }
      next[v] = acc;
    }
    current.swap(next);

    if (!boundary.empty()) {
      for (std::size_t v = 0; v < limit; ++v)
        if (is_boundary[v] && current[v] != 0) boundary_mass.add(current[v]);
      series.boundary_error = 2.0 * boundary_mass.value();
      if (series.boundary_error > boundary_tol)
        fail("BoundaryReached",
             "truncation error bound " + format_g17(series.boundary_error) +
                 " exceeds " + format_g17(boundary_tol) + " at step " +
                 std::to_string(t));
    }

    detail::CompensatedSum mass;
    for (std::size_t v = 0; v < limit; ++v) mass.add(current[v]);
    series.max_mass_defect =
        std::max(series.max_mass_defect, std::abs(mass.value() - 1.0));

    if (t % 2 == 0) series.entries.emplace_back(t, current[0]);
  }
  return series;
}

/// Seeded Monte Carlo estimate of the same series.
inline ReturnProbSeries return_probabilities_mc(const Graph& g, VertexId start,
                                                std::uint32_t t_max,
                                                std::uint64_t runs,
                                                std::uint64_t seed) {
  if (start >= g.vertex_count()) fail("DomainError", "start vertex out of range");
  if (runs == 0) fail("DomainError", "Monte Carlo needs at least one run");
  std::vector<std::uint64_t> hits(t_max / 2 + 1, 0);
  hits[0] = runs;
  Rng rng(seed);
  for (std::uint64_t run = 0; run < runs; ++run) {
    VertexId pos = start;
    for (std::uint32_t t = 1; t <= t_max; ++t) {
      auto nb = g.neighbors(pos);
      pos = nb[rng.index(nb.size())];
      if (t % 2 == 0 && pos == start) ++hits[t / 2];
    }
  }
  ReturnProbSeries series;
  series.start = start;
  series.exact = false;
  series.t_max = t_max;
  for (std::uint32_t t = 0; t <= t_max; t += 2)
    series.entries.emplace_back(
        t, static_cast<double>(hits[t / 2]) / static_cast<double>(runs));
  return series;
}

/// Log-log slope of p_t against t over entries with t in [t_lo, t_hi].
inline ExponentFit decay_fit(const ReturnProbSeries& series, std::uint32_t t_lo,
                             std::uint32_t t_hi) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& [t, p] : series.entries)
    if (t >= std::max(t_lo, 1u) && t <= t_hi && p > 0)
      pairs.emplace_back(static_cast<double>(t), p);
  return fit_exponent(pairs);
}

}  // namespace spinal_lab
