#pragma once

// Independent oracles shared by the test binaries. Each rebuilds a fact the
// library also computes, through a different construction, so agreement is
// evidence rather than tautology.

#include "spinal_lab/graph.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace test_support {

using spinal_lab::Edge;
using spinal_lab::VertexId;

// Kind of the Error thrown by fn, or "" if it returns normally.
template <typename Fn>
std::string error_kind(Fn&& fn) {
  try {
    fn();
  } catch (const spinal_lab::Error& e) {
    return e.kind();
  }
  return "";
}

// |{x in Z^delta : |x|_1 <= r}| by scanning the bounding cube with an
// odometer, no combinatorial formula involved.
inline std::uint64_t cube_scan_ball_count(unsigned delta, int r) {
  std::vector<int> x(delta, -r);
  std::uint64_t count = 0;
  while (true) {
    long sum = 0;
    for (int c : x) sum += std::abs(c);
    if (sum <= r) ++count;
    unsigned i = 0;
    while (i < delta && x[i] == r) x[i++] = -r;
    if (i == delta) break;
    ++x[i];
  }
  return count;
}

// Vicsek vertex set from digit strings: a copy of the level-0 star sits at
// every center sum_{i<level} 2*3^i d_i with digit d_i either zero or a
// signed corner direction. The generator instead grows by translating whole
// levels, so the two constructions are independent.
inline std::set<std::array<std::int32_t, 4>> vicsek_vertex_oracle(unsigned dim,
                                                                  unsigned level) {
  std::vector<std::array<std::int32_t, 4>> digits{{0, 0, 0, 0}};
  for (unsigned mask = 0; mask < (1u << dim); ++mask) {
    std::array<std::int32_t, 4> d{0, 0, 0, 0};
    for (unsigned i = 0; i < dim; ++i) d[i] = (mask >> i & 1) ? 1 : -1;
    digits.push_back(d);
  }

  std::set<std::array<std::int32_t, 4>> vertices;
  std::function<void(unsigned, std::int32_t, std::array<std::int32_t, 4>)> place =
      [&](unsigned i, std::int32_t scale, std::array<std::int32_t, 4> center) {
        if (i == level) {
          vertices.insert(center);
          for (std::size_t k = 1; k < digits.size(); ++k) {
            auto corner = center;
            for (unsigned j = 0; j < dim; ++j) corner[j] += digits[k][j];
            vertices.insert(corner);
          }
          return;
        }
        for (const auto& d : digits) {
          auto next = center;
          for (unsigned j = 0; j < dim; ++j) next[j] += 2 * scale * d[j];
          place(i + 1, scale * 3, next);
        }
      };
  place(0, 1, {0, 0, 0, 0});
  return vertices;
}

// All labeled connected graphs on n vertices (n <= 5: up to 1024 edge
// subsets), as edge lists. Connectivity via union-find over selected edges.
inline std::vector<std::vector<Edge>> connected_graphs(unsigned n) {
  std::vector<Edge> slots;
  for (VertexId u = 0; u < n; ++u)
    for (VertexId v = u + 1; v < n; ++v) slots.emplace_back(u, v);

  std::vector<std::vector<Edge>> out;
  for (std::uint32_t mask = 0; mask < (1u << slots.size()); ++mask) {
    std::array<unsigned, 5> parent{0, 1, 2, 3, 4};
    auto root = [&](unsigned v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    unsigned components = n;
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (!(mask >> i & 1)) continue;
      edges.push_back(slots[i]);
      unsigned a = root(slots[i].first), b = root(slots[i].second);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    if (components == 1) out.push_back(std::move(edges));
  }
  return out;
}

struct Assignment {
  std::vector<VertexId> spine;
  std::vector<VertexId> pi;
};

// Every (spine, pi) on n vertices with between 1 and max_fibers fibers:
// each spine subset, crossed with each map sending the off-spine vertices
// onto the spine.
inline std::vector<Assignment> enumerate_assignments(unsigned n,
                                                     unsigned max_fibers) {
  std::vector<Assignment> out;
  for (std::uint32_t spine_mask = 1; spine_mask < (1u << n); ++spine_mask) {
    auto fibers = static_cast<unsigned>(__builtin_popcount(spine_mask));
    if (fibers > max_fibers) continue;
    std::vector<VertexId> spine, loose;
    for (VertexId v = 0; v < n; ++v)
      (spine_mask >> v & 1 ? spine : loose).push_back(v);

    std::vector<unsigned> choice(loose.size(), 0);
    while (true) {
      Assignment a;
      a.spine = spine;
      a.pi.resize(n);
      for (VertexId s : spine) a.pi[s] = s;
      for (std::size_t i = 0; i < loose.size(); ++i) a.pi[loose[i]] = spine[choice[i]];
      out.push_back(std::move(a));

      std::size_t i = 0;
      while (i < choice.size() && choice[i] == fibers - 1) choice[i++] = 0;
      if (i == choice.size()) break;
      ++choice[i];
    }
  }
  return out;
}

// First absent edge that joins two fibers without staying spine-to-spine;
// adding it breaks the spinal structure. Returns false if none exists.
inline bool find_corruption(const spinal_lab::Graph& g,
                            const std::vector<VertexId>& pi, Edge& out) {
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    if (pi[u] == u) continue;  // want u off the spine
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      if (v == u || pi[v] == pi[u] || g.has_edge(u, v)) continue;
      out = {std::min(u, v), std::max(u, v)};
      return true;
    }
  }
  return false;
}

}  // namespace test_support
