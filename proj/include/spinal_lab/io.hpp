#pragma once

// Serialization: the canonical JSON graph format (bit-exact, sorted edges),
// the glue-parts format, DOT and CSV exports, content digests, and the run
// manifest the CLI writes next to every output file.

#include "spinal_lab/analysis.hpp"
#include "spinal_lab/spinal.hpp"
#include "spinal_lab/walk.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace spinal_lab {

using OrderedJson = nlohmann::ordered_json;

inline constexpr const char* kGraphFormat = "spinal-lab/graph-v1";
inline constexpr const char* kGluePartsFormat = "spinal-lab/glue-parts-v1";
inline constexpr const char* kManifestFormat = "spinal-lab/manifest-v1";

namespace detail {

// FIPS 180-4 SHA-256, self-contained so file digests need no extra
// dependency.
class Sha256 {
public:
  void update(const void* data, std::size_t len) {
    const auto* bytes = static_cast<const std::uint8_t*>(data);
    total_ += len;
    while (len > 0) {
      std::size_t take = std::min(len, std::size_t{64} - fill_);
      std::copy(bytes, bytes + take, block_.begin() + fill_);
      fill_ += take;
      bytes += take;
      len -= take;
      if (fill_ == 64) {
        compress();
        fill_ = 0;
      }
    }
  }

  std::array<std::uint8_t, 32> digest() {
    std::uint64_t bit_length = total_ * 8;
    std::uint8_t one = 0x80, zero = 0;
    update(&one, 1);
    while (fill_ != 56) update(&zero, 1);
    std::array<std::uint8_t, 8> tail;
    for (int i = 0; i < 8; ++i)
      tail[i] = static_cast<std::uint8_t>(bit_length >> (56 - 8 * i));
    total_ -= 9;  // padding does not count toward the message length
    update(tail.data(), 8);
    std::array<std::uint8_t, 32> out;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 4; ++j)
        out[4 * i + j] = static_cast<std::uint8_t>(state_[i] >> (24 - 8 * j));
    return out;
  }

private:
  static std::uint32_t rotr(std::uint32_t x, int s) {
    return (x >> s) | (x << (32 - s));
  }

  void compress() {
    static constexpr std::uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
        0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
        0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
        0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
        0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
        0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
        0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
        0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
        0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
        0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = static_cast<std::uint32_t>(block_[4 * i]) << 24 |
             static_cast<std::uint32_t>(block_[4 * i + 1]) << 16 |
             static_cast<std::uint32_t>(block_[4 * i + 2]) << 8 |
             static_cast<std::uint32_t>(block_[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = state_[0], b = state_[1], c = state_[2], d = state_[3];
    std::uint32_t e = state_[4], f = state_[5], g = state_[6], h = state_[7];
    for (int i = 0; i < 64; ++i) {
      std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      std::uint32_t ch = (e & f) ^ (~e & g);
      std::uint32_t t1 = h + s1 + ch + k[i] + w[i];
      std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      std::uint32_t t2 = s0 + maj;
      h = g;
      g = f;
      f = e;
      e = d + t1;
      d = c;
      c = b;
      b = a;
      a = t1 + t2;
    }
    state_[0] += a;
    state_[1] += b;
    state_[2] += c;
    state_[3] += d;
    state_[4] += e;
    state_[5] += f;
    state_[6] += g;
    state_[7] += h;
  }

  std::array<std::uint32_t, 8> state_{0x6a09e667, 0xbb67ae85, 0x3c6ef372,
                                      0xa54ff53a, 0x510e527f, 0x9b05688c,
                                      0x1f83d9ab, 0x5be0cd19};
  std::array<std::uint8_t, 64> block_{};
  std::size_t fill_ = 0;
  std::uint64_t total_ = 0;
};

inline std::string hex(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * bytes.size());
  for (std::uint8_t b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

}  // namespace detail

inline std::string sha256_hex(std::string_view data) {
  detail::Sha256 h;
  h.update(data.data(), data.size());
  auto d = h.digest();
  return detail::hex(d);
}

inline std::string read_text_file(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) fail("IoError", "cannot open " + path);
  std::string out;
  char buf[65536];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
  bool bad = std::ferror(f);
  std::fclose(f);
  if (bad) fail("IoError", "cannot read " + path);
  return out;
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) fail("IoError", "cannot create " + path);
  bool bad = std::fwrite(content.data(), 1, content.size(), f) != content.size();
  bad = std::fclose(f) != 0 || bad;
  if (bad) fail("IoError", "cannot write " + path);
}

inline std::string sha256_file(const std::string& path) {
  return sha256_hex(read_text_file(path));
}

// -------------------------------------------------------------------------
// Graph JSON. Serialization is canonical: keys in a fixed order, edges as
// u < v pairs in lexicographic order, no whitespace. Equal graphs produce
// byte-identical files.

inline OrderedJson graph_to_json(const Graph& g,
                                 OrderedJson provenance = OrderedJson()) {
  OrderedJson j;
  j["format"] = kGraphFormat;
  j["vertex_count"] = g.vertex_count();
  auto edges = OrderedJson::array();
  for (const auto& [u, v] : g.edges()) edges.push_back(OrderedJson::array({u, v}));
  j["edges"] = std::move(edges);
  if (!provenance.is_null()) j["provenance"] = std::move(provenance);
  return j;
}

inline OrderedJson spinal_to_json(const SpinalGraph& sg,
                                  OrderedJson provenance = OrderedJson()) {
  OrderedJson j = graph_to_json(sg.graph());
  j["spine"] = sg.spine();
  j["pi"] = sg.pi_map();
  if (!provenance.is_null()) j["provenance"] = std::move(provenance);
  return j;
}

inline std::string dump_json(const OrderedJson& j) { return j.dump(); }

namespace detail {

inline OrderedJson parse_json(std::string_view text) {
  OrderedJson j = OrderedJson::parse(text, nullptr, false);
  if (j.is_discarded()) fail("BadFormat", "input is not valid JSON");
  return j;
}

inline void expect_format(const OrderedJson& j, const char* format) {
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string() ||
      j["format"].get<std::string>() != format)
    fail("BadFormat", std::string("expected a \"") + format + "\" document");
}

inline std::vector<Edge> edge_array(const OrderedJson& j) {
  if (!j.contains("edges") || !j["edges"].is_array())
    fail("BadFormat", "missing \"edges\" array");
  std::vector<Edge> edges;
  edges.reserve(j["edges"].size());
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() ||
        !e[1].is_number_unsigned())
      fail("BadFormat", "edges must be [u, v] pairs of vertex ids");
    edges.emplace_back(e[0].get<VertexId>(), e[1].get<VertexId>());
  }
  return edges;
}

inline std::size_t vertex_count_field(const OrderedJson& j) {
  if (!j.contains("vertex_count") || !j["vertex_count"].is_number_unsigned())
    fail("BadFormat", "missing \"vertex_count\"");
  return j["vertex_count"].get<std::size_t>();
}

inline std::vector<VertexId> id_array(const OrderedJson& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array())
    fail("BadFormat", std::string("missing \"") + key + "\" array");
  std::vector<VertexId> out;
  out.reserve(j[key].size());
  for (const auto& v : j[key]) {
    if (!v.is_number_unsigned())
      fail("BadFormat", std::string("\"") + key + "\" must hold vertex ids");
    out.push_back(v.get<VertexId>());
  }
  return out;
}

}  // namespace detail

struct ParsedGraph {
  Graph graph;
  OrderedJson provenance;  // null when absent
};

inline ParsedGraph parse_graph(const OrderedJson& j) {
  detail::expect_format(j, kGraphFormat);
  ParsedGraph out{Graph::from_edges(detail::edge_array(j),
                                    detail::vertex_count_field(j)),
                  j.contains("provenance") ? j["provenance"] : OrderedJson()};
  return out;
}

inline bool has_spinal_fields(const OrderedJson& j) {
  return j.is_object() && j.contains("spine") && j.contains("pi");
}

struct ParsedSpinal {
  SpinalGraph sg;
  OrderedJson provenance;
};

inline ParsedSpinal parse_spinal(const OrderedJson& j) {
  detail::expect_format(j, kGraphFormat);
  if (!has_spinal_fields(j))
    fail("BadFormat", "document carries no \"spine\"/\"pi\" fields");
  Graph g = Graph::from_edges(detail::edge_array(j), detail::vertex_count_field(j));
  return ParsedSpinal{SpinalGraph(std::move(g), detail::id_array(j, "spine"),
                                  detail::id_array(j, "pi")),
                      j.contains("provenance") ? j["provenance"] : OrderedJson()};
}

inline ParsedGraph load_graph_file(const std::string& path) {
  return parse_graph(detail::parse_json(read_text_file(path)));
}

inline ParsedSpinal load_spinal_file(const std::string& path) {
  return parse_spinal(detail::parse_json(read_text_file(path)));
}

// -------------------------------------------------------------------------
// Glue parts: a skeleton plus one fiber (with distinguished vertex) per
// skeleton vertex, ready to feed glue().

inline OrderedJson glue_parts_to_json(const Graph& skeleton,
                                      const std::vector<Fiber>& fibers) {
  OrderedJson j;
  j["format"] = kGluePartsFormat;
  OrderedJson skel;
  skel["vertex_count"] = skeleton.vertex_count();
  auto skel_edges = OrderedJson::array();
  for (const auto& [u, v] : skeleton.edges())
    skel_edges.push_back(OrderedJson::array({u, v}));
  skel["edges"] = std::move(skel_edges);
  j["skeleton"] = std::move(skel);
  auto parts = OrderedJson::array();
  for (const Fiber& f : fibers) {
    OrderedJson part;
    part["vertex_count"] = f.graph.vertex_count();
    auto edges = OrderedJson::array();
    for (const auto& [u, v] : f.graph.edges())
      edges.push_back(OrderedJson::array({u, v}));
    part["edges"] = std::move(edges);
    part["z"] = f.z;
    parts.push_back(std::move(part));
  }
  j["fibers"] = std::move(parts);
  return j;
}

struct ParsedGlueParts {
  Graph skeleton;
  std::vector<Fiber> fibers;
};

inline ParsedGlueParts parse_glue_parts(const OrderedJson& j) {
  detail::expect_format(j, kGluePartsFormat);
  if (!j.contains("skeleton") || !j["skeleton"].is_object())
    fail("BadFormat", "missing \"skeleton\" object");
  Graph skeleton = Graph::from_edges(detail::edge_array(j["skeleton"]),
                                     detail::vertex_count_field(j["skeleton"]));
  if (!j.contains("fibers") || !j["fibers"].is_array())
    fail("BadFormat", "missing \"fibers\" array");
  std::vector<Fiber> fibers;
  for (const auto& part : j["fibers"]) {
    if (!part.is_object() || !part.contains("z") || !part["z"].is_number_unsigned())
      fail("BadFormat", "each fiber needs edges and a distinguished vertex \"z\"");
    fibers.push_back(Fiber{Graph::from_edges(detail::edge_array(part),
                                             detail::vertex_count_field(part)),
                           part["z"].get<VertexId>()});
  }
  return ParsedGlueParts{std::move(skeleton), std::move(fibers)};
}

inline ParsedGlueParts load_glue_parts_file(const std::string& path) {
  return parse_glue_parts(detail::parse_json(read_text_file(path)));
}

// -------------------------------------------------------------------------
// Exports.

inline std::string to_dot(const Graph& g, std::span<const VertexId> spine = {}) {
  std::string out = "graph spinal_lab {\n  node [shape=circle];\n";
  for (VertexId s : spine)
    out += "  " + std::to_string(s) + " [shape=doublecircle];\n";
  for (const auto& [u, v] : g.edges())
    out += "  " + std::to_string(u) + " -- " + std::to_string(v) + ";\n";
  out += "}\n";
  return out;
}

inline std::string edges_csv(const Graph& g) {
  std::string out = "u,v\n";
  for (const auto& [u, v] : g.edges())
    out += std::to_string(u) + "," + std::to_string(v) + "\n";
  return out;
}

inline std::string volumes_csv(const VolumeTable& table) {
  std::string out = "r,volume\n";
  for (std::size_t r = 0; r < table.volumes.size(); ++r)
    out += std::to_string(r) + "," + std::to_string(table.volumes[r]) + "\n";
  return out;
}

inline std::string nash_csv(const NashCurve& curve) {
  std::string out = "n,norm1,normp,gradp,ratio\n";
  for (const NashPoint& e : curve.entries)
    out += std::to_string(e.n) + "," + format_g17(e.norm1) + "," +
           format_g17(e.normp) + "," + format_g17(e.gradp) + "," +
           format_g17(e.ratio) + "\n";
  return out;
}

inline std::string walk_csv(const ReturnProbSeries& series) {
  std::string out = "t,p_return\n";
  for (const auto& [t, p] : series.entries)
    out += std::to_string(t) + "," + format_g17(p) + "\n";
  return out;
}

inline OrderedJson certificate_to_json(const DimensionCertificate& cert) {
  OrderedJson j;
  j["x0"] = cert.x0;
  j["delta_sigma"] = cert.delta_sigma;
  j["delta_g"] = cert.delta_g;
  j["n_k"] = cert.n_k;
  j["d_n"] = cert.d_n;
  j["d_2n"] = cert.d_2n;
  j["b_2n"] = cert.b_2n;
  j["c_double"] = cert.c_double;
  j["c_spine"] = cert.c_spine;
  j["c_lo"] = cert.c_lo;
  j["c_hi"] = cert.c_hi;
  j["thresholds"] = {{"double_max", cert.thresholds.double_max},
                     {"spine_max", cert.thresholds.spine_max},
                     {"window_max", cert.thresholds.window_max}};
  j["pass_double"] = cert.pass_double;
  j["pass_spine"] = cert.pass_spine;
  j["pass_window"] = cert.pass_window;
  j["pass"] = cert.pass();
  return j;
}

inline OrderedJson validation_to_json(const ValidationReport& report) {
  OrderedJson j;
  j["ok"] = report.ok;
  auto list = OrderedJson::array();
  for (const SpinalViolation& v : report.violations) {
    OrderedJson item;
    item["kind"] = v.kind;
    item["u"] = v.u;
    item["v"] = v.v;
    item["detail"] = v.detail;
    list.push_back(std::move(item));
  }
  j["violations"] = std::move(list);
  return j;
}

// -------------------------------------------------------------------------
// Run manifest: enough to reproduce a CLI run and audit its inputs/outputs.

struct FileDigest {
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::vector<std::string> argv;
  OrderedJson parameters;  // subcommand-specific, assembled by the CLI
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  double wall_ms = 0;
};

inline OrderedJson manifest_to_json(const RunManifest& m) {
  OrderedJson j;
  j["format"] = kManifestFormat;
  j["version"] = kVersion;
  j["argv"] = m.argv;
  j["parameters"] = m.parameters.is_null() ? OrderedJson::object() : m.parameters;
  if (m.has_seed)
    j["seed"] = m.seed;
  else
    j["seed"] = nullptr;
  auto digests = [](const std::vector<FileDigest>& files) {
    auto arr = OrderedJson::array();
    for (const FileDigest& f : files) {
      OrderedJson item;
      item["path"] = f.path;
      item["sha256"] = f.sha256;
      arr.push_back(std::move(item));
    }
    return arr;
  };
  j["inputs"] = digests(m.inputs);
  j["outputs"] = digests(m.outputs);
  j["wall_ms"] = m.wall_ms;
  return j;
}

}  // namespace spinal_lab
