// spinal-lab: generate, validate, analyze, check, walk over, and export
// spinal graphs. Every run is reproducible: seeds are explicit, numeric
// files carry 17 significant digits, and --out also drops a manifest with
// input/output digests beside the file.

#include "spinal_lab/generators.hpp"
#include "spinal_lab/io.hpp"
#include "spinal_lab/walk.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

using namespace spinal_lab;

namespace {

// Console numbers; files go through format_g17.
std::string human(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// --seq geometric:base=B,count=K expands to B^1, B^2, ..., B^K.
std::vector<std::uint32_t> parse_seq(const std::string& text) {
  auto bad = [&]() -> std::uint64_t {
    fail("DomainError", "--seq expects geometric:base=B,count=K, got \"" + text + "\"");
  };
  const std::string prefix = "geometric:";
  if (text.rfind(prefix, 0) != 0) bad();
  std::uint64_t base = 0, count = 0;
  std::size_t pos = prefix.size();
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    std::string field = text.substr(pos, next - pos);
    std::size_t eq = field.find('=');
    if (eq == std::string::npos) bad();
    std::string key = field.substr(0, eq);
    std::uint64_t value = 0;
    try {
      value = std::stoull(field.substr(eq + 1));
    } catch (const std::exception&) {
      value = bad();
    }
    if (key == "base")
      base = value;
    else if (key == "count")
      count = value;
    else
      bad();
    pos = next + 1;
  }
  if (base < 2 || count < 1 || count > 64) bad();
  std::vector<std::uint32_t> values;
  std::uint64_t n = 1;
  for (std::uint64_t k = 0; k < count; ++k) {
    n *= base;
    if (n > (1u << 30)) fail("DomainError", "--seq values exceed 2^30");
    values.push_back(static_cast<std::uint32_t>(n));
  }
  return values;
}

// Bookkeeping for the manifest emitted next to --out files.
struct Run {
  std::vector<std::string> argv;
  OrderedJson params = OrderedJson::object();
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  std::string read_input(const std::string& path) {
    std::string content = read_text_file(path);
    inputs.push_back({path, sha256_hex(content)});
    return content;
  }

  void write_output(const std::string& path, std::string_view content) {
    write_text_file(path, content);
    outputs.push_back({path, sha256_hex(content)});
  }

  // No --out, no manifest: there is nothing on disk to describe.
  void finish(const std::string& out_path) {
    if (out_path.empty()) return;
    RunManifest m;
    m.argv = argv;
    m.parameters = params;
    m.has_seed = has_seed;
    m.seed = seed;
    m.inputs = inputs;
    m.outputs = outputs;
    m.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - started)
                    .count();
    write_text_file(out_path + ".manifest.json", manifest_to_json(m).dump(2) + "\n");
  }
};

ParsedGraph load_graph_for(Run& run, const std::string& path) {
  return parse_graph(detail::parse_json(run.read_input(path)));
}

ParsedSpinal load_spinal_for(Run& run, const std::string& path) {
  return parse_spinal(detail::parse_json(run.read_input(path)));
}

std::uint32_t resolve_safe_radius(const OrderedJson& provenance,
                                  std::uint32_t flag_value) {
  if (flag_value > 0) return flag_value;
  if (provenance.is_object() && provenance.contains("safe_radius"))
    return provenance["safe_radius"].get<std::uint32_t>();
  fail("DomainError",
       "no safe radius: pass --safe-radius or use a generated file whose "
       "provenance carries one");
}

std::vector<VertexId> provenance_boundary(const OrderedJson& provenance) {
  std::vector<VertexId> boundary;
  if (provenance.is_object() && provenance.contains("boundary"))
    for (const auto& v : provenance["boundary"]) boundary.push_back(v.get<VertexId>());
  return boundary;
}

// Seeded sample of distinct vertices; the whole vertex set if count covers it.
std::vector<VertexId> sample_vertices(const Graph& g, std::size_t count,
                                      std::uint64_t seed) {
  std::vector<VertexId> pool(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) pool[v] = v;
  if (count >= pool.size()) return pool;
  Rng rng(seed);
  for (std::size_t i = 0; i < count; ++i)
    std::swap(pool[i], pool[i + rng.index(pool.size() - i)]);
  pool.resize(count);
  return pool;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinal-lab: spinal graphs, their growth certificates, cutoff-"
               "function functionals, and walk exponents"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Run run;
  for (int i = 0; i < argc; ++i) run.argv.emplace_back(argv[i]);
  int rc = 0;

  // ---- generate ---------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Build a graph family instance");
  gen->require_subcommand(1);

  struct {
    std::uint32_t dim = 2, level = 1;
    std::string out;
  } vic;
  auto* gen_vicsek = gen->add_subcommand(
      "vicsek", "Fractal star-of-stars whose full diagonals form the spine");
  gen_vicsek->add_option("--dim", vic.dim, "ambient dimension (1-4)")->required();
  gen_vicsek->add_option("--level", vic.level, "iteration depth")->required();
  gen_vicsek->add_option("--out", vic.out, "write spinal graph JSON here");
  gen_vicsek->callback([&] {
    VicsekGraph g = vicsek(vic.dim, vic.level);
    run.params = {{"generator", "vicsek"}, {"dim", vic.dim}, {"level", vic.level}};
    std::printf("vicsek dim=%u level=%u: %zu vertices, %zu edges, spine %zu, "
                "safe radius %u about vertex %u\n",
                vic.dim, vic.level, g.sg.graph().vertex_count(),
                g.sg.graph().edge_count(), g.sg.spine().size(), g.extent, g.center);
    if (!vic.out.empty()) {
      OrderedJson prov = {{"generator", "vicsek"},   {"dim", vic.dim},
                          {"level", vic.level},      {"center", g.center},
                          {"safe_radius", g.extent}, {"boundary", g.corners}};
      run.write_output(vic.out, dump_json(spinal_to_json(g.sg, std::move(prov))));
    }
    run.finish(vic.out);
  });

  struct {
    double D = 1.5;
    std::uint32_t delta = 2, length = 64;
    std::string out;
  } plate;
  auto* gen_plates = gen->add_subcommand(
      "plates", "Ray of lattice plates of radius n^alpha glued along a half-line spine");
  gen_plates->add_option("--D", plate.D, "target volume dimension (> 1)")->required();
  gen_plates->add_option("--delta", plate.delta, "lattice dimension of the plates (1-4)")
      ->required();
  gen_plates->add_option("--length", plate.length, "number of plates")->required();
  gen_plates->add_option("--out", plate.out, "write spinal graph JSON here");
  gen_plates->callback([&] {
    PlateGraph g = plates(PlateSpec{plate.D, plate.delta, plate.length, 0});
    run.params = {{"generator", "plates"},
                  {"D", plate.D},
                  {"delta", plate.delta},
                  {"length", plate.length}};
    std::printf("plates D=%s delta=%u length=%u: %zu vertices, %zu edges, "
                "alpha %s, safe radius %u about vertex %u\n",
                human(plate.D).c_str(), plate.delta, plate.length,
                g.sg.graph().vertex_count(), g.sg.graph().edge_count(),
                human(g.alpha).c_str(), g.safe_radius, g.sg.spine().front());
    if (!plate.out.empty()) {
      OrderedJson prov = {{"generator", "plates"},
                          {"D", plate.D},
                          {"delta", plate.delta},
                          {"length", plate.length},
                          {"alpha", g.alpha},
                          {"center", g.sg.spine().front()},
                          {"safe_radius", g.safe_radius},
                          {"boundary", std::vector<VertexId>{g.boundary_spine}}};
      run.write_output(plate.out, dump_json(spinal_to_json(g.sg, std::move(prov))));
    }
    run.finish(plate.out);
  });

  struct {
    std::string parts, out;
  } glue_opt;
  auto* gen_glue = gen->add_subcommand(
      "glue", "Glue fibers onto a skeleton at their distinguished vertices");
  gen_glue->add_option("--parts", glue_opt.parts, "glue-parts JSON file")->required();
  gen_glue->add_option("--out", glue_opt.out, "write spinal graph JSON here");
  gen_glue->callback([&] {
    ParsedGlueParts parts = parse_glue_parts(
        detail::parse_json(run.read_input(glue_opt.parts)));
    SpinalGraph sg = glue(parts.skeleton, parts.fibers);
    run.params = {{"generator", "glue"}, {"parts", glue_opt.parts}};
    std::printf("glued %zu fibers onto %zu skeleton vertices: %zu vertices, %zu edges\n",
                parts.fibers.size(), parts.skeleton.vertex_count(),
                sg.graph().vertex_count(), sg.graph().edge_count());
    if (!glue_opt.out.empty()) {
      OrderedJson prov = {{"generator", "glue"},
                          {"skeleton_size", parts.skeleton.vertex_count()}};
      run.write_output(glue_opt.out, dump_json(spinal_to_json(sg, std::move(prov))));
    }
    run.finish(glue_opt.out);
  });

  struct {
    std::uint64_t seed = 0;
    std::uint32_t length = 8, max_fiber = 4;
    std::string out;
  } rnd;
  auto* gen_random = gen->add_subcommand(
      "random", "Seeded random glued graph (random skeleton, random fibers)");
  gen_random->add_option("--seed", rnd.seed, "RNG seed")->required();
  gen_random->add_option("--length", rnd.length, "skeleton size");
  gen_random->add_option("--max-fiber", rnd.max_fiber, "largest fiber size");
  gen_random->add_option("--out", rnd.out, "write spinal graph JSON here");
  gen_random->callback([&] {
    GluedSample sample = random_glued(rnd.seed, rnd.length, rnd.max_fiber);
    run.params = {{"generator", "random"},
                  {"length", rnd.length},
                  {"max_fiber", rnd.max_fiber}};
    run.has_seed = true;
    run.seed = rnd.seed;
    std::printf("random glued graph seed=%llu: %zu vertices, %zu edges, spine %zu\n",
                static_cast<unsigned long long>(rnd.seed),
                sample.sg.graph().vertex_count(), sample.sg.graph().edge_count(),
                sample.sg.spine().size());
    if (!rnd.out.empty()) {
      OrderedJson prov = {{"generator", "random"},
                          {"seed", rnd.seed},
                          {"length", rnd.length},
                          {"max_fiber", rnd.max_fiber}};
      run.write_output(rnd.out, dump_json(spinal_to_json(sample.sg, std::move(prov))));
    }
    run.finish(rnd.out);
  });

  // ---- validate ----------------------------------------------------------
  struct {
    std::string file, out;
  } val;
  auto* validate_cmd = app.add_subcommand(
      "validate", "Check the spine/projection structure of a graph file; "
                  "prints a JSON violation report");
  validate_cmd->add_option("file", val.file, "spinal graph JSON")->required();
  validate_cmd->add_option("--out", val.out, "also write the report here");
  validate_cmd->callback([&] {
    run.params = {{"file", val.file}};
    ValidationReport report;
    try {
      OrderedJson j = detail::parse_json(run.read_input(val.file));
      detail::expect_format(j, kGraphFormat);
      if (!has_spinal_fields(j))
        fail("BadFormat", "document carries no \"spine\"/\"pi\" fields");
      Graph g = Graph::from_edges(detail::edge_array(j),
                                  detail::vertex_count_field(j));
      report = validate_structural(g, detail::id_array(j, "spine"),
                                   detail::id_array(j, "pi"));
    } catch (const Error& e) {
      report.ok = false;
      report.violations.push_back({e.kind(), 0, 0, e.what()});
    }
    std::string text = validation_to_json(report).dump(2);
    std::printf("%s\n", text.c_str());
    if (!val.out.empty()) run.write_output(val.out, text + "\n");
    run.finish(val.out);
    if (!report.ok) rc = 1;
  });

  // ---- analyze -----------------------------------------------------------
  auto* analyze = app.add_subcommand("analyze", "Growth and functional measurements");
  analyze->require_subcommand(1);

  struct {
    std::string file, out;
    VertexId center = 0;
    std::uint32_t rmax = 16;
  } vol;
  auto* an_volumes = analyze->add_subcommand(
      "volumes", "Ball volume table |B(x,r)| with a log-log growth fit");
  an_volumes->add_option("file", vol.file, "graph JSON")->required();
  an_volumes->add_option("--center", vol.center, "center vertex id");
  an_volumes->add_option("--rmax", vol.rmax, "largest radius")->required();
  an_volumes->add_option("--out", vol.out, "write r,volume CSV here");
  an_volumes->callback([&] {
    ParsedGraph in = load_graph_for(run, vol.file);
    run.params = {{"file", vol.file}, {"center", vol.center}, {"rmax", vol.rmax}};
    VolumeTable table = volume_table(in.graph, vol.center, vol.rmax);
    std::vector<std::pair<double, double>> pts;
    for (std::uint32_t r = 1; r <= vol.rmax; ++r)
      pts.emplace_back(r, static_cast<double>(table.volumes[r]));
    std::printf("|B(%u,%u)| = %llu of %zu vertices\n", vol.center, vol.rmax,
                static_cast<unsigned long long>(table.volumes[vol.rmax]),
                in.graph.vertex_count());
    if (pts.size() >= 3) {
      ExponentFit fit = fit_exponent(pts);
      std::printf("growth exponent %s over r in [1, %u]\n", human(fit.slope).c_str(),
                  vol.rmax);
    }
    if (!vol.out.empty()) run.write_output(vol.out, volumes_csv(table));
    run.finish(vol.out);
  });

  struct {
    std::string file, out, seq = "geometric:base=3,count=4";
    VertexId center = 0;
    double delta_sigma = 1, delta_g = 1;
    std::uint32_t safe_radius = 0;
  } dims;
  auto* an_dims = analyze->add_subcommand(
      "dims", "Certify spinal-set doubling, spine-ball growth at "
              "delta_sigma, and the |D(x0,n)| / n^delta_g window along n_k");
  an_dims->add_option("file", dims.file, "spinal graph JSON")->required();
  an_dims->add_option("--center", dims.center, "spine vertex x0");
  an_dims->add_option("--delta-sigma", dims.delta_sigma, "spine dimension")->required();
  an_dims->add_option("--delta-g", dims.delta_g, "graph dimension")->required();
  an_dims->add_option("--seq", dims.seq, "radius sequence (geometric:base=B,count=K)");
  an_dims->add_option("--safe-radius", dims.safe_radius,
                      "largest radius unaffected by truncation (defaults to "
                      "the file's provenance)");
  an_dims->add_option("--out", dims.out, "write the certificate JSON here");
  an_dims->callback([&] {
    ParsedSpinal in = load_spinal_for(run, dims.file);
    std::vector<std::uint32_t> n_list = parse_seq(dims.seq);
    std::uint32_t safe = resolve_safe_radius(in.provenance, dims.safe_radius);
    run.params = {{"file", dims.file},
                  {"center", dims.center},
                  {"delta_sigma", dims.delta_sigma},
                  {"delta_g", dims.delta_g},
                  {"seq", dims.seq},
                  {"safe_radius", safe}};
    DimensionCertificate cert = certify_dimensions(
        in.sg, dims.center, n_list, dims.delta_sigma, dims.delta_g, safe);
    std::printf("doubling  max |D(x0,2n)|/|D(x0,n)|      = %s (max %s)\n",
                human(cert.c_double).c_str(), human(cert.thresholds.double_max).c_str());
    std::printf("spine     max |B_S(x0,2n)|/(2n)^dS      = %s (max %s)\n",
                human(cert.c_spine).c_str(), human(cert.thresholds.spine_max).c_str());
    std::printf("window    |D(x0,n)|/n^dG in [%s, %s] (ratio max %s)\n",
                human(cert.c_lo).c_str(), human(cert.c_hi).c_str(),
                human(cert.thresholds.window_max).c_str());
    std::printf("%s\n", cert.pass() ? "PASS" : "FAIL");
    if (!dims.out.empty())
      run.write_output(dims.out, certificate_to_json(cert).dump(2) + "\n");
    run.finish(dims.out);
    if (!cert.pass()) rc = 1;
  });

  struct {
    std::string file, out, seq = "geometric:base=2,count=5";
    VertexId center = 0;
    double p = 2, beta = 1;
    std::uint32_t safe_radius = 0;
  } nash;
  auto* an_nash = analyze->add_subcommand(
      "nash", "Evaluate ||f||_p^(1+p'/beta) / (||f||_1^(p'/beta) ||grad f||_p) "
              "on the spinal cutoff family and fit its growth in n");
  an_nash->add_option("file", nash.file, "spinal graph JSON")->required();
  an_nash->add_option("--center", nash.center, "spine vertex x0");
  an_nash->add_option("--p", nash.p, "Lp exponent (> 1)")->required();
  an_nash->add_option("--beta", nash.beta, "scaling exponent beta")->required();
  an_nash->add_option("--seq", nash.seq, "cutoff sizes n (geometric:base=B,count=K)");
  an_nash->add_option("--safe-radius", nash.safe_radius,
                      "largest radius unaffected by truncation");
  an_nash->add_option("--out", nash.out, "write n,norm1,normp,gradp,ratio CSV here");
  an_nash->callback([&] {
    ParsedSpinal in = load_spinal_for(run, nash.file);
    std::vector<std::uint32_t> n_list = parse_seq(nash.seq);
    std::uint32_t safe = resolve_safe_radius(in.provenance, nash.safe_radius);
    run.params = {{"file", nash.file}, {"center", nash.center}, {"p", nash.p},
                  {"beta", nash.beta}, {"seq", nash.seq},       {"safe_radius", safe}};
    NashCurve curve =
        nash_curve(in.sg, nash.center, nash.p, nash.beta, n_list, safe);
    for (const NashPoint& pt : curve.entries)
      std::printf("n=%u ratio=%s\n", pt.n, human(pt.ratio).c_str());
    std::printf("fitted slope %s (max residual %s)\n", human(curve.fit.slope).c_str(),
                human(curve.fit.max_residual).c_str());
    if (!nash.out.empty()) run.write_output(nash.out, nash_csv(curve));
    run.finish(nash.out);
  });

  struct {
    std::string file, out, seq = "geometric:base=2,count=4";
    double D = 1;
    std::uint32_t budget = 64, safe_radius = 0;
    std::uint64_t seed = 0;
  } vlb;
  auto* an_vlb = analyze->add_subcommand(
      "vlb", "Volume lower bound: min |B(x,r)| / r^D over sampled centers");
  an_vlb->add_option("file", vlb.file, "graph JSON")->required();
  an_vlb->add_option("--D", vlb.D, "volume exponent")->required();
  an_vlb->add_option("--seq", vlb.seq, "radius list (geometric:base=B,count=K)");
  an_vlb->add_option("--budget", vlb.budget, "number of sampled centers");
  an_vlb->add_option("--seed", vlb.seed, "center sampling seed");
  an_vlb->add_option("--safe-radius", vlb.safe_radius,
                     "largest radius unaffected by truncation");
  an_vlb->add_option("--out", vlb.out, "write the result JSON here");
  an_vlb->callback([&] {
    ParsedGraph in = load_graph_for(run, vlb.file);
    std::vector<std::uint32_t> r_list = parse_seq(vlb.seq);
    std::uint32_t safe = resolve_safe_radius(in.provenance, vlb.safe_radius);
    run.params = {{"file", vlb.file}, {"D", vlb.D},           {"seq", vlb.seq},
                  {"budget", vlb.budget}, {"safe_radius", safe}};
    run.has_seed = true;
    run.seed = vlb.seed;
    std::vector<VertexId> centers = sample_vertices(in.graph, vlb.budget, vlb.seed);
    VolumeLowerBound bound =
        volume_lower_bound_check(in.graph, vlb.D, centers, r_list, safe);
    std::printf("min |B(x,r)|/r^D = %s at x=%u r=%u over %llu samples\n",
                human(bound.min_constant).c_str(), bound.arg_x, bound.arg_r,
                static_cast<unsigned long long>(bound.samples));
    if (!vlb.out.empty()) {
      OrderedJson j = {{"min_constant", bound.min_constant},
                       {"arg_x", bound.arg_x},
                       {"arg_r", bound.arg_r},
                       {"samples", bound.samples}};
      run.write_output(vlb.out, j.dump(2) + "\n");
    }
    run.finish(vlb.out);
    if (!(bound.min_constant > 0)) rc = 1;
  });

  // ---- check -------------------------------------------------------------
  auto* check = app.add_subcommand("check", "Structural facts verified on one file");
  check->require_subcommand(1);

  struct {
    std::string file;
    std::uint32_t budget = 32;
    std::uint64_t seed = 0;
  } geo;
  auto* ck_geo = check->add_subcommand(
      "lemma2", "Fibers are geodesic: ambient distances between same-fiber "
                "vertices match the distances inside the fiber");
  ck_geo->add_option("file", geo.file, "spinal graph JSON")->required();
  ck_geo->add_option("--budget", geo.budget, "fibers to sample");
  ck_geo->add_option("--seed", geo.seed, "fiber sampling seed");
  ck_geo->callback([&] {
    ParsedSpinal in = load_spinal_for(run, geo.file);
    run.params = {{"file", geo.file}, {"budget", geo.budget}};
    run.has_seed = true;
    run.seed = geo.seed;
    std::vector<VertexId> sources = sample_fiber_sources(in.sg, geo.budget, geo.seed);
    FiberGeodesicReport report = check_fiber_geodesics(in.sg, sources);
    std::printf("%llu sources, %llu pairs compared, %zu violations\n",
                static_cast<unsigned long long>(report.sources_checked),
                static_cast<unsigned long long>(report.vertices_compared),
                report.violations.size());
    if (!report.ok()) {
      const auto& v = report.violations.front();
      std::printf("first: d(%u,%u) = %u ambient vs %u within the fiber\n", v.a, v.b,
                  v.ambient, v.within_fiber);
      rc = 1;
    }
    run.finish("");
  });

  struct {
    std::string file;
  } rt;
  auto* ck_rt = check->add_subcommand(
      "roundtrip", "decompose -> glue -> canonical form reproduces the graph");
  ck_rt->add_option("file", rt.file, "spinal graph JSON")->required();
  ck_rt->callback([&] {
    ParsedSpinal in = load_spinal_for(run, rt.file);
    run.params = {{"file", rt.file}};
    SpinalGraph reglued = glue(decompose(in.sg));
    bool equal = structurally_equal(canonical_form(in.sg), canonical_form(reglued));
    std::printf("roundtrip %s\n", equal ? "OK" : "MISMATCH");
    run.finish("");
    if (!equal) rc = 1;
  });

  struct {
    std::string file, seq = "geometric:base=2,count=4";
    VertexId center = 0;
    bool center_set = false;
    std::uint32_t rmax = 0;
    std::uint64_t budget = 200000, seed = 0;
  } bi;
  auto* ck_bi = check->add_subcommand(
      "ball-intersection", "Min share |B(x,r) and B(y,R)| / |B(x,r)| over "
                           "x in B(y,R), r <= 2R, with both distance-case counters");
  ck_bi->add_option("file", bi.file, "graph JSON")->required();
  ck_bi->add_option("--seq", bi.seq, "R list (geometric:base=B,count=K)");
  ck_bi->add_option("--center", bi.center, "fix the outer center y (default: sample)")
      ->each([&](const std::string&) { bi.center_set = true; });
  ck_bi->add_option("--rmax", bi.rmax, "cap on the inner radius r");
  ck_bi->add_option("--budget", bi.budget, "max inner centers x to evaluate");
  ck_bi->add_option("--seed", bi.seed, "sampling seed");
  ck_bi->callback([&] {
    ParsedGraph in = load_graph_for(run, bi.file);
    std::vector<std::uint32_t> R_list = parse_seq(bi.seq);
    run.params = {{"file", bi.file}, {"seq", bi.seq}, {"budget", bi.budget},
                  {"rmax", bi.rmax}};
    run.has_seed = true;
    run.seed = bi.seed;
    std::vector<VertexId> ys = bi.center_set
                                   ? std::vector<VertexId>{bi.center}
                                   : sample_vertices(in.graph, 16, bi.seed);
    BallIntersectionReport report = ball_intersection_min_ratio(
        in.graph, ys, R_list, bi.rmax, bi.budget, bi.seed);
    std::printf("min ratio %s at y=%u R=%u x=%u r=%u (%s, %llu x-evaluations)\n",
                human(report.min_ratio).c_str(), report.arg_y, report.arg_R,
                report.arg_x, report.arg_r,
                report.exhaustive ? "exhaustive" : "sampled",
                static_cast<unsigned long long>(report.x_evaluations));
    std::printf("case r > 2 d(x,y): %llu tuples; case r <= 2 d(x,y): %llu tuples\n",
                static_cast<unsigned long long>(report.case1_tuples),
                static_cast<unsigned long long>(report.case2_tuples));
    run.finish("");
    if (!(report.min_ratio > 0)) rc = 1;
  });

  struct {
    std::string file, seq = "geometric:base=2,count=4";
    VertexId center = 0;
    double p = 2;
    std::uint32_t safe_radius = 0;
  } l4;
  auto* ck_l4 = check->add_subcommand(
      "lemma4", "Explicit norm and support bounds for the spinal cutoff g_{2n}");
  ck_l4->add_option("file", l4.file, "spinal graph JSON")->required();
  ck_l4->add_option("--center", l4.center, "spine vertex x0");
  ck_l4->add_option("--p", l4.p, "Lp exponent (> 1)")->required();
  ck_l4->add_option("--seq", l4.seq, "cutoff sizes n (geometric:base=B,count=K)");
  ck_l4->add_option("--safe-radius", l4.safe_radius,
                    "largest radius unaffected by truncation");
  ck_l4->callback([&] {
    ParsedSpinal in = load_spinal_for(run, l4.file);
    std::vector<std::uint32_t> n_list = parse_seq(l4.seq);
    std::uint32_t safe = resolve_safe_radius(in.provenance, l4.safe_radius);
    run.params = {{"file", l4.file}, {"center", l4.center}, {"p", l4.p},
                  {"seq", l4.seq},   {"safe_radius", safe}};
    bool all = true;
    for (std::uint32_t n : n_list) {
      Lemma4Report r = lemma4_bounds_check(in.sg, l4.center, n, l4.p, safe);
      std::printf("n=%u norm1 %s <= %llu: %s; normp %s >= %s: %s; gradp %s <= %s: "
                  "%s; supports: %s %s\n",
                  n, human(r.norm1).c_str(),
                  static_cast<unsigned long long>(r.d_2n),
                  r.norm1_ok ? "ok" : "FAIL", human(r.normp).c_str(),
                  human(r.normp_floor).c_str(), r.normp_ok ? "ok" : "FAIL",
                  human(r.gradp).c_str(), human(r.gradp_ceiling).c_str(),
                  r.gradp_ok ? "ok" : "FAIL", r.fn_support_ok ? "ok" : "FAIL",
                  r.grad_support_ok ? "ok" : "FAIL");
      all = all && r.all_ok();
    }
    std::printf("%s\n", all ? "PASS" : "FAIL");
    run.finish("");
    if (!all) rc = 1;
  });

  struct {
    std::string file;
    std::uint64_t budget = 10000000;
  } eq;
  auto* ck_eq = check->add_subcommand(
      "equivalence", "Structural validator vs exhaustive path-condition "
                     "validator on the same file");
  ck_eq->add_option("file", eq.file, "spinal graph JSON")->required();
  ck_eq->add_option("--budget", eq.budget, "path-enumeration step budget");
  ck_eq->callback([&] {
    OrderedJson j = detail::parse_json(run.read_input(eq.file));
    detail::expect_format(j, kGraphFormat);
    if (!has_spinal_fields(j))
      fail("BadFormat", "document carries no \"spine\"/\"pi\" fields");
    Graph g = Graph::from_edges(detail::edge_array(j),
                                detail::vertex_count_field(j));
    std::vector<VertexId> spine = detail::id_array(j, "spine");
    std::vector<VertexId> pi = detail::id_array(j, "pi");
    run.params = {{"file", eq.file}, {"budget", eq.budget}};
    ValidationReport structural = validate_structural(g, spine, pi);
    bool brute = validate_bruteforce(g, spine, pi, 0, eq.budget);
    std::printf("structural: %s, path enumeration: %s\n",
                structural.ok ? "valid" : "invalid", brute ? "valid" : "invalid");
    run.finish("");
    if (structural.ok != brute) rc = 1;
  });

  // ---- pc ----------------------------------------------------------------
  struct {
    double delta_sigma = 1, delta_g = 2, nu = 2;
  } pc;
  auto* pc_cmd = app.add_subcommand(
      "pc", "Critical Riesz exponent p_c = 2(dG-dS) / (dG/nu' - 2 dS + 2) from "
            "the dimensions and the heat-kernel exponent nu");
  pc_cmd->add_option("--delta-sigma", pc.delta_sigma, "spine dimension")->required();
  pc_cmd->add_option("--delta-g", pc.delta_g, "graph dimension")->required();
  pc_cmd->add_option("--nu", pc.nu, "heat-kernel decay exponent (> 1)")->required();
  pc_cmd->callback([&] {
    double value = critical_p(pc.delta_sigma, pc.delta_g, pc.nu);
    std::printf("p_c = %s\n", human(value).c_str());
    double beta = beta_from_nu(pc.nu);
    if (pc.delta_g > beta) {
      double floor = p_lower_bound(beta, pc.delta_sigma, pc.delta_g);
      std::printf("conjugate floor p >= %s at beta = %s\n", human(floor).c_str(),
                  human(beta).c_str());
    }
    run.finish("");
  });

  // ---- walk --------------------------------------------------------------
  struct {
    std::string file, out, mode = "exact";
    VertexId center = 0;
    std::uint32_t rmax = 1000;
    std::uint64_t seed = 0, budget = 100000;
  } wk;
  auto* walk_cmd = app.add_subcommand(
      "walk", "Return probabilities p_t(x,x) of the simple random walk and "
              "their log-log decay slope");
  walk_cmd->add_option("file", wk.file, "graph JSON")->required();
  walk_cmd->add_option("--center", wk.center, "start vertex");
  walk_cmd->add_option("--rmax", wk.rmax, "number of steps")->required();
  walk_cmd->add_option("--mode", wk.mode, "exact | mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  walk_cmd->add_option("--seed", wk.seed, "Monte Carlo seed");
  walk_cmd->add_option("--budget", wk.budget, "Monte Carlo runs");
  walk_cmd->add_option("--out", wk.out, "write t,p_return CSV here");
  walk_cmd->callback([&] {
    ParsedGraph in = load_graph_for(run, wk.file);
    run.params = {{"file", wk.file}, {"center", wk.center}, {"rmax", wk.rmax},
                  {"mode", wk.mode}, {"budget", wk.budget}};
    run.has_seed = wk.mode == "mc";
    run.seed = wk.seed;
    ReturnProbSeries series;
    if (wk.mode == "exact") {
      std::vector<VertexId> boundary = provenance_boundary(in.provenance);
      series = return_probabilities_exact(in.graph, wk.center, wk.rmax, boundary);
      std::printf("mass defect %s, truncation error bound %s\n",
                  human(series.max_mass_defect).c_str(),
                  human(series.boundary_error).c_str());
    } else {
      series = return_probabilities_mc(in.graph, wk.center, wk.rmax, wk.budget,
                                       wk.seed);
    }
    std::uint32_t t_lo = std::max(2u, wk.rmax / 20);
    ExponentFit fit = decay_fit(series, t_lo, wk.rmax);
    std::printf("decay slope %s over t in [%u, %u]\n", human(fit.slope).c_str(),
                t_lo, wk.rmax);
    if (!wk.out.empty()) run.write_output(wk.out, walk_csv(series));
    run.finish(wk.out);
  });

  // ---- export ------------------------------------------------------------
  auto* exp = app.add_subcommand("export", "Re-emit a graph for other tools");
  exp->require_subcommand(1);

  struct {
    std::string file, out;
  } dot;
  auto* exp_dot = exp->add_subcommand("dot", "Graphviz DOT (spine doubled)");
  exp_dot->add_option("file", dot.file, "graph JSON")->required();
  exp_dot->add_option("--out", dot.out, "write DOT here (default: stdout)");
  exp_dot->callback([&] {
    OrderedJson j = detail::parse_json(run.read_input(dot.file));
    Graph g = parse_graph(j).graph;
    std::vector<VertexId> spine;
    if (has_spinal_fields(j)) spine = detail::id_array(j, "spine");
    run.params = {{"file", dot.file}};
    std::string text = to_dot(g, spine);
    if (dot.out.empty())
      std::fputs(text.c_str(), stdout);
    else
      run.write_output(dot.out, text);
    run.finish(dot.out);
  });

  struct {
    std::string file, out;
  } csv;
  auto* exp_csv = exp->add_subcommand("csv", "Edge list as u,v CSV");
  exp_csv->add_option("file", csv.file, "graph JSON")->required();
  exp_csv->add_option("--out", csv.out, "write CSV here (default: stdout)");
  exp_csv->callback([&] {
    ParsedGraph in = load_graph_for(run, csv.file);
    run.params = {{"file", csv.file}};
    std::string text = edges_csv(in.graph);
    if (csv.out.empty())
      std::fputs(text.c_str(), stdout);
    else
      run.write_output(csv.out, text);
    run.finish(csv.out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.kind() == "DomainError" ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
