#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

// Exercises the installed binary end to end: every subcommand, the exit-code
// contract (0 ok, 1 failed check, 2 usage or domain error), file outputs and
// the run manifest written beside them.

#include "spinal_lab/io.hpp"

#include <cstdio>
#include <filesystem>
#include <string>
#include <sys/wait.h>

using namespace spinal_lab;

namespace {

const std::string kScratch = "/tmp/spinal_cli_scratch";

struct RunResult {
  int code = -1;
  std::string out, err;
};

RunResult run_cli(const std::string& args) {
  std::filesystem::create_directories(kScratch);
  static int counter = 0;
  std::string err_path = kScratch + "/stderr." + std::to_string(++counter);
  std::string cmd = std::string(SPINAL_LAB_CLI_PATH) + " " + args + " 2>" + err_path;
  std::FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t got;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.err = read_text_file(err_path);
  std::remove(err_path.c_str());
  return r;
}

std::string scratch_file(const std::string& name) { return kScratch + "/" + name; }

// generates a vicsek instance file and returns its path
std::string vicsek_file(std::uint32_t level) {
  std::string path = scratch_file("vicsek" + std::to_string(level) + ".json");
  RunResult r = run_cli("generate vicsek --dim 2 --level " + std::to_string(level) +
                        " --out " + path);
  REQUIRE(r.code == 0);
  return path;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("version and usage errors") {
  CHECK(run_cli("--version").out == std::string(kVersion) + "\n");
  CHECK(run_cli("--version").code == 0);
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("generate vicsek --level 1").code == 2);  // --dim is required
}

TEST_CASE("generate vicsek writes graph plus manifest") {
  std::string path = scratch_file("gen.json");
  RunResult r = run_cli("generate vicsek --dim 2 --level 1 --out " + path);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "21 vertices"));
  CHECK(contains(r.out, "safe radius 3"));

  ParsedSpinal in = load_spinal_file(path);
  CHECK(in.sg.graph().vertex_count() == 21);
  CHECK(in.provenance["generator"] == "vicsek");
  CHECK(in.provenance["safe_radius"] == 3);
  CHECK(in.provenance["boundary"].size() == 4);

  OrderedJson manifest =
      detail::parse_json(read_text_file(path + ".manifest.json"));
  CHECK(manifest["format"] == "spinal-lab/manifest-v1");
  CHECK(manifest["seed"].is_null());
  CHECK(manifest["argv"][1] == "generate");
  CHECK(manifest["outputs"][0]["path"] == path);
  CHECK(manifest["outputs"][0]["sha256"] == sha256_file(path));
  CHECK(manifest["wall_ms"].is_number());
}

TEST_CASE("generator failures map to the exit contract") {
  RunResult domain = run_cli("generate vicsek --dim 7 --level 1");
  CHECK(domain.code == 2);
  CHECK(contains(domain.err, "error: DomainError"));

  RunResult budget = run_cli("generate vicsek --dim 2 --level 12");
  CHECK(budget.code == 1);
  CHECK(contains(budget.err, "error: SizeBudgetExceeded"));
}

TEST_CASE("generate plates and glue") {
  std::string path = scratch_file("plates.json");
  RunResult r = run_cli("generate plates --D 1.5 --delta 2 --length 8 --out " + path);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "alpha 0.25"));
  ParsedSpinal in = load_spinal_file(path);
  CHECK(in.sg.spine().size() == 8);
  CHECK(in.provenance["safe_radius"] == 4);

  Graph skeleton = Graph::from_edges({{0, 1}}, 2);
  std::vector<Fiber> fibers;
  fibers.push_back(Fiber{Graph::from_edges({{0, 1}, {1, 2}}, 3), 2});
  fibers.push_back(Fiber{Graph::from_edges({{0, 1}}, 2), 1});
  std::string parts = scratch_file("parts.json");
  write_text_file(parts, dump_json(glue_parts_to_json(skeleton, fibers)));

  std::string glued = scratch_file("glued.json");
  RunResult g = run_cli("generate glue --parts " + parts + " --out " + glued);
  CHECK(g.code == 0);
  CHECK(contains(g.out, "glued 2 fibers onto 2 skeleton vertices"));
  ParsedSpinal out = load_spinal_file(glued);
  CHECK(out.sg.graph().edges() == glue(skeleton, fibers).graph().edges());

  OrderedJson manifest =
      detail::parse_json(read_text_file(glued + ".manifest.json"));
  CHECK(manifest["inputs"][0]["path"] == parts);
  CHECK(manifest["inputs"][0]["sha256"] == sha256_file(parts));
}

TEST_CASE("generate random is reproducible per seed") {
  std::string a = scratch_file("rnd_a.json"), b = scratch_file("rnd_b.json"),
              c = scratch_file("rnd_c.json");
  CHECK(run_cli("generate random --seed 5 --out " + a).code == 0);
  CHECK(run_cli("generate random --seed 5 --out " + b).code == 0);
  CHECK(run_cli("generate random --seed 6 --out " + c).code == 0);
  CHECK(read_text_file(a) == read_text_file(b));
  CHECK(read_text_file(a) != read_text_file(c));

  OrderedJson manifest = detail::parse_json(read_text_file(a + ".manifest.json"));
  CHECK(manifest["seed"] == 5);
}

TEST_CASE("validate gives a json verdict and exit code") {
  RunResult ok = run_cli("validate " + vicsek_file(1));
  CHECK(ok.code == 0);
  OrderedJson report = detail::parse_json(ok.out);
  CHECK(report["ok"] == true);
  CHECK(report["violations"].empty());

  // cross-fiber edge (2,3) and a split fiber for pi = [0,1,1,0]
  std::string bad = scratch_file("bad.json");
  write_text_file(
      bad,
      R"({"format":"spinal-lab/graph-v1","vertex_count":4,"edges":[[0,1],[1,2],[2,3]],"spine":[0,1],"pi":[0,1,1,0]})");
  RunResult invalid = run_cli("validate " + bad);
  CHECK(invalid.code == 1);
  OrderedJson bad_report = detail::parse_json(invalid.out);
  CHECK(bad_report["ok"] == false);
  std::string kinds = dump_json(bad_report["violations"]);
  CHECK(contains(kinds, "CrossFiberEdge"));

  std::string garbage = scratch_file("garbage.json");
  write_text_file(garbage, "not json at all");
  RunResult mangled = run_cli("validate " + garbage);
  CHECK(mangled.code == 1);
  CHECK(contains(mangled.out, "BadFormat"));
}

TEST_CASE("analyze volumes emits the r,volume table") {
  std::string out = scratch_file("volumes.csv");
  RunResult r =
      run_cli("analyze volumes " + vicsek_file(2) + " --rmax 6 --out " + out);
  CHECK(r.code == 0);
  CHECK(contains(r.out, "|B(0,6)|"));
  CHECK(contains(r.out, "growth exponent"));
  std::string csv = read_text_file(out);
  CHECK(csv.substr(0, 13) == "r,volume\n0,1\n");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);  // header + r = 0..6
}

TEST_CASE("analyze dims passes with the right exponents and fails with wrong ones") {
  std::string file = vicsek_file(4);
  std::string good = "analyze dims " + file +
                     " --delta-sigma 1 --delta-g 1.4649735 "
                     "--seq geometric:base=3,count=3";
  RunResult pass = run_cli(good);
  CHECK(pass.code == 0);
  CHECK(contains(pass.out, "PASS"));

  RunResult fail_run = run_cli("analyze dims " + file +
                               " --delta-sigma 1 --delta-g 3 "
                               "--seq geometric:base=3,count=3");
  CHECK(fail_run.code == 1);
  CHECK(contains(fail_run.out, "FAIL"));
}

TEST_CASE("safe radius comes from provenance or the flag, never silently") {
  // a hand-rolled file with no provenance: the radius must be given explicitly
  std::vector<Edge> edges;
  for (VertexId v = 0; v + 1 < 33; ++v) edges.emplace_back(v, v + 1);
  std::vector<VertexId> ids(33);
  for (VertexId v = 0; v < 33; ++v) ids[v] = v;
  SpinalGraph sg(Graph::from_edges(std::move(edges), 33), ids, ids);
  std::string path = scratch_file("path33.json");
  write_text_file(path, dump_json(spinal_to_json(sg)));

  std::string args = "analyze dims " + path +
                     " --center 16 --delta-sigma 1 --delta-g 1 "
                     "--seq geometric:base=2,count=3";
  RunResult missing = run_cli(args);
  CHECK(missing.code == 2);
  CHECK(contains(missing.err, "error: DomainError"));

  RunResult given = run_cli(args + " --safe-radius 16");
  CHECK(given.code == 0);
  CHECK(contains(given.out, "PASS"));
}

TEST_CASE("analyze nash and vlb run end to end") {
  std::string file = vicsek_file(4);
  std::string out = scratch_file("nash.csv");
  RunResult nash = run_cli("analyze nash " + file +
                           " --p 2 --beta 1.1886 --seq geometric:base=2,count=3 "
                           "--out " + out);
  CHECK(nash.code == 0);
  CHECK(contains(nash.out, "fitted slope"));
  CHECK(read_text_file(out).substr(0, 26) == "n,norm1,normp,gradp,ratio\n");

  RunResult vlb = run_cli("analyze vlb " + file +
                          " --D 1.4649735 --seq geometric:base=2,count=3 "
                          "--budget 16 --seed 1");
  CHECK(vlb.code == 0);
  CHECK(contains(vlb.out, "min |B(x,r)|/r^D"));
}

TEST_CASE("check subcommands agree on valid inputs") {
  std::string file = vicsek_file(2);
  RunResult geo = run_cli("check lemma2 " + file);
  CHECK(geo.code == 0);
  CHECK(contains(geo.out, " 0 violations"));

  RunResult rt = run_cli("check roundtrip " + file);
  CHECK(rt.code == 0);
  CHECK(rt.out == "roundtrip OK\n");

  RunResult l4 = run_cli("check lemma4 " + vicsek_file(4) +
                         " --p 2 --seq geometric:base=3,count=3");
  CHECK(l4.code == 0);
  CHECK(contains(l4.out, "PASS"));

  RunResult bi = run_cli("check ball-intersection " + file +
                         " --seq geometric:base=2,count=2 --budget 500 --center 0");
  CHECK(bi.code == 0);
  CHECK(contains(bi.out, "min ratio"));
  CHECK(contains(bi.out, "case r > 2 d(x,y):"));

  std::string rnd = scratch_file("rnd_eq.json");
  CHECK(run_cli("generate random --seed 1 --length 4 --max-fiber 3 --out " + rnd)
            .code == 0);
  RunResult eq = run_cli("check equivalence " + rnd);
  CHECK(eq.code == 0);
  CHECK(eq.out == "structural: valid, path enumeration: valid\n");

  // on a broken file both validators must still agree
  std::string bad = scratch_file("bad_eq.json");
  write_text_file(
      bad,
      R"({"format":"spinal-lab/graph-v1","vertex_count":4,"edges":[[0,1],[1,2],[2,3]],"spine":[0,1],"pi":[0,1,1,0]})");
  RunResult both = run_cli("check equivalence " + bad);
  CHECK(both.code == 0);
  CHECK(both.out == "structural: invalid, path enumeration: invalid\n");
}

TEST_CASE("pc prints the exponent and its conjugate floor") {
  RunResult r = run_cli("pc --delta-sigma 1 --delta-g 2 --nu 3");
  CHECK(r.code == 0);
  CHECK(r.out == "p_c = 1.5\nconjugate floor p >= 3 at beta = 1.5\n");

  RunResult bad = run_cli("pc --delta-sigma 1 --delta-g 1 --nu 3");
  CHECK(bad.code == 2);
  CHECK(contains(bad.err, "error: DomainError"));
}

TEST_CASE("walk respects the truncation boundary from provenance") {
  std::string file = vicsek_file(2);
  std::string out = scratch_file("walk.csv");
  RunResult ok = run_cli("walk " + file + " --rmax 8 --out " + out);
  CHECK(ok.code == 0);
  CHECK(contains(ok.out, "mass defect"));
  CHECK(contains(ok.out, "decay slope"));
  CHECK(read_text_file(out).substr(0, 11) == "t,p_return\n");

  // past the corners the truncation bound trips and the run aborts
  RunResult tripped = run_cli("walk " + file + " --rmax 40");
  CHECK(tripped.code == 1);
  CHECK(contains(tripped.err, "error: BoundaryReached"));

  RunResult mc = run_cli("walk " + file + " --rmax 8 --mode mc --seed 3 --budget 2000");
  CHECK(mc.code == 0);
  CHECK(contains(mc.out, "decay slope"));
}

TEST_CASE("export dot and csv") {
  std::string file = vicsek_file(1);
  RunResult dot = run_cli("export dot " + file);
  CHECK(dot.code == 0);
  CHECK(contains(dot.out, "graph spinal_lab {"));
  CHECK(contains(dot.out, "doublecircle"));

  RunResult csv = run_cli("export csv " + file);
  CHECK(csv.code == 0);
  CHECK(csv.out.substr(0, 4) == "u,v\n");
  ParsedSpinal in = load_spinal_file(file);
  auto rows = static_cast<std::size_t>(
      std::count(csv.out.begin(), csv.out.end(), '\n'));
  CHECK(rows == in.sg.graph().edge_count() + 1);
}

TEST_CASE("sequence flag rejects degenerate descriptions") {
  std::string file = vicsek_file(2);
  for (const char* seq :
       {"geometric:base=1,count=3", "arithmetic:base=2,count=3", "geometric:base=2",
        "geometric:base=2,count=0"}) {
    RunResult r = run_cli("analyze dims " + file +
                          " --delta-sigma 1 --delta-g 1.46 --seq " + seq);
    CAPTURE(seq);
    CHECK(r.code == 2);
    CHECK(contains(r.err, "error: DomainError"));
  }
}
