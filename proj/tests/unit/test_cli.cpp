#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rslpa/cli.hpp"
#include "rslpa/graph.hpp"
#include "rslpa/io.hpp"

using namespace rslpa;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;

  bool has(const std::string& line) const {
    std::istringstream in(out);
    std::string l;
    while (std::getline(in, l)) {
      if (l == line) return true;
    }
    return false;
  }
  std::string value(const std::string& key) const {
    std::istringstream in(out);
    std::string l;
    while (std::getline(in, l)) {
      if (l.rfind(key + "=", 0) == 0) return l.substr(key.size() + 1);
    }
    return "";
  }
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string dir() {
  const auto d = std::filesystem::temp_directory_path() / "rslpa_cli_test";
  std::filesystem::create_directories(d);
  return d.string() + "/";
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::string graph_file() {
  const std::string p = dir() + "graph.txt";
  std::ofstream f(p);
  write_edge_list(f, generate_random_graph(60, 150, 4));
  return p;
}

}  // namespace

TEST_CASE("detect writes a reproducible snapshot") {
  const std::string g = graph_file();
  const Result a = cli({"detect", "--graph", g, "--seed", "7", "--iterations", "20", "--out", dir() + "a.bin"});
  REQUIRE(a.code == 0);
  // Isolated generator vertices do not appear in an edge list.
  const std::size_t active = generate_random_graph(60, 150, 4).active_vertex_count();
  CHECK(a.has("vertices=" + std::to_string(active)));
  CHECK(a.has("edges=150"));
  CHECK(a.has("iterations=20"));
  CHECK(a.has("seed=7"));
  const Result b = cli({"detect", "--graph", g, "--seed", "7", "--iterations", "20", "--out", dir() + "b.bin"});
  REQUIRE(b.code == 0);
  CHECK(slurp(dir() + "a.bin") == slurp(dir() + "b.bin"));

  const Result sim = cli({"detect", "--graph", g, "--seed", "7", "--iterations", "20", "--out",
                          dir() + "c.bin", "--simulate-workers", "4"});
  REQUIRE(sim.code == 0);
  CHECK(slurp(dir() + "a.bin") == slurp(dir() + "c.bin"));
  CHECK(sim.out.find("round=1 phase=propagate logical=" + std::to_string(2 * active)) != std::string::npos);

  const Result zero = cli({"detect", "--graph", g, "--seed", "1", "--iterations", "0", "--out", dir() + "z.bin"});
  REQUIRE(zero.code == 0);
  CHECK(load_snapshot(dir() + "z.bin").state.iterations == 0);

  const Result noseed = cli({"detect", "--graph", g, "--iterations", "2", "--out", dir() + "n.bin"});
  REQUIRE(noseed.code == 0);
  CHECK_FALSE(noseed.value("seed").empty());
  CHECK(load_snapshot(dir() + "n.bin").seed == std::stoull(noseed.value("seed")));
}

TEST_CASE("update, postprocess and eval") {
  const std::string g = graph_file();
  REQUIRE(cli({"detect", "--graph", g, "--seed", "3", "--iterations", "30", "--out", dir() + "s.bin"}).code == 0);
  write(dir() + "empty.batch", "# nothing\n");
  const Result e = cli({"update", "--snapshot", dir() + "s.bin", "--batch", dir() + "empty.batch",
                        "--out", dir() + "s2.bin"});
  REQUIRE(e.code == 0);
  CHECK(e.out.find(" eta=0 ") != std::string::npos);

  REQUIRE(cli({"genbatch", "--graph", g, "--size", "20", "--seed", "1", "--out", dir() + "b1"}).code == 0);
  REQUIRE(cli({"genbatch", "--graph", g, "--size", "20", "--seed", "1", "--out", dir() + "b2"}).code == 0);
  CHECK(slurp(dir() + "b1") == slurp(dir() + "b2"));

  const Result u = cli({"update", "--snapshot", dir() + "s.bin", "--batch", dir() + "b1", "--out",
                        dir() + "s3.bin", "--pc-formula", "literal", "--metrics-out", dir() + "m.json"});
  REQUIRE(u.code == 0);
  CHECK(u.has("pc_formula=literal"));
  const auto doc = nlohmann::json::parse(slurp(dir() + "m.json"));
  CHECK(doc["batches"].size() == 1);
  CHECK(doc["batches"][0]["deleted"] == 10);

  // Library and simulator paths write the same snapshot.
  REQUIRE(cli({"update", "--snapshot", dir() + "s.bin", "--batch", dir() + "b1", "--out",
               dir() + "s4.bin", "--simulate-workers", "3"}).code == 0);
  CHECK(slurp(dir() + "s3.bin") == slurp(dir() + "s4.bin"));

  // A batch that no longer matches the graph.
  const Result stale = cli({"update", "--snapshot", dir() + "s3.bin", "--batch", dir() + "b1", "--out",
                            dir() + "s5.bin"});
  CHECK(stale.code == 2);
  CHECK(cli({"update", "--snapshot", dir() + "s3.bin", "--batch", dir() + "b1", "--out", dir() + "s5.bin",
             "--lenient"}).code == 0);

  const Result p = cli({"postprocess", "--snapshot", dir() + "s3.bin", "--out", dir() + "c.cov"});
  REQUIRE(p.code == 0);
  CHECK_FALSE(p.value("tau2").empty());
  CHECK_FALSE(p.value("tau1").empty());
  CHECK_FALSE(p.value("entropy").empty());
  REQUIRE(cli({"postprocess", "--snapshot", dir() + "s3.bin", "--out", dir() + "d.cov"}).code == 0);
  CHECK(slurp(dir() + "c.cov") == slurp(dir() + "d.cov"));

  CHECK(cli({"postprocess", "--snapshot", dir() + "s3.bin", "--out", dir() + "x.cov", "--tau1", "0.4",
             "--tau2", "0.5"}).code == 2);

  const Result same = cli({"eval", "--pred", dir() + "c.cov", "--truth", dir() + "c.cov"});
  REQUIRE(same.code == 0);
  CHECK(same.has("nmi=1.0"));
}

TEST_CASE("predict") {
  const Result r = cli({"predict", "--V", "50", "--E", "100", "--md", "10", "--ma", "10", "--T", "3"});
  REQUIRE(r.code == 0);
  CHECK(std::stod(r.value("pc")) == doctest::Approx(0.19));
  CHECK(std::stod(r.value("eta")) == doctest::Approx(38.51625));
  CHECK(std::stod(r.value("lower")) == doctest::Approx(28.5));
  CHECK_FALSE(r.value("upper").empty());
  CHECK_FALSE(r.value("note").empty());
  const Result lit = cli({"predict", "--V", "50", "--E", "100", "--md", "0", "--ma", "0", "--T", "3",
                          "--pc-formula", "literal"});
  CHECK(lit.has("pc=1.0"));
  CHECK(cli({"predict", "--V", "50", "--E", "10", "--md", "11", "--ma", "0", "--T", "3"}).code == 2);
}

TEST_CASE("genplanted, slpa and eval with LFR truth") {
  REQUIRE(cli({"genplanted", "--communities", "3", "--size", "6", "--overlap", "0", "--p-in", "1",
               "--p-out", "0", "--seed", "2", "--out", dir() + "p.txt", "--out-truth", dir() + "p.cov"})
              .code == 0);
  const Result s = cli({"slpa", "--graph", dir() + "p.txt", "--seed", "1", "--out", dir() + "slpa.cov",
                        "--simulate-workers", "2"});
  REQUIRE(s.code == 0);
  CHECK(s.out.find("logical=90") != std::string::npos);

  write(dir() + "truth.lfr", "0\t1\n1\t1\n2\t1\n3\t2\n4\t2\n5\t2\n");
  write(dir() + "pred.cov", "0 1 2\n3 4 5\n");
  const Result e = cli({"eval", "--pred", dir() + "pred.cov", "--truth", dir() + "truth.lfr",
                        "--truth-format", "lfr"});
  REQUIRE(e.code == 0);
  CHECK(e.has("nmi=1.0"));
}

TEST_CASE("exit codes") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"detect", "--graph", "x"}).code == 2);
  CHECK(cli({"detect", "--graph", dir() + "missing.txt", "--out", dir() + "o.bin"}).code == 1);
  write(dir() + "bad.txt", "1 2\n3 x\n");
  const Result bad = cli({"detect", "--graph", dir() + "bad.txt", "--out", dir() + "o.bin"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("line 2") != std::string::npos);
  write(dir() + "junk.bin", "not a snapshot");
  CHECK(cli({"postprocess", "--snapshot", dir() + "junk.bin", "--out", dir() + "o.cov"}).code == 1);
  CHECK(cli({"postprocess", "--snapshot", dir() + "junk.bin", "--out", dir() + "o.cov", "--tau1", "3"})
            .code == 2);
  CHECK(cli({"--help"}).code == 0);
}
