#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "mcfcnf/cli.hpp"
#include "mcfcnf/instance.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using mcfcnf::testing::data_path;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mcfcnf");
  std::ostringstream out, err;
  const int code = mcfcnf::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mcfcnf_cli_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
            std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_SUITE("command line") {
  TEST_CASE("solve the counterexample") {
    TempDir dir;
    const Outcome r = invoke({"solve", "--instance", data_path("counterexample.mcfcnf"), "--time-limit", "5",
                              "--seed", "1", "--solution", dir / "s.csv", "--convergence",
                              dir / "c.csv"});
    CHECK(r.code == 0);
    CHECK(r.out.find("polished_cost=20 ") != std::string::npos);
    CHECK(r.out.rfind("best_cost=", 0) == 0);
    const std::string solution = slurp(dir / "s.csv");
    CHECK(solution.rfind("edge_index,capacity_index,flow,z\n", 0) == 0);
    CHECK(solution.find("# true_cost=20\n") != std::string::npos);
    CHECK(slurp(dir / "c.csv").rfind("iteration,elapsed_s,best_cost,mean_cost,lp_solves\n", 0) == 0);
  }

  TEST_CASE("iteration stop makes artifacts reproducible") {
    TempDir dir;
    std::vector<std::string> files;
    for (int run = 0; run < 2; ++run) {
      const std::string sol = dir / ("s" + std::to_string(run) + ".csv");
      const Outcome r = invoke({"solve", "--instance", data_path("counterexample.mcfcnf"), "--iterations",
                                "10", "--time-limit", "1", "--no-polish", "--solution", sol,
                                "--convergence", dir / "c.csv"});
      REQUIRE(r.code == 0);
      CHECK(r.out.find("iterations=10 ") != std::string::npos);
      files.push_back(slurp(sol));
    }
    CHECK(files[0] == files[1]);
  }

  TEST_CASE("missing instance file") {
    const Outcome r = invoke({"solve", "--instance", "missing.mcfcnf"});
    CHECK(r.code == 1);
    CHECK(r.err.find("missing.mcfcnf") != std::string::npos);
  }

  TEST_CASE("infeasible instance") {
    TempDir dir;
    const Outcome r = invoke({"solve", "--instance", data_path("infeasible.mcfcnf"), "--solution",
                              dir / "s.csv", "--convergence", dir / "c.csv"});
    CHECK(r.code == 2);
    CHECK(r.err.find("target exceeds max flow") != std::string::npos);
    CHECK(invoke({"exact", "--instance", data_path("infeasible.mcfcnf")}).code == 2);
    CHECK(invoke({"validate", "--instance", data_path("infeasible.mcfcnf")}).code == 2);
  }

  TEST_CASE("malformed instance and bad flags") {
    CHECK(invoke({"validate", "--instance", data_path("zero_target.mcfcnf")}).code == 1);
    CHECK(invoke({"solve"}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"solve", "--instance", data_path("counterexample.mcfcnf"), "--mutation", "2"}).code == 1);
    const Outcome help = invoke({"exact", "--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("--budget") != std::string::npos);
  }

  TEST_CASE("exact subcommand") {
    TempDir dir;
    const Outcome counterexample = invoke({"exact", "--instance", data_path("counterexample.mcfcnf"), "--budget", "10",
                                "--solution", dir / "e.csv"});
    CHECK(counterexample.code == 0);
    CHECK(counterexample.out.rfind("cost=20 proven=true ", 0) == 0);
    const Outcome minimal = invoke({"exact", "--instance", data_path("minimal.mcfcnf"), "--budget",
                                    "10", "--solution", dir / "e.csv"});
    CHECK(minimal.out.rfind("cost=4 proven=true ", 0) == 0);
  }

  TEST_CASE("exact with a spent budget reports the best so far") {
    TempDir dir;
    const std::string path = dir / "big.mcfcnf";
    REQUIRE(invoke({"gen", "--kind", "grid", "--vertices", "200", "--capacities", "4", "--seed",
                    "3", "-o", path})
                .code == 0);
    const Outcome r =
        invoke({"exact", "--instance", path, "--budget", "0.05", "--solution", dir / "e.csv"});
    CHECK(r.code == 0);
    CHECK(r.out.find("proven=false") != std::string::npos);
  }

  TEST_CASE("generator is byte-for-byte deterministic") {
    TempDir dir;
    for (const char* name : {"a.mcfcnf", "b.mcfcnf"}) {
      const Outcome r = invoke({"gen", "--kind", "grid", "--vertices", "9", "--capacities", "3",
                                "--seed", "1", "-o", dir / name});
      CHECK(r.code == 0);
      CHECK(r.out == "OK\n");
    }
    CHECK(slurp(dir / "a.mcfcnf") == slurp(dir / "b.mcfcnf"));
    const Outcome geo = invoke({"gen", "--kind", "geometric", "--vertices", "100", "--capacities",
                                "5", "--seed", "7", "-o", dir / "x.mcfcnf"});
    CHECK(geo.out == "OK\n");
    CHECK(invoke({"validate", "--instance", dir / "x.mcfcnf"}).out == "OK\n");
    const Outcome tiny = invoke({"gen", "--vertices", "1", "-o", dir / "t.mcfcnf"});
    CHECK(tiny.code == 1);
    CHECK(tiny.err.find("need at least 2 vertices") != std::string::npos);
  }

  TEST_CASE("compare two small instances") {
    TempDir dir;
    fs::copy_file(data_path("counterexample.mcfcnf"), dir / "counterexample.mcfcnf");
    fs::copy_file(data_path("minimal.mcfcnf"), dir / "minimal.mcfcnf");
    const Outcome r = invoke({"compare", "--instances", dir / "*.mcfcnf", "--budget", "5",
                              "--repeats", "3", "--iterations", "20", "-o", dir / "cmp.csv"});
    CHECK(r.code == 0);
    std::istringstream csv(slurp(dir / "cmp.csv"));
    std::vector<std::string> lines;
    for (std::string line; std::getline(csv, line);) lines.push_back(line);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0].rfind("instance,pairs,ga_cost,", 0) == 0);
    CHECK(lines[1].rfind("counterexample.mcfcnf,4,20,20,20,true,20,1,", 0) == 0);
    CHECK(lines[2].rfind("minimal.mcfcnf,1,4,4,4,true,4,1,", 0) == 0);
  }

  TEST_CASE("compare with nothing to do") {
    TempDir dir;
    const Outcome r = invoke({"compare", "--instances", dir / "*.none"});
    CHECK(r.code == 1);
    CHECK(r.err.find("no instances matched") != std::string::npos);
  }

  TEST_CASE("consistency check") {
    mcfcnf::cli::CompareRow row;
    row.lower_bound = 100.0;
    row.ga_cost = row.ga_min_cost = 100.0 - 5e-5;
    CHECK(mcfcnf::cli::compare_consistent(row));
    row.ga_min_cost = 99.0;
    CHECK_FALSE(mcfcnf::cli::compare_consistent(row));
  }
}
