#include <doctest.h>

#include <filesystem>
#include <random>
#include <set>
#include <sstream>

#include "lgallee/cli.hpp"
#include "lgallee/presets.hpp"
#include "lgallee/report.hpp"

using namespace lgallee;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lgallee_cli_" + name);
  fs::remove_all(d);
  return d;
}

std::size_t file_count(const fs::path& d) {
  if (!fs::exists(d)) {
    return 0;
  }
  return static_cast<std::size_t>(std::distance(fs::directory_iterator(d), fs::directory_iterator()));
}

Report load(const fs::path& f) { return Report::parse(read_file(f)); }

} // namespace

TEST_CASE("equilibria: output, validation and the dimensional route") {
  const Run r = run({"equilibria", "-A", "0.1", "-M", "-0.1", "-Q", "0.363", "-S", "0.2"});
  CHECK(r.code == 0);
  CHECK(r.out.find("3 positive equilibria") != std::string::npos);
  CHECK(r.out.find("P1") != std::string::npos);

  const Run bad = run({"equilibria", "-A", "1.5", "-M", "-0.1", "-Q", "0.363", "-S", "0.2"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("A must lie in (0,1)") != std::string::npos);

  CHECK(run({"equilibria", "-A", "0.1", "-M", "-0.1", "-Q", "0.363"}).code == 2);
  CHECK(run({"equilibria", "-A", "0.1", "--dimensional", "-r", "1"}).code == 2);
  CHECK(run({"equilibria", "-A", "x"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);

  const fs::path d1 = fresh_dir("dim1");
  const fs::path d2 = fresh_dir("dim2");
  CHECK(run({"equilibria", "--dimensional", "-r", "1", "-K", "1", "-q", "0.51", "-a", "0.5", "-s", "0.1", "-h", "1",
             "-m", "-0.05", "--out", d1.string()})
            .code == 0);
  CHECK(run({"equilibria", "-A", "0.5", "-M", "-0.05", "-Q", "0.51", "-S", "0.1", "--out", d2.string()}).code == 0);
  const Report a = load(d1 / "equilibria.csv");
  const Report b = load(d2 / "equilibria.csv");
  CHECK(a == b);
  CHECK(a.serialize() == read_file(d1 / "equilibria.csv"));
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST_CASE("validation errors leave no files") {
  const fs::path d = fresh_dir("noout");
  CHECK(run({"portrait", "-A", "0.1", "-M", "-0.1", "-Q", "-1", "-S", "0.2", "--out", d.string()}).code == 2);
  CHECK(run({"bifurcation", "-A", "0.1", "-M", "-0.1", "--window", "0.4", "0.3", "0", "0.45", "--out", d.string()})
            .code == 2);
  CHECK(run({"basins", "-A", "0.1", "-M", "-0.1", "-Q", "0.363", "-S", "0.2", "--resolution", "0", "--out",
             d.string()})
            .code == 2);
  CHECK(run({"connection", "-A", "0.1", "-M", "-0.1", "-Q", "0.363", "--bracket", "0.3", "0.235", "--out",
             d.string()})
            .code == 2);
  CHECK(run({"portrait", "--figure", "F99", "--out", d.string()}).code == 2);
  CHECK(file_count(d) == 0);
}

TEST_CASE("I/O failure maps to exit 3") {
  const fs::path d = fresh_dir("io");
  fs::create_directories(d);
  const fs::path blocker = d / "file";
  write_atomic(blocker, "x");
  const Run r = run({"equilibria", "-A", "0.1", "-M", "-0.1", "-Q", "0.363", "-S", "0.2", "--out",
                     (blocker / "sub").string()});
  CHECK(r.code == 3);
  fs::remove_all(d);
}

TEST_CASE("portrait: files, determinism, empty trajectory list") {
  const fs::path d = fresh_dir("portrait");
  CHECK(run({"portrait", "--figure", "F04b", "--out", d.string()}).code == 0);
  const Report rep = load(d / "F04b_portrait.csv");
  CHECK(rep.columns == std::vector<std::string>{"object_id", "object_kind", "u", "v"});
  std::set<std::string> kinds;
  for (const auto& row : rep.rows) {
    kinds.insert(row[1]);
  }
  CHECK(kinds.count("cycle-stable") == 1);
  CHECK(kinds.count("equilibrium-repeller") == 1);
  CHECK(kinds.count("trajectory") == 1);
  const std::string svg = read_file(d / "F04b_portrait.svg");
  CHECK(svg.find("viewBox=\"0 0 800 800\"") != std::string::npos);

  const fs::path d2 = fresh_dir("portrait2");
  CHECK(run({"portrait", "--figure", "F04b", "--out", d2.string()}).code == 0);
  CHECK(read_file(d2 / "F04b_portrait.csv") == read_file(d / "F04b_portrait.csv"));
  CHECK(read_file(d2 / "F04b_portrait.svg") == svg);

  const fs::path d3 = fresh_dir("portrait3");
  CHECK(run({"portrait", "-A", "0.5", "-M", "-0.05", "-Q", "0.51", "-S", "0.1", "--trajectories", "none", "--format",
             "csv", "--out", d3.string()})
            .code == 0);
  CHECK(file_count(d3) == 1);
  for (const auto& row : load(d3 / "portrait.csv").rows) {
    CHECK(row[1] != "trajectory");
  }
  CHECK(run({"portrait", "-A", "0.5", "-M", "-0.05", "-Q", "0.51", "-S", "0.1", "--trajectories", "-3"}).code == 2);
  for (const auto& p : {d, d2, d3}) {
    fs::remove_all(p);
  }
}

TEST_CASE("portrait F09f: stable cycle around three equilibria") {
  const fs::path d = fresh_dir("f09f");
  const Run r = run({"portrait", "--figure", "F09f", "--trajectories", "none", "--out", d.string()});
  CHECK(r.code == 0);
  const Report rep = load(d / "F09f_portrait.csv");
  CHECK(rep.get("cycle.C0").find("stable period") == 0);
  CHECK(rep.get("cycle.C0").find("encloses P1 P2 P3") != std::string::npos);
  fs::remove_all(d);
}

TEST_CASE("bifurcation: curves, BT points, region cross-check") {
  const fs::path d = fresh_dir("bif");
  const Run r = run({"bifurcation", "-A", "0.1", "-M", "-0.1", "--resolution", "30", "--out", d.string()});
  REQUIRE(r.code == 0);
  const Report curves = load(d / "bifurcation.csv");
  std::set<std::string> sn;
  int bt = 0;
  int hopf = 0;
  for (const auto& row : curves.rows) {
    if (row[0] == "sn") {
      sn.insert(row[1]);
    }
    bt += row[0] == "bt" ? 1 : 0;
    hopf += row[0] == "hopf" ? 1 : 0;
  }
  CHECK(sn.size() == 2);
  CHECK(bt == 2);
  CHECK(hopf > 100);

  const Report regions = load(d / "regions.csv");
  CHECK(regions.rows.size() == 900);
  std::mt19937 rng(11);
  for (int k = 0; k < 10; ++k) {
    const auto& row = regions.rows[rng() % regions.rows.size()];
    const fs::path e = d / ("eq" + std::to_string(k));
    REQUIRE(run({"equilibria", "-A", "0.1", "-M", "-0.1", "-Q", row[2], "-S", row[3], "--out", e.string()}).code == 0);
    const Report eq = load(e / "equilibria.csv");
    std::string key;
    int count = 0;
    for (const auto& er : eq.rows) {
      if (er[0].front() == 'P') {
        key += (count++ == 0 ? "" : "/") + er[3];
      }
    }
    CHECK(row[5] == std::to_string(count) + ":" + key);
  }
  CHECK(run({"bifurcation", "-A", "0.1", "-M", "-0.1", "--window", "0.3", "0.3", "0", "0.4"}).code == 2);
  fs::remove_all(d);
}

TEST_CASE("basins: one cell and two basins") {
  const fs::path d = fresh_dir("basins");
  CHECK(run({"basins", "-A", "0.1", "-M", "-0.1", "-Q", "0.363", "-S", "0.18", "--resolution", "1", "--out",
             d.string()})
            .code == 0);
  const Report one = load(d / "basins.csv");
  CHECK(one.rows.size() == 1);
  CHECK(one.columns == std::vector<std::string>{"cell_u", "cell_v", "attractor_id"});

  CHECK(run({"basins", "-A", "0.1", "-M", "-0.1", "-Q", "0.363", "-S", "0.3", "--resolution", "20", "--out",
             d.string()})
            .code == 0);
  std::set<std::string> ids;
  for (const auto& row : load(d / "basins.csv").rows) {
    ids.insert(row[2]);
  }
  CHECK(ids.count("P1") == 1);
  CHECK(ids.count("P3") == 1);
  fs::remove_all(d);
}

TEST_CASE("verify: saddle-node, BT point, zero tolerance") {
  const Run sn = run({"verify", "-A", "0.1", "-M", "-0.1", "--at-sn", "plus", "-S", "0.25"});
  CHECK(sn.code == 0);
  CHECK(sn.out.find("PASS sotomayor_transversality") != std::string::npos);
  CHECK(sn.out.find("PASS sotomayor_nondegeneracy") != std::string::npos);

  for (const char* which : {"minus", "plus"}) {
    const Run bt = run({"verify", "-A", "0.1", "-M", "-0.1", "--at-bt", which});
    CHECK(bt.code == 0);
    CHECK(bt.out.find("PASS cusp_nilpotent_block") != std::string::npos);
    CHECK(bt.out.find("INFO simple_zero_eigenvalue") != std::string::npos);
  }

  const Run plain = run({"verify", "-A", "0.1", "-M", "-0.1", "-Q", "0.363", "-S", "0.2"});
  CHECK(plain.code == 0);

  const Run zero = run({"verify", "-A", "0.1", "-M", "-0.1", "-Q", "0.363", "-S", "0.2", "--tol", "0"});
  CHECK(zero.code == 1);
  CHECK(zero.out.find("FAIL cubic_root_residual") != std::string::npos);
  CHECK(zero.out.find("FAILED:") != std::string::npos);

  CHECK(run({"verify", "-A", "0.1", "-M", "-0.1", "--at-sn", "middle", "-S", "0.25"}).code == 2);
}

TEST_CASE("connection: inverted bracket and unknown preset") {
  CHECK(run({"connection", "--preset", "heteroclinic", "--bracket", "0.3", "0.2"}).code == 2);
  CHECK(run({"connection", "--preset", "sideways"}).code == 2);
  CHECK(run({"connection", "-A", "0.1", "-M", "-0.1", "-Q", "0.363"}).code == 2);
}

TEST_CASE("figure presets write their documented files") {
  const fs::path d = fresh_dir("figures");
  for (const char* id : {"F02", "F06a", "F08"}) {
    const Run r = run({"figure", id, "--out", d.string()});
    CHECK(r.code == 0);
    for (const auto& f : preset_files(find_preset(id))) {
      CHECK(fs::exists(d / f));
      if (f.ends_with(".csv")) {
        const std::string text = read_file(d / f);
        CHECK(Report::parse(text).serialize() == text);
      }
    }
  }
  const Report roots = load(d / "F02_roots.csv");
  std::vector<std::string> counts;
  for (const auto& row : roots.rows) {
    counts.push_back(row[1] + "/" + row[3]);
  }
  CHECK(counts == std::vector<std::string>{"1/no", "3/yes", "3/no", "3/yes", "1/no"});
  CHECK(run({"figure", "F04a", "-S", "0.2"}).code == 2);
  CHECK(run({"figure", "F77"}).code == 2);
  CHECK(run({"presets"}).code == 0);
  fs::remove_all(d);
}
