#include "osclab/field_io.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace osclab;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::path(OSCLAB_TEST_TMP) / "cli";

fs::path dir(const std::string& name) {
  fs::path d = kRoot / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run(const std::string& args) {
  std::string cmd = std::string(OSCLAB_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

// Value column of the first data row of a bmo report.
double report_value(const fs::path& csv) {
  std::istringstream in(slurp(csv));
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  std::vector<std::string> cells;
  std::stringstream rs(row);
  for (std::string c; std::getline(rs, c, ',');) cells.push_back(c);
  return std::stod(cells.at(3));
}

fs::path cell_field(const fs::path& d, const std::string& name, const std::function<double(int, int)>& fn) {
  auto g = std::make_shared<Grid>(Grid::box(2, 4, 0.25));
  std::vector<double> v(g->cell_count());
  for (std::size_t c = 0; c < v.size(); ++c) {
    auto ij = g->cell_coords(c);
    v[c] = fn(ij[0], ij[1]);
  }
  fs::path p = d / name;
  write_field(p.string(), Field::scalar(g, Placement::Cell, v));
  return p;
}

}  // namespace

TEST_CASE("bmo on constant and checkerboard fields") {
  auto d = dir("bmo");
  auto c = cell_field(d, "const.olf", [](int, int) { return 2.0; });
  auto cb = cell_field(d, "checker.olf", [](int i, int j) { return (i + j) % 2 ? -1.0 : 1.0; });
  REQUIRE(run("bmo " + c.string() + " --out " + (d / "a").string()) == 0);
  CHECK(report_value(d / "a" / "bmo_report.csv") == 0.0);
  REQUIRE(run("bmo " + cb.string() + " --out " + (d / "b").string()) == 0);
  CHECK(report_value(d / "b" / "bmo_report.csv") == 1.0);
  REQUIRE(run("bmo " + cb.string() + " --report json --out " + (d / "c").string()) == 0);
  CHECK(fs::exists(d / "c" / "bmo_report.json"));
  CHECK(slurp(d / "b" / "bmo_report.csv").find('\r') == std::string::npos);
}

TEST_CASE("exit codes") {
  auto d = dir("codes");
  auto cb = cell_field(d, "checker.olf", [](int i, int j) { return (i + j) % 2 ? -1.0 : 1.0; });
  CHECK(run("bmo " + cb.string() + " --q 0.5 --out " + d.string()) == 2);
  CHECK(run("bmo " + cb.string() + " --family triangles --out " + d.string()) == 2);
  CHECK(run("frobnicate") == 2);

  write_text(d / "garbage.olf", "OLF1\nnot json\n");
  CHECK(run("bmo " + (d / "garbage.olf").string() + " --out " + d.string()) == 3);
  CHECK(run("bmo " + (d / "missing.olf").string() + " --out " + d.string()) == 3);

  write_text(d / "typo.json", R"({"resolution": 8, "domains": [{"kind": "square"}], "budgett": 3})");
  CHECK(run("korn --config " + (d / "typo.json").string() + " --out " + d.string()) == 2);

  write_text(d / "compressed.json", R"({"problem": {"resolution": 6, "bc": {"dirichlet": "scale:0.9"}},
                                        "experiment": {"trials": 2}})");
  CHECK(run("uniqueness --config " + (d / "compressed.json").string() + " --out " + d.string()) == 4);
  CHECK(fs::exists(d / "uniqueness_gates.csv"));
  CHECK(!fs::exists(d / "uniqueness_ledger.csv"));
}

TEST_CASE("skew field gives a degenerate korn row") {
  auto d = dir("skew");
  auto g = std::make_shared<Grid>(Grid::box(2, 4, 0.25));
  auto w = Field::sample_vector(g, Placement::Node, [](const Point3& x) {
    Vector v(2);
    v << -x[1], x[0];
    return v;
  });
  write_field((d / "skew.olf").string(), w);
  write_text(d / "k.json", R"({"fields": [")" + (d / "skew.olf").string() + R"("], "modes": ["bmo"]})");
  REQUIRE(run("korn --config " + (d / "k.json").string() + " --out " + d.string()) == 0);
  std::string csv = slurp(d / "korn.csv");
  CHECK(csv.find(",nan,") != std::string::npos);
  CHECK(csv.find("true") != std::string::npos);
}

TEST_CASE("reruns are byte-identical") {
  auto d = dir("rerun");
  write_text(d / "k.json", R"({"resolution": 8, "domains": [{"kind": "lshape"}], "generators": ["hinge", "fourier"],
                             "budget": 30})");
  write_text(d / "u.json", R"({"problem": {"resolution": 6, "bc": {"dirichlet": "scale:1.1"}},
                             "experiment": {"trials": 6, "delta_grid": [0.05]}})");
  for (const char* sub : {"a", "b"}) {
    fs::create_directories(d / sub);
    REQUIRE(run("korn --config " + (d / "k.json").string() + " --out " + (d / sub).string()) == 0);
    REQUIRE(run("uniqueness --config " + (d / "u.json").string() + " --out " + (d / sub).string()) == 0);
  }
  REQUIRE(run("korn --threads 3 --config " + (d / "k.json").string() + " --out " + (d / "c").string()) == 0);
  for (const char* f : {"korn.csv", "korn_trace.csv", "uniqueness_summary.csv", "uniqueness_ledger.csv", "u_e.olf"}) {
    CHECK_MESSAGE(slurp(d / "a" / f) == slurp(d / "b" / f), f);
  }
  CHECK(slurp(d / "a" / "korn.csv") == slurp(d / "c" / "korn.csv"));
  CHECK(slurp(d / "a" / "korn.csv") != "");
}

TEST_CASE("material checks pass for both models") {
  auto d = dir("material");
  write_text(d / "svk.json", R"({"model": "svk", "samples": 20, "taylor_trials": 100})");
  write_text(d / "neo.json", R"({"model": "neo-hookean", "dim": 3, "samples": 20, "taylor_trials": 100})");
  CHECK(run("material --config " + (d / "svk.json").string() + " --out " + d.string()) == 0);
  CHECK(slurp(d / "material.csv").find("false") == std::string::npos);
  CHECK(run("material --config " + (d / "neo.json").string() + " --out " + d.string()) == 0);
  CHECK(slurp(d / "material.csv").find("false") == std::string::npos);
}
