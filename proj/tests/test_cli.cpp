#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vmlab/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = vmlab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("vmlab_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("model list and show") {
  const auto list = cli({"model", "list"});
  CHECK(list.code == 0);
  CHECK(list.out == "plane\nparaboloid\nhyperbolic\nsinclair\n");
  const auto show = cli({"model", "show", "--model", "sinclair"});
  CHECK(show.code == 0);
  CHECK(show.out.find("G(0+): 8\n") != std::string::npos);
  CHECK(show.out.find("total curvature: 6.28318530718") != std::string::npos);
  CHECK(show.out.find("von Mangoldt: yes") != std::string::npos);
  CHECK(cli({"model", "show", "--model", "hyperbolic"}).out.find("G(0+): -1\n") != std::string::npos);
}

TEST_CASE("global flags before or after the subcommand") {
  const auto a = cli({"distance", "--model", "plane", "--a", "3,0", "--b", "4,1.5707963267948966"});
  const auto b = cli({"--model", "plane", "distance", "--a", "3,0", "--b", "4,1.5707963267948966"});
  CHECK(a.code == 0);
  CHECK(a.out.rfind("distance: 5\n", 0) == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("usage and model errors exit with 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"distance", "--model", "nope", "--a", "1,0", "--b", "2,0"}).code == 2);
  CHECK(cli({"distance", "--a", "1", "--b", "2,0"}).code == 2);
  CHECK(cli({"distance", "--a", "1,x", "--b", "2,0"}).code == 2);
  CHECK(cli({"distance", "--model", "plane", "--model-file", "m.json", "--a", "1,0", "--b", "2,0"}).code == 2);
  CHECK(cli({"distance", "--model-file", "/nonexistent/model.json", "--a", "1,0", "--b", "2,0"}).code == 2);
  CHECK(cli({"verify", "--suite", "nope"}).code == 2);
  CHECK(cli({"verify"}).code == 2);
  CHECK(cli({"rays", "--model", "sinclair"}).code == 2);
  CHECK(cli({"--tol", "-1", "model", "list"}).code == 2);
  // No (R, delta) on the plane: a precondition of the scan, not a failed check.
  CHECK(cli({"rays", "--model", "plane", "--radii", "2"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("model file") {
  const auto dir = scratch("model");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "m.json") << R"({"kind": "builtin", "builtin": "plane", "t_max": 20})";
    std::ofstream(dir / "bad.json") << R"({"kind": "cone"})";
  }
  const auto r = cli({"model", "show", "--model-file", (dir / "m.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("t_max: 20\n") != std::string::npos);
  CHECK(cli({"model", "show", "--model-file", (dir / "bad.json").string()}).code == 2);
}

TEST_CASE("verify list covers every suite") {
  const auto r = cli({"verify", "--list"});
  CHECK(r.code == 0);
  for (const char* s : {"curvature", "jacobi", "distance", "oracle", "gtct", "busemann", "gradient", "ray-mass",
                        "main-theorem", "cutlocus"}) {
    CHECK(r.out.find(std::string(s) + " ") != std::string::npos);
  }
}

TEST_CASE("verify writes a verdict") {
  const auto dir = scratch("verify");
  const auto r = cli({"verify", "--suite", "jacobi", "--out-dir", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("jacobi: PASS (trials 40000, skips 0, failures 0)\n", 0) == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "verdict.json"));
  REQUIRE(j.size() == 1);
  CHECK(j[0]["passed"].get<bool>());
  CHECK(j[0]["failures"].get<int>() == 0);
}

TEST_CASE("failed verification exits with 1") {
  // Curvature -6/(1+t^2) increases along meridians.
  const auto dir = scratch("fail");
  fs::create_directories(dir);
  nlohmann::json doc{{"kind", "samples"}, {"name", "cubic"}};
  for (int i = 0; i <= 400; ++i) {
    const double t = 0.01 * i;
    doc["samples"].push_back({t, t + t * t * t});
  }
  std::ofstream(dir / "cubic.json") << doc.dump();
  const auto r = cli({"verify", "--suite", "curvature", "--model-file", (dir / "cubic.json").string()});
  CHECK(r.code == 1);
  CHECK(r.out.rfind("curvature: FAIL", 0) == 0);
}

TEST_CASE("cutlocus json") {
  const auto dir = scratch("cut");
  REQUIRE(cli({"cutlocus", "--model", "sinclair", "--z", "0.5,0", "--out-dir", dir.string()}).code == 0);
  const auto j = nlohmann::json::parse(slurp(dir / "cutlocus.json"));
  for (const char* k : {"source", "status", "endpoint_t", "conjugate_arclength", "horizon"}) CHECK(j.contains(k));
  CHECK(j["status"] == "subray");
  CHECK(j["conjugate_arclength"].get<double>() ==
        doctest::Approx(j["endpoint_t"].get<double>() + 0.5).epsilon(1e-14));
  REQUIRE(cli({"cutlocus", "--model", "plane", "--z", "1,0", "--out-dir", dir.string()}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "cutlocus.json"))["status"] == "empty-up-to-horizon");
}

TEST_CASE("identical commands give identical files") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    REQUIRE(cli({"gtct", "--model", "plane", "--comparison", "hyperbolic", "--trials", "5", "--seed", "7",
                 "--out-dir", dir.string()})
                .code == 0);
    REQUIRE(cli({"geodesic", "--model", "sinclair", "--start", "1,0", "--phi", "1", "--length", "3", "--out-dir",
                 dir.string()})
                .code == 0);
  }
  for (const char* f : {"gtct.csv", "geodesic.csv"}) {
    const auto sa = slurp(a / f);
    CHECK_FALSE(sa.empty());
    CHECK(sa == slurp(b / f));
  }
  const auto c = scratch("det_c");
  REQUIRE(cli({"gtct", "--model", "plane", "--trials", "5", "--seed", "8", "--out-dir", c.string()}).code == 0);
  CHECK(slurp(c / "gtct.csv") != slurp(a / "gtct.csv"));
}

TEST_CASE("no files without an output directory") {
  const auto cwd = fs::current_path();
  const auto dir = scratch("none");
  fs::create_directories(dir);
  fs::current_path(dir);
  const auto r = cli({"triangle", "--model", "plane", "--sides", "3,4,5"});
  fs::current_path(cwd);
  CHECK(r.code == 0);
  CHECK(r.out.find("angles (p, x, y): 1.57079632679") != std::string::npos);
  CHECK(fs::is_empty(dir));
}
