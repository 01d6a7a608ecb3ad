#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vmlab/errors.hpp"
#include "vmlab/geodesic.hpp"
#include "vmlab/oracle.hpp"

using namespace vmlab;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("mesh size and preconditions") {
  const auto m = plane_model();
  const auto mesh = build_mesh(m, 10.0, 11, 8);
  CHECK(mesh.vertex_count() == 81);
  CHECK(mesh.dt() == doctest::Approx(1.0));
  CHECK_THROWS_AS(build_mesh(m, 10.0, 11, 2), PreconditionError);
  CHECK_THROWS_AS(build_mesh(m, 10.0, 1, 8), PreconditionError);
  for (std::size_t i = 1; i < mesh.n_t(); ++i) {
    for (std::size_t k = 0; k < mesh.moves().size(); ++k) {
      const double w = mesh.weight(i, k);
      if (std::isfinite(w)) CHECK(w > 0.0);
    }
  }
}

TEST_CASE("pole to a vertex follows the meridian") {
  const auto m = plane_model();
  const auto mesh = build_mesh(m, 10.0, 11, 8);
  const auto r = dijkstra_distance(m, mesh, {0.0, 0.0}, {5.0, kPi / 2});
  CHECK(r.length == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(r.b.error == doctest::Approx(0.0));
}

TEST_CASE("graph is connected") {
  const auto m = sinclair_model();
  const auto mesh = build_mesh(m, 4.0, 9, 6);
  const auto dist = dijkstra_field(mesh, mesh.vertex(3, 2));
  for (double d : dist) CHECK(std::isfinite(d));
}

TEST_CASE("plane 3-4-5 within 2 percent") {
  const auto m = plane_model();
  const auto mesh = build_mesh(m, 10.0, 501, 256);
  const auto r = dijkstra_distance(m, mesh, {3.0, 0.0}, {4.0, kPi / 2});
  CHECK(r.a.error == doctest::Approx(0.0));
  CHECK(r.b.error == doctest::Approx(0.0));
  CHECK(std::abs(r.length - 5.0) / 5.0 < 2e-2);
  CHECK(r.length >= 5.0 - 1e-9);
}

TEST_CASE("oracle bounds shooting from above on vertex pairs") {
  for (const auto& m : {paraboloid_model(), sinclair_model(), hyperbolic_model()}) {
    const auto mesh = build_mesh(m, 4.0, 161, 96);
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> ring(4, 100), col(0, 95);
    for (int k = 0; k < 5; ++k) {
      const PolarPoint a = mesh.position(mesh.vertex(ring(rng), col(rng)));
      const PolarPoint b = mesh.position(mesh.vertex(ring(rng), col(rng)));
      const double o = dijkstra_distance(m, mesh, a, b).length;
      const double d = distance_value(m, a, b);
      CHECK(o >= d - 1e-9);
      CHECK(o <= d * 1.05);
    }
  }
}

TEST_CASE("nested refinement never increases distances") {
  const auto m = sinclair_model();
  const auto coarse = build_mesh(m, 3.0, 31, 24);
  const auto fine = build_mesh(m, 3.0, 61, 48);
  REQUIRE(coarse.moves().size() == fine.moves().size());
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<std::size_t> ring(1, 30), col(0, 23);
  for (int k = 0; k < 5; ++k) {
    const std::size_t src = coarse.vertex(ring(rng), col(rng));
    const auto dc = dijkstra_field(coarse, src);
    const PolarPoint ps = coarse.position(src);
    const auto df = dijkstra_field(fine, snap(m, fine, ps).vertex);
    for (std::size_t v = 0; v < coarse.vertex_count(); v += 7) {
      const std::size_t w = snap(m, fine, coarse.position(v)).vertex;
      CHECK(df[w] <= dc[v] + 1e-12);
    }
  }
}

TEST_CASE("paraboloid example pair within one percent") {
  const auto m = paraboloid_model();
  const auto mesh = build_mesh(m, 10.0, 2001, 512);
  const PolarPoint a{1.0, 0.0}, b{2.0, 2 * kPi / 3};
  const auto r = dijkstra_distance(m, mesh, a, b);
  const double d = distance_value(m, a, b);
  CHECK(r.upper() >= d - 1e-9);
  CHECK(std::abs(r.upper() - d) / d < 1e-2);
}
