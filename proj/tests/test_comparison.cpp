#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vmlab/comparison.hpp"
#include "vmlab/errors.hpp"

using namespace vmlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Interior angles (at p, x, y) of a hyperbolic triangle with |px| = a,
// |py| = b, |xy| = c from the half-angle form of the law of cosines.
std::array<double, 3> hyperbolic_angles(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  auto angle = [&](double p, double q) {
    return 2.0 * std::asin(std::sqrt(std::sinh(s - p) * std::sinh(s - q) / (std::sinh(p) * std::sinh(q))));
  };
  return {angle(a, b), angle(a, c), angle(b, c)};
}

}  // namespace

TEST_CASE("euclidean 3-4-5 triangle") {
  const auto tri = build_comparison_triangle(plane_model(), 3.0, 4.0, 5.0);
  CHECK(tri.pole_angle == doctest::Approx(kPi / 2).epsilon(1e-10));
  CHECK(tri.angles[0] == doctest::Approx(kPi / 2).epsilon(1e-10));
  CHECK(std::abs(tri.angles[1] - std::acos(3.0 / 5.0)) < 1e-8);
  CHECK(std::abs(tri.angles[2] - std::acos(4.0 / 5.0)) < 1e-8);
  CHECK(std::abs(tri.realized_c - 5.0) < 1e-9);
}

TEST_CASE("collinear and invalid side lengths") {
  for (const auto& m : {plane_model(), sinclair_model(), hyperbolic_model()}) {
    const auto tri = build_comparison_triangle(m, 1.0, 2.5, 1.5);
    CHECK(tri.pole_angle == 0.0);
    CHECK(tri.angles[1] == doctest::Approx(kPi));
    CHECK_THROWS_AS(build_comparison_triangle(m, 1.0, 2.5, 1.4), DegenerateError);
    CHECK_THROWS_AS(build_comparison_triangle(m, 0.0, 2.5, 2.5), PreconditionError);
  }
  CHECK_THROWS_AS(build_comparison_triangle(plane_model(), 1.0, 2.0, 3.1), DoesNotFitError);
  // Past the cut point the antipodal distance drops below a + b.
  CHECK_THROWS_AS(build_comparison_triangle(sinclair_model(), 1.7, 1.7, 3.399), DoesNotFitError);
}

TEST_CASE("sinclair triangle reproduces its sides") {
  const auto m = sinclair_model();
  // The opposite vertex at theta = pi is only about 0.686 away.
  CHECK_THROWS_AS(build_comparison_triangle(m, 1.0, 1.5, 0.8), DoesNotFitError);
  const auto tri = build_comparison_triangle(m, 1.0, 1.5, 0.6);
  CHECK(tri.pole_angle > 0.0);
  CHECK(tri.pole_angle < kPi);
  CHECK(std::abs(distance_value(m, tri.x, tri.y) - 0.6) <= 1e-6);
  CHECK(std::abs(distance_value(m, {0.0, 0.0}, tri.x) - 1.0) <= 1e-12);
  const double sum = tri.angles[0] + tri.angles[1] + tri.angles[2];
  // Positive curvature near the pole: angle sum above pi.
  CHECK(sum > kPi);
}

TEST_CASE("hyperbolic comparison triangles match the law of cosines") {
  const auto m = hyperbolic_model();
  const std::array<std::array<double, 3>, 4> sides{{{1.0, 1.0, 1.0}, {0.3, 2.0, 2.1}, {5.0, 7.0, 11.0}, {20.0, 25.0, 44.0}}};
  for (const auto& s : sides) {
    const auto tri = build_comparison_triangle(m, s[0], s[1], s[2]);
    const auto ref = hyperbolic_angles(s[0], s[1], s[2]);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(tri.angles[k] - ref[k]) < 1e-8);
  }
}

TEST_CASE("distance to the rotated vertex is non-decreasing in theta") {
  for (const auto& name : builtin_names()) {
    const auto m = builtin_model(name);
    for (const auto& ab : {std::array<double, 2>{0.5, 1.2}, std::array<double, 2>{1.7, 1.7},
                           std::array<double, 2>{3.0, 0.4}}) {
      double prev = std::abs(ab[0] - ab[1]);
      for (int i = 1; i <= 24; ++i) {
        const double d = distance_value(m, {ab[0], 0.0}, {ab[1], kPi * i / 24});
        CHECK(d >= prev - 1e-10);
        prev = d;
      }
    }
  }
}

TEST_CASE("dominance precondition") {
  CHECK(check_dominance(plane_model(), hyperbolic_model()).dominated);
  CHECK(check_dominance(paraboloid_model(), plane_model()).dominated);
  CHECK_FALSE(check_dominance(sinclair_model(), hyperbolic_model()).dominated);
  CHECK_FALSE(check_dominance(hyperbolic_model(), plane_model()).dominated);
  GtctOptions o;
  o.trials = 2;
  CHECK_THROWS_AS(gtct_check(sinclair_model(), hyperbolic_model(), o), PreconditionError);
  CHECK_THROWS_AS(gtct_check(hyperbolic_model(), plane_model(), o), PreconditionError);
}

TEST_CASE("identity comparison has zero slack") {
  GtctOptions o;
  o.trials = 15;
  o.seed = 11;
  const auto rep = gtct_check(plane_model(), plane_model(), o);
  CHECK(rep.skipped == 0);
  CHECK(rep.max_abs_slack <= 1e-6);
}

TEST_CASE("plane against hyperbolic") {
  GtctOptions o;
  o.trials = 20;
  o.seed = 5;
  const auto rep = gtct_check(plane_model(), hyperbolic_model(), o);
  CHECK(rep.skipped == 0);
  CHECK(rep.min_slack >= -1e-6);
  for (const auto& tr : rep.trials) {
    const auto ref = hyperbolic_angles(tr.a, tr.b, tr.c);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(tr.angles_mt[k] - ref[k]) < 1e-8);
    // Euclidean angles sum to pi.
    CHECK(tr.angles_m[0] + tr.angles_m[1] + tr.angles_m[2] == doctest::Approx(kPi).epsilon(1e-9));
  }
}

TEST_CASE("paraboloid against the plane") {
  GtctOptions o;
  o.trials = 10;
  o.seed = 2;
  const auto rep = gtct_check(paraboloid_model(), plane_model(), o);
  CHECK(rep.min_slack >= -1e-6);
}

TEST_CASE("csv output is deterministic") {
  GtctOptions o;
  o.trials = 4;
  o.seed = 9;
  std::ostringstream a, b;
  write_gtct_csv(a, gtct_check(plane_model(), hyperbolic_model(), o));
  write_gtct_csv(b, gtct_check(plane_model(), hyperbolic_model(), o));
  CHECK(a.str() == b.str());
  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("trial,a,b,c,", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
}
