#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "vmlab/asymptotics.hpp"
#include "vmlab/errors.hpp"

using namespace vmlab;

namespace {

constexpr double kPi = std::numbers::pi;

double point_gap(const ProfileModel& m, PolarPoint a, PolarPoint b) {
  return std::abs(a.t - b.t) + m.f(0.5 * (a.t + b.t)) * std::abs(wrap_signed(a.theta - b.theta));
}

}  // namespace

TEST_CASE("traced geodesics agree with ODE integration") {
  for (const auto& name : builtin_names()) {
    const auto m = builtin_model(name);
    for (double phi : {0.3, 1.2, kPi / 2, 2.0, -2.9, -0.7}) {
      for (double s : {0.5, 3.0, 7.0}) {
        const PolarPoint q{1.3, 0.4};
        const auto tp = trace_geodesic(m, q, phi, s);
        REQUIRE(tp.theta_resolved);
        // Exponential spreading in the hyperbolic model scales the reference error by f.
        CHECK(point_gap(m, tp.at, exp_map(m, q, phi, s)) < 1e-7 * std::max(1.0, m.f(tp.at.t)));
      }
    }
  }
}

TEST_CASE("traced plane geodesic is a straight line") {
  const auto m = plane_model();
  const double phi = 2.2, s = 9.0;
  const PolarPoint q{2.0, 1.0};
  // Cartesian: e_t = (cos th, sin th), e_th = (-sin th, cos th).
  const double x = q.t * std::cos(q.theta) + s * (std::cos(phi) * std::cos(q.theta) - std::sin(phi) * std::sin(q.theta));
  const double y = q.t * std::sin(q.theta) + s * (std::cos(phi) * std::sin(q.theta) + std::sin(phi) * std::cos(q.theta));
  const auto tp = trace_geodesic(m, q, phi, s);
  CHECK(tp.at.t == doctest::Approx(std::hypot(x, y)).epsilon(1e-11));
  CHECK(std::abs(wrap_signed(tp.at.theta - std::atan2(y, x))) < 1e-11);
}

TEST_CASE("bouncing geodesics in the sinclair cusp") {
  const auto m = sinclair_model();
  // Many turns are skipped in whole periods; compare against the ODE.
  const auto tp = trace_geodesic(m, {1.0, 0.0}, 1.0, 40.0);
  CHECK(tp.turns > 10);
  CHECK(point_gap(m, tp.at, exp_map(m, {1.0, 0.0}, 1.0, 40.0)) < 1e-6);
  // A turning point where f ~ 1e-120 leaves theta without digits.
  const auto far = trace_geodesic(m, {16.0, 0.0}, 0.5, 3.0);
  CHECK_FALSE(far.theta_resolved);
  CHECK(far.at.t < 16.7);
}

TEST_CASE("ray probes") {
  for (const auto& name : builtin_names()) {
    const auto p = is_ray(builtin_model(name), {3.0, 1.0}, 0.0, 40.0);
    CHECK(p.is_ray);
    CHECK(p.worst_deficit <= 1e-6);
  }
  for (double phi : {0.5, 2.0, kPi, -1.0}) CHECK(is_ray(plane_model(), {2.0, 0.0}, phi, 30.0).is_ray);
  const auto back = is_ray(sinclair_model(), {4.0, 0.0}, kPi, 200.0);
  CHECK_FALSE(back.is_ray);
  CHECK(back.worst_deficit > 1.0);
  CHECK_THROWS_AS(is_ray(plane_model(), {2.0, 0.0}, 0.0, 29.0), PreconditionError);
}

TEST_CASE("mass of rays") {
  CHECK(ray_mass(plane_model(), {1.0, 0.3}, 20.0).mu == doctest::Approx(2 * kPi));
  CHECK(ray_mass(hyperbolic_model(), {1.0, 0.0}, 20.0).mu == doctest::Approx(2 * kPi));
  CHECK(ray_mass(sinclair_model(), {0.0, 0.0}, 20.0).mu == doctest::Approx(2 * kPi));
  const auto far = ray_mass(sinclair_model(), {8.0, 0.0}, 200.0);
  CHECK(far.method == RayMassMethod::bisection);
  CHECK_FALSE(far.audit_failed);
  CHECK(far.mu < kPi);
}

TEST_CASE("bisected ray arc agrees with uniform direction sampling") {
  const auto m = paraboloid_model();
  const PolarPoint q{2.0, 0.0};
  const double T = 30.0;
  const auto rep = ray_mass(m, q, T);
  constexpr int n = 64;
  int rays = 0;
  for (int j = 0; j < n; ++j) rays += is_ray(m, q, wrap_signed(2 * kPi * j / n), T).is_ray ? 1 : 0;
  CHECK(std::abs(rep.mu - 2 * kPi * rays / n) <= 2 * (2 * kPi / n));
  CHECK(rep.mu > 0.0);
  CHECK(rep.mu < kPi);
}

TEST_CASE("R and delta") {
  CHECK_THROWS_AS(find_R_delta(plane_model(), {2.0}, 40.0), PreconditionError);
  CHECK_THROWS_AS(find_R_delta(hyperbolic_model(), {2.0}, 40.0), PreconditionError);
  const auto scan = find_R_delta(sinclair_model(), {2.0, 4.0}, 200.0);
  REQUIRE(scan.result.has_value());
  CHECK(scan.result->delta > 0.0);
  for (const auto& r : scan.reports) {
    if (r.q.t >= scan.result->R) CHECK(r.mu <= kPi - 2 * scan.result->delta + 1e-15);
  }
  CHECK(scan.total_curvature == doctest::Approx(2 * kPi).epsilon(1e-2));
}

TEST_CASE("euclidean busemann function") {
  const auto m = plane_model();
  const MeridianRay ray{0.0, 0.0};
  for (double t : {0.2, 0.7, 1.0}) {
    for (int j = 0; j < 8; ++j) {
      const double th = 2 * kPi * j / 8;
      const auto b = busemann_value(m, ray, {t, th}, 1000.0);
      CHECK(std::abs(b.value - t * std::cos(th)) <= 1e-3);
      CHECK(b.value_2t >= b.value - 1e-9);
    }
  }
  CHECK(busemann_value(m, ray, {3.0, 0.0}, 100.0).value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(busemann_value(sinclair_model(), MeridianRay{1.0, 2.0}, {2.5, 2.0}, 50.0).value ==
        doctest::Approx(1.5).epsilon(1e-12));
  const auto s = busemann_value(sinclair_model(), ray, {2.0, kPi / 3}, 200.0);
  CHECK(s.convergence >= 0.0);
  CHECK(s.convergence < 1e-6);
}

TEST_CASE("busemann invariants on the paraboloid") {
  const auto m = paraboloid_model();
  const MeridianRay ray{0.0, 0.0};
  const double T = 60.0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> rt(0.1, 3.0), ra(0.0, 2 * kPi);
  for (int i = 0; i < 12; ++i) {
    const PolarPoint x{rt(rng), ra(rng)}, y{rt(rng), ra(rng)};
    const auto fx = busemann_value(m, ray, x, T), fy = busemann_value(m, ray, y, T);
    CHECK(std::abs(fx.value - fy.value) <= distance_value(m, x, y) + 1e-9);
    CHECK(fx.value_2t >= fx.value - 1e-9);
  }
}

TEST_CASE("additivity along asymptotic rays") {
  const auto m = plane_model();
  const MeridianRay ray{0.0, 0.0};
  const double T = 500.0;
  const PolarPoint q{1.0, 2.0};
  const auto f0 = busemann_value(m, ray, q, T);
  const double phi = asymptotic_direction(m, ray, q, T).angle;
  for (double s : {0.5, 1.0, 2.0}) {
    const auto fs = busemann_value(m, ray, trace_geodesic(m, q, phi, s).at, T);
    CHECK(std::abs(fs.value - s - f0.value) <= 2 * std::max(f0.convergence, fs.convergence) + 1e-9);
  }
}

TEST_CASE("asymptotic directions") {
  const auto m = plane_model();
  const MeridianRay ray{0.0, 0.0};
  const double T = 1000.0;
  // From (0, 1) toward (T, 0): cos phi = -1/|v|, sin phi = -T/|v|.
  const auto a = asymptotic_direction(m, ray, {1.0, kPi / 2}, T);
  CHECK(std::abs(a.angle - std::atan2(-T, -1.0)) < 1e-9);
  CHECK(a.stable);
  CHECK(asymptotic_direction(m, ray, {4.0, 0.0}, T).angle == doctest::Approx(0.0));
  const auto s = asymptotic_direction(sinclair_model(), ray, {3.0, kPi}, 200.0);
  CHECK(s.drift <= 1e-3);
}

TEST_CASE("gradient alignment") {
  const MeridianRay ray{0.0, 0.0};
  for (double th : {0.5, 2.0, 4.0}) {
    const auto g = gradient_alignment_check(plane_model(), ray, {1.0, th}, 1000.0);
    CHECK(g.passed);
    CHECK(std::abs(g.norm - 1.0) < 1e-6);
  }
  const auto on = gradient_alignment_check(plane_model(), ray, {2.0, 0.0}, 1000.0);
  CHECK(on.grad_t == doctest::Approx(1.0).epsilon(1e-6));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> rt(0.2, 3.0), ra(0.0, 2 * kPi);
  int passed = 0, skipped = 0;
  for (int i = 0; i < 10; ++i) {
    const auto g = gradient_alignment_check(sinclair_model(), ray, {rt(rng), ra(rng)}, 200.0);
    skipped += g.skipped;
    passed += g.passed;
  }
  CHECK(passed + skipped == 10);
}

TEST_CASE("main theorem suite") {
  CHECK_THROWS_AS(main_theorem_suite(plane_model(), 200.0), PreconditionError);
  MainTheoremOptions o;
  o.scan_radii = {2.0, 4.0};
  const auto rep = main_theorem_suite(sinclair_model(), 200.0, o);
  CHECK(rep.passed());
  CHECK(rep.delta > 0.0);
  for (const auto& q : rep.critical_candidates) CHECK(q.t <= rep.R);
  CHECK(rep.growth.size() == 32);
  CHECK(rep.sublevel_bound.size() == 3);
  const auto j = to_json(rep);
  CHECK(j.contains("R"));
  CHECK(j.contains("critical_candidates"));
  CHECK(j["passed"].get<bool>());
  std::ostringstream csv;
  write_ray_scan_csv(csv, rep.scan);
  CHECK(csv.str().rfind("t_q,mu,", 0) == 0);
}
