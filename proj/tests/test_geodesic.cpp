#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "vmlab/errors.hpp"
#include "vmlab/geodesic.hpp"

using namespace vmlab;

namespace {

constexpr double kPi = std::numbers::pi;

double plane_exact(PolarPoint a, PolarPoint b) {
  return std::sqrt(std::max(0.0, a.t * a.t + b.t * b.t - 2 * a.t * b.t * std::cos(b.theta - a.theta)));
}

// cosh d = cosh a cosh b - sinh a sinh b cos(dtheta), rewritten to avoid
// cancellation for nearby points.
double hyperbolic_exact(PolarPoint a, PolarPoint b) {
  const double dh = std::sinh(0.5 * (a.t - b.t));
  const double s = std::sin(0.5 * wrap_signed(b.theta - a.theta));
  const double x = dh * dh + std::sinh(a.t) * std::sinh(b.t) * s * s;
  return 2.0 * std::asinh(std::sqrt(x));
}

// Euclidean position of a point on the paraboloid z = x^2 + y^2.
std::array<double, 3> paraboloid_point(const ProfileModel& m, PolarPoint p) {
  const double r = m.f(p.t);
  return {r * std::cos(p.theta), r * std::sin(p.theta), r * r};
}

PolarPoint end_point(const GeodesicPath& p) { return {p.states.back().t, p.states.back().theta}; }

}  // namespace

TEST_CASE("angle wrapping") {
  CHECK(wrap_angle(-0.5) == doctest::Approx(2 * kPi - 0.5));
  CHECK(wrap_angle(2 * kPi) == 0.0);
  CHECK(wrap_signed(kPi) == doctest::Approx(kPi));
  CHECK(wrap_signed(-kPi) == doctest::Approx(kPi));
  CHECK(wrap_signed(3 * kPi / 2) == doctest::Approx(-kPi / 2));
  CHECK(canonical({0.0, 1.3}).theta == 0.0);
  CHECK_THROWS_AS(canonical({-1.0, 0.0}), DomainError);
}

TEST_CASE("plane distance matches the law of cosines") {
  const auto m = plane_model();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rt(0.05, 5.0), rth(0.0, 2 * kPi);
  for (int i = 0; i < 40; ++i) {
    const PolarPoint a{rt(rng), rth(rng)}, b{rt(rng), rth(rng)};
    CHECK(distance_value(m, a, b) == doctest::Approx(plane_exact(a, b)).epsilon(1e-11));
  }
}

TEST_CASE("hyperbolic distance matches the closed form") {
  const auto m = hyperbolic_model();
  for (double a : {0.3, 2.0, 12.0}) {
    for (double dth : {1e-6, 0.2, 1.5, 3.0, kPi}) {
      const PolarPoint p{a, 0.4}, q{0.7 * a + 0.1, 0.4 + dth};
      const double d = distance_value(m, p, q);
      CHECK(d == doctest::Approx(hyperbolic_exact(p, q)).epsilon(1e-11));
    }
  }
}

TEST_CASE("distances with the pole") {
  const auto m = sinclair_model();
  CHECK(distance_value(m, {0.0, 0.0}, {1.2, 2.0}) == 1.2);
  CHECK(distance_value(m, {0.7, 1.0}, {0.0, 5.0}) == 0.7);
  const auto r = distance(m, {0.0, 0.0}, {1.2, 2.0});
  CHECK(r.initial_angle == doctest::Approx(2.0));
}

TEST_CASE("same meridian is the radial segment") {
  const auto m = paraboloid_model();
  const auto r = distance(m, {0.5, 1.0}, {2.5, 1.0});
  CHECK(r.length == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r.path.geodesic);
}

TEST_CASE("paraboloid geodesic endpoint agrees with the ODE") {
  const auto m = paraboloid_model();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rt(0.2, 3.0), rth(-3.0, 3.0);
  for (int i = 0; i < 10; ++i) {
    const PolarPoint a{rt(rng), 0.3}, b{rt(rng), 0.3 + rth(rng)};
    const auto r = distance(m, a, b);
    REQUIRE(r.path.geodesic);
    const PolarPoint e = exp_map(m, a, r.initial_angle, r.length, 1e-12);
    CHECK(std::hypot(e.t - b.t, m.f(b.t) * wrap_signed(e.theta - b.theta)) < 1e-7);
    // The embedded chord is a lower bound.
    const auto pa = paraboloid_point(m, a), pb = paraboloid_point(m, b);
    const double chord = std::hypot(pa[0] - pb[0], pa[1] - pb[1], pa[2] - pb[2]);
    CHECK(r.length >= chord - 1e-12);
    CHECK(r.length >= r.lower - 1e-12);
    CHECK(r.length <= r.upper + 1e-12);
  }
}

TEST_CASE("sampled path ends at the target") {
  const auto m = hyperbolic_model();
  const PolarPoint a{1.5, 0.0}, b{2.0, 2.5};
  const auto r = distance(m, a, b);
  const PolarPoint e = end_point(r.path);
  CHECK(e.t == doctest::Approx(b.t).epsilon(1e-10));
  CHECK(wrap_signed(e.theta - b.theta) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(r.path.length == doctest::Approx(r.length).epsilon(1e-10));
  for (std::size_t i = 1; i < r.path.states.size(); ++i) {
    CHECK(r.path.states[i].s > r.path.states[i - 1].s);
  }
}

TEST_CASE("sinclair distance is symmetric and satisfies the triangle inequality") {
  const auto m = sinclair_model();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> rt(0.05, 2.5), rth(0.0, 2 * kPi);
  for (int i = 0; i < 6; ++i) {
    const PolarPoint a{rt(rng), rth(rng)}, b{rt(rng), rth(rng)}, c{rt(rng), rth(rng)};
    const double ab = distance_value(m, a, b), ba = distance_value(m, b, a);
    const double bc = distance_value(m, b, c), ac = distance_value(m, a, c);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
    CHECK(ac <= ab + bc + 1e-9);
    CHECK(ab <= ac + bc + 1e-9);
  }
}

TEST_CASE("sinclair antipodal pairs") {
  const auto m = sinclair_model();
  // Close to the cusp point the path through the pole is unique.
  const auto near = distance(m, {0.3, 0.0}, {0.4, kPi});
  CHECK(near.length == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_FALSE(near.alternate.has_value());
  // Further out two mirror-image minimizers go around the cusp.
  const auto far = distance(m, {1.7, 0.0}, {1.7, kPi});
  CHECK(far.length < 3.4 - 1e-3);
  REQUIRE(far.alternate.has_value());
  CHECK(far.alternate->length == doctest::Approx(far.length).epsilon(1e-9));
  const double d1 = initial_direction(m, far.path), d2 = initial_direction(m, *far.alternate);
  CHECK(d1 == doctest::Approx(-d2).epsilon(1e-9));
}

TEST_CASE("integration conserves the Clairaut constant and speed") {
  const auto m = sinclair_model();
  const auto st = launch_state(m, {1.0, 0.5}, 2.0);
  const auto path = integrate(m, st, 4.0, 1e-11);
  for (const auto& s : path.states) {
    if (s.t <= 0.0) continue;
    const double f = m.f(s.t);
    CHECK(s.nu == doctest::Approx(st.nu));
    CHECK(s.u * s.u + (s.v * f) * (s.v * f) == doctest::Approx(1.0).epsilon(1e-7));
  }
  CHECK(path.length == doctest::Approx(4.0));
}

TEST_CASE("plane exp map is a straight line") {
  const auto m = plane_model();
  const PolarPoint q{1.0, 0.0};
  for (double phi : {0.3, 1.2, 2.5, -2.0}) {
    const PolarPoint e = exp_map(m, q, phi, 1.7, 1e-12);
    const double x = 1.0 + 1.7 * std::cos(phi), y = 1.7 * std::sin(phi);
    CHECK(e.t * std::cos(e.theta) == doctest::Approx(x).epsilon(1e-9));
    CHECK(e.t * std::sin(e.theta) == doctest::Approx(y).epsilon(1e-9));
  }
}

TEST_CASE("exp map through the pole and along near-pole chords") {
  const auto m = hyperbolic_model();
  const PolarPoint e = exp_map(m, {1.0, 0.2}, kPi, 3.0);
  CHECK(e.t == doctest::Approx(2.0));
  CHECK(e.theta == doctest::Approx(0.2 + kPi));
  const PolarPoint g = exp_map(m, {1.0, 0.2}, kPi - 1e-9, 3.0);
  CHECK(g.t == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(std::abs(wrap_signed(g.theta - (0.2 + kPi))) < 1e-8);
}

TEST_CASE("hyperbolic exp map agrees with the closed-form distance") {
  const auto m = hyperbolic_model();
  const PolarPoint q{0.8, 1.0};
  for (double phi : {0.4, 1.6, 2.9}) {
    const PolarPoint e = exp_map(m, q, phi, 1.3, 1e-12);
    CHECK(hyperbolic_exact(q, e) == doctest::Approx(1.3).epsilon(1e-9));
  }
}

TEST_CASE("angle between two paths") {
  const auto m = plane_model();
  const PolarPoint q{1.0, 0.0};
  const auto p1 = distance(m, q, {2.0, 0.0}).path;
  const auto p2 = distance(m, q, {1.0, kPi / 2}).path;
  // Toward (0, 1) from (1, 0) leaves at 135 degrees from the outward meridian.
  CHECK(angle_at(m, q, p1, p2) == doctest::Approx(3 * kPi / 4).epsilon(1e-10));
  const auto far = distance(m, {3.0, 0.0}, {1.0, 0.0}).path;
  CHECK_THROWS_AS(angle_at(m, q, p1, far), MismatchError);
}

TEST_CASE("bounds bracket the distance") {
  const auto m = sinclair_model();
  for (double t : {0.2, 0.9, 2.0}) {
    const PolarPoint a{t, 0.0}, b{1.1, 2.0};
    const auto bd = distance_bounds(m, a, b);
    const double d = distance_value(m, a, b);
    CHECK(bd.lower <= d + 1e-12);
    CHECK(d <= bd.upper + 1e-12);
  }
}

TEST_CASE("path csv") {
  const auto m = plane_model();
  std::ostringstream out;
  write_path_csv(out, distance(m, {1.0, 0.0}, {1.0, 1.0}).path);
  CHECK(out.str().rfind("s,t,theta,u,v,nu\n", 0) == 0);
}

TEST_CASE("launch state preconditions") {
  const auto m = plane_model();
  CHECK_THROWS_AS(integrate(m, launch_state(m, {1.0, 0.0}, 0.5), -1.0), PreconditionError);
  GeodesicState bad = launch_state(m, {1.0, 0.0}, 0.5);
  bad.u = 0.2;
  CHECK_THROWS_AS(integrate(m, bad, 1.0), PreconditionError);
}

TEST_CASE("integrate examples") {
  const auto plane = plane_model();
  GeodesicState out{0.0, 1.0, 0.0, 1.0, 0.0, 0.0};
  auto p = integrate(plane, out, 2.0);
  CHECK(p.states.back().t == doctest::Approx(3.0));
  CHECK(p.states.back().theta == doctest::Approx(0.0));

  const auto tangent = launch_state(plane, {1.0, 0.0}, kPi / 2);
  p = integrate(plane, tangent, 0.3, 1e-12);
  CHECK(p.states.back().t == doctest::Approx(std::sqrt(1.09)).epsilon(1e-10));

  const auto sc = sinclair_model();
  p = integrate(sc, out, 3.0);
  CHECK(p.states.back().t == doctest::Approx(4.0));
  for (const auto& s : p.states) CHECK(s.nu == 0.0);
}

TEST_CASE("exp map examples") {
  for (const auto& m : {plane_model(), paraboloid_model(), hyperbolic_model(), sinclair_model()}) {
    const PolarPoint a = exp_map(m, {2.0, 0.0}, 0.0, 1.0);
    CHECK(a.t == doctest::Approx(3.0));
    const PolarPoint b = exp_map(m, {2.0, 0.0}, kPi, 1.0);
    CHECK(b.t == doctest::Approx(1.0));
    CHECK(b.theta == doctest::Approx(0.0));
  }
  const auto pa = paraboloid_model();
  const auto p = integrate(pa, launch_state(pa, {2.0, 0.0}, kPi / 2), 0.5, 1e-12);
  const auto& e = p.states.back();
  const double f = pa.f(e.t);
  CHECK(f * f * e.v == doctest::Approx(pa.f(2.0)).epsilon(1e-9));
}

TEST_CASE("integration is reversible") {
  const auto m = sinclair_model();
  for (double phi : {0.4, 1.9, 2.8}) {
    const double s = 2.5;
    const auto fwd = integrate(m, launch_state(m, {1.2, 0.3}, phi), s, 1e-12);
    GeodesicState back = fwd.states.back();
    back.u = -back.u;
    back.v = -back.v;
    back.nu = -back.nu;
    back.s = 0.0;
    const auto rev = integrate(m, back, s, 1e-12);
    const auto& e = rev.states.back();
    CHECK(std::hypot(e.t - 1.2, m.f(1.2) * wrap_signed(e.theta - 0.3)) < 1e-6 * (1 + s));
  }
}

TEST_CASE("distance reflection symmetries") {
  const auto m = paraboloid_model();
  for (double dth : {0.4, 1.7, 2.9}) {
    const double d1 = distance_value(m, {0.8, 0.0}, {1.9, dth});
    CHECK(distance_value(m, {0.8, 0.0}, {1.9, -dth}) == doctest::Approx(d1).epsilon(1e-9));
    CHECK(distance_value(m, {1.9, 0.0}, {0.8, dth}) == doctest::Approx(d1).epsilon(1e-9));
  }
}

TEST_CASE("angle_at examples") {
  const auto m = plane_model();
  const PolarPoint q{2.0, 0.0};
  const auto out = distance(m, q, {3.0, 0.0}).path;
  const auto in = distance(m, q, {1.0, 0.0}).path;
  CHECK(angle_at(m, q, out, in) == doctest::Approx(kPi));
  CHECK(angle_at(m, q, out, out) == 0.0);
  // Right angle of the 3-4-5 triangle at (3, 0) with legs to the pole and to (3, 4) in Cartesian terms.
  const PolarPoint r{3.0, 0.0};
  const auto leg1 = distance(m, r, {0.0, 0.0}).path;
  const auto leg2 = distance(m, r, {5.0, std::atan2(4.0, 3.0)}).path;
  CHECK(angle_at(m, r, leg1, leg2) == doctest::Approx(kPi / 2).epsilon(1e-8));
}
