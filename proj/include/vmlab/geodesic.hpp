#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <vector>

#include "vmlab/profile.hpp"

namespace vmlab {

// Geodesic polar coordinates about the pole. The pole is stored as (0, 0).
struct PolarPoint {
  double t = 0.0;
  double theta = 0.0;
};

double wrap_angle(double theta);             // [0, 2 pi)
double wrap_signed(double theta);            // (-pi, pi]
PolarPoint canonical(PolarPoint p);

// Phase state of a unit-speed geodesic. nu = f(t)^2 v is the Clairaut constant.
struct GeodesicState {
  double s = 0.0;
  double t = 0.0;
  double theta = 0.0;
  double u = 0.0;  // dt/ds
  double v = 0.0;  // dtheta/ds
  double nu = 0.0;
};

// Samples along a geodesic. At the pole the theta field of a state holds the
// meridian the path travels along, so the tangent stays recoverable.
// `geodesic` is false for the broken meridian/parallel curves returned when
// the distance bounds already pin the length.
struct GeodesicPath {
  std::vector<GeodesicState> states;
  double length = 0.0;
  bool geodesic = true;
};

inline constexpr double kDefaultTol = 1e-10;

// Radius below which a near-pole pass is treated as a Euclidean chord.
inline constexpr double kPoleFlybyRadius = 1e-6;

// State at q leaving at angle phi from the outward meridian; phi > 0 turns
// toward increasing theta.
GeodesicState launch_state(const ProfileModel& model, PolarPoint q, double phi);

// Integrates the geodesic equations from start for arclength s_end. Accepted
// steps, turning points and the end point are recorded.
GeodesicPath integrate(const ProfileModel& model, const GeodesicState& start, double s_end,
                       double tol = kDefaultTol);

PolarPoint exp_map(const ProfileModel& model, PolarPoint q, double phi, double s,
                   double tol = kDefaultTol);

struct DistanceOptions {
  double tol = 1e-13;                 // relative tolerance on the Clairaut constant
  std::optional<double> upper_bound;  // admissible-curve length known in advance (mesh oracle)
  std::size_t path_samples = 32;      // per monotone leg
};

struct DistanceResult {
  double length = 0.0;
  GeodesicPath path;
  double initial_angle = 0.0;  // at a, from the outward meridian, signed
  // Second minimizer when one exists with length within 1e-8.
  std::optional<GeodesicPath> alternate;
  double lower = 0.0;  // bounds available before solving
  double upper = 0.0;
  std::size_t candidates = 0;
};

// Minimal geodesic between a and b. The boundary-value problem is shot over
// the Clairaut constant; the sweep in theta of each candidate is evaluated
// from the Clairaut integrals rather than by integrating the ODE.
DistanceResult distance(const ProfileModel& model, PolarPoint a, PolarPoint b,
                        const DistanceOptions& opts = {});

double distance_value(const ProfileModel& model, PolarPoint a, PolarPoint b,
                      const DistanceOptions& opts = {});

// Cheap bounds on d(a, b): |t_a - t_b| below, best meridian-parallel-meridian
// curve above.
struct DistanceBounds {
  double lower = 0.0;
  double upper = 0.0;
  double tau = 0.0;  // parallel used by the upper curve
};
DistanceBounds distance_bounds(const ProfileModel& model, PolarPoint a, PolarPoint b);

// Angle in [0, pi] between the initial tangents of two paths leaving q.
double angle_at(const ProfileModel& model, PolarPoint q, const GeodesicPath& p1,
                const GeodesicPath& p2);

// Initial tangent angle of a path measured from the outward meridian at its
// start, signed toward increasing theta. At the pole the meridian direction
// itself is returned.
double initial_direction(const ProfileModel& model, const GeodesicPath& path);

void write_path_csv(std::ostream& out, const GeodesicPath& path);

}  // namespace vmlab
