#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vmlab/geodesic.hpp"
#include "vmlab/profile.hpp"

namespace vmlab {

// Point reached by the geodesic of length s leaving q at angle phi, traced
// leg by leg with the Clairaut integrals. Far out in a shrinking cusp the
// angular sweep near a turning point grows like 1/nu and theta loses all
// digits; theta_resolved is false then and theta is meaningless.
struct TracedPoint {
  PolarPoint at;
  bool theta_resolved = true;
  double theta_error = 0.0;  // bound on the accumulated theta error
  int turns = 0;
};

TracedPoint trace_geodesic(const ProfileModel& model, PolarPoint q, double phi, double s);

struct RayProbe {
  PolarPoint q;
  double phi = 0.0;
  double horizon = 0.0;
  double epsilon = 0.0;
  bool is_ray = false;
  double worst_deficit = 0.0;  // max over checkpoints of s - d(q, gamma(s))
  // A checkpoint whose theta was unresolved and whose deficit bracket
  // [s - d(q, antipode), s - |t - t_q|] straddles epsilon.
  bool ambiguous = false;
};

double default_ray_epsilon(PolarPoint q);

// Checkpoints at T/8, T/4, T/2 and T. Requires T >= 10 (1 + t_q).
RayProbe is_ray(const ProfileModel& model, PolarPoint q, double phi, double horizon,
                std::optional<double> epsilon = std::nullopt);

enum class RayMassMethod { bisection, sampling };

struct RayMassReport {
  PolarPoint q;
  double mu = 0.0;
  double boundary_plus = 0.0;   // ray arc is [-boundary_minus, boundary_plus]
  double boundary_minus = 0.0;
  double horizon = 0.0;
  RayMassMethod method = RayMassMethod::bisection;
  bool audit_failed = false;  // bisection arc contradicted by the audit samples
  std::size_t probes = 0;
  std::size_t ambiguous = 0;
};

struct RayMassOptions {
  std::optional<double> epsilon;
  double angle_tol = 1e-6;        // bisection bracket width
  std::size_t audit_samples = 8;  // inside and outside the arc each
  std::size_t fallback_samples = 512;
};

// Bisects the edge of the ray arc on each side of the outward meridian.
// Boundaries are reported at the non-ray end of the final bracket so mu is
// an over-estimate by at most 2 angle_tol.
RayMassReport ray_mass(const ProfileModel& model, PolarPoint q, double horizon,
                       const RayMassOptions& opts = {});

std::string to_string(RayMassMethod m);

struct RDelta {
  double R = 0.0;
  double delta = 0.0;
};

struct RDeltaScan {
  std::vector<RayMassReport> reports;  // one per radius, q = (r, 0)
  std::optional<RDelta> result;
  double total_curvature = 0.0;
};

// Throws PreconditionError unless the total curvature exceeds pi.
RDeltaScan find_R_delta(const ProfileModel& model, const std::vector<double>& radii, double horizon,
                        const RayMassOptions& opts = {});

// Outward meridian ray gamma(s) = (t0 + s, theta) from the origin (t0, theta).
struct MeridianRay {
  double t0 = 0.0;
  double theta = 0.0;
  PolarPoint at(double s) const { return {t0 + s, theta}; }
};

struct BusemannValue {
  double value = 0.0;        // F_T(x) = T - d(x, gamma(T))
  double value_2t = 0.0;     // F_2T(x)
  double convergence = 0.0;  // |F_2T - F_T|
};

BusemannValue busemann_value(const ProfileModel& model, const MeridianRay& ray, PolarPoint x,
                             double horizon);

struct AsymptoticDirection {
  double angle = 0.0;     // at q toward gamma(T), from the outward meridian
  double angle_2t = 0.0;  // toward gamma(2T)
  double drift = 0.0;     // |angle - angle_2t|
  bool stable = false;    // drift <= 1e-3
  bool unstable = false;  // drift > 1e-2
};

AsymptoticDirection asymptotic_direction(const ProfileModel& model, const MeridianRay& ray, PolarPoint q,
                                         double horizon);

struct GradientCheck {
  PolarPoint q;
  bool skipped = false;  // asymptotic direction not stable at q
  bool passed = false;
  double grad_t = 0.0, grad_perp = 0.0;  // orthonormal frame (d/dt, (1/f) d/dtheta)
  double norm = 0.0;
  double angle_error = 0.0;
  double direction = 0.0;
};

// Central differences of F_T with physical step h in both coordinate directions.
GradientCheck gradient_alignment_check(const ProfileModel& model, const MeridianRay& ray, PolarPoint q,
                                       double horizon, double h = 1e-4);

struct MainTheoremOptions {
  std::vector<double> scan_radii{2.0, 4.0, 8.0, 16.0};
  std::vector<double> levels{1.0, 2.0, 4.0};
  std::size_t certificate_thetas = 16;
  std::vector<double> certificate_factors{1.25, 1.5, 2.0, 3.0};  // radii as multiples of R
  std::size_t radial_lines = 8;
  std::size_t radial_points = 4;
  std::size_t sphere_points = 64;
  std::size_t sublevel_radii = 24;
  std::size_t sublevel_thetas = 16;
  double growth_tol = 1e-3;
  double sublevel_tol = 1e-6;
  RayMassOptions ray_mass;
};

struct CertificatePoint {
  PolarPoint q;
  double angle = 0.0;  // between the asymptotic direction and the outward meridian
  bool passed = false;
};

struct GrowthSample {
  PolarPoint q;
  double lhs = 0.0;  // F(q) - F(alpha(R))
  double rhs = 0.0;  // (d(p, q) - R) sin delta
  bool passed = false;
};

struct SublevelSample {
  double level = 0.0;
  PolarPoint q;
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
};

struct MainTheoremReport {
  double R = 0.0;
  double delta = 0.0;
  double horizon = 0.0;
  double N_R = 0.0;
  std::vector<PolarPoint> critical_candidates;  // outside B_R
  std::map<double, double> sublevel_bound;
  std::vector<CertificatePoint> certificates;
  std::vector<GrowthSample> growth;
  std::vector<SublevelSample> sublevel;
  RDeltaScan scan;
  std::size_t failures = 0;
  bool passed() const { return failures == 0; }
};

// The Busemann function is that of the meridian ray from the pole along
// theta = 0. Throws PreconditionError when no (R, delta) is found.
MainTheoremReport main_theorem_suite(const ProfileModel& model, double horizon,
                                     const MainTheoremOptions& opts = {});

nlohmann::json to_json(const MainTheoremReport& report);
nlohmann::json to_json(const RayMassReport& report);
void write_ray_scan_csv(std::ostream& out, const RDeltaScan& scan);

}  // namespace vmlab
