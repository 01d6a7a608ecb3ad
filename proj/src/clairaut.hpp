#pragma once

// Clairaut integrals for geodesics with constant nu > 0. A geodesic with
// Clairaut constant nu moves in the band {f >= nu} around its current radius
// and turns wherever f = nu. Between turns
//   dtheta/dt = nu / (f sqrt(f^2 - nu^2)),   ds/dt = f / sqrt(f^2 - nu^2).

#include <cmath>
#include <limits>

#include "vmlab/profile.hpp"

namespace vmlab::detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class ClairautBand {
public:
  // The band of {f >= nu} that contains t_ref; requires f(t_ref) >= nu.
  // rel_tol is the target relative accuracy of sweep and excess.
  ClairautBand(const ProfileModel& model, double log_nu, double t_ref, double rel_tol = 1e-14);

  double log_nu() const { return log_nu_; }
  double nu() const { return nu_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }  // kInf when the band is unbounded

  // Sweep in theta and length excess over a monotone leg a <= b inside the band.
  double sweep(double a, double b) const;
  double excess(double a, double b) const;  // length - (b - a)

  // nu / f and sqrt(1 - (nu / f)^2) at t.
  double ratio(double t) const;
  double cos_angle(double t) const;

private:
  enum class Kind { sweep, excess };
  double integrate(Kind kind, double a, double b) const;
  double integrate_from_lo(Kind kind, double a, double b) const;
  // 1 - (nu/f)^2 and nu/f with cancellation handled near the turning points.
  void local(double t, double& r, double& one_minus_r2) const;
  // d is the distance from t to the nearer turning point (hi when near_hi).
  void local(double t, double d, bool near_hi, double& r, double& one_minus_r2) const;

  const ProfileModel* model_;
  double log_nu_;
  double nu_;
  double lo_ = 0.0;
  double hi_ = kInf;
  double rel_tol_ = 1e-14;
  double log_f_lo_ = 0.0, dlog_lo_ = 0.0;
  double log_f_hi_ = 0.0, dlog_hi_ = 0.0;
};

// Lower and upper edges of {f >= exp(log_nu)} around t_ref.
double band_lower_edge(const ProfileModel& model, double log_nu, double t_ref);
double band_upper_edge(const ProfileModel& model, double log_nu, double t_ref);

}  // namespace vmlab::detail
