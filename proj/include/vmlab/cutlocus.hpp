#pragma once

#include <optional>
#include <string>

#include "vmlab/geodesic.hpp"
#include "vmlab/profile.hpp"

namespace vmlab {

// Jacobi field along the meridian geodesic from (t_z, .) through the pole,
// y'' + G(|t_z - s|) y = 0 with y(0) = 0, y'(0) = 1.
struct ConjugateResult {
  std::optional<double> s_star;  // first zero of y in (0, horizon]
  double horizon = 0.0;
  // Without a zero: y > 0 and y'(horizon) >= y'(horizon / 2) > 0.
  bool divergence_certified = false;
};

ConjugateResult first_conjugate_through_pole(const ProfileModel& model, double t_z, double horizon);

enum class CutStatus { empty_up_to_horizon, subray };

struct CutLocusDescription {
  PolarPoint source;
  CutStatus status = CutStatus::empty_up_to_horizon;
  double endpoint_t = 0.0;           // on the meridian theta_z + pi
  double conjugate_arclength = 0.0;  // s*
  double horizon = 0.0;
  bool certified = false;  // divergence check passed (empty case)
};

CutLocusDescription cut_locus(const ProfileModel& model, PolarPoint z, double horizon);

std::string to_string(CutStatus status);

// Checks a point w = (w_t, theta_z + pi) on the opposite meridian against the
// subray. Beyond the endpoint two mirror minimizers are expected, before it
// the unique path through the pole.
struct CutPointCheck {
  bool passed = false;
  bool beyond = false;  // w lies past endpoint_t + margin
  double w_t = 0.0;
  double margin = 0.0;
  double length = 0.0;        // shooting distance
  double through_pole = 0.0;  // t_z + w_t
  std::optional<double> alternate_length;
  double nu_sum = 0.0;  // Clairaut constants of the two minimizers, summed
  std::string message;
};

CutPointCheck verify_cut_point(const ProfileModel& model, const CutLocusDescription& cut, double w_t,
                               const DistanceOptions& opts = {});

}  // namespace vmlab
