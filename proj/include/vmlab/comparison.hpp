#pragma once

#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "vmlab/geodesic.hpp"
#include "vmlab/profile.hpp"

namespace vmlab {

// Triangle with one vertex at the pole: x = (a, 0), y = (b, pole_angle).
struct ComparisonTriangle {
  double a = 0.0, b = 0.0, c = 0.0;  // d(p,x), d(p,y), d(x,y) requested
  double realized_c = 0.0;           // d(x, y) at the solved pole angle
  double pole_angle = 0.0;           // in [0, pi]
  std::array<double, 3> angles{};    // at p, x, y
  PolarPoint x, y;
  int distance_evaluations = 0;
};

// Solves d((a,0),(b,theta)) = c for theta in [0, pi]. The distance is
// assumed non-decreasing in theta; every evaluated pair is audited and an
// inversion aborts with ModelInconsistencyError.
ComparisonTriangle build_comparison_triangle(const ProfileModel& model, double a, double b, double c);

// Interior angles of the triangle p x y on a surface of revolution, p the pole.
std::array<double, 3> pole_triangle_angles(const ProfileModel& model, PolarPoint x, PolarPoint y);

struct DominanceReport {
  bool dominated = false;         // G_M >= G_Mt on the grid
  bool model_von_mangoldt = false;
  double worst_gap = 0.0;         // min of G_M - G_Mt
  double worst_t = 0.0;
  double t_max = 0.0;
};

DominanceReport check_dominance(const ProfileModel& m, const ProfileModel& mt, std::size_t grid = 1000);

struct GtctTrial {
  std::size_t index = 0;
  double a = 0.0, b = 0.0, c = 0.0;
  std::array<double, 3> angles_m{};   // at p, x, y on M
  std::array<double, 3> angles_mt{};  // on the comparison surface
  std::array<double, 3> slack{};      // angles_m - angles_mt
  bool skipped = false;
  std::string skip_reason;
};

struct GtctOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double t_lo = 0.1;
  double t_hi_fraction = 0.8;  // of min(t_max) of the two models
  std::size_t dominance_grid = 1000;
};

struct GtctReport {
  DominanceReport dominance;
  std::vector<GtctTrial> trials;
  std::size_t skipped = 0;
  double min_slack = 0.0;  // over completed trials and all three vertices
  double max_abs_slack = 0.0;
};

// Random triangles on M with p at the pole, compared against their
// comparison triangles on Mt. Throws PreconditionError when the curvature
// of M does not dominate that of Mt or Mt is not von Mangoldt.
GtctReport gtct_check(const ProfileModel& m, const ProfileModel& mt, const GtctOptions& opts = {});

void write_gtct_csv(std::ostream& out, const GtctReport& report);

}  // namespace vmlab
