#include "vmlab/cutlocus.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

#include "vmlab/errors.hpp"
#include "vmlab/ode.hpp"

namespace vmlab {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

std::string to_string(CutStatus status) {
  return status == CutStatus::subray ? "subray" : "empty-up-to-horizon";
}

// Prufer form y = rho sin(phi), y' = rho cos(phi):
//   phi' = cos^2 phi + K sin^2 phi,  (log rho)' = (1 - K) sin phi cos phi.
// Zeros of y are the crossings phi = k pi, and the growth of y never
// overflows the state.
ConjugateResult first_conjugate_through_pole(const ProfileModel& model, double t_z, double horizon) {
  if (!(t_z > 0.0)) throw PreconditionError("conjugate search needs t_z > 0");
  if (!(horizon > t_z)) throw PreconditionError("horizon must exceed t_z");
  const double g0 = eval_curvature(model, 0.0);
  auto K = [&](double s) {
    const double t = std::abs(t_z - s);
    return t <= kCurvaturePoleRadius ? g0 : model.curvature_raw(t);
  };
  // s is carried as the third component since the stepper is autonomous.
  using DP3 = DormandPrince<3>;
  auto rhs3 = [&](const DP3::State& y, DP3::State& dy) {
    const double k = K(y[2]);
    const double c = std::cos(y[0]), sn = std::sin(y[0]);
    dy = {c * c + k * sn * sn, (1.0 - k) * sn * c, 1.0};
  };
  auto scale = [](const DP3::State& a, const DP3::State& b) {
    return DP3::State{1e-12, 1e-10 * (1.0 + std::max(std::abs(a[1]), std::abs(b[1]))), 1e-12};
  };
  DP3 dp(rhs3, scale);
  dp.reset(0.0, DP3::State{0.0, 0.0, 0.0}, 1e-3);

  ConjugateResult out;
  out.horizon = horizon;
  const double half = 0.5 * horizon;
  std::optional<DP3::State> at_half;
  for (double stop : {std::min(t_z, half), std::max(t_z, half), horizon}) {
    while (dp.x() < stop) {
      if (!dp.step(stop)) throw IntegrationError("Jacobi integration step underflow");
      const DP3::State y = dp.y();
      if (y[0] >= kPi) {
        auto g = [&](double s) { return dp.dense(s)[0] - kPi; };
        const double a = dp.x_prev(), b = dp.x();
        double s_star = b;
        const double ga = g(a), gb = g(b);
        if (ga < 0.0 && gb > 0.0) {
          std::uintmax_t it = 100;
          const auto r = boost::math::tools::toms748_solve(
              g, a, b, ga, gb, boost::math::tools::eps_tolerance<double>(50), it);
          s_star = 0.5 * (r.first + r.second);
        }
        if (s_star <= t_z) {
          throw ModelInconsistencyError("conjugate point at s = " + std::to_string(s_star) +
                                        " before the pole (t_z = " + std::to_string(t_z) + ")");
        }
        out.s_star = s_star;
        return out;
      }
    }
    if (stop == half) at_half = dp.y();
  }
  const DP3::State end = dp.y();
  auto log_dy = [](const DP3::State& y) {
    const double c = std::cos(y[0]);
    return c > 0.0 ? y[1] + std::log(c) : -std::numeric_limits<double>::infinity();
  };
  const bool positive = end[0] > 0.0 && end[0] < kPi;
  out.divergence_certified = positive && at_half && std::cos((*at_half)[0]) > 0.0 &&
                             std::cos(end[0]) > 0.0 && log_dy(end) >= log_dy(*at_half);
  return out;
}

CutLocusDescription cut_locus(const ProfileModel& model, PolarPoint z, double horizon) {
  z = canonical(z);
  if (z.t == 0.0) throw PreconditionError("cut locus of the pole is not computed");
  const ConjugateResult c = first_conjugate_through_pole(model, z.t, horizon);
  CutLocusDescription out;
  out.source = z;
  out.horizon = horizon;
  if (c.s_star) {
    out.status = CutStatus::subray;
    out.conjugate_arclength = *c.s_star;
    out.endpoint_t = *c.s_star - z.t;
    out.certified = true;
  } else {
    out.certified = c.divergence_certified;
  }
  return out;
}

CutPointCheck verify_cut_point(const ProfileModel& model, const CutLocusDescription& cut, double w_t,
                               const DistanceOptions& opts) {
  if (cut.status != CutStatus::subray) throw PreconditionError("cut locus has no subray to verify");
  CutPointCheck out;
  out.w_t = w_t;
  out.margin = std::max(1e-3, 10.0 * opts.tol);
  if (std::abs(w_t - cut.endpoint_t) <= out.margin) {
    throw PreconditionError("w lies within the margin of the cut-locus endpoint");
  }
  out.beyond = w_t > cut.endpoint_t;
  const PolarPoint z = cut.source;
  const PolarPoint w{w_t, z.theta + kPi};
  out.through_pole = z.t + w_t;
  const DistanceResult r = distance(model, z, w, opts);
  out.length = r.length;
  if (r.alternate) {
    out.alternate_length = r.alternate->length;
    out.nu_sum = r.path.states.front().nu + r.alternate->states.front().nu;
  }
  if (out.beyond) {
    if (!r.alternate) {
      out.message = "expected two minimizers beyond the endpoint, found one";
    } else if (std::abs(*out.alternate_length - r.length) > 1e-6) {
      out.message = "minimizer lengths differ";
    } else if (r.length > out.through_pole + 1e-9) {
      out.message = "minimizers longer than the path through the pole";
    } else if (std::abs(out.nu_sum) > 1e-8) {
      out.message = "minimizers are not mirror images";
    } else {
      out.passed = true;
    }
  } else {
    if (std::abs(r.length - out.through_pole) > 1e-6) {
      out.message = "shooting distance differs from the path through the pole";
    } else if (r.alternate) {
      out.message = "second minimizer before the endpoint";
    } else {
      out.passed = true;
    }
  }
  return out;
}

}  // namespace vmlab
