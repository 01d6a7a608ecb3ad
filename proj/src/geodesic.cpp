#include "vmlab/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "clairaut.hpp"
#include "vmlab/errors.hpp"
#include "vmlab/ode.hpp"

namespace vmlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(double x) { return x < 0.0 ? -1.0 : 1.0; }

// dtheta/ds for Clairaut constant nu at a radius with the given log f.
double angular_rate(double nu, double log_f) {
  if (nu == 0.0) return 0.0;
  const double v = std::exp(std::log(std::abs(nu)) - 2.0 * log_f);
  return sgn(nu) * std::min(v, 1e300);
}

void push_state(GeodesicPath& path, const GeodesicState& st) {
  if (!path.states.empty() && !(st.s > path.states.back().s)) {
    path.states.back() = st;
    if (path.states.size() == 1) path.states.back().s = 0.0;
    return;
  }
  path.states.push_back(st);
}

// ---------------------------------------------------------------- integrate

GeodesicPath meridian_path(const GeodesicState& start, double s_end) {
  GeodesicPath path;
  const double t0 = start.t;
  const double u0 = start.u < 0.0 ? -1.0 : 1.0;
  const double hit = (u0 < 0.0 && t0 > 0.0) ? t0 : kInf;
  const double flipped = wrap_angle(start.theta + kPi);
  constexpr int n = 16;
  path.states.push_back({0.0, t0, start.theta, u0, 0.0, 0.0});
  for (int i = 1; i <= n; ++i) {
    const double s = s_end * i / n;
    if (hit > path.states.back().s && hit < s) path.states.push_back({hit, 0.0, flipped, 1.0, 0.0, 0.0});
    if (s < hit) {
      path.states.push_back({s, t0 + u0 * s, start.theta, u0, 0.0, 0.0});
    } else {
      path.states.push_back({s, s - t0, flipped, 1.0, 0.0, 0.0});
    }
  }
  path.length = s_end;
  return path;
}

}  // namespace

double wrap_angle(double theta) {
  double r = std::fmod(theta, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double wrap_signed(double theta) {
  double r = wrap_angle(theta);
  if (r > kPi) r -= kTwoPi;
  return r;
}

PolarPoint canonical(PolarPoint p) {
  if (!(p.t >= 0.0)) throw DomainError("radius must be non-negative");
  if (p.t == 0.0) return {0.0, 0.0};
  return {p.t, wrap_angle(p.theta)};
}

GeodesicState launch_state(const ProfileModel& model, PolarPoint q, double phi) {
  if (!(q.t >= 0.0)) throw DomainError("radius must be non-negative");
  if (q.t == 0.0) return {0.0, 0.0, wrap_angle(phi), 1.0, 0.0, 0.0};
  const ProfileSample ps = model.sample(q.t);
  const double sphi = std::sin(phi);
  GeodesicState st;
  st.t = q.t;
  st.theta = wrap_angle(q.theta);
  st.u = std::cos(phi);
  st.nu = sphi == 0.0 ? 0.0 : sgn(sphi) * std::exp(ps.log_f + std::log(std::abs(sphi)));
  st.v = angular_rate(st.nu, ps.log_f);
  return st;
}

GeodesicPath integrate(const ProfileModel& model, const GeodesicState& start, double s_end,
                       double tol) {
  if (!(s_end > 0.0)) throw PreconditionError("integration length must be positive");
  if (!(start.t >= 0.0)) throw PreconditionError("start radius must be non-negative");
  const double nu = start.nu;
  if (start.t > 0.0) {
    const double log_f = model.sample(start.t).log_f;
    const double r = nu == 0.0 ? 0.0 : std::exp(std::log(std::abs(nu)) - log_f);
    if (std::abs(start.u * start.u + r * r - 1.0) > 1e-8) {
      throw PreconditionError("start state is not unit speed");
    }
  }
  if (nu == 0.0 || start.t == 0.0) return meridian_path(start, s_end);

  using DP = DormandPrince<3>;
  using State = DP::State;
  const double log_nu = std::log(std::abs(nu));
  const double sn = sgn(nu);
  auto rhs = [&](const State& y, State& dy) {
    const double ta = std::max(std::abs(y[0]), 1e-300);
    const ProfileSample ps = model.sample(ta);
    const double r = sn * std::exp(log_nu - ps.log_f);
    dy[0] = y[2];
    dy[1] = std::clamp(r * std::exp(-ps.log_f), -1e300, 1e300);
    // Odd extension of f through the pole keeps trial stages with t < 0 smooth.
    dy[2] = r * r * ps.dlog_f * (y[0] < 0.0 ? -1.0 : 1.0);
  };
  auto scale = [&](const State& a, const State& b) {
    const double len = tol * (1.0 + std::max(std::abs(a[0]), std::abs(b[0])));
    const double tmin = std::max(std::min(std::abs(a[0]), std::abs(b[0])), 1e-300);
    // Angular errors are weighted by the metric far out, but near the pole a
    // small displacement turns into a finite angle further along.
    const double inv_f = std::min(std::exp(-model.sample(tmin).log_f), 1.0);
    return State{len, len * inv_f, tol};
  };
  DP dp(rhs, scale);

  auto locate = [&](std::size_t k, double target, double s0, double s1) {
    auto g = [&](double s) { return dp.dense(s)[k] - target; };
    double g0 = g(s0), g1 = g(s1);
    if (g0 == 0.0) return s0;
    if (g1 == 0.0 || g0 * g1 > 0.0) return s1;
    std::uintmax_t it = 100;
    const auto r = boost::math::tools::toms748_solve(g, s0, s1, g0, g1,
                                                     boost::math::tools::eps_tolerance<double>(50), it);
    return 0.5 * (r.first + r.second);
  };
  auto emit = [&](GeodesicPath& p, double s, double t, double theta, double u) {
    const double log_f = t > 0.0 ? model.sample(t).log_f : 0.0;
    push_state(p, {s, t, wrap_angle(theta), u, t > 0.0 ? angular_rate(nu, log_f) : 0.0, nu});
  };

  GeodesicPath path;
  emit(path, 0.0, start.t, start.theta, start.u);
  const double eps = kPoleFlybyRadius;
  const bool flyby = std::abs(nu) < 0.5 * eps;
  const double h0 = std::min(s_end, 1e-2 * std::max(start.t, 1e-3));
  dp.reset(0.0, State{start.t, start.theta, start.u}, h0);
  std::size_t steps = 0;
  while (dp.x() < s_end) {
    if (++steps > 5'000'000) throw IntegrationError("geodesic step budget exhausted");
    // On the way in, halve the distance to radius eps per step so that no
    // step crosses the region where dtheta/ds ~ nu / t^2 blows up.
    double stop = s_end;
    if (flyby && dp.y()[2] < 0.0) stop = std::min(s_end, dp.x() + 0.5 * (dp.y()[0] - eps));
    if (!dp.step(stop)) {
      throw IntegrationError("step size underflow at t = " + std::to_string(dp.y()[0]));
    }
    State y = dp.y();
    const State yp = dp.y_prev();
    const double s0 = dp.x_prev();
    const double s1 = dp.x();

    if (flyby && y[2] < 0.0 && y[0] <= 2.0 * eps) {
      // Inside radius 2 eps the surface is Euclidean to O(eps^2); cross the
      // disk along a straight chord with impact parameter |nu|.
      const double rc = y[0];
      const double b = std::abs(nu);
      const double half = std::sqrt(std::max(0.0, rc * rc - b * b));
      const double in_sweep = std::acos(std::min(1.0, b / rc));
      emit(path, s1, rc, y[1], y[2]);
      if (s1 + 2.0 * half >= s_end) {
        const double sigma = s_end - s1 - half;
        const double psi = std::atan2(sigma, b);
        emit(path, s_end, std::hypot(b, sigma), y[1] + sn * (in_sweep + psi), std::sin(psi));
        break;
      }
      const double s_out = s1 + 2.0 * half;
      const double th_out = y[1] + sn * 2.0 * in_sweep;
      const double u_out = half / rc;
      emit(path, s_out, rc, th_out, u_out);
      dp.reset(s_out, State{rc, th_out, u_out}, 0.1 * rc);
      continue;
    }
    if (y[0] < 0.0) {
      // Landed past the pole; switch to the antipodal chart.
      y = State{-y[0], y[1] + kPi, -y[2]};
      dp.set_state(s1, y);
    }
    if (yp[2] * y[2] < 0.0) {
      const double sc = locate(2, 0.0, s0, s1);
      const State yc = dp.dense(sc);
      if (sc > s0 && sc < s1) emit(path, sc, std::abs(yc[0]), yc[1], 0.0);
    }
    if (std::abs(y[2]) > 0.1) {
      const double r = std::exp(log_nu - model.sample(y[0]).log_f);
      const double u = sgn(y[2]) * std::sqrt(std::max(0.0, 1.0 - r * r));
      if (u != y[2]) {
        y[2] = u;
        dp.set_state(s1, y);
      }
    }
    emit(path, s1, y[0], y[1], y[2]);
  }
  path.length = path.states.back().s;
  return path;
}

PolarPoint exp_map(const ProfileModel& model, PolarPoint q, double phi, double s, double tol) {
  if (!(s >= 0.0)) throw PreconditionError("geodesic length must be non-negative");
  q = canonical(q);
  if (s == 0.0) return q;
  if (q.t == 0.0) return canonical({s, phi});
  const GeodesicPath path = integrate(model, launch_state(model, q, phi), s, tol);
  const GeodesicState& e = path.states.back();
  return canonical({e.t, e.theta});
}

// ------------------------------------------------------------------ bounds

namespace {

struct Canon {
  double t0 = 0.0;
  double t1 = 0.0;
  double D = 0.0;  // |theta difference| in [0, pi]
};

double parallel_curve(const ProfileModel& model, const Canon& c, double tau) {
  double arc = 0.0;
  if (tau > 0.0 && c.D > 0.0) arc = std::exp(model.sample(tau).log_f + std::log(c.D));
  return std::abs(c.t0 - tau) + std::abs(tau - c.t1) + arc;
}

DistanceBounds canon_bounds(const ProfileModel& model, const Canon& c) {
  DistanceBounds out;
  out.lower = std::abs(c.t0 - c.t1);
  out.upper = c.t0 + c.t1;
  out.tau = 0.0;
  if (c.D == 0.0) {
    out.upper = out.lower;
    out.tau = std::min(c.t0, c.t1);
    return out;
  }
  const double top = std::max(c.t0, c.t1) + 1.0;
  constexpr int n = 256;
  std::vector<double> taus;
  taus.reserve(n + 3);
  for (int i = 0; i <= n; ++i) taus.push_back(top * i / n);
  taus.push_back(c.t0);
  taus.push_back(c.t1);
  std::sort(taus.begin(), taus.end());
  std::size_t best = 0;
  double best_val = kInf;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double v = parallel_curve(model, c, taus[i]);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double tau = taus[best];
  // Polish inside each neighbouring cell; the kinks at t0 and t1 are grid points.
  for (int side : {-1, 1}) {
    const long j = static_cast<long>(best) + side;
    if (j < 0 || j >= static_cast<long>(taus.size())) continue;
    const double a = std::min(taus[best], taus[static_cast<std::size_t>(j)]);
    const double b = std::max(taus[best], taus[static_cast<std::size_t>(j)]);
    if (!(b > a)) continue;
    auto fn = [&](double x) { return parallel_curve(model, c, x); };
    const auto r = boost::math::tools::brent_find_minima(fn, a, b, 52);
    if (r.second < best_val) {
      best_val = r.second;
      tau = r.first;
    }
  }
  // Far out in a cusp many parallels cost nothing at double precision. The
  // narrowest one is where a minimizer does its turning, so the broken curve
  // built on it leaves in the right direction.
  if (tau > 0.0) {
    double best_log = model.sample(tau).log_f;
    const double tie = best_val * (1.0 + 4.0 * std::numeric_limits<double>::epsilon());
    for (double x : taus) {
      if (x <= 0.0 || parallel_curve(model, c, x) > tie) continue;
      const double lf = model.sample(x).log_f;
      if (lf < best_log) {
        best_log = lf;
        tau = x;
      }
    }
  }
  if (best_val < out.upper) {
    out.upper = best_val;
    out.tau = tau;
  }
  return out;
}

Canon make_canon(PolarPoint a, PolarPoint b, double& sigma) {
  const double delta = wrap_signed(b.theta - a.theta);
  sigma = delta < 0.0 ? -1.0 : 1.0;
  return {a.t, b.t, std::abs(delta)};
}

// ---------------------------------------------------------------- shooting

struct PathType {
  int e;      // initial radial direction
  int turns;  // turning points before reaching t1
};

constexpr std::array<PathType, 8> kTypes{{{1, 0}, {-1, 0}, {-1, 1}, {1, 1}, {-1, 2}, {1, 2}, {-1, 3}, {1, 3}}};

struct Leg {
  double from;
  double to;
};

// Sweeps and lengths of every path type for one Clairaut constant.
class Shot {
public:
  Shot(const ProfileModel& model, const Canon& c, double log_nu, double rel_tol = 1e-14)
      : c_(c), band_(model, log_nu, c.t0, rel_tol) {
    valid_ = c.t1 >= band_.lo() && c.t1 <= band_.hi();
  }

  bool valid() const { return valid_; }
  const detail::ClairautBand& band() const { return band_; }

  bool applicable(PathType ty) const {
    if (!valid_) return false;
    if (ty.turns == 0) return c_.t1 != c_.t0 && ty.e == (c_.t1 > c_.t0 ? 1 : -1);
    if (ty.e < 0 && ty.turns == 1) return true;
    return std::isfinite(band_.hi());
  }

  double sweep(PathType ty) { return combine(ty, false); }
  double length(PathType ty) { return combine(ty, true); }

  std::vector<Leg> legs(PathType ty) const {
    std::vector<Leg> out;
    if (ty.turns == 0) {
      out.push_back({c_.t0, c_.t1});
      return out;
    }
    double at = ty.e < 0 ? band_.lo() : band_.hi();
    out.push_back({c_.t0, at});
    for (int i = 1; i < ty.turns; ++i) {
      const double next = at == band_.lo() ? band_.hi() : band_.lo();
      out.push_back({at, next});
      at = next;
    }
    out.push_back({at, c_.t1});
    return out;
  }

private:
  enum Piece { A0, A1, B0, B1, Dir, kPieces };

  double piece(Piece p, bool len) {
    auto& slot = len ? len_[p] : sw_[p];
    if (slot) return *slot;
    const double lo = band_.lo(), hi = band_.hi();
    const double a = std::min(c_.t0, c_.t1), b = std::max(c_.t0, c_.t1);
    double lo_t = 0.0, hi_t = 0.0;
    switch (p) {
      case A0: lo_t = lo; hi_t = c_.t0; break;
      case A1: lo_t = lo; hi_t = c_.t1; break;
      case B0: lo_t = c_.t0; hi_t = hi; break;
      case B1: lo_t = c_.t1; hi_t = hi; break;
      default: lo_t = a; hi_t = b; break;
    }
    slot = len ? (hi_t - lo_t) + band_.excess(lo_t, hi_t) : band_.sweep(lo_t, hi_t);
    return *slot;
  }

  double combine(PathType ty, bool len) {
    if (!applicable(ty)) return std::numeric_limits<double>::quiet_NaN();
    if (ty.turns == 0) return piece(Dir, len);
    const double full = ty.turns > 1 ? piece(A0, len) + piece(B0, len) : 0.0;
    const double first = ty.e < 0 ? piece(A0, len) : piece(B0, len);
    // The last leg arrives from lo when the final boundary touched is lo.
    const bool last_from_lo = (ty.e < 0) == (ty.turns % 2 == 1);
    const double last = last_from_lo ? piece(A1, len) : piece(B1, len);
    return first + (ty.turns - 1) * full + last;
  }

  Canon c_;
  detail::ClairautBand band_;
  bool valid_ = false;
  std::array<std::optional<double>, kPieces> sw_{};
  std::array<std::optional<double>, kPieces> len_{};
};

struct Candidate {
  double length = kInf;
  double phi = 0.0;  // initial angle in the canonical frame
  bool pole = false;
  PathType type{1, 0};
  double log_nu = 0.0;
};

std::vector<double> log_x_grid(double log_m, int refine) {
  std::vector<double> g{-690, -460, -300, -200, -140, -100, -80, -65, -55, -47, -41, -36, -1.0, -0.6, -0.3, 0.0};
  for (double lx = -33.0; lx < -1.2; lx += 1.5) g.push_back(lx);
  for (int k = 1; k <= 13; ++k) g.push_back(std::log1p(-std::pow(10.0, -k)));
  std::sort(g.begin(), g.end());
  std::vector<double> out;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i > 0) {
      for (int j = 1; j < refine; ++j) out.push_back(g[i - 1] + (g[i] - g[i - 1]) * j / refine);
    }
    out.push_back(g[i]);
  }
  out.erase(std::remove_if(out.begin(), out.end(), [&](double lx) { return lx + log_m < -700.0; }),
            out.end());
  return out;
}

double min_log_f_between(const ProfileModel& model, double a, double b) {
  double m = std::min(model.sample(a).log_f, model.sample(b).log_f);
  constexpr int n = 64;
  for (int i = 1; i < n; ++i) m = std::min(m, model.sample(a + (b - a) * i / n).log_f);
  return m;
}

constexpr double kScanTol = 1e-9;

std::vector<Candidate> shoot(const ProfileModel& model, const Canon& c, int refine, double tol) {
  const double log_m =
      min_log_f_between(model, std::min(c.t0, c.t1), std::max(c.t0, c.t1));
  const std::vector<double> grid = log_x_grid(log_m, refine);
  std::vector<std::optional<Shot>> shots(grid.size()), fine(grid.size());
  std::vector<std::array<double, kTypes.size()>> miss(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    miss[k].fill(std::numeric_limits<double>::quiet_NaN());
    try {
      // The scan only needs signs; misses close to zero are redone at full accuracy.
      shots[k].emplace(model, c, log_m + grid[k], kScanTol);
      for (std::size_t j = 0; j < kTypes.size(); ++j) {
        double m = shots[k]->sweep(kTypes[j]) - c.D;
        if (std::abs(m) <= 1e3 * kScanTol * (1.0 + c.D)) {
          if (!fine[k]) fine[k].emplace(model, c, log_m + grid[k]);
          m = fine[k]->sweep(kTypes[j]) - c.D;
        }
        // Roots on the edge of the range (a start tangent to its parallel)
        // have no sign change around them.
        if (std::abs(m) <= 1e-13 * (1.0 + c.D)) m = 0.0;
        miss[k][j] = m;
      }
    } catch (const Error&) {
      shots[k].reset();
    }
  }
  std::vector<Candidate> out;
  const double log_f0 = model.sample(c.t0).log_f;
  for (std::size_t j = 0; j < kTypes.size(); ++j) {
    const PathType ty = kTypes[j];
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      const double m0 = miss[k][j], m1 = miss[k + 1][j];
      if (!std::isfinite(m0) || !std::isfinite(m1)) continue;
      if (m0 == 0.0 && k > 0) continue;  // counted as the right end of the previous cell
      if (!(m0 * m1 <= 0.0)) continue;
      double lx;
      if (m0 == 0.0) {
        lx = grid[k];
      } else if (m1 == 0.0) {
        lx = grid[k + 1];
      } else {
        auto fn = [&](double x) {
          Shot s(model, c, log_m + x);
          const double v = s.sweep(ty);
          return std::isfinite(v) ? v - c.D : (x < 0.5 * (grid[k] + grid[k + 1]) ? m0 : m1);
        };
        std::uintmax_t it = 200;
        const int bits = std::clamp(static_cast<int>(-std::log2(tol)) + 4, 20, 53);
        try {
          const auto r = boost::math::tools::toms748_solve(
              fn, grid[k], grid[k + 1], m0, m1, boost::math::tools::eps_tolerance<double>(bits), it);
          lx = 0.5 * (r.first + r.second);
        } catch (const std::exception&) {
          continue;
        }
      }
      Shot s(model, c, log_m + lx);
      if (!s.applicable(ty)) continue;
      const double sw = s.sweep(ty);
      const double len = s.length(ty);
      if (!std::isfinite(len) || !std::isfinite(sw)) continue;
      Candidate cand;
      cand.type = ty;
      cand.log_nu = s.band().log_nu();
      // First-order correction for the residual sweep: d(length)/d(theta) = nu.
      cand.length = len + s.band().nu() * (c.D - sw);
      const double r0 = std::min(1.0, std::exp(cand.log_nu - log_f0));
      cand.phi = std::atan2(r0, ty.e * std::sqrt(std::max(0.0, 1.0 - r0 * r0)));
      out.push_back(cand);
    }
  }
  return out;
}

// ------------------------------------------------------------------- paths

GeodesicPath candidate_path(const ProfileModel& model, const Canon& c, const Candidate& cand,
                            std::size_t samples) {
  GeodesicPath path;
  if (cand.pole) {
    path.states.push_back({0.0, c.t0, 0.0, -1.0, 0.0, 0.0});
    push_state(path, {c.t0, 0.0, c.D, 1.0, 0.0, 0.0});
    push_state(path, {c.t0 + c.t1, c.t1, c.D, 1.0, 0.0, 0.0});
    path.length = path.states.back().s;
    return path;
  }
  Shot shot(model, c, cand.log_nu);
  const auto& band = shot.band();
  const double nu = band.nu();
  const double lo = band.lo();
  auto xi = [&](double t) {
    const double d = std::max(t - lo, 0.0);
    const double q = d / lo;
    return q < 1.0 ? std::log1p(q + std::sqrt(q * (2.0 + q))) : std::acosh(1.0 + q);
  };
  auto state = [&](double s, double t, double theta, double dir) {
    const double log_f = model.sample(t).log_f;
    return GeodesicState{s, t, theta, dir * band.cos_angle(t), angular_rate(nu, log_f), nu};
  };
  double s = 0.0, theta = 0.0;
  const auto legs = shot.legs(cand.type);
  for (std::size_t li = 0; li < legs.size(); ++li) {
    const Leg& leg = legs[li];
    const double dir = leg.to > leg.from ? 1.0 : -1.0;
    if (li == 0) path.states.push_back(state(0.0, c.t0, 0.0, static_cast<double>(cand.type.e)));
    if (leg.to == leg.from) continue;
    const double xa = xi(leg.from), xb = xi(leg.to);
    double prev = leg.from;
    for (std::size_t i = 1; i <= samples; ++i) {
      double t = i == samples ? leg.to : lo * std::cosh(xa + (xb - xa) * static_cast<double>(i) / samples);
      if (dir > 0.0) t = std::min(t, leg.to);
      else t = std::max(t, leg.to);
      const double a = std::min(prev, t), b = std::max(prev, t);
      s += (b - a) + band.excess(a, b);
      theta += band.sweep(a, b);
      push_state(path, state(s, t, theta, dir));
      prev = t;
    }
  }
  path.length = path.states.back().s;
  return path;
}

// Meridian to tau, parallel at tau, meridian to t1. Not a geodesic unless tau
// is 0 with D = pi or D = 0.
GeodesicPath broken_path(const ProfileModel& model, const Canon& c, double tau) {
  GeodesicPath path;
  if (c.D == 0.0) {
    const double u = c.t1 >= c.t0 ? 1.0 : -1.0;
    path.states.push_back({0.0, c.t0, 0.0, u, 0.0, 0.0});
    push_state(path, {std::abs(c.t1 - c.t0), c.t1, 0.0, u, 0.0, 0.0});
    path.length = path.states.back().s;
    return path;
  }
  const double u0 = tau > c.t0 ? 1.0 : (tau < c.t0 ? -1.0 : 0.0);
  const double arc = (tau > 0.0 && c.D > 0.0) ? std::exp(model.sample(tau).log_f + std::log(c.D)) : 0.0;
  const double nu_par = tau > 0.0 ? model.f(tau) : 0.0;
  const double v_par = tau > 0.0 ? angular_rate(1.0, model.sample(tau).log_f) * nu_par : 0.0;
  if (u0 == 0.0) {
    path.states.push_back({0.0, c.t0, 0.0, 0.0, v_par, nu_par});
  } else {
    path.states.push_back({0.0, c.t0, 0.0, u0, 0.0, 0.0});
  }
  double s = std::abs(c.t0 - tau);
  if (tau == 0.0) {
    push_state(path, {s, 0.0, c.D, 1.0, 0.0, 0.0});
  } else {
    push_state(path, {s, tau, 0.0, 0.0, v_par, nu_par});
    s += arc;
    push_state(path, {s, tau, c.D, 0.0, v_par, nu_par});
  }
  s += std::abs(c.t1 - tau);
  push_state(path, {s, c.t1, c.D, c.t1 >= tau ? 1.0 : -1.0, 0.0, 0.0});
  path.length = path.states.back().s;
  path.geodesic = (tau == 0.0 && c.D == kPi) || c.D == 0.0;
  return path;
}

void to_frame(GeodesicPath& path, double theta_a, double sigma) {
  for (auto& st : path.states) {
    st.theta = wrap_angle(theta_a + sigma * st.theta);
    st.v *= sigma;
    st.nu *= sigma;
  }
}

GeodesicPath mirrored(GeodesicPath path) {
  for (auto& st : path.states) {
    st.theta = wrap_angle(-st.theta);
    st.v = -st.v;
    st.nu = -st.nu;
  }
  return path;
}

}  // namespace

DistanceBounds distance_bounds(const ProfileModel& model, PolarPoint a, PolarPoint b) {
  a = canonical(a);
  b = canonical(b);
  if (a.t == 0.0 || b.t == 0.0) {
    const double d = a.t + b.t;
    return {d, d, 0.0};
  }
  double sigma;
  return canon_bounds(model, make_canon(a, b, sigma));
}

DistanceResult distance(const ProfileModel& model, PolarPoint a, PolarPoint b,
                        const DistanceOptions& opts) {
  a = canonical(a);
  b = canonical(b);
  DistanceResult res;
  if (a.t == 0.0 || b.t == 0.0) {
    const double d = a.t + b.t;
    res.length = res.lower = res.upper = d;
    if (a.t == 0.0 && b.t == 0.0) {
      res.path.states.push_back({0.0, 0.0, 0.0, 1.0, 0.0, 0.0});
    } else if (a.t == 0.0) {
      res.path.states.push_back({0.0, 0.0, b.theta, 1.0, 0.0, 0.0});
      res.path.states.push_back({d, b.t, b.theta, 1.0, 0.0, 0.0});
      res.initial_angle = b.theta;
    } else {
      res.path.states.push_back({0.0, a.t, a.theta, -1.0, 0.0, 0.0});
      res.path.states.push_back({d, 0.0, a.theta, -1.0, 0.0, 0.0});
      res.initial_angle = kPi;
    }
    res.path.length = d;
    return res;
  }

  double sigma;
  const Canon c = make_canon(a, b, sigma);
  const DistanceBounds bounds = canon_bounds(model, c);
  res.lower = bounds.lower;
  res.upper = bounds.upper;
  if (opts.upper_bound) res.upper = std::min(res.upper, *opts.upper_bound);

  if (bounds.upper - bounds.lower <= 1e-12 * (1.0 + bounds.lower)) {
    // The bounds already agree to rounding; the broken curve is as good as
    // any geodesic at this precision.
    res.length = bounds.upper;
    res.path = broken_path(model, c, bounds.tau);
    res.initial_angle = initial_direction(model, res.path);
    to_frame(res.path, a.theta, sigma);
    res.initial_angle *= sigma;
    return res;
  }

  std::vector<Candidate> cands;
  const bool antipodal = c.D >= kPi;
  auto collect = [&](int refine) {
    cands = shoot(model, c, refine, opts.tol);
    if (antipodal) {
      Candidate pole;
      pole.pole = true;
      pole.length = c.t0 + c.t1;
      pole.phi = kPi;
      cands.push_back(pole);
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
      return x.length < y.length || (x.length == y.length && x.phi < y.phi);
    });
  };
  collect(1);
  const double slack = 1e-9 * (1.0 + res.upper);
  if (cands.empty() || cands.front().length > res.upper + slack) collect(4);
  if (cands.empty() || cands.front().length > res.upper + slack) {
    throw NoConvergenceError("no minimizing geodesic found between the bounds", res.lower, res.upper);
  }
  res.candidates = cands.size();

  // Among near-equal lengths prefer the smaller initial angle.
  std::size_t best = 0;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (cands[i].length - cands.front().length > 1e-8) break;
    if (std::abs(cands[i].phi) < std::abs(cands[best].phi)) best = i;
  }
  const Candidate& win = cands[best];
  res.length = win.length;
  res.path = candidate_path(model, c, win, opts.path_samples);
  res.initial_angle = sigma * win.phi;

  std::optional<GeodesicPath> alt;
  if (antipodal) {
    // The mirror image is another minimizer unless the path runs through
    // the pole, where it coincides with its mirror.
    if (!win.pole && kPi - std::abs(win.phi) > 1e-6) alt = mirrored(res.path);
  } else {
    for (std::size_t i = 0; i < cands.size(); ++i) {
      if (i == best || cands[i].length - win.length > 1e-8) continue;
      // Roots that leave in the same direction trace the same curve.
      const bool same = std::abs(wrap_signed(cands[i].phi - win.phi)) < 1e-6;
      if (same) continue;
      alt = candidate_path(model, c, cands[i], opts.path_samples);
      break;
    }
  }
  to_frame(res.path, a.theta, sigma);
  if (alt) {
    to_frame(*alt, a.theta, sigma);
    res.alternate = std::move(alt);
  }
  return res;
}

double distance_value(const ProfileModel& model, PolarPoint a, PolarPoint b,
                      const DistanceOptions& opts) {
  return distance(model, a, b, opts).length;
}

double initial_direction(const ProfileModel& model, const GeodesicPath& path) {
  if (path.states.empty()) throw PreconditionError("empty path");
  const GeodesicState& st = path.states.front();
  if (st.t == 0.0) return st.theta;
  double lateral = 0.0;
  if (st.v != 0.0) lateral = sgn(st.v) * std::exp(std::log(std::abs(st.v)) + model.sample(st.t).log_f);
  return std::atan2(lateral, st.u);
}

double angle_at(const ProfileModel& model, PolarPoint q, const GeodesicPath& p1,
                const GeodesicPath& p2) {
  q = canonical(q);
  auto check = [&](const GeodesicPath& p) {
    if (p.states.empty()) throw MismatchError("empty path");
    const GeodesicState& st = p.states.front();
    if (q.t == 0.0) {
      if (st.t > 1e-8) throw MismatchError("path does not start at the pole");
      return;
    }
    const double lateral = std::abs(wrap_signed(st.theta - q.theta)) * model.f(q.t);
    if (std::abs(st.t - q.t) > 1e-8 || lateral > 1e-8) throw MismatchError("path does not start at q");
  };
  check(p1);
  check(p2);
  const double d1 = initial_direction(model, p1);
  const double d2 = initial_direction(model, p2);
  return std::abs(wrap_signed(d1 - d2));
}

void write_path_csv(std::ostream& out, const GeodesicPath& path) {
  out << "s,t,theta,u,v,nu\n";
  out << std::setprecision(17);
  for (const auto& st : path.states) {
    out << st.s << ',' << st.t << ',' << st.theta << ',' << st.u << ',' << st.v << ',' << st.nu
        << '\n';
  }
}

}  // namespace vmlab
