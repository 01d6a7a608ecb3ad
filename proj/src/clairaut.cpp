#include "clairaut.hpp"

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "vmlab/errors.hpp"

namespace vmlab::detail {

namespace {

using boost::math::quadrature::gauss_kronrod;

constexpr double kLn2 = std::numbers::ln2;

double gap(const ProfileModel& model, double log_nu, double t) {
  return model.sample(t).log_f - log_nu;
}

double solve_edge(const ProfileModel& model, double log_nu, double a, double b) {
  auto g = [&](double t) { return gap(model, log_nu, t); };
  double ga = g(a), gb = g(b);
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb,
                                                   boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

// Adaptive bisection over single Gauss-Kronrod panels with a global
// absolute tolerance. Boost's own driver halves the tolerance per level, which
// rounding noise near turning points can never satisfy. Panels are refined
// worst-first under a fixed budget.
template <class F>
double gk_integrate(const F& fn, double a, double b, double rel_tol) {
  struct Panel {
    double a, b, value, err;
  };
  auto eval = [&](double x, double y) {
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(fn, x, y, 0, 0.0, &err);
    // Boost reports the error of the panel mapped onto [-1, 1].
    return Panel{x, y, v, err * 0.5 * (y - x)};
  };
  std::vector<Panel> panels{eval(a, b)};
  for (int it = 0; it < 400; ++it) {
    double total = 0.0, err = 0.0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < panels.size(); ++i) {
      total += panels[i].value;
      err += panels[i].err;
      if (panels[i].err > panels[worst].err) worst = i;
    }
    if (!std::isfinite(total) || err <= rel_tol * std::abs(total) + 1e-300) break;
    const Panel p = panels[worst];
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) break;
    panels[worst] = eval(p.a, m);
    panels.push_back(eval(m, p.b));
  }
  double total = 0.0;
  for (const auto& p : panels) total += p.value;
  return total;
}

// acosh(1 + d/lo) for t = lo + d, without forming t/lo.
double xi_of(double lo, double d) {
  const double q = d / lo;
  if (q < 1.0) return std::log1p(q + std::sqrt(q * (2.0 + q)));
  const double t = lo + d;
  return std::log(t) - std::log(lo) + std::log1p(std::sqrt(std::max(0.0, 1.0 - (lo / t) * (lo / t))));
}

// lo (cosh xi - 1) and log(lo sinh xi).
double lift(double lo, double xi) {
  if (xi < 20.0) {
    const double s = std::sinh(0.5 * xi);
    return 2.0 * lo * s * s;
  }
  if (lo >= 1e-290 && xi < 700.0) return lo * std::cosh(xi) - lo;
  return std::exp(std::log(lo) + xi - kLn2) * (1.0 + std::exp(-2.0 * xi)) - lo;
}

double log_sinh_scaled(double lo, double xi) {
  if (xi < 20.0) return std::log(lo) + std::log(std::sinh(xi));
  return std::log(lo) + xi - kLn2 + std::log1p(-std::exp(-2.0 * xi));
}

}  // namespace

double band_lower_edge(const ProfileModel& model, double log_nu, double t_ref) {
  if (gap(model, log_nu, t_ref) <= 0.0) return t_ref;
  double above = t_ref;
  for (int j = 1; j < 32; ++j) {
    const double t = t_ref * (1.0 - j / 32.0);
    if (gap(model, log_nu, t) < 0.0) return solve_edge(model, log_nu, t, above);
    above = t;
  }
  for (;;) {
    const double t = above / 16.0;
    if (t < 1e-305) return t;
    if (gap(model, log_nu, t) < 0.0) return solve_edge(model, log_nu, t, above);
    above = t;
  }
}

double band_upper_edge(const ProfileModel& model, double log_nu, double t_ref) {
  // A zero gap at t_ref is a start tangent to its parallel; the band may
  // still open outward.
  if (gap(model, log_nu, t_ref) < 0.0) return t_ref;
  const double step = std::max(t_ref, 1.0) / 32.0;
  double below = t_ref;
  for (int j = 1; j <= 32; ++j) {
    const double t = t_ref + j * step;
    if (gap(model, log_nu, t) < 0.0) return solve_edge(model, log_nu, below, t);
    below = t;
  }
  for (double w = 2.0 * step * 32.0; w < 1e4; w *= 2.0) {
    const double t = t_ref + w;
    if (gap(model, log_nu, t) < 0.0) return solve_edge(model, log_nu, below, t);
    below = t;
  }
  return kInf;
}

ClairautBand::ClairautBand(const ProfileModel& model, double log_nu, double t_ref, double rel_tol)
    : model_(&model), log_nu_(log_nu), nu_(std::exp(log_nu)), rel_tol_(rel_tol) {
  if (!(t_ref > 0.0)) throw PreconditionError("Clairaut band needs a reference radius off the pole");
  lo_ = band_lower_edge(model, log_nu, t_ref);
  hi_ = band_upper_edge(model, log_nu, t_ref);
  const ProfileSample sl = model.sample(lo_);
  log_f_lo_ = sl.log_f;
  dlog_lo_ = sl.dlog_f;
  if (lo_ > 0.0 && lo_ < t_ref && std::isfinite(log_f_lo_)) {
    // Use the constant of the geodesic that turns exactly at the computed edge.
    log_nu_ = log_f_lo_;
    nu_ = std::exp(log_nu_);
  }
  if (std::isfinite(hi_)) {
    const ProfileSample sh = model.sample(hi_);
    log_f_hi_ = sh.log_f;
    dlog_hi_ = sh.dlog_f;
  }
}

void ClairautBand::local(double t, double d, bool near_hi, double& r, double& one_minus_r2) const {
  const double ref = near_hi ? hi_ : lo_;
  const double log_f_ref = near_hi ? log_f_hi_ : log_f_lo_;
  const double dlog = near_hi ? -dlog_hi_ : dlog_lo_;
  const double f_ref = std::exp(log_f_ref);
  // The computed edge sits within rounding of the true turning point. It is
  // taken as exact, which moves nu by an ulp; keeping the residual gap would
  // put an error of order sqrt(eps) into the integral.
  double g;
  if (d * std::abs(dlog) < 1.0 && f_ref > 1e-290) {
    // f(t) - f(ref) by Gauss-Legendre on f' so that g keeps full relative
    // accuracy as t approaches the turning point.
    static constexpr double x[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                    0.9061798459386640};
    static constexpr double w[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                    0.2369268850561891, 0.2369268850561891};
    const double c = near_hi ? ref - 0.5 * d : ref + 0.5 * d;
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += w[i] * model_->df(c + 0.5 * d * x[i]);
    const double df = near_hi ? -0.5 * d * acc : 0.5 * d * acc;
    g = std::log1p(df / f_ref);
  } else if (nu_ > 1e-290) {
    r = nu_ / model_->f(t);
    one_minus_r2 = (1.0 - r) * (1.0 + r);
    return;
  } else {
    g = model_->sample(t).log_f - log_nu_;
  }
  if (!(g > 0.0)) g = std::max(std::abs(dlog) * d, 1e-300);
  r = std::exp(-g);
  one_minus_r2 = -std::expm1(-2.0 * g);
}

void ClairautBand::local(double t, double& r, double& one_minus_r2) const {
  const bool near_hi = std::isfinite(hi_) && (hi_ - t) < (t - lo_);
  local(t, near_hi ? hi_ - t : t - lo_, near_hi, r, one_minus_r2);
}

double ClairautBand::ratio(double t) const {
  double r, q;
  local(t, r, q);
  return r;
}

double ClairautBand::cos_angle(double t) const {
  if (t <= lo_ || t >= hi_) return 0.0;
  double r, q;
  local(t, r, q);
  return std::sqrt(q);
}

double ClairautBand::integrate_from_lo(Kind kind, double a, double b) const {
  const double xa = xi_of(lo_, a - lo_);
  const double xb = xi_of(lo_, b - lo_);
  if (!(xb > xa)) return 0.0;
  // Logs are only needed when lo sinh(xi) would underflow. Differences of
  // large logs lose digits, so the direct product is used whenever possible.
  const bool tiny = lo_ < 1e-290;
  auto fn = [&](double xi) {
    const double d = lift(lo_, xi);
    const double t = lo_ + d;
    double r, q;
    local(t, d, false, r, q);
    const double sq = std::sqrt(q);
    if (tiny) {
      const double log_j = log_sinh_scaled(lo_, xi);
      if (kind == Kind::sweep) return r * std::exp(log_j - model_->sample(t).log_f) / sq;
      return r * r / (sq * (1.0 + sq)) * std::exp(log_j);
    }
    const double j = lo_ * std::sinh(xi);
    if (kind == Kind::sweep) return r * (j / model_->f(t)) / sq;
    return r * r / (sq * (1.0 + sq)) * j;
  };
  return gk_integrate(fn, xa, xb, rel_tol_);
}

double ClairautBand::integrate(Kind kind, double a, double b) const {
  if (!(b > a)) return 0.0;
  if (!std::isfinite(hi_)) return integrate_from_lo(kind, a, b);
  const double mid = 0.5 * (lo_ + hi_);
  double total = 0.0;
  if (a < mid) total += integrate_from_lo(kind, a, std::min(b, mid));
  if (b > mid) {
    // t = hi - w^2 on the outer half.
    const double wa = std::sqrt(hi_ - std::min(b, hi_));
    const double wb = std::sqrt(hi_ - std::max(a, mid));
    auto fn = [&](double w) {
      const double t = hi_ - w * w;
      double r, q;
      local(t, w * w, true, r, q);
      const double sq = std::sqrt(q);
      if (kind == Kind::sweep) {
        const double log_f = model_->sample(t).log_f;
        return 2.0 * w * r * std::exp(-log_f) / sq;
      }
      return 2.0 * w * r * r / (sq * (1.0 + sq));
    };
    total += gk_integrate(fn, wa, wb, rel_tol_);
  }
  return total;
}

double ClairautBand::sweep(double a, double b) const { return integrate(Kind::sweep, a, b); }

double ClairautBand::excess(double a, double b) const { return integrate(Kind::excess, a, b); }

}  // namespace vmlab::detail
