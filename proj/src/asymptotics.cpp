#include "vmlab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>

#include <boost/math/tools/toms748_solve.hpp>

#include "clairaut.hpp"
#include "vmlab/errors.hpp"
#include "vmlab/parallel.hpp"

namespace vmlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative accuracy assumed for one sweep integral when bounding theta errors.
constexpr double kSweepRelErr = 1e-13;
constexpr double kThetaResolved = 1e-9;

}  // namespace

TracedPoint trace_geodesic(const ProfileModel& model, PolarPoint q, double phi, double s) {
  if (!(s >= 0.0)) throw PreconditionError("geodesic length must be non-negative");
  q = canonical(q);
  TracedPoint out;
  if (q.t == 0.0) {
    out.at = canonical({s, phi});
    return out;
  }
  const double sphi = std::sin(phi), cphi = std::cos(phi);
  if (sphi == 0.0) {
    if (cphi > 0.0) {
      out.at = {q.t + s, q.theta};
    } else if (s <= q.t) {
      out.at = canonical({q.t - s, q.theta});
    } else {
      out.at = canonical({s - q.t, q.theta + kPi});
    }
    return out;
  }

  const ProfileSample ps = model.sample(q.t);
  const double log_nu = ps.log_f + std::log(std::abs(sphi));
  const double sign = sphi > 0.0 ? 1.0 : -1.0;
  std::optional<detail::ClairautBand> made;
  made.emplace(model, log_nu, q.t);
  // A start tangent to its parallel sits on a band edge and the band found
  // from q itself collapses. It is located again from just inside, on the
  // side where f grows.
  int tangent = 0;
  if (std::isfinite(made->hi()) && made->hi() - made->lo() <= 1e-14 * std::max(1.0, made->hi()) &&
      std::abs(ps.dlog_f) > 1e-12) {
    tangent = ps.dlog_f > 0.0 ? 1 : -1;
    made.emplace(model, log_nu, q.t * (1.0 + tangent * 1e-12));
  }
  const detail::ClairautBand& band = *made;
  const double lo = band.lo(), hi = band.hi();

  double theta = 0.0, err = 0.0;
  auto add_sweep = [&](double a, double b, double times = 1.0) {
    const double sw = band.sweep(a, b);
    theta += times * sw;
    err += times * (kSweepRelErr * std::abs(sw) + 1e-16);
  };
  auto finish = [&](double t) {
    out.at = canonical({t, q.theta + sign * std::fmod(theta, kTwoPi)});
    out.theta_error = err;
    out.theta_resolved = err <= kThetaResolved;
    return out;
  };

  if (std::isfinite(hi) && hi - lo <= 1e-14 * std::max(1.0, hi)) {
    // A parallel that is itself a geodesic.
    theta = s * std::exp(-ps.log_f);
    err = kSweepRelErr * theta;
    return finish(q.t);
  }

  double cur = std::clamp(q.t, lo, hi);
  int dir = cphi > 0.0 ? 1 : -1;
  if (tangent != 0) dir = tangent;
  double remaining = s;
  bool cycled = false;
  for (int guard = 0; guard < 64; ++guard) {
    const double target = dir > 0 ? hi : lo;
    auto leg_length = [&](double x) {
      const double a = std::min(cur, x), b = std::max(cur, x);
      return (b - a) + band.excess(a, b);
    };
    const double full = std::isfinite(target) ? leg_length(target) : std::numeric_limits<double>::infinity();
    if (remaining < full) {
      double a, b;
      if (dir > 0) {
        a = cur;
        b = std::min(target, cur + remaining);
      } else {
        a = std::max(target, cur - remaining);
        b = cur;
      }
      auto g = [&](double x) { return leg_length(x) - remaining; };
      double x = dir > 0 ? b : a;
      const double ga = g(a), gb = g(b);
      if (ga * gb < 0.0) {
        std::uintmax_t it = 200;
        const auto r = boost::math::tools::toms748_solve(g, a, b, ga, gb,
                                                         boost::math::tools::eps_tolerance<double>(50), it);
        x = 0.5 * (r.first + r.second);
      } else if (ga == 0.0) {
        x = a;
      }
      add_sweep(std::min(cur, x), std::max(cur, x));
      return finish(x);
    }
    add_sweep(std::min(cur, target), std::max(cur, target));
    remaining -= full;
    cur = target;
    dir = -dir;
    ++out.turns;
    if (!cycled && std::isfinite(hi)) {
      // From an edge the motion is periodic; skip whole edge-to-edge legs.
      cycled = true;
      const double period = (hi - lo) + band.excess(lo, hi);
      const double n = std::floor(remaining / period);
      if (n >= 1.0) {
        add_sweep(lo, hi, n);
        remaining -= n * period;
        out.turns += static_cast<int>(std::min(n, 1e9));
        if (std::fmod(n, 2.0) == 1.0) {
          cur = cur == lo ? hi : lo;
          dir = -dir;
        }
      }
    }
  }
  throw IntegrationError("geodesic trace did not terminate");
}

double default_ray_epsilon(PolarPoint q) { return 1e-4 * (1.0 + q.t); }

RayProbe is_ray(const ProfileModel& model, PolarPoint q, double phi, double horizon,
                std::optional<double> epsilon) {
  q = canonical(q);
  if (!(horizon >= 10.0 * (1.0 + q.t))) throw PreconditionError("ray horizon must be at least 10 (1 + t_q)");
  RayProbe p;
  p.q = q;
  p.phi = phi;
  p.horizon = horizon;
  p.epsilon = epsilon.value_or(default_ray_epsilon(q));
  p.worst_deficit = -std::numeric_limits<double>::infinity();
  for (double frac : {0.125, 0.25, 0.5, 1.0}) {
    const double s = frac * horizon;
    const TracedPoint tp = trace_geodesic(model, q, phi, s);
    double deficit;
    if (tp.theta_resolved) {
      deficit = s - distance_value(model, q, tp.at);
    } else {
      // Any theta is possible; the distance is bracketed by the same and the
      // opposite meridian.
      const double d_min = std::abs(tp.at.t - q.t);
      const double d_max = distance_value(model, q, {tp.at.t, q.theta + kPi});
      if (s - d_max > p.epsilon) {
        deficit = s - d_max;
      } else {
        deficit = s - d_min;
        if (deficit > p.epsilon) p.ambiguous = true;
      }
    }
    p.worst_deficit = std::max(p.worst_deficit, deficit);
  }
  p.is_ray = p.worst_deficit <= p.epsilon;
  return p;
}

std::string to_string(RayMassMethod m) { return m == RayMassMethod::bisection ? "bisection" : "sampling"; }

RayMassReport ray_mass(const ProfileModel& model, PolarPoint q, double horizon, const RayMassOptions& opts) {
  RayMassReport rep;
  rep.q = canonical(q);
  rep.horizon = horizon;
  auto probe = [&](double phi) {
    const RayProbe p = is_ray(model, rep.q, phi, horizon, opts.epsilon);
    ++rep.probes;
    if (p.ambiguous) ++rep.ambiguous;
    return p.is_ray;
  };

  bool consistent = probe(0.0);
  // Returns the (ray, non-ray) ends of the final bracket on one side.
  auto side = [&](double sign) -> std::pair<double, double> {
    if (probe(sign * kPi)) return {kPi, kPi};
    double a = 0.0, b = kPi;
    while (b - a > opts.angle_tol) {
      const double m = 0.5 * (a + b);
      (probe(sign * m) ? a : b) = m;
    }
    return {a, b};
  };
  if (consistent) {
    const auto [in_plus, out_plus] = side(1.0);
    const auto [in_minus, out_minus] = side(-1.0);
    rep.boundary_plus = out_plus;
    rep.boundary_minus = out_minus;
    rep.mu = std::min(kTwoPi, out_plus + out_minus);
    const std::size_t n = opts.audit_samples;
    for (std::size_t k = 1; k <= n && consistent; ++k) {
      const double inside = -in_minus + (in_plus + in_minus) * static_cast<double>(k) / static_cast<double>(n + 1);
      if (in_plus + in_minus > 0.0 && !probe(inside)) consistent = false;
      const double gap = kTwoPi - out_plus - out_minus;
      if (gap > 0.0 && probe(out_plus + gap * static_cast<double>(k) / static_cast<double>(n + 1))) {
        consistent = false;
      }
    }
  }
  if (!consistent) {
    rep.audit_failed = true;
    rep.method = RayMassMethod::sampling;
    const std::size_t n = opts.fallback_samples;
    std::vector<char> ray(n, 0);
    parallel_for(n, [&](std::size_t j) {
      ray[j] = is_ray(model, rep.q, wrap_signed(kTwoPi * static_cast<double>(j) / static_cast<double>(n)),
                      horizon, opts.epsilon).is_ray;
    });
    rep.probes += n;
    const auto count = static_cast<double>(std::count(ray.begin(), ray.end(), 1));
    rep.mu = kTwoPi * count / static_cast<double>(n);
    rep.boundary_plus = rep.boundary_minus = 0.5 * rep.mu;
  }
  return rep;
}

RDeltaScan find_R_delta(const ProfileModel& model, const std::vector<double>& radii, double horizon,
                        const RayMassOptions& opts) {
  RDeltaScan scan;
  const TotalCurvatureReport tc = total_curvature(model);
  scan.total_curvature = tc.c_limit;
  if (!tc.finite || !(tc.c_limit > kPi)) {
    throw PreconditionError("ray-mass lemma needs total curvature > pi (model has " +
                            std::to_string(tc.c_limit) + ")");
  }
  if (radii.empty()) throw PreconditionError("no radii to scan");
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  scan.reports.resize(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    scan.reports[i] = ray_mass(model, {sorted[i], 0.0}, horizon, opts);
  }
  // Smallest R whose tail of the scan stays below pi.
  double tail_max = -1.0;
  std::optional<RDelta> best;
  for (std::size_t i = sorted.size(); i-- > 0;) {
    tail_max = std::max(tail_max, scan.reports[i].mu);
    if (tail_max < kPi) {
      best = RDelta{sorted[i], 0.5 * (kPi - tail_max)};
    } else {
      break;
    }
  }
  scan.result = best;
  return scan;
}

BusemannValue busemann_value(const ProfileModel& model, const MeridianRay& ray, PolarPoint x,
                             double horizon) {
  if (!(horizon > 0.0)) throw PreconditionError("Busemann horizon must be positive");
  BusemannValue b;
  b.value = horizon - distance_value(model, x, ray.at(horizon));
  b.value_2t = 2.0 * horizon - distance_value(model, x, ray.at(2.0 * horizon));
  b.convergence = std::abs(b.value_2t - b.value);
  return b;
}

AsymptoticDirection asymptotic_direction(const ProfileModel& model, const MeridianRay& ray, PolarPoint q,
                                         double horizon) {
  q = canonical(q);
  if (!(horizon > 0.0)) throw PreconditionError("horizon must be positive");
  AsymptoticDirection a;
  a.angle = distance(model, q, ray.at(horizon)).initial_angle;
  a.angle_2t = distance(model, q, ray.at(2.0 * horizon)).initial_angle;
  a.drift = std::abs(wrap_signed(a.angle - a.angle_2t));
  a.stable = a.drift <= 1e-3;
  a.unstable = a.drift > 1e-2;
  return a;
}

GradientCheck gradient_alignment_check(const ProfileModel& model, const MeridianRay& ray, PolarPoint q,
                                       double horizon, double h) {
  q = canonical(q);
  GradientCheck g;
  g.q = q;
  if (!(q.t > h)) throw PreconditionError("finite-difference step reaches the pole");
  const AsymptoticDirection dir = asymptotic_direction(model, ray, q, horizon);
  g.direction = dir.angle;
  if (!dir.stable) {
    g.skipped = true;
    return g;
  }
  auto F = [&](PolarPoint x) { return horizon - distance_value(model, x, ray.at(horizon)); };
  const double dth = h * std::exp(-model.sample(q.t).log_f);
  g.grad_t = (F({q.t + h, q.theta}) - F({q.t - h, q.theta})) / (2.0 * h);
  g.grad_perp = (F({q.t, q.theta + dth}) - F({q.t, q.theta - dth})) / (2.0 * h);
  g.norm = std::hypot(g.grad_t, g.grad_perp);
  g.angle_error = std::abs(wrap_signed(std::atan2(g.grad_perp, g.grad_t) - dir.angle));
  g.passed = std::abs(g.norm - 1.0) <= 5e-2 && g.angle_error <= 5e-2;
  return g;
}

MainTheoremReport main_theorem_suite(const ProfileModel& model, double horizon, const MainTheoremOptions& opts) {
  MainTheoremReport rep;
  rep.horizon = horizon;
  rep.scan = find_R_delta(model, opts.scan_radii, horizon, opts.ray_mass);
  if (!rep.scan.result) throw PreconditionError("no (R, delta) found by the ray-mass scan");
  rep.R = rep.scan.result->R;
  rep.delta = rep.scan.result->delta;
  const double R = rep.R, sd = std::sin(rep.delta);
  const MeridianRay ray{0.0, 0.0};
  auto F = [&](PolarPoint x) { return horizon - distance_value(model, x, ray.at(horizon)); };
  auto theta_k = [](std::size_t k, std::size_t n) { return kTwoPi * static_cast<double>(k) / static_cast<double>(n); };
  double t_far = R;
  for (double c : opts.certificate_factors) t_far = std::max(t_far, c * R);

  // (i) Non-criticality certificate outside B_R.
  const std::size_t nth = opts.certificate_thetas;
  rep.certificates.resize(opts.certificate_factors.size() * nth);
  parallel_for(rep.certificates.size(), [&](std::size_t i) {
    CertificatePoint& c = rep.certificates[i];
    c.q = canonical({opts.certificate_factors[i / nth] * R, theta_k(i % nth, nth)});
    c.angle = std::abs(wrap_signed(asymptotic_direction(model, ray, c.q, horizon).angle));
    c.passed = c.angle <= 0.5 * kPi - rep.delta + 1e-3;
  });
  for (const auto& c : rep.certificates) {
    if (!c.passed) rep.critical_candidates.push_back(c.q);
  }
  for (const auto& q : rep.critical_candidates) {
    if (q.t > R) ++rep.failures;
  }

  // (ii) Linear growth along radial lines beyond R.
  rep.growth.resize(opts.radial_lines * opts.radial_points);
  parallel_for(rep.growth.size(), [&](std::size_t i) {
    GrowthSample& g = rep.growth[i];
    const double th = theta_k(i / opts.radial_points, opts.radial_lines);
    const double t = R + (t_far - R) * static_cast<double>(i % opts.radial_points + 1) /
                             static_cast<double>(opts.radial_points);
    g.q = canonical({t, th});
    g.lhs = F(g.q) - F({R, th});
    g.rhs = (t - R) * sd;
    g.passed = g.lhs >= g.rhs - opts.growth_tol;
  });
  for (const auto& g : rep.growth) rep.failures += g.passed ? 0 : 1;

  // (iii) Sublevel sets lie in the predicted balls.
  std::vector<double> sphere(opts.sphere_points);
  parallel_for(sphere.size(), [&](std::size_t j) { sphere[j] = F({R, theta_k(j, opts.sphere_points)}); });
  rep.N_R = *std::min_element(sphere.begin(), sphere.end());
  const std::size_t nr = opts.sublevel_radii, ns = opts.sublevel_thetas;
  std::vector<PolarPoint> pts(nr * ns);
  std::vector<double> vals(pts.size());
  parallel_for(pts.size(), [&](std::size_t i) {
    pts[i] = canonical({t_far * static_cast<double>(i / ns + 1) / static_cast<double>(nr), theta_k(i % ns, ns)});
    vals[i] = F(pts[i]);
  });
  for (double a : opts.levels) {
    const double bound = (a - rep.N_R) / sd + R;
    rep.sublevel_bound[a] = bound;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (vals[i] > a) continue;
      SublevelSample s{a, pts[i], vals[i], bound, pts[i].t <= bound + opts.sublevel_tol};
      rep.failures += s.passed ? 0 : 1;
      rep.sublevel.push_back(s);
    }
  }
  return rep;
}

namespace {

nlohmann::json point_json(PolarPoint p) { return nlohmann::json::array({p.t, p.theta}); }

}  // namespace

nlohmann::json to_json(const RayMassReport& r) {
  return {{"q", point_json(r.q)},
          {"mu", r.mu},
          {"boundary_angles", {r.boundary_minus, r.boundary_plus}},
          {"horizon", r.horizon},
          {"method", to_string(r.method)},
          {"audit_failed", r.audit_failed},
          {"probes", r.probes},
          {"ambiguous", r.ambiguous}};
}

nlohmann::json to_json(const MainTheoremReport& r) {
  nlohmann::json j;
  j["R"] = r.R;
  j["delta"] = r.delta;
  j["horizon"] = r.horizon;
  j["N_R"] = r.N_R;
  j["passed"] = r.passed();
  j["failures"] = r.failures;
  j["critical_candidates"] = nlohmann::json::array();
  for (const auto& q : r.critical_candidates) j["critical_candidates"].push_back(point_json(q));
  j["sublevel_bound"] = nlohmann::json::object();
  for (const auto& [a, b] : r.sublevel_bound) j["sublevel_bound"][std::to_string(a)] = b;
  j["ray_scan"] = nlohmann::json::array();
  for (const auto& m : r.scan.reports) j["ray_scan"].push_back(to_json(m));
  double worst_cert = 0.0, worst_growth = std::numeric_limits<double>::infinity();
  for (const auto& c : r.certificates) worst_cert = std::max(worst_cert, c.angle);
  for (const auto& g : r.growth) worst_growth = std::min(worst_growth, g.lhs - g.rhs);
  j["max_certificate_angle"] = worst_cert;
  j["min_growth_margin"] = r.growth.empty() ? 0.0 : worst_growth;
  j["sublevel_samples"] = r.sublevel.size();
  return j;
}

void write_ray_scan_csv(std::ostream& out, const RDeltaScan& scan) {
  out << "t_q,mu,boundary_minus,boundary_plus,method,probes\n" << std::setprecision(17);
  for (const auto& r : scan.reports) {
    out << r.q.t << ',' << r.mu << ',' << r.boundary_minus << ',' << r.boundary_plus << ','
        << to_string(r.method) << ',' << r.probes << '\n';
  }
}

}  // namespace vmlab
