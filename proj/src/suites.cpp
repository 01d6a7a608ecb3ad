#include "vmlab/suites.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "vmlab/asymptotics.hpp"
#include "vmlab/comparison.hpp"
#include "vmlab/cutlocus.hpp"
#include "vmlab/errors.hpp"
#include "vmlab/oracle.hpp"
#include "vmlab/parallel.hpp"

namespace vmlab {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void expect(SuiteVerdict& v, bool ok, const std::string& message) {
  if (ok) return;
  ++v.failures;
  v.messages.push_back(message);
}

void emit(const SuiteOptions& opts, SuiteVerdict& v, const std::string& file,
          const std::function<void(std::ostream&)>& body) {
  if (opts.out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(opts.out_dir, ec);
  if (ec) throw IoError("cannot create " + opts.out_dir.string() + ": " + ec.message());
  const auto path = opts.out_dir / file;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  if (!out) throw IoError("write failed for " + path.string());
  v.artifacts.push_back(path.string());
}

void emit_json(const SuiteOptions& opts, SuiteVerdict& v, const std::string& file, const nlohmann::json& j) {
  emit(opts, v, file, [&](std::ostream& out) { out << j.dump(2) << '\n'; });
}

bool is_builtin(const ProfileModel& m, std::string_view name) {
  return m.kind() == ProfileKind::closed_form && m.name() == name;
}

// Half-angle form of the hyperbolic law of cosines; acos loses digits near 0 and pi.
std::array<double, 3> hyperbolic_angles(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  auto angle = [&](double p, double q) {
    const double x = std::sinh(s - p) * std::sinh(s - q) / (std::sinh(p) * std::sinh(q));
    return 2.0 * std::asin(std::sqrt(std::clamp(x, 0.0, 1.0)));
  };
  return {angle(a, b), angle(a, c), angle(b, c)};
}

SuiteVerdict curvature_suite(const SuiteOptions& opts) {
  const ProfileModel m = opts.model.value_or(sinclair_model());
  SuiteVerdict v;
  v.models = {m.name()};
  const auto cp = check_von_mangoldt(m, 10000);
  const auto tc = total_curvature(m);
  v.trials = cp.grid.size();
  expect(v, cp.von_mangoldt,
         "curvature increases near t = " + (cp.first_violation ? fmt(*cp.first_violation) : std::string("?")));
  if (tc.finite) {
    expect(v, std::abs(tc.c_limit - tc.c_integral) <= 1e-2,
           "total curvature formulas disagree: " + fmt(tc.c_limit) + " vs " + fmt(tc.c_integral));
  }
  v.metrics = {{"G0", cp.G0},
               {"von_mangoldt", cp.von_mangoldt},
               {"strictly_decreasing", cp.strictly_decreasing},
               {"c_limit", tc.c_limit},
               {"c_integral", tc.c_integral},
               {"finite", tc.finite}};
  emit(opts, v, "curvature.csv", [&](std::ostream& out) {
    out.precision(17);
    out << "t,G\n";
    for (std::size_t i = 0; i < cp.grid.size(); ++i) out << cp.grid[i] << ',' << cp.G[i] << '\n';
  });
  return v;
}

SuiteVerdict jacobi_suite(const SuiteOptions& opts) {
  std::vector<ProfileModel> models;
  if (opts.model) {
    models.push_back(*opts.model);
  } else {
    for (const auto& n : builtin_names()) models.push_back(builtin_model(n));
  }
  SuiteVerdict v;
  constexpr std::size_t n = 10000;
  for (const auto& m : models) {
    v.models.push_back(m.name());
    double worst = 0.0, worst_t = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      const double t = m.t_max() * static_cast<double>(i) / n;
      const double r = jacobi_residual(m, t);
      if (!(r <= worst)) {
        worst = r;
        worst_t = t;
      }
    }
    v.trials += n;
    expect(v, worst <= 1e-9, m.name() + ": residual " + fmt(worst) + " at t = " + fmt(worst_t));
    v.metrics[m.name()] = {{"worst_residual", worst}, {"worst_t", worst_t}};
  }
  return v;
}

SuiteVerdict distance_suite(const SuiteOptions& opts) {
  const ProfileModel m = opts.model.value_or(plane_model());
  SuiteVerdict v;
  v.models = {m.name()};
  const double t_hi = std::min(10.0, 0.5 * m.t_max());
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> rt(0.0, t_hi), ra(0.0, 2 * kPi);
  auto draw = [&] { return PolarPoint{rt(rng), ra(rng)}; };

  double worst_cos = 0.0;
  if (is_builtin(m, "plane")) {
    std::vector<std::array<PolarPoint, 2>> pairs(100);
    for (auto& p : pairs) p = {draw(), draw()};
    std::vector<double> err(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
      const auto [a, b] = pairs[i];
      const double ref = std::sqrt(std::max(0.0, a.t * a.t + b.t * b.t - 2 * a.t * b.t * std::cos(a.theta - b.theta)));
      err[i] = std::abs(distance_value(m, a, b, opts.distance) - ref);
    }, opts.threads);
    for (std::size_t i = 0; i < err.size(); ++i) {
      expect(v, err[i] <= 1e-8, "law of cosines pair " + std::to_string(i) + " off by " + fmt(err[i]));
      worst_cos = std::max(worst_cos, err[i]);
    }
    v.trials += pairs.size();
    v.metrics["law_of_cosines_max_error"] = worst_cos;
  }

  std::vector<std::array<PolarPoint, 3>> triples(200);
  for (auto& t : triples) t = {draw(), draw(), draw()};
  struct Row { double xy, yx, yz, xz; };
  std::vector<Row> rows(triples.size());
  parallel_for(triples.size(), [&](std::size_t i) {
    const auto [x, y, z] = triples[i];
    rows[i] = {distance_value(m, x, y, opts.distance), distance_value(m, y, x, opts.distance),
               distance_value(m, y, z, opts.distance), distance_value(m, x, z, opts.distance)};
  }, opts.threads);
  double worst_sym = 0.0, worst_tri = -INFINITY;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const double sym = std::abs(r.xy - r.yx), tri = r.xz - r.xy - r.yz;
    expect(v, sym <= 1e-6, "asymmetric triple " + std::to_string(i) + ": " + fmt(sym));
    expect(v, tri <= 1e-6, "triangle inequality violated on triple " + std::to_string(i) + ": " + fmt(tri));
    worst_sym = std::max(worst_sym, sym);
    worst_tri = std::max(worst_tri, tri);
  }
  v.trials += triples.size();
  v.metrics["symmetry_max_error"] = worst_sym;
  v.metrics["triangle_max_excess"] = worst_tri;
  emit(opts, v, "distance_triples.csv", [&](std::ostream& out) {
    out.precision(17);
    out << "x_t,x_theta,y_t,y_theta,z_t,z_theta,d_xy,d_yx,d_yz,d_xz\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& [x, y, z] = triples[i];
      out << x.t << ',' << x.theta << ',' << y.t << ',' << y.theta << ',' << z.t << ',' << z.theta << ','
          << rows[i].xy << ',' << rows[i].yx << ',' << rows[i].yz << ',' << rows[i].xz << '\n';
    }
  });
  return v;
}

SuiteVerdict oracle_suite(const SuiteOptions& opts) {
  const ProfileModel m = opts.model.value_or(paraboloid_model());
  SuiteVerdict v;
  v.models = {m.name()};
  constexpr std::size_t n_t = 2001, n_theta = 512, pairs = 20;
  const auto mesh = build_mesh(m, std::min(10.0, m.t_max()), n_t, n_theta);
  std::mt19937_64 rng(opts.seed);
  std::uniform_int_distribution<std::size_t> ring(1, n_t - 1), col(0, n_theta - 1);
  struct Row { PolarPoint a, b; double shooting, oracle; };
  std::vector<Row> rows;
  while (rows.size() < pairs) {
    const auto va = mesh.vertex(ring(rng), col(rng)), vb = mesh.vertex(ring(rng), col(rng));
    if (va == vb) continue;
    rows.push_back({mesh.position(va), mesh.position(vb), 0.0, 0.0});
  }
  parallel_for(rows.size(), [&](std::size_t i) {
    rows[i].shooting = distance_value(m, rows[i].a, rows[i].b, opts.distance);
    rows[i].oracle = dijkstra_distance(m, mesh, rows[i].a, rows[i].b).upper();
  }, opts.threads);
  double worst_gap = 0.0, min_excess = INFINITY;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double gap = (rows[i].oracle - rows[i].shooting) / rows[i].shooting;
    const double excess = rows[i].oracle - rows[i].shooting;
    expect(v, gap <= 1e-2, "pair " + std::to_string(i) + " relative gap " + fmt(gap));
    expect(v, excess >= -1e-9, "pair " + std::to_string(i) + " oracle below shooting by " + fmt(-excess));
    worst_gap = std::max(worst_gap, gap);
    min_excess = std::min(min_excess, excess);
  }
  v.trials = rows.size();
  v.metrics = {{"mesh", {n_t - 1, n_theta}}, {"worst_relative_gap", worst_gap}, {"min_excess", min_excess}};
  emit(opts, v, "oracle.csv", [&](std::ostream& out) {
    out.precision(17);
    out << "a_t,a_theta,b_t,b_theta,shooting,oracle\n";
    for (const auto& r : rows) {
      out << r.a.t << ',' << r.a.theta << ',' << r.b.t << ',' << r.b.theta << ',' << r.shooting << ','
          << r.oracle << '\n';
    }
  });
  return v;
}

SuiteVerdict gtct_suite(const SuiteOptions& opts) {
  const ProfileModel m = opts.model.value_or(plane_model());
  const ProfileModel mt = opts.comparison.value_or(hyperbolic_model());
  SuiteVerdict v;
  v.models = {m.name(), mt.name()};
  GtctOptions go;
  go.seed = opts.seed;
  const auto rep = gtct_check(m, mt, go);
  const auto id = gtct_check(mt, mt, go);
  const bool closed_form = is_builtin(mt, "hyperbolic");
  double worst_cf = 0.0;
  for (const auto& tr : rep.trials) {
    if (tr.skipped) continue;
    for (int k = 0; k < 3; ++k) {
      expect(v, tr.slack[k] >= -1e-6,
             "trial " + std::to_string(tr.index) + " vertex " + std::to_string(k) + " slack " + fmt(tr.slack[k]));
    }
    if (closed_form) {
      const auto ref = hyperbolic_angles(tr.a, tr.b, tr.c);
      for (int k = 0; k < 3; ++k) worst_cf = std::max(worst_cf, std::abs(tr.angles_mt[k] - ref[k]));
    }
  }
  if (closed_form) expect(v, worst_cf <= 1e-8, "comparison angles off the closed form by " + fmt(worst_cf));
  expect(v, id.max_abs_slack <= 1e-6, "identity run slack " + fmt(id.max_abs_slack));
  v.trials = rep.trials.size() + id.trials.size();
  v.skips = rep.skipped + id.skipped;
  v.metrics = {{"min_slack", rep.min_slack}, {"identity_max_abs_slack", id.max_abs_slack}};
  if (closed_form) v.metrics["closed_form_max_error"] = worst_cf;
  emit(opts, v, "gtct.csv", [&](std::ostream& out) { write_gtct_csv(out, rep); });
  emit(opts, v, "gtct_identity.csv", [&](std::ostream& out) { write_gtct_csv(out, id); });
  return v;
}

SuiteVerdict busemann_suite(const SuiteOptions& opts) {
  const ProfileModel m = opts.model.value_or(plane_model());
  const double T = opts.horizon.value_or(1000.0);
  const MeridianRay ray{0.0, 0.0};
  SuiteVerdict v;
  v.models = {m.name()};
  const bool euclid = is_builtin(m, "plane");

  std::vector<PolarPoint> grid;
  for (int i = 1; i <= 10; ++i) {
    for (int j = 0; j < 16; ++j) grid.push_back({0.1 * i, 2 * kPi * j / 16});
  }
  std::vector<BusemannValue> fg(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { fg[i] = busemann_value(m, ray, grid[i], T); }, opts.threads);
  double worst_cf = 0.0, worst_mono = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double drop = fg[i].value - fg[i].value_2t;
    expect(v, drop <= 1e-9, "F_2T below F_T at grid point " + std::to_string(i) + " by " + fmt(drop));
    worst_mono = std::max(worst_mono, drop);
    if (euclid) {
      const double err = std::abs(fg[i].value - grid[i].t * std::cos(grid[i].theta));
      expect(v, err <= 1e-3, "grid point " + std::to_string(i) + " off t cos(theta) by " + fmt(err));
      worst_cf = std::max(worst_cf, err);
    }
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> rt(0.0, 2.0), ra(0.0, 2 * kPi);
  std::vector<std::array<PolarPoint, 2>> pairs(200);
  for (auto& p : pairs) p = {PolarPoint{rt(rng), ra(rng)}, PolarPoint{rt(rng), ra(rng)}};
  std::vector<double> lip(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto [x, y] = pairs[i];
    lip[i] = std::abs(busemann_value(m, ray, x, T).value - busemann_value(m, ray, y, T).value) -
             distance_value(m, x, y, opts.distance);
  }, opts.threads);
  double worst_lip = -INFINITY;
  for (std::size_t i = 0; i < lip.size(); ++i) {
    expect(v, lip[i] <= 1e-9, "Lipschitz bound exceeded on pair " + std::to_string(i) + " by " + fmt(lip[i]));
    worst_lip = std::max(worst_lip, lip[i]);
  }

  // Additivity along the asymptotic ray from points on the unit circle.
  constexpr std::array<double, 3> steps{0.5, 1.0, 2.0};
  struct Add { bool skipped = false; double excess = -INFINITY; };
  std::vector<Add> add(16);
  parallel_for(add.size(), [&](std::size_t j) {
    const PolarPoint q{1.0, 2 * kPi * j / 16};
    const auto dir = asymptotic_direction(m, ray, q, T);
    if (dir.unstable) {
      add[j].skipped = true;
      return;
    }
    const auto f0 = busemann_value(m, ray, q, T);
    for (double s : steps) {
      const auto tp = trace_geodesic(m, q, dir.angle, s);
      if (!tp.theta_resolved) {
        add[j].skipped = true;
        return;
      }
      const auto fs = busemann_value(m, ray, tp.at, T);
      const double tol = 2 * std::max(f0.convergence, fs.convergence) + 1e-9;
      add[j].excess = std::max(add[j].excess, std::abs(fs.value - s - f0.value) - tol);
    }
  }, opts.threads);
  double worst_add = -INFINITY;
  for (std::size_t j = 0; j < add.size(); ++j) {
    if (add[j].skipped) {
      ++v.skips;
      continue;
    }
    expect(v, add[j].excess <= 0.0, "additivity fails from direction " + std::to_string(j));
    worst_add = std::max(worst_add, add[j].excess);
  }

  v.trials = grid.size() + pairs.size() + add.size() * steps.size();
  v.metrics = {{"horizon", T},
               {"monotonicity_max_drop", worst_mono},
               {"lipschitz_max_excess", worst_lip},
               {"additivity_max_excess", worst_add}};
  if (euclid) v.metrics["closed_form_max_error"] = worst_cf;
  emit(opts, v, "busemann_grid.csv", [&](std::ostream& out) {
    out.precision(17);
    out << "t,theta,F_T,F_2T,convergence\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out << grid[i].t << ',' << grid[i].theta << ',' << fg[i].value << ',' << fg[i].value_2t << ','
          << fg[i].convergence << '\n';
    }
  });
  return v;
}

SuiteVerdict gradient_suite(const SuiteOptions& opts) {
  const ProfileModel m = opts.model.value_or(sinclair_model());
  const double T = opts.horizon.value_or(200.0);
  const MeridianRay ray{0.0, 0.0};
  SuiteVerdict v;
  v.models = {m.name()};
  constexpr std::size_t n = 20, need = 18;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> rt(0.2, 3.0), ra(0.0, 2 * kPi);
  std::vector<PolarPoint> pts(n);
  for (auto& p : pts) p = {rt(rng), ra(rng)};
  std::vector<GradientCheck> checks(n);
  parallel_for(n, [&](std::size_t i) { checks[i] = gradient_alignment_check(m, ray, pts[i], T); }, opts.threads);
  std::size_t passed = 0;
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = checks[i];
    if (g.skipped) {
      ++v.skips;
    } else if (g.passed) {
      ++passed;
    } else {
      expect(v, false, "point " + std::to_string(i) + " misaligned: norm " + fmt(g.norm) + ", angle error " +
                           fmt(g.angle_error));
    }
    rows.push_back({{"t", g.q.t}, {"theta", g.q.theta}, {"skipped", g.skipped}, {"passed", g.passed},
                    {"norm", g.norm}, {"angle_error", g.angle_error}});
  }
  expect(v, passed >= need, std::to_string(passed) + " of " + std::to_string(n) + " points passed");
  v.trials = n;
  v.metrics = {{"horizon", T}, {"passed_points", passed}};
  emit_json(opts, v, "gradient.json", rows);
  return v;
}

SuiteVerdict ray_mass_suite(const SuiteOptions& opts) {
  const ProfileModel m = opts.model.value_or(sinclair_model());
  const double T = opts.horizon.value_or(200.0);
  SuiteVerdict v;
  v.models = {m.name()};
  const auto scan = find_R_delta(m, {2.0, 4.0, 8.0, 16.0}, T);
  v.trials = scan.reports.size();
  expect(v, scan.result.has_value(), "no radius with mass of rays below pi");
  if (scan.result) {
    const auto [R, delta] = *scan.result;
    expect(v, delta > 0.0, "delta is not positive");
    for (const auto& r : scan.reports) {
      if (r.q.t >= R) {
        // pi - 2 delta reproduces the largest mu only up to rounding.
        expect(v, r.mu <= kPi - 2 * delta + 1e-12, "mu " + fmt(r.mu) + " at t_q = " + fmt(r.q.t) + " exceeds pi - 2 delta");
      }
    }
    v.metrics = {{"R", R}, {"delta", delta}};
  }
  for (const auto& r : scan.reports) v.skips += r.ambiguous > 0 ? 1 : 0;
  v.metrics["horizon"] = T;
  v.metrics["total_curvature"] = scan.total_curvature;
  emit(opts, v, "ray_scan.csv", [&](std::ostream& out) { write_ray_scan_csv(out, scan); });
  return v;
}

SuiteVerdict main_theorem(const SuiteOptions& opts) {
  const ProfileModel m = opts.model.value_or(sinclair_model());
  const double T = opts.horizon.value_or(200.0);
  SuiteVerdict v;
  v.models = {m.name()};
  const auto rep = main_theorem_suite(m, T);
  if (rep.failures > 0) {
    v.failures += rep.failures;
    v.messages.push_back(std::to_string(rep.failures) + " certificate, growth or sublevel checks failed");
  }
  v.trials = rep.certificates.size() + rep.growth.size() + rep.sublevel.size();
  v.metrics = {{"R", rep.R},
               {"delta", rep.delta},
               {"horizon", T},
               {"critical_candidates", rep.critical_candidates.size()},
               {"growth_samples", rep.growth.size()}};
  emit_json(opts, v, "main_theorem.json", to_json(rep));
  emit(opts, v, "ray_scan.csv", [&](std::ostream& out) { write_ray_scan_csv(out, rep.scan); });
  return v;
}

SuiteVerdict cutlocus_suite(const SuiteOptions& opts) {
  std::vector<ProfileModel> models;
  if (opts.model) {
    models.push_back(*opts.model);
  } else {
    models = {plane_model(), hyperbolic_model(), sinclair_model()};
  }
  const double horizon = opts.horizon.value_or(40.0);
  SuiteVerdict v;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& m : models) {
    v.models.push_back(m.name());
    const bool flat_or_negative = is_builtin(m, "plane") || is_builtin(m, "hyperbolic");
    for (double tz : {0.5, 1.0, 2.0}) {
      const PolarPoint z{tz, 0.0};
      const auto cut = cut_locus(m, z, horizon);
      ++v.trials;
      const std::string where = m.name() + " z = (" + fmt(tz) + ", 0)";
      nlohmann::json row{{"model", m.name()},
                         {"source", {z.t, z.theta}},
                         {"status", to_string(cut.status)},
                         {"horizon", cut.horizon}};
      if (flat_or_negative) {
        expect(v, cut.status == CutStatus::empty_up_to_horizon && cut.certified, where + ": cut locus not empty");
      }
      if (cut.status == CutStatus::subray) {
        row["endpoint_t"] = cut.endpoint_t;
        row["conjugate_arclength"] = cut.conjugate_arclength;
        const double margin = std::max(1e-3, 10.0 * opts.distance.tol);
        const double beyond_t = cut.endpoint_t + 1.0;
        if (beyond_t <= m.t_max()) {
          const auto c = verify_cut_point(m, cut, beyond_t, opts.distance);
          expect(v, c.passed, where + " beyond the endpoint: " + c.message);
          if (c.alternate_length) row["mirror_length_gap"] = std::abs(*c.alternate_length - c.length);
        } else {
          ++v.skips;
        }
        if (cut.endpoint_t > 4 * margin) {
          const auto c = verify_cut_point(m, cut, 0.5 * cut.endpoint_t, opts.distance);
          expect(v, c.passed, where + " before the endpoint: " + c.message);
          row["through_pole_gap"] = std::abs(c.length - c.through_pole);
        } else {
          ++v.skips;
        }
      } else {
        row["certified"] = cut.certified;
      }
      rows.push_back(row);
    }
  }
  v.metrics["sources"] = rows;
  emit_json(opts, v, "cutlocus.json", rows);
  return v;
}

using SuiteFn = SuiteVerdict (*)(const SuiteOptions&);

struct Entry {
  SuiteInfo info;
  SuiteFn fn;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries{
      {{"curvature", "radial curvature of the model is non-increasing; total curvature by limit and integral agree",
        "sinclair"},
       curvature_suite},
      {{"jacobi", "the profile solves f'' + G f = 0", "all"}, jacobi_suite},
      {{"distance", "distance matches the law of cosines on the plane; symmetry and triangle inequality",
        "plane"},
       distance_suite},
      {{"oracle", "mesh distances bound shooting distances from above and converge to them", "paraboloid"},
       oracle_suite},
      {{"gtct", "comparison theorem with a vertex at the pole: angles on M dominate the model angles",
        "plane vs hyperbolic"},
       gtct_suite},
      {{"busemann", "Busemann function is 1-Lipschitz, monotone in the horizon and additive along asymptotic rays",
        "plane"},
       busemann_suite},
      {{"gradient", "gradient of the Busemann function is the velocity of the asymptotic ray", "sinclair"},
       gradient_suite},
      {{"ray-mass", "mass of rays is at most pi - 2 delta outside a ball of radius R", "sinclair"},
       ray_mass_suite},
      {{"main-theorem",
        "no critical points of the Busemann function outside B_R; linear growth; compact sublevel sets",
        "sinclair"},
       main_theorem},
      {{"cutlocus", "cut locus of a point is the meridian subray beyond the first conjugate point", "all"},
       cutlocus_suite},
  };
  return entries;
}

}  // namespace

const std::vector<SuiteInfo>& suite_list() {
  static const std::vector<SuiteInfo> infos = [] {
    std::vector<SuiteInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

SuiteVerdict run_suite(std::string_view name, const SuiteOptions& opts) {
  for (const auto& e : registry()) {
    if (e.info.name != name) continue;
    SuiteVerdict v = e.fn(opts);
    v.suite = e.info.name;
    v.passed = v.failures == 0;
    return v;
  }
  throw PreconditionError("unknown suite '" + std::string(name) + "'");
}

nlohmann::json to_json(const SuiteVerdict& v) {
  return {{"suite", v.suite},     {"models", v.models},   {"passed", v.passed},
          {"trials", v.trials},   {"skips", v.skips},     {"failures", v.failures},
          {"messages", v.messages}, {"artifacts", v.artifacts}, {"metrics", v.metrics}};
}

}  // namespace vmlab
