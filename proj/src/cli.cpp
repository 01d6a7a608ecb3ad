#include "vmlab/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "vmlab/asymptotics.hpp"
#include "vmlab/comparison.hpp"
#include "vmlab/cutlocus.hpp"
#include "vmlab/errors.hpp"
#include "vmlab/suites.hpp"

namespace vmlab::cli {

namespace {

// Bad flag values detected after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string model;
  std::string model_file;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::optional<double> horizon;
};

std::vector<double> parse_list(const std::string& text, std::size_t expected, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + item + "' is not a number");
    }
  }
  if (expected != 0 && out.size() != expected) {
    throw UsageError(std::string(flag) + " expects " + std::to_string(expected) + " comma-separated values");
  }
  if (out.empty()) throw UsageError(std::string(flag) + " is empty");
  return out;
}

PolarPoint parse_point(const std::string& text, const char* flag) {
  const auto v = parse_list(text, 2, flag);
  return {v[0], v[1]};
}

std::optional<ProfileModel> selected_model(const Globals& g) {
  if (!g.model.empty() && !g.model_file.empty()) throw UsageError("--model and --model-file are exclusive");
  if (!g.model_file.empty()) return load_model_file(g.model_file);
  if (!g.model.empty()) return builtin_model(g.model);
  return std::nullopt;
}

ProfileModel model_or(const Globals& g, std::string_view fallback) {
  auto m = selected_model(g);
  return m ? *m : builtin_model(fallback);
}

DistanceOptions distance_options(const Globals& g) {
  DistanceOptions o;
  if (g.tol) o.tol = *g.tol;
  return o;
}

// Files are buffered and written together once the command has finished.
class Artifacts {
public:
  explicit Artifacts(std::string dir) : dir_(std::move(dir)) {}
  bool enabled() const { return !dir_.empty(); }
  std::ostream& open(const std::string& name) { return files_[name]; }
  void json(const std::string& name, const nlohmann::json& j) { files_[name] << j.dump(2) << '\n'; }
  void flush(std::ostream& out) {
    if (!enabled() || files_.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_ + ": " + ec.message());
    for (auto& [name, body] : files_) {
      const auto path = std::filesystem::path(dir_) / name;
      std::ofstream f(path);
      f << body.str();
      if (!f) throw IoError("cannot write " + path.string());
      out << "wrote " << path.string() << '\n';
    }
  }

private:
  std::string dir_;
  std::map<std::string, std::ostringstream> files_;
};

void add_point(CLI::App* cmd, const std::string& flag, std::string& target, const std::string& help,
               bool required = true) {
  auto* opt = cmd->add_option(flag, target, help + " as t,theta");
  if (required) opt->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerics on rotationally symmetric surfaces"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--model", g.model, "built-in model: plane, paraboloid, hyperbolic, sinclair");
  app.add_option("--model-file", g.model_file, "model definition JSON");
  app.add_option("--out-dir", g.out_dir, "directory for CSV/JSON output (none when omitted)");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--tol", g.tol, "solver tolerance")->check(CLI::PositiveNumber);
  app.add_option("--horizon", g.horizon, "horizon for rays, Busemann functions and cut loci")
      ->check(CLI::PositiveNumber);
  app.fallthrough();

  auto* model_cmd = app.add_subcommand("model", "inspect profile models");
  model_cmd->require_subcommand(1);
  auto* model_list = model_cmd->add_subcommand("list", "list built-in models");
  auto* model_show = model_cmd->add_subcommand("show", "curvature summary of a model");

  auto* geo_cmd = app.add_subcommand("geodesic", "integrate a geodesic from a point");
  std::string geo_start;
  double geo_phi = 0.0, geo_len = 1.0;
  add_point(geo_cmd, "--start", geo_start, "start point");
  geo_cmd->add_option("--phi", geo_phi, "initial angle from the outward meridian")->required();
  geo_cmd->add_option("--length", geo_len, "arclength")->required()->check(CLI::NonNegativeNumber);

  auto* dist_cmd = app.add_subcommand("distance", "geodesic distance by shooting");
  std::string dist_a, dist_b;
  add_point(dist_cmd, "--a", dist_a, "first point");
  add_point(dist_cmd, "--b", dist_b, "second point");

  auto* conj_cmd = app.add_subcommand("conjugate", "first conjugate point along the meridian through the pole");
  double conj_t = 0.0;
  conj_cmd->add_option("--t", conj_t, "radius of the source point")->required();

  auto* cut_cmd = app.add_subcommand("cutlocus", "cut locus of a point");
  std::string cut_z;
  add_point(cut_cmd, "--z", cut_z, "source point");

  auto* tri_cmd = app.add_subcommand("triangle", "comparison triangle with a vertex at the pole");
  std::string tri_sides;
  tri_cmd->add_option("--sides", tri_sides, "a,b,c with a = d(p,x), b = d(p,y), c = d(x,y)")->required();

  auto* gtct_cmd = app.add_subcommand("gtct", "random triangle comparison against a model surface");
  std::string gtct_cmp = "hyperbolic";
  std::size_t gtct_trials = 100;
  gtct_cmd->add_option("--comparison", gtct_cmp, "comparison model name");
  gtct_cmd->add_option("--trials", gtct_trials, "number of triangles");

  auto* rays_cmd = app.add_subcommand("rays", "mass of rays at a point, or the (R, delta) scan");
  std::string rays_q, rays_radii;
  add_point(rays_cmd, "--q", rays_q, "base point", false);
  rays_cmd->add_option("--radii", rays_radii, "comma-separated t_q values for the (R, delta) scan");

  auto* bus_cmd = app.add_subcommand("busemann", "Busemann function of a meridian ray");
  std::string bus_ray = "0,0", bus_x;
  bus_cmd->add_option("--ray", bus_ray, "ray origin t0,theta (outward meridian)");
  add_point(bus_cmd, "--x", bus_x, "evaluation point");

  auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  std::string suite;
  bool list = false;
  verify_cmd->add_option("--suite", suite, "suite name or 'all'");
  verify_cmd->add_flag("--list", list, "print suites and the results they exercise");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? ok : usage;
  }

  out << std::setprecision(12);
  Artifacts files(g.out_dir);
  int status = ok;
  try {
    if (model_list->parsed()) {
      for (const auto& n : builtin_names()) out << n << '\n';
    } else if (model_show->parsed()) {
      const auto m = model_or(g, "sinclair");
      const auto cp = check_von_mangoldt(m, 10000);
      const auto tc = total_curvature(m);
      out << "model: " << m.name() << '\n'
          << "t_max: " << m.t_max() << '\n'
          << "G(0+): " << cp.G0 << '\n'
          << "total curvature: " << tc.c_limit << " (limit), " << tc.c_integral << " (integral)\n"
          << "von Mangoldt: " << (cp.von_mangoldt ? "yes" : "no")
          << (cp.strictly_decreasing ? ", strictly decreasing" : "") << '\n';
      auto j = describe_model(m);
      j["G0"] = cp.G0;
      j["c_limit"] = tc.c_limit;
      j["c_integral"] = tc.c_integral;
      j["von_mangoldt"] = cp.von_mangoldt;
      j["strictly_decreasing"] = cp.strictly_decreasing;
      files.json("model.json", j);
    } else if (geo_cmd->parsed()) {
      const auto m = model_or(g, "sinclair");
      const PolarPoint q = parse_point(geo_start, "--start");
      const auto path = integrate(m, launch_state(m, q, geo_phi), geo_len, g.tol.value_or(kDefaultTol));
      const auto& end = path.states.back();
      out << "endpoint: t = " << end.t << ", theta = " << wrap_angle(end.theta) << '\n'
          << "Clairaut constant: " << end.nu << '\n';
      write_path_csv(files.open("geodesic.csv"), path);
    } else if (dist_cmd->parsed()) {
      const auto m = model_or(g, "sinclair");
      const auto r = distance(m, parse_point(dist_a, "--a"), parse_point(dist_b, "--b"), distance_options(g));
      out << "distance: " << r.length << '\n' << "initial angle: " << r.initial_angle << '\n';
      if (r.alternate) out << "second minimizer of length " << r.alternate->length << '\n';
      write_path_csv(files.open("distance_path.csv"), r.path);
    } else if (conj_cmd->parsed()) {
      const auto m = model_or(g, "sinclair");
      const double horizon = g.horizon.value_or(40.0);
      const auto c = first_conjugate_through_pole(m, conj_t, horizon);
      if (c.s_star) {
        out << "first conjugate point at s* = " << *c.s_star << '\n';
      } else {
        out << "no conjugate point up to " << horizon
            << (c.divergence_certified ? " (Jacobi field certified divergent)" : "") << '\n';
      }
      files.json("conjugate.json", {{"t", conj_t},
                                    {"horizon", horizon},
                                    {"s_star", c.s_star ? nlohmann::json(*c.s_star) : nlohmann::json()},
                                    {"divergence_certified", c.divergence_certified}});
    } else if (cut_cmd->parsed()) {
      const auto m = model_or(g, "sinclair");
      const auto cut = cut_locus(m, parse_point(cut_z, "--z"), g.horizon.value_or(40.0));
      out << "cut locus: " << to_string(cut.status) << '\n';
      if (cut.status == CutStatus::subray) {
        out << "endpoint: t = " << cut.endpoint_t << " on theta = " << wrap_angle(cut.source.theta + std::numbers::pi) << '\n'
            << "conjugate arclength: " << cut.conjugate_arclength << '\n';
      }
      files.json("cutlocus.json", {{"source", {cut.source.t, cut.source.theta}},
                                   {"status", to_string(cut.status)},
                                   {"endpoint_t", cut.endpoint_t},
                                   {"conjugate_arclength", cut.conjugate_arclength},
                                   {"horizon", cut.horizon}});
    } else if (tri_cmd->parsed()) {
      const auto m = model_or(g, "sinclair");
      const auto s = parse_list(tri_sides, 3, "--sides");
      const auto t = build_comparison_triangle(m, s[0], s[1], s[2]);
      out << "pole angle: " << t.pole_angle << '\n'
          << "angles (p, x, y): " << t.angles[0] << ", " << t.angles[1] << ", " << t.angles[2] << '\n'
          << "angle sum: " << t.angles[0] + t.angles[1] + t.angles[2] << '\n';
      files.json("triangle.json", {{"sides", s},
                                   {"realized_c", t.realized_c},
                                   {"pole_angle", t.pole_angle},
                                   {"angles", t.angles}});
    } else if (gtct_cmd->parsed()) {
      const auto m = model_or(g, "plane");
      const auto mt = builtin_model(gtct_cmp);
      GtctOptions o;
      o.trials = gtct_trials;
      o.seed = g.seed;
      const auto rep = gtct_check(m, mt, o);
      out << "trials: " << rep.trials.size() << ", skipped: " << rep.skipped << '\n'
          << "min slack: " << rep.min_slack << '\n';
      write_gtct_csv(files.open("gtct.csv"), rep);
      if (rep.min_slack < -1e-6) status = failed;
    } else if (rays_cmd->parsed()) {
      const auto m = model_or(g, "sinclair");
      const double horizon = g.horizon.value_or(200.0);
      if (!rays_radii.empty()) {
        const auto scan = find_R_delta(m, parse_list(rays_radii, 0, "--radii"), horizon);
        for (const auto& r : scan.reports) out << "t_q = " << r.q.t << ": mu = " << r.mu << '\n';
        if (scan.result) {
          out << "R = " << scan.result->R << ", delta = " << scan.result->delta << '\n';
        } else {
          out << "no radius with mass of rays below pi\n";
          status = failed;
        }
        write_ray_scan_csv(files.open("ray_scan.csv"), scan);
      } else if (!rays_q.empty()) {
        const auto r = ray_mass(m, parse_point(rays_q, "--q"), horizon);
        out << "mu = " << r.mu << " (" << to_string(r.method) << ", " << r.probes << " probes)\n";
        files.json("rays.json", to_json(r));
      } else {
        throw UsageError("rays needs --q or --radii");
      }
    } else if (bus_cmd->parsed()) {
      const auto m = model_or(g, "sinclair");
      const double horizon = g.horizon.value_or(1000.0);
      const PolarPoint o = parse_point(bus_ray, "--ray");
      const MeridianRay ray{o.t, o.theta};
      const PolarPoint x = parse_point(bus_x, "--x");
      const auto b = busemann_value(m, ray, x, horizon);
      const auto d = asymptotic_direction(m, ray, x, horizon);
      out << "F_T = " << b.value << ", F_2T = " << b.value_2t << ", convergence " << b.convergence << '\n'
          << "asymptotic direction: " << d.angle << (d.stable ? "" : " (unstable)") << '\n';
      files.json("busemann.json", {{"ray", {o.t, o.theta}},
                                   {"x", {x.t, x.theta}},
                                   {"horizon", horizon},
                                   {"value", b.value},
                                   {"value_2t", b.value_2t},
                                   {"convergence", b.convergence},
                                   {"direction", d.angle},
                                   {"direction_drift", d.drift}});
    } else if (verify_cmd->parsed()) {
      if (list) {
        for (const auto& s : suite_list()) {
          out << std::left << std::setw(14) << s.name << std::setw(22) << s.default_model << s.statement << '\n';
        }
        return ok;
      }
      if (suite.empty()) throw UsageError("verify needs --suite or --list");
      SuiteOptions so;
      so.model = selected_model(g);
      so.horizon = g.horizon;
      so.seed = g.seed;
      so.distance = distance_options(g);
      so.out_dir = g.out_dir;
      std::vector<std::string> names;
      if (suite == "all") {
        for (const auto& s : suite_list()) names.push_back(s.name);
      } else {
        names.push_back(suite);
      }
      nlohmann::json all = nlohmann::json::array();
      for (const auto& n : names) {
        const auto v = run_suite(n, so);
        out << v.suite << ": " << (v.passed ? "PASS" : "FAIL") << " (trials " << v.trials << ", skips " << v.skips
            << ", failures " << v.failures << ")\n";
        for (const auto& msg : v.messages) out << "  " << msg << '\n';
        if (!v.passed) status = failed;
        all.push_back(to_json(v));
      }
      files.json("verdict.json", all);
    }
    files.flush(out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const SchemaError& e) {
    err << "model error: " << e.what() << '\n';
    return usage;
  } catch (const AdmissibilityError& e) {
    err << "model error: " << e.what() << '\n';
    return usage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const Error& e) {
    err << "computation failed: " << e.what() << '\n';
    return failed;
  }
  return status;
}

}  // namespace vmlab::cli
