// Runs the acceptance criteria and prints one PASS/FAIL line for each.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include "vmlab/errors.hpp"
#include "vmlab/suites.hpp"

using namespace vmlab;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// Pinned tolerances.
constexpr double kG0 = 8.0, kG0Tol = 1e-3;
constexpr double kTotalCurvatureTol = 1e-2;
constexpr double kCurvatureSeconds = 1.0;
constexpr double kJacobiTol = 1e-9;
constexpr double kLawOfCosinesTol = 1e-8;
constexpr double kMetricTol = 1e-6;
constexpr double kOracleGap = 1e-2, kOracleBelow = 1e-9;
constexpr double kSlackTol = 1e-6, kClosedFormTol = 1e-8;
constexpr double kBusemannTol = 1e-3, kBusemannInvariantTol = 1e-9, kBusemannHorizon = 1000.0;
constexpr std::size_t kGradientPasses = 18;
constexpr double kRayHorizon = 200.0, kRayMassSeconds = 600.0;
constexpr std::size_t kGrowthSamples = 32;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    detail << " [" << what << "]";
  }
};

double num(const nlohmann::json& m, const char* key) {
  return m.contains(key) && m[key].is_number() ? m[key].get<double>() : NAN;
}

void suite_status(Outcome& o, const SuiteVerdict& v) {
  o.require(v.passed, std::to_string(v.failures) + " suite failures");
  for (std::size_t i = 0; i < v.messages.size() && i < 3; ++i) o.detail << " [" << v.messages[i] << "]";
}

using Check = std::function<void(Outcome&, double& seconds)>;

SuiteVerdict timed(std::string_view suite, const SuiteOptions& opts, double& seconds) {
  const auto t0 = std::chrono::steady_clock::now();
  auto v = run_suite(suite, opts);
  seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

void ac1(Outcome& o, double& s) {
  SuiteOptions opts;
  opts.model = sinclair_model();
  const auto v = timed("curvature", opts, s);
  const auto& m = v.metrics;
  suite_status(o, v);
  o.detail << " G0=" << num(m, "G0") << " c_limit=" << num(m, "c_limit") << " c_integral=" << num(m, "c_integral");
  o.require(std::abs(num(m, "G0") - kG0) <= kG0Tol, "G(0+) off 8");
  o.require(m["strictly_decreasing"].get<bool>(), "G not strictly decreasing");
  o.require(std::abs(num(m, "c_limit") - kTwoPi) <= kTotalCurvatureTol, "limit formula off 2 pi");
  o.require(std::abs(num(m, "c_integral") - kTwoPi) <= kTotalCurvatureTol, "integral formula off 2 pi");
  o.require(s < kCurvatureSeconds, "runtime over 1 s");
}

void ac2(Outcome& o, double& s) {
  const auto v = timed("jacobi", {}, s);
  suite_status(o, v);
  o.require(v.models.size() == 4, "not all closed-form models ran");
  for (const auto& name : v.models) {
    const double r = num(v.metrics[name], "worst_residual");
    o.detail << ' ' << name << '=' << r;
    o.require(r <= kJacobiTol, name + " residual");
  }
}

void ac3(Outcome& o, double& s) {
  SuiteOptions opts;
  opts.model = plane_model();
  const auto v = timed("distance", opts, s);
  const auto& m = v.metrics;
  suite_status(o, v);
  o.detail << " cosines=" << num(m, "law_of_cosines_max_error") << " symmetry=" << num(m, "symmetry_max_error")
           << " triangle_excess=" << num(m, "triangle_max_excess");
  o.require(v.trials == 300, "expected 100 pairs and 200 triples");
  o.require(num(m, "law_of_cosines_max_error") <= kLawOfCosinesTol, "law of cosines");
  o.require(num(m, "symmetry_max_error") <= kMetricTol, "symmetry");
  o.require(num(m, "triangle_max_excess") <= kMetricTol, "triangle inequality");
}

void ac4(Outcome& o, double& s) {
  SuiteOptions opts;
  opts.model = paraboloid_model();
  const auto v = timed("oracle", opts, s);
  const auto& m = v.metrics;
  suite_status(o, v);
  o.detail << " worst_gap=" << num(m, "worst_relative_gap") << " min_excess=" << num(m, "min_excess");
  o.require(v.trials == 20, "expected 20 pairs");
  o.require(m["mesh"] == nlohmann::json::array({2000, 512}), "mesh is not 2000x512");
  o.require(num(m, "worst_relative_gap") <= kOracleGap, "relative gap");
  o.require(num(m, "min_excess") >= -kOracleBelow, "oracle below shooting");
}

void ac5(Outcome& o, double& s) {
  SuiteOptions opts;
  opts.model = plane_model();
  opts.comparison = hyperbolic_model();
  const auto v = timed("gtct", opts, s);
  const auto& m = v.metrics;
  suite_status(o, v);
  o.detail << " min_slack=" << num(m, "min_slack") << " closed_form=" << num(m, "closed_form_max_error")
           << " identity=" << num(m, "identity_max_abs_slack") << " skips=" << v.skips;
  o.require(num(m, "min_slack") >= -kSlackTol, "angle inequality");
  o.require(num(m, "closed_form_max_error") <= kClosedFormTol, "hyperbolic closed form");
  o.require(num(m, "identity_max_abs_slack") <= kSlackTol, "identity run");
}

void ac6(Outcome& o, double& s) {
  SuiteOptions opts;
  opts.model = plane_model();
  opts.horizon = kBusemannHorizon;
  const auto v = timed("busemann", opts, s);
  const auto& m = v.metrics;
  suite_status(o, v);
  o.detail << " closed_form=" << num(m, "closed_form_max_error") << " lipschitz_excess="
           << num(m, "lipschitz_max_excess") << " monotone_drop=" << num(m, "monotonicity_max_drop")
           << " additivity_excess=" << num(m, "additivity_max_excess") << " skips=" << v.skips;
  o.require(num(m, "closed_form_max_error") <= kBusemannTol, "t cos(theta)");
  o.require(num(m, "lipschitz_max_excess") <= kBusemannInvariantTol, "Lipschitz");
  o.require(num(m, "monotonicity_max_drop") <= kBusemannInvariantTol, "horizon monotonicity");
  o.require(num(m, "additivity_max_excess") <= 0.0, "additivity");
}

void ac7(Outcome& o, double& s) {
  SuiteOptions opts;
  opts.model = sinclair_model();
  const auto v = timed("gradient", opts, s);
  suite_status(o, v);
  const double passed = num(v.metrics, "passed_points");
  o.detail << " passed=" << passed << "/" << v.trials << " skips=" << v.skips;
  o.require(v.trials == 20, "expected 20 sample points");
  o.require(passed >= kGradientPasses, "fewer than 18 points passed");
}

void ac8(Outcome& o, double& s) {
  SuiteOptions opts;
  opts.model = sinclair_model();
  opts.horizon = kRayHorizon;
  const auto v = timed("ray-mass", opts, s);
  suite_status(o, v);
  o.detail << " R=" << num(v.metrics, "R") << " delta=" << num(v.metrics, "delta");
  o.require(num(v.metrics, "delta") > 0.0, "delta not positive");
  o.require(s < kRayMassSeconds, "runtime over 10 min");
}

void ac9(Outcome& o, double& s) {
  SuiteOptions opts;
  opts.model = sinclair_model();
  opts.horizon = kRayHorizon;
  const auto v = timed("main-theorem", opts, s);
  suite_status(o, v);
  o.detail << " R=" << num(v.metrics, "R") << " delta=" << num(v.metrics, "delta")
           << " candidates=" << num(v.metrics, "critical_candidates");
  o.require(num(v.metrics, "critical_candidates") == 0.0, "critical candidates outside B_R");
  o.require(num(v.metrics, "growth_samples") == static_cast<double>(kGrowthSamples), "expected 32 growth samples");
}

void ac10(Outcome& o, double& s) {
  const auto v = timed("cutlocus", {}, s);
  suite_status(o, v);
  std::set<std::string> empty;
  std::size_t subrays = 0;
  for (const auto& row : v.metrics["sources"]) {
    if (row["status"] == "subray") {
      ++subrays;
      if (row.contains("mirror_length_gap")) o.require(row["mirror_length_gap"].get<double>() <= kMetricTol, "mirror lengths");
      if (row.contains("through_pole_gap")) o.require(row["through_pole_gap"].get<double>() <= kMetricTol, "through-pole length");
    } else {
      empty.insert(row["model"].get<std::string>());
    }
  }
  o.detail << " sinclair_subrays=" << subrays;
  o.require(empty.count("plane") && empty.count("hyperbolic"), "plane or hyperbolic not empty");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  app.add_option("--only", only, "criteria to run (default all)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, Check>> criteria{
      {"sinclair curvature sanity", ac1},    {"jacobi identity residual", ac2},
      {"plane distances and metric axioms", ac3}, {"shooting vs mesh oracle", ac4},
      {"triangle comparison plane/hyperbolic", ac5}, {"plane Busemann function", ac6},
      {"gradient alignment", ac7},           {"mass of rays (R, delta)", ac8},
      {"main theorem suite", ac9},           {"cut locus", ac10},
  };
  std::cout << std::setprecision(6);
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Outcome o;
    double seconds = 0.0;
    try {
      criteria[i].second(o, seconds);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    std::cout << "AC" << id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << " ("
              << std::fixed << std::setprecision(2) << seconds << " s)" << std::defaultfloat << std::setprecision(6)
              << o.detail.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
