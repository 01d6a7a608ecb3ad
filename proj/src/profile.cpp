#include "vmlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vmlab/errors.hpp"

namespace vmlab {

namespace {

constexpr double kPi = std::numbers::pi;

class PlaneProfile final : public ProfileFunction {
public:
  ProfileSample sample(double t) const override {
    return {t, 1.0, 0.0, std::log(t), 1.0 / t};
  }
  double curvature(double) const override { return 0.0; }
};

class HyperbolicProfile final : public ProfileFunction {
public:
  ProfileSample sample(double t) const override {
    ProfileSample s;
    s.f = std::sinh(t);
    s.df = std::cosh(t);
    s.ddf = s.f;
    s.log_f = t > 1.0 ? t + std::log1p(-std::exp(-2.0 * t)) - std::numbers::ln2 : std::log(s.f);
    s.dlog_f = 1.0 / std::tanh(t);
    return s;
  }
  double curvature(double) const override { return -1.0; }
};

// Paraboloid z = r^2; meridian arclength t(r) = r sqrt(1+4r^2)/2 + asinh(2r)/4.
class ParaboloidProfile final : public ProfileFunction {
public:
  static double arclength(double r) {
    return 0.5 * r * std::sqrt(1.0 + 4.0 * r * r) + 0.25 * std::asinh(2.0 * r);
  }

  // t(r) is convex with t(r) >= max(r, r^2), so Newton from min(t, sqrt t)
  // decreases monotonically onto the root.
  static double radius(double t) {
    if (t <= 0.0) return 0.0;
    double r = std::min(t, std::sqrt(t));
    for (int it = 0; it < 100; ++it) {
      const double step = (arclength(r) - t) / std::sqrt(1.0 + 4.0 * r * r);
      r -= step;
      // Quadratic convergence: the step after this one is below rounding.
      if (std::abs(step) <= 1e-9 * r) break;
    }
    return r;
  }

  ProfileSample sample(double t) const override {
    const double r = radius(t);
    const double q = 1.0 + 4.0 * r * r;
    ProfileSample s;
    s.f = r;
    s.df = 1.0 / std::sqrt(q);
    s.ddf = -4.0 * r / (q * q);
    s.log_f = std::log(r);
    s.dlog_f = s.df / r;
    return s;
  }

  double curvature(double t) const override {
    const double r = radius(t);
    const double q = 1.0 + 4.0 * r * r;
    return 4.0 / (q * q);
  }
};

class SinclairProfile final : public ProfileFunction {
public:
  ProfileSample sample(double t) const override {
    ProfileSample s;
    const double gauss = std::exp(-t * t);
    const double th = std::tanh(t);
    const double c = std::cosh(t);
    const double sech2 = std::isfinite(c) ? 1.0 / (c * c) : 0.0;
    s.f = gauss * th;
    s.df = gauss * (-2.0 * t * th + sech2);
    s.ddf = (4.0 * t * t - 2.0 - 2.0 * sech2) * s.f - 4.0 * t * gauss * sech2;
    s.log_f = -t * t + std::log(th);
    const double sh2 = std::sinh(2.0 * t);
    s.dlog_f = -2.0 * t + (std::isfinite(sh2) ? 2.0 / sh2 : 0.0);
    return s;
  }

  double curvature(double t) const override {
    if (t == 0.0) return 8.0;
    const double sh2 = std::sinh(2.0 * t);
    const double c = std::cosh(t);
    const double a = std::isfinite(sh2) ? 8.0 * t / sh2 : 0.0;
    const double b = std::isfinite(c) ? 2.0 / (c * c) : 0.0;
    return a + b - 4.0 * t * t + 2.0;
  }
};

// Monotone piecewise cubic Hermite interpolant; f is extended linearly past
// the last knot with the end slope.
class SampledProfile final : public ProfileFunction {
public:
  SampledProfile(std::vector<double> t, std::vector<double> f, std::vector<double> d)
      : t_(std::move(t)), f_(std::move(f)), d_(std::move(d)) {}

  ProfileSample sample(double t) const override {
    ProfileSample s;
    const std::size_t n = t_.size();
    if (t >= t_.back()) {
      s.f = f_.back() + d_.back() * (t - t_.back());
      s.df = d_.back();
      s.ddf = 0.0;
    } else {
      const auto it = std::upper_bound(t_.begin(), t_.end(), t);
      const std::size_t k = std::min<std::size_t>(
          static_cast<std::size_t>(std::distance(t_.begin(), it)) - 1, n - 2);
      const double h = t_[k + 1] - t_[k];
      const double x = (t - t_[k]) / h;
      const double y0 = f_[k];
      const double y1 = f_[k + 1];
      const double m0 = d_[k] * h;
      const double m1 = d_[k + 1] * h;
      const double x2 = x * x;
      const double x3 = x2 * x;
      s.f = (2 * x3 - 3 * x2 + 1) * y0 + (x3 - 2 * x2 + x) * m0 + (-2 * x3 + 3 * x2) * y1 +
            (x3 - x2) * m1;
      s.df = ((6 * x2 - 6 * x) * y0 + (3 * x2 - 4 * x + 1) * m0 + (-6 * x2 + 6 * x) * y1 +
              (3 * x2 - 2 * x) * m1) /
             h;
      s.ddf = ((12 * x - 6) * y0 + (6 * x - 4) * m0 + (-12 * x + 6) * y1 + (6 * x - 2) * m1) /
              (h * h);
    }
    s.log_f = std::log(s.f);
    s.dlog_f = s.df / s.f;
    return s;
  }

  double curvature(double t) const override {
    const ProfileSample s = sample(t);
    return -s.ddf / s.f;
  }

  const std::vector<double>& knots() const { return t_; }

private:
  std::vector<double> t_;
  std::vector<double> f_;
  std::vector<double> d_;
};

// Fritsch-Butland interior slopes, with the slope at t = 0 pinned to 1.
std::vector<double> hermite_slopes(const std::vector<double>& t, const std::vector<double>& f) {
  const std::size_t n = t.size();
  std::vector<double> h(n - 1), delta(n - 1), d(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = t[k + 1] - t[k];
    delta[k] = (f[k + 1] - f[k]) / h[k];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      d[k] = 0.0;
    } else {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  d[0] = 1.0;
  if (n == 2) {
    d[1] = delta[0];
  } else {
    // Three-point end formula, clamped to keep the last interval monotone.
    const std::size_t m = n - 2;
    double end = ((2.0 * h[m] + h[m - 1]) * delta[m] - h[m] * delta[m - 1]) / (h[m] + h[m - 1]);
    if (end * delta[m] <= 0.0) {
      end = 0.0;
    } else if (delta[m] * delta[m - 1] <= 0.0 && std::abs(end) > 3.0 * std::abs(delta[m])) {
      end = 3.0 * delta[m];
    }
    d[n - 1] = end;
  }
  // Fritsch-Carlson limiter.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (delta[k] == 0.0) {
      d[k] = 0.0;
      d[k + 1] = 0.0;
      continue;
    }
    const double a = d[k] / delta[k];
    const double b = d[k + 1] / delta[k];
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      d[k] = tau * a * delta[k];
      d[k + 1] = tau * b * delta[k];
    }
  }
  return d;
}

double richardson_pole_limit(const ProfileModel& model) {
  // G is even in t near the pole: G(h) = G0 + c h^2 + O(h^4).
  const double h = kCurvaturePoleRadius;
  const double g1 = model.curvature_raw(h);
  const double g2 = model.curvature_raw(h / 2.0);
  const double g4 = model.curvature_raw(h / 4.0);
  const double r1 = (4.0 * g2 - g1) / 3.0;
  const double r2 = (4.0 * g4 - g2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

}  // namespace

ProfileModel::ProfileModel(std::string name, ProfileKind kind, double t_max,
                           std::shared_ptr<const ProfileFunction> fn)
    : name_(std::move(name)), kind_(kind), t_max_(t_max), fn_(std::move(fn)) {
  if (!(t_max_ > 0.0)) throw DomainError("t_max must be positive");
}

ProfileSample ProfileModel::sample(double t) const {
  if (!(t >= 0.0)) throw DomainError("profile evaluated at negative radius");
  if (t == 0.0) {
    return {0.0, 1.0, 0.0, -std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
  }
  ProfileSample s = fn_->sample(t);
  if (!(s.f > 0.0) && !std::isfinite(s.log_f)) {
    throw DomainError("profile " + name_ + " is not positive at t = " + std::to_string(t));
  }
  return s;
}

double ProfileModel::curvature_raw(double t) const { return fn_->curvature(t); }

ProfileModel plane_model(double t_max) {
  return {"plane", ProfileKind::closed_form, t_max, std::make_shared<PlaneProfile>()};
}

ProfileModel paraboloid_model(double t_max) {
  return {"paraboloid", ProfileKind::closed_form, t_max, std::make_shared<ParaboloidProfile>()};
}

ProfileModel hyperbolic_model(double t_max) {
  return {"hyperbolic", ProfileKind::closed_form, t_max, std::make_shared<HyperbolicProfile>()};
}

ProfileModel sinclair_model(double t_max) {
  return {"sinclair", ProfileKind::closed_form, t_max, std::make_shared<SinclairProfile>()};
}

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names{"plane", "paraboloid", "hyperbolic", "sinclair"};
  return names;
}

ProfileModel builtin_model(std::string_view name, std::optional<double> t_max) {
  const double tm = t_max.value_or(kDefaultTMax);
  if (name == "plane") return plane_model(tm);
  if (name == "paraboloid") return paraboloid_model(tm);
  if (name == "hyperbolic") return hyperbolic_model(tm);
  if (name == "sinclair") return sinclair_model(tm);
  throw SchemaError("unknown built-in model '" + std::string(name) + "'");
}

ProfileModel sampled_model(std::string name, const std::vector<std::array<double, 2>>& samples,
                           std::optional<double> t_max) {
  std::vector<double> t, f;
  t.reserve(samples.size() + 1);
  f.reserve(samples.size() + 1);
  for (const auto& [ti, fi] : samples) {
    if (!std::isfinite(ti) || !std::isfinite(fi)) throw SchemaError("non-finite sample");
    t.push_back(ti);
    f.push_back(fi);
  }
  if (t.empty()) throw SchemaError("samples must not be empty");
  if (t.front() < 0.0) throw SchemaError("sample radii must be non-negative");
  if (t.front() > 0.0) {
    t.insert(t.begin(), 0.0);
    f.insert(f.begin(), 0.0);
  }
  if (f.front() != 0.0) throw AdmissibilityError("profile must satisfy f(0) = 0");
  if (t.size() < 2) throw SchemaError("need at least one sample with t > 0");
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) throw SchemaError("sample radii must be strictly increasing");
    if (!(f[k] > 0.0)) {
      throw AdmissibilityError("profile must be positive at t = " + std::to_string(t[k]));
    }
  }
  const std::vector<double> d = hermite_slopes(t, f);
  if (std::abs(d.front() - 1.0) > 1e-3) {
    throw AdmissibilityError("monotone interpolation forces f'(0) = " + std::to_string(d.front()) +
                             ", expected 1");
  }
  const double tm = t_max.value_or(t.back());
  return {std::move(name), ProfileKind::sampled, tm,
          std::make_shared<SampledProfile>(std::move(t), f, d)};
}

ProfileModel load_model(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("model document must be a JSON object");
  std::optional<double> t_max;
  if (doc.contains("t_max")) {
    if (!doc["t_max"].is_number()) throw SchemaError("t_max must be a number");
    t_max = doc["t_max"].get<double>();
    if (!(*t_max > 0.0)) throw SchemaError("t_max must be positive");
  }
  std::string name;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw SchemaError("name must be a string");
    name = doc["name"].get<std::string>();
  }
  std::string kind = "builtin";
  if (doc.contains("kind")) {
    if (!doc["kind"].is_string()) throw SchemaError("kind must be a string");
    kind = doc["kind"].get<std::string>();
  }
  if (kind == "builtin") {
    std::string which = name;
    if (doc.contains("builtin")) {
      if (!doc["builtin"].is_string()) throw SchemaError("builtin must be a string");
      which = doc["builtin"].get<std::string>();
    }
    if (which.empty()) throw SchemaError("builtin model needs a 'builtin' name");
    return builtin_model(which, t_max);
  }
  if (kind == "samples") {
    if (!doc.contains("samples") || !doc["samples"].is_array()) {
      throw SchemaError("samples model needs a 'samples' array");
    }
    std::vector<std::array<double, 2>> pts;
    for (const auto& row : doc["samples"]) {
      if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
        throw SchemaError("each sample must be a [t, f] pair of numbers");
      }
      pts.push_back({row[0].get<double>(), row[1].get<double>()});
    }
    return sampled_model(name.empty() ? "samples" : name, pts, t_max);
  }
  throw SchemaError("kind must be 'builtin' or 'samples'");
}

ProfileModel load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open model file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed model file: ") + e.what());
  }
  return load_model(doc);
}

nlohmann::json describe_model(const ProfileModel& model) {
  return {{"name", model.name()},
          {"kind", model.kind() == ProfileKind::closed_form ? "closed_form" : "sampled"},
          {"t_max", model.t_max()}};
}

double eval_curvature(const ProfileModel& model, double t) {
  if (!(t >= 0.0) || t > model.t_max()) {
    throw DomainError("curvature requested outside [0, t_max] at t = " + std::to_string(t));
  }
  if (t <= kCurvaturePoleRadius) return richardson_pole_limit(model);
  return model.curvature_raw(t);
}

double jacobi_residual(const ProfileModel& model, double t) {
  const ProfileSample s = model.sample(t);
  const double g = eval_curvature(model, t);
  return std::abs(s.ddf + g * s.f) / std::max(1.0, std::abs(s.ddf));
}

CurvatureProfile check_von_mangoldt(const ProfileModel& model, std::size_t grid_size) {
  if (grid_size < 2) throw PreconditionError("grid_size must be at least 2");
  CurvatureProfile out;
  out.G0 = eval_curvature(model, 0.0);
  out.grid.resize(grid_size);
  out.G.resize(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double t = model.t_max() * static_cast<double>(i + 1) / static_cast<double>(grid_size);
    out.grid[i] = t;
    out.G[i] = eval_curvature(model, t);
  }
  out.von_mangoldt = true;
  out.strictly_decreasing = true;
  for (std::size_t i = 0; i + 1 < grid_size; ++i) {
    if (!(out.G[i + 1] < out.G[i])) out.strictly_decreasing = false;
    if (!(out.G[i + 1] <= out.G[i] + 1e-12)) {
      out.von_mangoldt = false;
      out.first_violation = out.grid[i + 1];
      break;
    }
  }
  return out;
}

TotalCurvatureReport total_curvature(const ProfileModel& model) {
  using boost::math::quadrature::gauss_kronrod;
  TotalCurvatureReport rep;
  const double tm = model.t_max();
  const double slope = model.df(tm);
  rep.c_limit = 2.0 * kPi * (1.0 - slope);

  auto integrand = [&](double t) {
    if (t <= 0.0) return 0.0;
    const ProfileSample s = model.sample(t);
    if (s.f == 0.0) return 0.0;
    return eval_curvature(model, std::min(t, tm)) * s.f;
  };
  // Unit chunks keep each adaptive panel on a smooth stretch; sampled
  // profiles are split at the knots as well.
  std::vector<double> cuts{0.0};
  for (double c = 1.0; c < tm; c += 1.0) cuts.push_back(c);
  cuts.push_back(tm);
  if (model.kind() == ProfileKind::sampled) {
    for (double t = 0.0; t < tm; t += tm / 64.0) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  }
  double total = 0.0;
  double err_total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    total += gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 12, 1e-13, &err);
    err_total += err;
  }
  rep.c_integral = 2.0 * kPi * total;
  rep.quadrature_error = 2.0 * kPi * err_total;
  const bool converged = std::isfinite(total) && err_total <= 1e-6 * (1.0 + std::abs(total));
  rep.finite = std::abs(slope) <= kDivergentSlope && converged;
  return rep;
}

}  // namespace vmlab
