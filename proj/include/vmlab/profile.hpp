#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace vmlab {

inline constexpr double kDefaultTMax = 40.0;

// Below this radius eval_curvature returns the extrapolated pole limit.
inline constexpr double kCurvaturePoleRadius = 1e-4;

// Threshold on |f'(t_max)| beyond which the total curvature is reported non-finite.
inline constexpr double kDivergentSlope = 1e3;

// Warping function and derivatives at one radius. log_f and dlog_f stay
// finite where f itself underflows, which happens early for Gaussian profiles.
struct ProfileSample {
  double f = 0.0;
  double df = 0.0;
  double ddf = 0.0;
  double log_f = 0.0;
  double dlog_f = 0.0;  // f'/f
};

enum class ProfileKind { closed_form, sampled };

// Implementation hook for one warping function f on [0, inf).
class ProfileFunction {
public:
  virtual ~ProfileFunction() = default;
  virtual ProfileSample sample(double t) const = 0;
  // Gaussian curvature -f''/f for t > 0.
  virtual double curvature(double t) const = 0;
};

// The model surface dt^2 + f(t)^2 dtheta^2 around its pole. Immutable; copies
// share the underlying function.
class ProfileModel {
public:
  ProfileModel(std::string name, ProfileKind kind, double t_max,
               std::shared_ptr<const ProfileFunction> fn);

  const std::string& name() const { return name_; }
  ProfileKind kind() const { return kind_; }
  // Cap of grids and integrals; geodesics may travel beyond it.
  double t_max() const { return t_max_; }

  ProfileSample sample(double t) const;
  double f(double t) const { return sample(t).f; }
  double df(double t) const { return sample(t).df; }
  double ddf(double t) const { return sample(t).ddf; }
  double log_f(double t) const { return sample(t).log_f; }
  // Raw -f''/f without the pole treatment of eval_curvature.
  double curvature_raw(double t) const;

private:
  std::string name_;
  ProfileKind kind_;
  double t_max_;
  std::shared_ptr<const ProfileFunction> fn_;
};

ProfileModel plane_model(double t_max = kDefaultTMax);
// z = r^2 reparametrized by meridian arclength.
ProfileModel paraboloid_model(double t_max = kDefaultTMax);
// f = sinh t, constant curvature -1.
ProfileModel hyperbolic_model(double t_max = kDefaultTMax);
// f = exp(-t^2) tanh t.
ProfileModel sinclair_model(double t_max = kDefaultTMax);

const std::vector<std::string>& builtin_names();
ProfileModel builtin_model(std::string_view name, std::optional<double> t_max = std::nullopt);

// Monotone cubic Hermite profile through (t, f) knots with f(0)=0 and f'(0)=1.
ProfileModel sampled_model(std::string name, const std::vector<std::array<double, 2>>& samples,
                           std::optional<double> t_max = std::nullopt);

ProfileModel load_model(const nlohmann::json& doc);
ProfileModel load_model_file(const std::filesystem::path& path);
nlohmann::json describe_model(const ProfileModel& model);

// G(t) for 0 <= t <= t_max; the t -> 0 limit (Richardson) below kCurvaturePoleRadius.
double eval_curvature(const ProfileModel& model, double t);

// |f'' + G f| / max(1, |f''|) with G from the model's own curvature formula.
double jacobi_residual(const ProfileModel& model, double t);

struct CurvatureProfile {
  std::vector<double> grid;
  std::vector<double> G;
  double G0 = 0.0;
  bool von_mangoldt = false;
  bool strictly_decreasing = false;
  std::optional<double> first_violation;
};

CurvatureProfile check_von_mangoldt(const ProfileModel& model, std::size_t grid_size);

struct TotalCurvatureReport {
  double c_limit = 0.0;     // 2 pi (1 - f'(t_max))
  double c_integral = 0.0;  // 2 pi int_0^t_max G f dt
  double quadrature_error = 0.0;
  bool finite = false;
};

TotalCurvatureReport total_curvature(const ProfileModel& model);

}  // namespace vmlab
