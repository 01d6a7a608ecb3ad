#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>

namespace vmlab {

// Dormand-Prince 5(4) with the Hairer dense output. The caller supplies the
// per-component error scale so that angular components can be weighted by
// the local metric.
template <std::size_t N>
class DormandPrince {
public:
  using State = std::array<double, N>;
  using Rhs = std::function<void(const State&, State&)>;
  using Scale = std::function<State(const State&, const State&)>;

  DormandPrince(Rhs rhs, Scale scale) : rhs_(std::move(rhs)), scale_(std::move(scale)) {}

  void reset(double x, const State& y, double h) {
    x_ = x;
    y_ = y;
    h_ = h;
    rhs_(y_, k1_);
    rejected_ = 0;
  }

  double x() const { return x_; }
  const State& y() const { return y_; }
  double x_prev() const { return x_old_; }
  const State& y_prev() const { return y_old_; }
  double step_size() const { return h_; }
  std::size_t rejected() const { return rejected_; }

  // Advances by one accepted step without passing x_stop. Returns false when
  // the step size underflows.
  bool step(double x_stop) {
    for (;;) {
      const double remaining = x_stop - x_;
      if (!(remaining > 0.0)) return false;
      const bool truncated = h_ >= remaining;
      if (!truncated && h_ < 1e-14 * std::max(1.0, std::abs(x_))) return false;
      const double h = truncated ? remaining : h_;
      State ytmp, k2, k3, k4, k5, k6, k7, y5, err;
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y_[i] + h * a21 * k1_[i];
      rhs_(ytmp, k2);
      for (std::size_t i = 0; i < N; ++i) ytmp[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
      rhs_(ytmp, k3);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
      rhs_(ytmp, k4);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      rhs_(ytmp, k5);
      for (std::size_t i = 0; i < N; ++i)
        ytmp[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      rhs_(ytmp, k6);
      for (std::size_t i = 0; i < N; ++i)
        y5[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
      rhs_(y5, k7);
      for (std::size_t i = 0; i < N; ++i)
        err[i] = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const State sc = scale_(y_, y5);
      double norm = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        if (!std::isfinite(y5[i])) finite = false;
        const double r = err[i] / sc[i];
        norm += r * r;
      }
      norm = std::sqrt(norm / static_cast<double>(N));
      if (!finite || !std::isfinite(norm)) norm = 1e10;
      if (norm <= 1.0) {
        // Dense output coefficients.
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = y5[i] - y_[i];
          const double bspl = h * k1_[i] - dy;
          r1_[i] = y_[i];
          r2_[i] = dy;
          r3_[i] = bspl;
          r4_[i] = dy - h * k7[i] - bspl;
          r5_[i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
        }
        x_old_ = x_;
        y_old_ = y_;
        x_ += h;
        y_ = y5;
        k1_ = k7;
        const double fac = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
        // A step shortened to land on x_stop says little about the natural size.
        if (!(truncated && fac >= 1.0)) h_ = h * fac;
        return true;
      }
      ++rejected_;
      h_ = h * std::clamp(0.9 * std::pow(norm, -0.2), 0.1, 0.9);
    }
  }

  // Replace the current state after a projection or event adjustment.
  void set_state(double x, const State& y) {
    x_ = x;
    y_ = y;
    rhs_(y_, k1_);
  }

  // Interpolant on the last accepted step.
  State dense(double x) const {
    const double h = x_ - x_old_;
    const double th = h == 0.0 ? 1.0 : (x - x_old_) / h;
    const double th1 = 1.0 - th;
    State out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = r1_[i] + th * (r2_[i] + th1 * (r3_[i] + th * (r4_[i] + th1 * r5_[i])));
    return out;
  }

private:
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  Rhs rhs_;
  Scale scale_;
  double x_ = 0.0, x_old_ = 0.0, h_ = 0.0;
  State y_{}, y_old_{}, k1_{};
  State r1_{}, r2_{}, r3_{}, r4_{}, r5_{};
  std::size_t rejected_ = 0;
};

}  // namespace vmlab
