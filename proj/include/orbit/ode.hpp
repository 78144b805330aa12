#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

namespace orbit::ode {

/// Adaptive embedded Dormand-Prince 5(4) step on ℝ^n state vectors.
struct StepControl {
  double rtol = 1e-10;
  double atol = 1e-12;
  double safety = 0.9;
  double min_shrink = 0.2;
  double max_grow = 5.0;
};

struct StepResult {
  bool accepted = false;
  double h_used = 0.0;
  double h_next = 0.0;
  double error = 0.0;
};

/// One attempted step y(t) -> y(t + h). On acceptance y is updated in place.
template <typename Rhs>
StepResult dp45_step(Rhs&& rhs, double t, Eigen::VectorXd& y, double h,
                     const StepControl& c) {
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                      a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                      e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

  const Eigen::VectorXd k1 = rhs(t, y);
  const Eigen::VectorXd k2 = rhs(t + c2 * h, y + h * (a21 * k1));
  const Eigen::VectorXd k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
  const Eigen::VectorXd k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const Eigen::VectorXd k5 =
      rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const Eigen::VectorXd k6 =
      rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const Eigen::VectorXd y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const Eigen::VectorXd k7 = rhs(t + h, y5);
  const Eigen::VectorXd y4 =
      y + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

  double err = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double sc = c.atol + c.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
    const double d = (y5[i] - y4[i]) / sc;
    err += d * d;
  }
  err = std::sqrt(err / static_cast<double>(std::max<Eigen::Index>(1, y.size())));

  StepResult r;
  r.error = err;
  r.h_used = h;
  const double factor =
      err > 0 ? std::clamp(c.safety * std::pow(err, -0.2), c.min_shrink, c.max_grow)
              : c.max_grow;
  r.h_next = h * factor;
  if (err <= 1.0) {
    y = y5;
    r.accepted = true;
  }
  return r;
}

enum class DriveStatus { reached, step_underflow, max_steps };

/// Integrates y from t0 to t1 (either direction). The observer is invoked at
/// t0 and after every accepted step.
template <typename Rhs, typename Observer>
DriveStatus drive(Rhs&& rhs, Eigen::VectorXd& y, double t0, double t1,
                  const StepControl& c, int max_steps, Observer&& observe) {
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0;
  observe(t, y);
  if (t0 == t1) return DriveStatus::reached;
  double h = dir * std::max(1e-8, 1e-2 * std::abs(t1 - t0));
  const double h_floor = 1e-14 * (1.0 + std::abs(t1 - t0));
  for (int step = 0; step < max_steps; ++step) {
    if (dir * (t + h) > dir * t1) h = t1 - t;
    const StepResult r = dp45_step(rhs, t, y, h, c);
    if (r.accepted) {
      t += r.h_used;
      observe(t, y);
      if (dir * t >= dir * t1 - 1e-15 * std::abs(t1 - t0)) return DriveStatus::reached;
    }
    h = r.h_next;
    if (std::abs(h) < h_floor) return DriveStatus::step_underflow;
  }
  return DriveStatus::max_steps;
}

} // namespace orbit::ode
