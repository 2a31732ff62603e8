#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "iongate/core.hpp"

namespace iongate {

struct IntegratorConfig {
  enum class Method { kAdaptive, kFixedRK4 };
  Method method = Method::kAdaptive;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  // Upper step bound for the adaptive method; the step size for RK4.
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 50'000'000;
};

void validate(const IntegratorConfig& cfg);

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evals = 0;
};

namespace detail {

template <class Derived>
double scaled_error(const Eigen::MatrixBase<Derived>& err, const Eigen::MatrixBase<Derived>& y0,
                    const Eigen::MatrixBase<Derived>& y1, double atol, double rtol) {
  double acc = 0.0;
  const Eigen::Index n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double scale =
        atol + rtol * std::max(std::abs(y0.derived().data()[i]), std::abs(y1.derived().data()[i]));
    const double r = std::abs(err.derived().data()[i]) / scale;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(n, 1)));
}

}  // namespace detail

// Dormand-Prince 5(4) with PI step control.  rhs(t, y, dydt) fills dydt;
// observe(t, y) is called after every accepted step and may throw.
template <class State, class Rhs, class Observer>
StepStats integrate_dopri5(Rhs&& rhs, State& y, double t0, double t1, const IntegratorConfig& cfg,
                           Observer&& observe) {
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  StepStats stats;
  const double span = t1 - t0;
  if (span <= 0.0) return stats;

  State k1, k2, k3, k4, k5, k6, k7, tmp, ynew, err;
  rhs(t0, y, k1);
  ++stats.rhs_evals;

  // Initial step from the derivative scale.
  double h;
  {
    const double d0 = y.norm() + 1e-300;
    const double d1 = k1.norm() + 1e-300;
    h = std::min(0.01 * d0 / d1, span);
    h = std::min(h, cfg.max_step);
    h = std::max(h, span * 1e-12);
  }

  double t = t0;
  double err_prev = 1e-4;
  bool last_rejected = false;
  while (t < t1) {
    if (stats.accepted + stats.rejected >= cfg.max_steps)
      throw IntegratorFailure("step budget exhausted", t);
    if (t + h > t1 || t1 - (t + h) < 1e-12 * span) h = t1 - t;

    tmp = y + h * a21 * k1;
    rhs(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    rhs(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + h, tmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + h, ynew, k7);
    stats.rhs_evals += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = detail::scaled_error(err, y, ynew, cfg.abs_tol, cfg.rel_tol);
    if (!std::isfinite(en)) throw IntegratorFailure("non-finite error estimate", t);

    if (en <= 1.0) {
      t = (h == t1 - t) ? t1 : t + h;
      y.swap(ynew);
      k1.swap(k7);
      ++stats.accepted;
      observe(t, y);
      double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5) * std::pow(err_prev, 0.4 / 5);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
      h = std::min(h * fac, cfg.max_step);
      err_prev = std::max(en, 1e-4);
      last_rejected = false;
    } else {
      ++stats.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
      if (h < 1e-15 * std::max(1.0, std::abs(t)))
        throw IntegratorFailure("step size underflow", t);
    }
  }
  return stats;
}

// Classical fixed-step RK4; the last step is shortened to land on t1.
template <class State, class Rhs, class Observer>
StepStats integrate_rk4(Rhs&& rhs, State& y, double t0, double t1, double step, Observer&& observe) {
  StepStats stats;
  if (!(step > 0.0) || !std::isfinite(step)) throw Error("fixed-step RK4 requires a finite step");
  const double span = t1 - t0;
  if (span <= 0.0) return stats;
  const auto n = static_cast<std::size_t>(std::ceil(span / step - 1e-9));
  const double h = span / static_cast<double>(n);
  State k1, k2, k3, k4, tmp;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + h * static_cast<double>(i);
    rhs(t, y, k1);
    tmp = y + 0.5 * h * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = y + 0.5 * h * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    rhs(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    stats.rhs_evals += 4;
    ++stats.accepted;
    observe(i + 1 == n ? t1 : t + h, y);
  }
  return stats;
}

}  // namespace iongate
