#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chaoscope/error.hpp"
#include "chaoscope/state.hpp"

namespace chaoscope {

/// Vector field of an autonomous or non-autonomous flow: x' = f(t, x).
template <class F>
concept VectorField = std::invocable<const F&, double, const StateVector&> &&
    std::convertible_to<std::invoke_result_t<const F&, double, const StateVector&>, StateVector>;

struct IntegratorConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-6;
  // Empty means (t1 - t0) / 100 clamped to [min_step, t1 - t0].
  std::optional<double> initial_step;
  std::size_t max_steps = 1'000'000;
  // Empty means 1e-12 * (t1 - t0).
  std::optional<double> min_step;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw DomainError("rel_tol must lie in (0, 1)");
    if (!(abs_tol > 0.0 && abs_tol < 1.0)) throw DomainError("abs_tol must lie in (0, 1)");
    if (max_steps == 0) throw DomainError("max_steps must be positive");
    if (initial_step && !(*initial_step > 0.0)) throw DomainError("initial_step must be positive");
    if (min_step && !(*min_step > 0.0)) throw DomainError("min_step must be positive");
    if (initial_step && min_step && !(*min_step < *initial_step)) {
      throw DomainError("min_step must be smaller than initial_step");
    }
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DormandPrince {
  static constexpr std::array<double, 7> c{0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  // Difference between the 5th- and 4th-order weights.
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
};

// PI step-size controller constants.
inline constexpr double kSafety = 0.9;
inline constexpr double kBeta = 0.04;
inline constexpr double kAlpha = 0.2 - 0.75 * kBeta;
inline constexpr double kMinFactor = 0.2;
inline constexpr double kMaxFactor = 10.0;

template <VectorField F>
std::vector<double> evaluate(const F& field, double t, const std::vector<double>& x, std::size_t step) {
  StateVector in = [&] {
    try {
      return StateVector(x);
    } catch (const NonFiniteState&) {
      throw NonFiniteState("integrate: stage state became non-finite at t=" + std::to_string(t), step);
    }
  }();
  StateVector out = [&]() -> StateVector {
    try {
      return field(t, in);
    } catch (const NonFiniteState&) {
      throw NonFiniteState("integrate: field returned a non-finite value at t=" + std::to_string(t), step);
    }
  }();
  if (out.dimension() != x.size()) {
    throw DimensionMismatch("integrate: field dimension " + std::to_string(out.dimension()) +
                            " differs from state dimension " + std::to_string(x.size()));
  }
  return out.values();
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of x' = field(t, x) over [t0, t1].
///
/// Every accepted step satisfies max_i |err_i| / (abs_tol + rel_tol * max(|x_i|, |x_i'|)) <= 1,
/// where err is the embedded 4th-order error estimate. The returned trajectory holds the
/// initial point followed by every accepted step; its last time is exactly t1.
template <VectorField F>
Trajectory integrate(const F& field, const StateVector& x0, double t0, double t1,
                     const IntegratorConfig& config = {}) {
  using T = detail::DormandPrince;
  config.validate();
  if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 > t0)) {
    throw DomainError("integrate: requires finite t0 < t1");
  }
  const double span = t1 - t0;
  const double min_step = config.min_step.value_or(1e-12 * span);
  double h = config.initial_step.value_or(std::clamp(span / 100.0, min_step, span));
  h = std::min(h, span);

  const std::size_t n = x0.dimension();
  Trajectory out;
  out.dimension = n;
  out.times.push_back(t0);
  out.states.push_back(x0);

  std::vector<double> y = x0.values();
  std::vector<double> k1 = detail::evaluate(field, t0, y, 0);
  std::vector<double> k2, k3, k4, k5, k6, k7;
  std::vector<double> stage(n), y_new(n);

  double t = t0;
  double previous_error = 1e-4;
  bool rejected_last = false;
  std::size_t attempts = 0;

  while (t < t1) {
    if (++attempts > config.max_steps) {
      throw MaxStepsExceeded("integrate: exceeded " + std::to_string(config.max_steps) +
                             " steps at t=" + std::to_string(t));
    }
    const double remaining = t1 - t;
    if (h < min_step && remaining > min_step) {
      throw StepUnderflow("integrate: step size " + std::to_string(h) + " fell below min_step at t=" +
                          std::to_string(t));
    }
    if (!(t + h > t)) {
      throw StepUnderflow("integrate: step size below time resolution at t=" + std::to_string(t));
    }
    bool last = false;
    if (h >= remaining) {
      h = remaining;
      last = true;
    }

    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + h * T::a21 * k1[i];
    k2 = detail::evaluate(field, t + T::c[1] * h, stage, attempts);
    for (std::size_t i = 0; i < n; ++i) stage[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
    k3 = detail::evaluate(field, t + T::c[2] * h, stage, attempts);
    for (std::size_t i = 0; i < n; ++i) {
      stage[i] = y[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
    }
    k4 = detail::evaluate(field, t + T::c[3] * h, stage, attempts);
    for (std::size_t i = 0; i < n; ++i) {
      stage[i] = y[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
    }
    k5 = detail::evaluate(field, t + T::c[4] * h, stage, attempts);
    for (std::size_t i = 0; i < n; ++i) {
      stage[i] = y[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] +
                             T::a65 * k5[i]);
    }
    k6 = detail::evaluate(field, t + h, stage, attempts);
    for (std::size_t i = 0; i < n; ++i) {
      y_new[i] = y[i] + h * (T::a71 * k1[i] + T::a73 * k3[i] + T::a74 * k4[i] + T::a75 * k5[i] +
                             T::a76 * k6[i]);
    }
    k7 = detail::evaluate(field, t + h, y_new, attempts);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                            T::e6 * k6[i] + T::e7 * k7[i]);
      const double scale = config.abs_tol + config.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err)) {
      throw NonFiniteState("integrate: error estimate is not finite at t=" + std::to_string(t), attempts);
    }

    const double growth = std::pow(err, detail::kAlpha);
    if (err <= 1.0) {
      double factor = growth / std::pow(previous_error, detail::kBeta) / detail::kSafety;
      factor = std::clamp(factor, 1.0 / detail::kMaxFactor, 1.0 / detail::kMinFactor);
      double h_next = h / factor;
      if (rejected_last) h_next = std::min(h_next, h);
      previous_error = std::max(err, 1e-4);
      rejected_last = false;

      t = last ? t1 : t + h;
      y.swap(y_new);
      k1.swap(k7);  // first-same-as-last
      out.times.push_back(t);
      out.states.emplace_back(y);
      h = h_next;
    } else {
      h = h / std::min(1.0 / detail::kMinFactor, growth / detail::kSafety);
      rejected_last = true;
    }
  }
  return out;
}

}  // namespace chaoscope
