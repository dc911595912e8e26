#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "chaoscope/error.hpp"
#include "chaoscope/integrate.hpp"
#include "chaoscope/state.hpp"
#include "chaoscope/systems.hpp"

namespace chaoscope {

enum class LinearStability { Stable, Unstable, Bifurcation };

/// Sign classification of x' = a x: decaying, growing, or the critical value a = 0.
inline LinearStability classify_linear(double a) {
  if (!std::isfinite(a)) throw DomainError("classify_linear: a must be finite");
  if (a < 0.0) return LinearStability::Stable;
  if (a > 0.0) return LinearStability::Unstable;
  return LinearStability::Bifurcation;
}

inline const char* to_string(LinearStability s) {
  switch (s) {
    case LinearStability::Stable: return "stable";
    case LinearStability::Unstable: return "unstable";
    case LinearStability::Bifurcation: return "bifurcation";
  }
  return "?";
}

/// True iff the max-norm of field(point) is at most tol.
template <VectorField F>
bool verify_equilibrium(const F& field, const StateVector& point, double tol) {
  if (!(tol > 0.0)) throw DomainError("verify_equilibrium: tol must be positive");
  return field(0.0, point).max_norm() <= tol;
}

/// Origin, plus C+/- = (+/-sqrt(b(r-1)), +/-sqrt(b(r-1)), r-1) when r > 1.
inline std::vector<StateVector> lorenz_equilibria(const LorenzParams& p) {
  p.validate();
  std::vector<StateVector> points{StateVector{0.0, 0.0, 0.0}};
  if (p.r > 1.0) {
    const double q = std::sqrt(p.b * (p.r - 1.0));
    points.push_back(StateVector{q, q, p.r - 1.0});
    points.push_back(StateVector{-q, -q, p.r - 1.0});
  }
  return points;
}

// Graphical iteration of a 1-D map.
struct CobwebTrace {
  // (x0, 0), (x0, f(x0)), (f(x0), f(x0)), (f(x0), f2(x0)), ...
  std::vector<Point2> vertices;
  // Graph of the map over [0, 1].
  std::vector<Point2> curve_samples;
};

inline constexpr std::size_t kCobwebCurveSamples = 257;

inline CobwebTrace cobweb_trace(const LogisticParams& p, double x0, std::size_t n) {
  p.validate();
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw DomainError("cobweb_trace: x0 must lie in [0, 1]");
  if (n == 0) throw DomainError("cobweb_trace: n must be positive");

  CobwebTrace trace;
  trace.vertices.reserve(2 * n + 1);
  trace.vertices.push_back({x0, 0.0});
  double x = x0;
  for (std::size_t k = 0; k < n; ++k) {
    const double next = logistic_step(p, x);
    trace.vertices.push_back({x, next});
    trace.vertices.push_back({next, next});
    x = next;
  }
  trace.curve_samples.reserve(kCobwebCurveSamples);
  for (std::size_t i = 0; i < kCobwebCurveSamples; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(kCobwebCurveSamples - 1);
    trace.curve_samples.push_back({s, logistic_step(p, s)});
  }
  return trace;
}

struct BifurcationDiagram {
  // (parameter, post-transient iterate)
  std::vector<Point2> points;
  double param_lo = 0.0;
  double param_hi = 0.0;
  std::size_t samples_per_param = 0;
  std::size_t discard = 0;
};

/// Scans p_steps evenly spaced parameters in [p_lo, p_hi] (endpoints included), iterating
/// x -> family(param, x) from x0 and keeping `keep` iterates after `discard` transients.
template <class Family>
  requires std::invocable<const Family&, double, double>
BifurcationDiagram bifurcation_scan(const Family& family, double p_lo, double p_hi, std::size_t p_steps,
                                    double x0, std::size_t discard, std::size_t keep) {
  if (!(p_lo < p_hi)) throw DomainError("bifurcation_scan: requires p_lo < p_hi");
  if (p_steps == 0 || keep == 0) throw DomainError("bifurcation_scan: p_steps and keep must be positive");
  if (discard < 100) throw DomainError("bifurcation_scan: discard must be at least 100");
  if (!std::isfinite(x0)) throw DomainError("bifurcation_scan: x0 must be finite");

  BifurcationDiagram out;
  out.param_lo = p_lo;
  out.param_hi = p_hi;
  out.samples_per_param = keep;
  out.discard = discard;
  out.points.reserve(p_steps * keep);
  for (std::size_t i = 0; i < p_steps; ++i) {
    const double param =
        p_steps == 1 ? p_lo : p_lo + (p_hi - p_lo) * static_cast<double>(i) / static_cast<double>(p_steps - 1);
    double x = x0;
    for (std::size_t k = 1; k <= discard + keep; ++k) {
      x = family(param, x);
      if (!std::isfinite(x)) {
        throw NonFiniteState("bifurcation_scan: iterate " + std::to_string(k) + " at parameter " +
                                 std::to_string(param) + " is not finite",
                             k);
      }
      if (k > discard) out.points.push_back({param, x});
    }
  }
  return out;
}

inline auto logistic_family() {
  return [](double mu, double x) { return logistic_step(LogisticParams{mu}, x); };
}

struct DivergenceReport {
  std::vector<double> times;
  std::vector<double> log_separation;
  double fitted_rate = 0.0;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  std::size_t fit_samples = 0;
};

inline constexpr std::size_t kDivergenceGridPoints = 2000;
inline constexpr double kSaturationFraction = 0.01;

namespace detail {

// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx == 0.0 ? 0.0 : sxy / sxx;
}

}  // namespace detail

/// Exponential growth rate of the distance between orbits started at x0 and x0 + delta0 e_1.
///
/// Both copies are advanced as one coupled system, so they share every accepted step. The
/// separation is read at the accepted steps nearest a uniform grid over [0, t1]; the fitted
/// rate is the least-squares slope of ln(separation) up to the first sample whose separation
/// exceeds 1% of the reference orbit's largest coordinate range.
template <VectorField F>
DivergenceReport divergence_rate(const F& field, const StateVector& x0, double delta0, double t1,
                                 const IntegratorConfig& config = {}) {
  if (!(delta0 > 0.0) || !std::isfinite(delta0)) throw DomainError("divergence_rate: delta0 must be positive");
  if (!(t1 > 0.0)) throw DomainError("divergence_rate: t1 must be positive");

  const std::size_t n = x0.dimension();
  std::vector<double> twin(2 * n);
  std::copy(x0.begin(), x0.end(), twin.begin());
  std::copy(x0.begin(), x0.end(), twin.begin() + static_cast<std::ptrdiff_t>(n));
  twin[n] += delta0;
  if (twin[n] == twin[0]) throw SeparationUnderflow("divergence_rate: delta0 vanishes against x0");

  auto coupled = [&field, n](double t, const StateVector& s) {
    const auto& v = s.values();
    const StateVector a(std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)));
    const StateVector b(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(n), v.end()));
    const StateVector fa = field(t, a);
    const StateVector fb = field(t, b);
    std::vector<double> out(fa.begin(), fa.end());
    out.insert(out.end(), fb.begin(), fb.end());
    return StateVector(std::move(out));
  };
  const Trajectory traj = integrate(coupled, StateVector(twin), 0.0, t1, config);

  double diameter = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& s : traj.states) {
      lo = std::min(lo, s[i]);
      hi = std::max(hi, s[i]);
    }
    diameter = std::max(diameter, hi - lo);
  }
  const double saturation = kSaturationFraction * diameter;

  DivergenceReport report;
  std::size_t step = 0;
  std::size_t last_taken = traj.times.size();
  for (std::size_t g = 0; g < kDivergenceGridPoints; ++g) {
    const double target = t1 * static_cast<double>(g) / static_cast<double>(kDivergenceGridPoints - 1);
    while (step + 1 < traj.times.size() &&
           std::abs(traj.times[step + 1] - target) <= std::abs(traj.times[step] - target)) {
      ++step;
    }
    if (step == last_taken) continue;
    last_taken = step;
    const auto& s = traj.states[step];
    double dist2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) dist2 += (s[n + i] - s[i]) * (s[n + i] - s[i]);
    if (dist2 == 0.0) {
      throw SeparationUnderflow("divergence_rate: trajectories coincide at t=" + std::to_string(traj.times[step]));
    }
    report.times.push_back(traj.times[step]);
    report.log_separation.push_back(0.5 * std::log(dist2));
  }

  std::size_t end = report.times.size();
  if (diameter > 0.0) {
    const double log_cut = std::log(saturation);
    for (std::size_t i = 0; i < report.times.size(); ++i) {
      if (report.log_separation[i] > log_cut) {
        end = i;
        break;
      }
    }
  }
  if (end < 2) throw DomainError("divergence_rate: fewer than two samples before saturation");
  const std::vector<double> ft(report.times.begin(), report.times.begin() + static_cast<std::ptrdiff_t>(end));
  const std::vector<double> fy(report.log_separation.begin(),
                               report.log_separation.begin() + static_cast<std::ptrdiff_t>(end));
  report.fitted_rate = detail::ls_slope(ft, fy);
  report.fit_lo = ft.front();
  report.fit_hi = ft.back();
  report.fit_samples = end;
  return report;
}

}  // namespace chaoscope
