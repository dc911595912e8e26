#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chaoscope/error.hpp"
#include "chaoscope/state.hpp"

namespace chaoscope {

// Logistic map x -> mu x (1 - x). The cipher literature calls mu "r".
struct LogisticParams {
  double mu = 3.8282;

  void validate() const {
    if (!(mu >= 0.0 && mu <= 4.0)) throw DomainError("logistic mu must lie in [0, 4]");
  }
};

inline constexpr double kLogisticFigureMu = 3.8282;
inline constexpr double kLogisticCipherMu = 3.9;

struct HenonParams {
  double a = 1.2;
  double b = 0.4;
};

struct LorenzParams {
  double sigma = 10.0;
  double r = 28.0;
  double b = 8.0 / 3.0;

  void validate() const {
    if (!(sigma > 0.0 && r > 0.0 && b > 0.0)) throw DomainError("Lorenz parameters must be positive");
  }
};

/// Chua circuit with piecewise-linear diode g(x) = m1 x + (m0 - m1)/2 (|x+1| - |x-1|).
/// m0 is the inner slope (|x| <= 1), m1 the outer slope.
struct ChuaParams {
  double c1 = 15.0;
  double c2 = 1.0;
  double c3 = 25.58;
  double m0 = -8.0 / 7.0;
  double m1 = -5.0 / 7.0;

  void validate() const {
    if (m0 == m1) throw DomainError("Chua slopes m0 and m1 must differ");
  }
};

// Parameters that reproduce the published simulation listing, which subtracts g(x)
// without the c1 factor and uses slopes m1 = 5/7, m0 = 5/7 - 3/7.
inline constexpr ChuaParams kChuaListingParams{15.0, 1.0, 25.58, 2.0 / 7.0, 5.0 / 7.0};

struct Linear1DParams {
  double a = 1.0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point2&, const Point2&) = default;
};

inline double logistic_step(const LogisticParams& p, double x) { return p.mu * x * (1.0 - x); }

inline Point2 henon_step(const HenonParams& p, Point2 s) {
  return {1.0 + s.y - p.a * s.x * s.x, p.b * s.x};
}

inline StateVector lorenz_field(const LorenzParams& p, const StateVector& s) {
  const double x = s[0], y = s[1], z = s[2];
  return {p.sigma * (y - x), p.r * x - y - x * z, x * y - p.b * z};
}

inline double chua_g(const ChuaParams& p, double x) {
  return p.m1 * x + (p.m0 - p.m1) / 2.0 * (std::abs(x + 1.0) - std::abs(x - 1.0));
}

inline StateVector chua_field(const ChuaParams& p, const StateVector& s) {
  const double x = s[0], y = s[1], z = s[2];
  return {p.c1 * (y - x - chua_g(p, x)), p.c2 * (x - y + z), -p.c3 * y};
}

// x' = c1 (y - x) - g(x): the nonlinearity enters unscaled, as in the simulation listing.
inline StateVector chua_listing_field(const ChuaParams& p, const StateVector& s) {
  const double x = s[0], y = s[1], z = s[2];
  return {p.c1 * (y - x) - chua_g(p, x), p.c2 * (x - y + z), -p.c3 * y};
}

inline StateVector linear_field(const Linear1DParams& p, const StateVector& s) {
  return StateVector{p.a * s[0]};
}

inline double linear_solution(const Linear1DParams& p, double u0, double t) {
  return u0 * std::exp(p.a * t);
}

// Presets consumed by the command line.

enum class SystemKind { Map, Flow };

using FieldFn = std::function<StateVector(double, const StateVector&)>;
using MapFn = std::function<StateVector(const StateVector&)>;

struct SystemPreset {
  std::string name;
  SystemKind kind = SystemKind::Flow;
  std::size_t dimension = 0;
  StateVector default_x0{0.0};
  FieldFn field;  // set for flows
  MapFn map;      // set for maps
};

inline const std::vector<std::string_view>& preset_names() {
  static const std::vector<std::string_view> names{"logistic", "henon",           "lorenz",
                                                    "chua",     "chua-paper-code", "linear1d"};
  return names;
}

using ParamOverrides = std::map<std::string, double, std::less<>>;

namespace detail {

inline void assign_params(const ParamOverrides& overrides,
                          const std::map<std::string_view, double*>& slots, std::string_view preset) {
  for (const auto& [key, value] : overrides) {
    auto it = slots.find(key);
    if (it == slots.end()) {
      throw DomainError("preset '" + std::string(preset) + "' has no parameter '" + key + "'");
    }
    if (!std::isfinite(value)) throw DomainError("parameter '" + key + "' must be finite");
    *it->second = value;
  }
}

}  // namespace detail

/// Builds the named preset with optional parameter overrides; std::nullopt for unknown names.
inline std::optional<SystemPreset> make_preset(std::string_view name, const ParamOverrides& overrides = {}) {
  SystemPreset preset;
  preset.name = std::string(name);
  if (name == "logistic") {
    LogisticParams p;
    detail::assign_params(overrides, {{"mu", &p.mu}}, name);
    p.validate();
    preset.kind = SystemKind::Map;
    preset.dimension = 1;
    preset.default_x0 = StateVector{0.2};
    preset.map = [p](const StateVector& s) { return StateVector{logistic_step(p, s[0])}; };
  } else if (name == "henon") {
    HenonParams p;
    detail::assign_params(overrides, {{"a", &p.a}, {"b", &p.b}}, name);
    preset.kind = SystemKind::Map;
    preset.dimension = 2;
    preset.default_x0 = StateVector{0.1, 0.0};
    preset.map = [p](const StateVector& s) {
      const Point2 n = henon_step(p, {s[0], s[1]});
      return StateVector{n.x, n.y};
    };
  } else if (name == "lorenz") {
    LorenzParams p;
    detail::assign_params(overrides, {{"sigma", &p.sigma}, {"r", &p.r}, {"b", &p.b}}, name);
    p.validate();
    preset.dimension = 3;
    preset.default_x0 = StateVector{15.0, 20.0, 30.0};
    preset.field = [p](double, const StateVector& s) { return lorenz_field(p, s); };
  } else if (name == "chua" || name == "chua-paper-code") {
    const bool listing = name == "chua-paper-code";
    ChuaParams p = listing ? kChuaListingParams : ChuaParams{};
    detail::assign_params(
        overrides, {{"c1", &p.c1}, {"c2", &p.c2}, {"c3", &p.c3}, {"m0", &p.m0}, {"m1", &p.m1}}, name);
    p.validate();
    preset.dimension = 3;
    preset.default_x0 = StateVector{-1.6, 0.0, 1.6};
    if (listing) {
      preset.field = [p](double, const StateVector& s) { return chua_listing_field(p, s); };
    } else {
      preset.field = [p](double, const StateVector& s) { return chua_field(p, s); };
    }
  } else if (name == "linear1d") {
    Linear1DParams p;
    detail::assign_params(overrides, {{"a", &p.a}}, name);
    preset.dimension = 1;
    preset.default_x0 = StateVector{1.0};
    preset.field = [p](double, const StateVector& s) { return linear_field(p, s); };
  } else {
    return std::nullopt;
  }
  return preset;
}

}  // namespace chaoscope
