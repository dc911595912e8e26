#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chaoscope/error.hpp"

namespace chaoscope {

/// A point in n-dimensional phase space. Always non-empty and finite.
class StateVector {
 public:
  StateVector(std::initializer_list<double> values)
      : StateVector(std::vector<double>(values)) {}

  explicit StateVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
      throw DomainError("state vector must have dimension >= 1");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw NonFiniteState("state component " + std::to_string(i) + " is not finite", i);
      }
    }
  }

  std::size_t dimension() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> components() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  // Largest absolute component.
  double max_norm() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  friend bool operator==(const StateVector&, const StateVector&) = default;

 private:
  std::vector<double> values_;
};

/// Accepted steps of a flow integration, including the initial point.
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVector> states;
  std::size_t dimension = 0;

  std::size_t accepted_steps() const noexcept {
    return times.empty() ? 0 : times.size() - 1;
  }
  const StateVector& final_state() const { return states.back(); }
};

/// Post-transient orbit of a discrete map. points[k] is the (discarded + k)-th iterate.
struct MapOrbit {
  std::vector<StateVector> points;
  std::size_t discarded = 0;
};

}  // namespace chaoscope
