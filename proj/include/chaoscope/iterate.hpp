#pragma once

#include <concepts>
#include <cstddef>
#include <string>

#include "chaoscope/error.hpp"
#include "chaoscope/state.hpp"

namespace chaoscope {

template <class M>
concept DiscreteMap = std::invocable<const M&, const StateVector&> &&
    std::convertible_to<std::invoke_result_t<const M&, const StateVector&>, StateVector>;

/// Orbit x0, f(x0), ..., f^(n-1)(x0) with the first `discard` points dropped.
template <DiscreteMap M>
MapOrbit iterate_map(const M& map, const StateVector& x0, std::size_t n, std::size_t discard = 0) {
  if (n == 0) throw DomainError("iterate_map: n must be positive");
  if (discard > 0 && n <= discard) throw DomainError("iterate_map: n must exceed discard");

  MapOrbit orbit;
  orbit.discarded = discard;
  orbit.points.reserve(n - discard);
  StateVector x = x0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) {
      try {
        StateVector next = map(x);
        if (next.dimension() != x.dimension()) {
          throw DimensionMismatch("iterate_map: map changed the state dimension");
        }
        x = std::move(next);
      } catch (const NonFiniteState&) {
        throw NonFiniteState("iterate_map: iterate " + std::to_string(k) + " is not finite", k);
      }
    }
    if (k >= discard) orbit.points.push_back(x);
  }
  return orbit;
}

}  // namespace chaoscope
