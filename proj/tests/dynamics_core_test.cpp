#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "chaoscope/integrate.hpp"
#include "chaoscope/iterate.hpp"
#include "chaoscope/systems.hpp"

namespace chaoscope {
namespace {

auto linear(double a) {
  return [a](double, const StateVector& s) { return StateVector{a * s[0]}; };
}

IntegratorConfig tolerances(double tol) {
  IntegratorConfig c;
  c.rel_tol = tol;
  c.abs_tol = tol;
  return c;
}

TEST(Integrate, GrowthMatchesExponential) {
  const Trajectory t = integrate(linear(1.0), StateVector{1.0}, 0.0, 1.0, tolerances(1e-6));
  EXPECT_NEAR(t.final_state()[0] / std::exp(1.0), 1.0, 1e-5);
  EXPECT_NEAR(t.final_state()[0], 2.718282, 1e-5 * 2.718282);
}

TEST(Integrate, DecayMatchesExponential) {
  const Trajectory t = integrate(linear(-1.0), StateVector{1.0}, 0.0, 1.0, tolerances(1e-6));
  EXPECT_NEAR(t.final_state()[0] / std::exp(-1.0), 1.0, 1e-5);
  EXPECT_NEAR(t.final_state()[0], 0.367879, 1e-5 * 0.367879);
}

TEST(Integrate, ZeroFieldKeepsInitialState) {
  auto zero = [](double, const StateVector&) { return StateVector{0.0, 0.0, 0.0}; };
  const StateVector x0{15.0, 20.0, 30.0};
  const Trajectory t = integrate(zero, x0, 0.0, 100.0);
  for (const auto& s : t.states) EXPECT_EQ(s, x0);
}

TEST(Integrate, TrajectorySpansRequestedInterval) {
  LorenzParams p;
  auto field = [p](double, const StateVector& s) { return lorenz_field(p, s); };
  const Trajectory t = integrate(field, StateVector{15.0, 20.0, 30.0}, 0.5, 7.25, tolerances(1e-4));
  ASSERT_GE(t.times.size(), 2u);
  EXPECT_EQ(t.times.front(), 0.5);
  EXPECT_EQ(t.times.back(), 7.25);
  EXPECT_EQ(t.times.size(), t.states.size());
  EXPECT_EQ(t.accepted_steps() + 1, t.times.size());
  for (std::size_t i = 1; i < t.times.size(); ++i) EXPECT_LT(t.times[i - 1], t.times[i]);
  for (const auto& s : t.states) EXPECT_EQ(s.dimension(), 3u);
}

TEST(Integrate, NonAutonomousField) {
  // x' = cos t, x(0) = 0  =>  x = sin t
  auto field = [](double t, const StateVector&) { return StateVector{std::cos(t)}; };
  const Trajectory t = integrate(field, StateVector{0.0}, 0.0, 3.0, tolerances(1e-9));
  EXPECT_NEAR(t.final_state()[0], std::sin(3.0), 1e-7);
}

TEST(Integrate, RejectsBadSpanAndConfig) {
  EXPECT_THROW(integrate(linear(1.0), StateVector{1.0}, 1.0, 1.0), DomainError);
  EXPECT_THROW(integrate(linear(1.0), StateVector{1.0}, 2.0, 1.0), DomainError);
  IntegratorConfig bad;
  bad.rel_tol = 0.0;
  EXPECT_THROW(integrate(linear(1.0), StateVector{1.0}, 0.0, 1.0, bad), DomainError);
  bad = {};
  bad.abs_tol = 1.5;
  EXPECT_THROW(integrate(linear(1.0), StateVector{1.0}, 0.0, 1.0, bad), DomainError);
  bad = {};
  bad.initial_step = 1e-3;
  bad.min_step = 1e-2;
  EXPECT_THROW(integrate(linear(1.0), StateVector{1.0}, 0.0, 1.0, bad), DomainError);
}

TEST(Integrate, NonFiniteFieldIsReported) {
  auto nan_field = [](double t, const StateVector& s) {
    return StateVector{t > 0.5 ? std::numeric_limits<double>::quiet_NaN() : s[0]};
  };
  EXPECT_THROW(integrate(nan_field, StateVector{1.0}, 0.0, 1.0), NonFiniteState);
}

TEST(Integrate, FiniteTimeBlowUpStops) {
  // x' = x^2, x(0) = 1 blows up at t = 1.
  auto field = [](double, const StateVector& s) { return StateVector{s[0] * s[0]}; };
  try {
    integrate(field, StateVector{1.0}, 0.0, 2.0);
    FAIL() << "expected the integration to stop";
  } catch (const StepUnderflow&) {
  } catch (const NonFiniteState&) {
  }
}

TEST(Integrate, StepBudgetIsEnforced) {
  LorenzParams p;
  auto field = [p](double, const StateVector& s) { return lorenz_field(p, s); };
  IntegratorConfig c = tolerances(1e-8);
  c.max_steps = 5;
  EXPECT_THROW(integrate(field, StateVector{15.0, 20.0, 30.0}, 0.0, 100.0, c), MaxStepsExceeded);
}

TEST(Integrate, DimensionChangeIsRejected) {
  auto field = [](double, const StateVector&) { return StateVector{1.0, 2.0}; };
  EXPECT_THROW(integrate(field, StateVector{1.0}, 0.0, 1.0), DimensionMismatch);
}

TEST(Integrate, ChainedMatchesOneShot) {
  for (double a : {-1.5, -0.3, 0.4, 1.2}) {
    const IntegratorConfig c = tolerances(1e-6);
    const Trajectory whole = integrate(linear(a), StateVector{2.0}, 0.0, 4.0, c);
    const Trajectory first = integrate(linear(a), StateVector{2.0}, 0.0, 1.7, c);
    const Trajectory second = integrate(linear(a), first.final_state(), 1.7, 4.0, c);
    const double end = whole.final_state()[0];
    EXPECT_NEAR(second.final_state()[0], end, 10.0 * (c.abs_tol + c.rel_tol * std::abs(end))) << "a=" << a;
  }
}

TEST(Integrate, RandomLinearEndpointsWithinTolerance) {
  std::mt19937 rng(20261018);
  std::uniform_real_distribution<double> ra(-2.0, 2.0), ru(-10.0, 10.0), rt(0.1, 3.0);
  IntegratorConfig c;
  c.rel_tol = 1e-6;
  c.abs_tol = 1e-9;
  for (int trial = 0; trial < 200; ++trial) {
    const double a = ra(rng), u0 = ru(rng), t1 = rt(rng);
    const Trajectory t = integrate(linear(a), StateVector{u0}, 0.0, t1, c);
    const double exact = linear_solution(Linear1DParams{a}, u0, t1);
    EXPECT_LE(std::abs(t.final_state()[0] - exact), 100.0 * c.rel_tol * std::abs(exact))
        << "a=" << a << " u0=" << u0 << " t1=" << t1;
  }
}

TEST(Integrate, TighterToleranceNeverWorse) {
  for (double a : {-2.0, -1.0, 0.5, 1.0, 2.0}) {
    double previous = std::numeric_limits<double>::infinity();
    for (double tol = 1e-3; tol >= 1e-10; tol /= 10.0) {
      const Trajectory t = integrate(linear(a), StateVector{1.0}, 0.0, 3.0, tolerances(tol));
      const double error = std::abs(t.final_state()[0] - std::exp(3.0 * a));
      EXPECT_LE(error, previous) << "a=" << a << " tol=" << tol;
      previous = error;
    }
  }
}

TEST(Integrate, Deterministic) {
  ChuaParams p;
  auto field = [p](double, const StateVector& s) { return chua_field(p, s); };
  const Trajectory a = integrate(field, StateVector{-1.6, 0.0, 1.6}, 0.0, 30.0, tolerances(1e-5));
  const Trajectory b = integrate(field, StateVector{-1.6, 0.0, 1.6}, 0.0, 30.0, tolerances(1e-5));
  EXPECT_EQ(a.times, b.times);
  EXPECT_EQ(a.states, b.states);
}

TEST(StateVector, RejectsEmptyAndNonFinite) {
  EXPECT_THROW(StateVector(std::vector<double>{}), DomainError);
  EXPECT_THROW((StateVector{1.0, std::numeric_limits<double>::infinity()}), NonFiniteState);
  EXPECT_THROW((StateVector{std::numeric_limits<double>::quiet_NaN()}), NonFiniteState);
}

TEST(IterateMap, IdentityRepeatsStart) {
  auto identity = [](const StateVector& s) { return s; };
  const MapOrbit orbit = iterate_map(identity, StateVector{0.3}, 5);
  ASSERT_EQ(orbit.points.size(), 5u);
  for (const auto& p : orbit.points) EXPECT_EQ(p, StateVector{0.3});
  EXPECT_EQ(orbit.discarded, 0u);
}

TEST(IterateMap, LogisticFirstStep) {
  const LogisticParams p{3.8282};
  auto map = [p](const StateVector& s) { return StateVector{logistic_step(p, s[0])}; };
  const MapOrbit orbit = iterate_map(map, StateVector{0.2}, 2);
  ASSERT_EQ(orbit.points.size(), 2u);
  EXPECT_EQ(orbit.points[0][0], 0.2);
  EXPECT_NEAR(orbit.points[1][0], 0.612512, 1e-15);
}

TEST(IterateMap, HenonWithDiscard) {
  const HenonParams p{1.2, 0.4};
  auto map = [p](const StateVector& s) {
    const Point2 n = henon_step(p, {s[0], s[1]});
    return StateVector{n.x, n.y};
  };
  const MapOrbit orbit = iterate_map(map, StateVector{0.1, 0.0}, 2, 1);
  ASSERT_EQ(orbit.points.size(), 1u);
  EXPECT_EQ(orbit.discarded, 1u);
  EXPECT_NEAR(orbit.points[0][0], 0.988, 1e-15);
  EXPECT_NEAR(orbit.points[0][1], 0.04, 1e-15);
}

TEST(IterateMap, DiscardDropsLeadingPoints) {
  const HenonParams p{1.2, 0.4};
  auto map = [p](const StateVector& s) {
    const Point2 n = henon_step(p, {s[0], s[1]});
    return StateVector{n.x, n.y};
  };
  const MapOrbit full = iterate_map(map, StateVector{0.1, 0.0}, 300);
  for (std::size_t d : {1u, 7u, 49u, 299u}) {
    const MapOrbit cut = iterate_map(map, StateVector{0.1, 0.0}, 300, d);
    ASSERT_EQ(cut.points.size(), 300 - d);
    for (std::size_t k = 0; k < cut.points.size(); ++k) EXPECT_EQ(cut.points[k], full.points[d + k]);
  }
}

TEST(IterateMap, OverflowReportsIndex) {
  auto square = [](const StateVector& s) { return StateVector{s[0] * s[0]}; };
  try {
    iterate_map(square, StateVector{10.0}, 50);
    FAIL() << "expected overflow";
  } catch (const NonFiniteState& e) {
    // 10^(2^k) overflows a double at k = 9.
    EXPECT_EQ(e.index(), 9u);
  }
}

TEST(IterateMap, Preconditions) {
  auto identity = [](const StateVector& s) { return s; };
  EXPECT_THROW(iterate_map(identity, StateVector{0.1}, 0), DomainError);
  EXPECT_THROW(iterate_map(identity, StateVector{0.1}, 3, 3), DomainError);
}

}  // namespace
}  // namespace chaoscope
