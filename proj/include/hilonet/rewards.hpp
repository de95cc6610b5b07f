#pragma once
// Engineered rewards for both policy levels, the goal-achievement
// predicate, and the numerical check that the phase-shaped high reward
// prefers the expert-following policy over a detour that only hits the
// final observation.
//
// Conventions: the dense low-reward term is the squared Euclidean
// distance; the achievement predicate compares the (unsquared)
// Euclidean distance against eps with strict '<'. I(index) is the
// observation's position inside its own trajectory, and a missing
// match counts as index 0, which is what punishes leaving the
// demonstrated observations.

#include <cstddef>
#include <optional>
#include <span>

#include "hilonet/demos.hpp"

namespace hilonet {

struct RewardParams {
  double eps = 0.1;        // achievement threshold
  double r_bonus = 1.0;    // sparse bonus added on achievement
  double alpha = 1.0;      // weight of the phase-progress term
  std::size_t delta_t = 5; // steps between high-policy decisions
};

// ||goal - obs||_2 < eps, strict.
bool achieved(std::span<const double> obs, std::span<const double> goal, double eps);

// -||goal - next_obs||^2, plus r_bonus when achieved.
double low_reward(std::span<const double> next_obs, std::span<const double> goal,
                  const RewardParams& params);

// 0 when the sub-goal was not achieved; otherwise
// 1 + alpha * (I(cur) - I(prev)) with I(absent) = 0.
double high_reward(std::optional<DemoIndex> prev_index, std::optional<DemoIndex> cur_index,
                   bool subgoal_achieved, const RewardParams& params);

// Discounted values of the two candidate optimal policies under the
// high reward with alpha = 1: the expert-following policy collects
//   V1 = sum_{t=0}^{T} gamma^t * (1 + delta_t / T)
// while a policy that only reaches the final observation collects
//   V2 = 2 * gamma^T.
// holds reports V1 > V2. Closed-form evaluation; the test suite checks
// it against a term-by-term sum.
struct ValueInequality {
  double v1 = 0.0;
  double v2 = 0.0;
  bool holds = false;
};
ValueInequality verify_value_inequality(double gamma, std::size_t T, std::size_t delta_t);

struct ValueSweepRow {
  double gamma;
  std::size_t T;
  std::size_t delta_t;
  ValueInequality result;
};
// Grid {0.5, 0.9, 0.99} x {5, 10, 50} x {1, T/5}.
std::vector<ValueSweepRow> value_inequality_sweep();

}  // namespace hilonet
