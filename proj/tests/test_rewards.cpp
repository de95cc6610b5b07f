#include <doctest.h>

#include <cmath>
#include <vector>

#include "hilonet/rewards.hpp"
#include "hilonet/rng.hpp"

using namespace hilonet;

namespace {

// Independent term-by-term evaluation of the two discounted sums.
ValueInequality value_sum_oracle(double gamma, std::size_t T, std::size_t delta_t) {
  ValueInequality out;
  double discount = 1.0;
  const double per_step = 1.0 + static_cast<double>(delta_t) / static_cast<double>(T);
  for (std::size_t t = 0; t <= T; ++t) {
    out.v1 += discount * per_step;
    discount *= gamma;
  }
  out.v2 = 2.0 * std::pow(gamma, static_cast<double>(T));
  out.holds = out.v1 > out.v2;
  return out;
}

}  // namespace

TEST_CASE("achieved: strict Euclidean threshold") {
  const std::vector<double> o{0.0, 0.0};
  CHECK(achieved(o, o, 1e-12));

  const std::vector<double> g{3.0, 4.0};  // distance exactly 5
  CHECK(achieved(o, g, 5.1));
  CHECK_FALSE(achieved(o, g, 4.9));
  CHECK_FALSE(achieved(o, g, 5.0));  // boundary excluded

  const std::vector<double> at_eps{0.25, 0.0};
  CHECK_FALSE(achieved(o, at_eps, 0.25));

  CHECK_THROWS_AS((void)achieved(o, std::vector<double>{1.0}, 0.1), ShapeError);
}

TEST_CASE("low_reward branch behavior") {
  RewardParams params;
  params.eps = 0.1;
  params.r_bonus = 1.0;

  const std::vector<double> zero{0.0, 0.0};
  CHECK(low_reward(zero, zero, params) == 1.0);  // 0 + bonus

  const std::vector<double> far{1.0, 1.0};
  CHECK(low_reward(zero, far, params) == -2.0);

  const std::vector<double> near{0.0, 0.05};
  const double expected = -(0.05 * 0.05) + 1.0;
  CHECK(low_reward(zero, near, params) == expected);
  CHECK(low_reward(zero, near, params) == doctest::Approx(0.9975).epsilon(1e-12));
}

TEST_CASE("low_reward properties: bonus cap and monotone improvement") {
  RewardParams params;
  params.eps = 0.3;
  params.r_bonus = 1.0;
  RandomEngine rng(31);
  const std::vector<double> goal{0.5, -0.25, 1.0};
  double prev_inside = -1e9;
  double prev_outside = -1e9;
  for (int k = 40; k >= 1; --k) {
    // Walk toward the goal along a ray; reward must increase within
    // each branch and never exceed r_bonus.
    const double dist = 0.05 * k;
    const std::vector<double> obs{goal[0] + dist, goal[1], goal[2]};
    const double r = low_reward(obs, goal, params);
    CHECK(r <= params.r_bonus);
    if (dist < params.eps) {
      CHECK(r > prev_inside);
      prev_inside = r;
    } else {
      CHECK(r > prev_outside);
      prev_outside = r;
    }
  }
  CHECK(low_reward(goal, goal, params) == params.r_bonus);
}

TEST_CASE("high_reward branches") {
  RewardParams params;
  params.alpha = 1.0;

  CHECK(high_reward(DemoIndex{0, 3}, DemoIndex{0, 7}, false, params) == 0.0);
  CHECK(high_reward(std::nullopt, std::nullopt, false, params) == 0.0);
  CHECK(high_reward(DemoIndex{0, 3}, DemoIndex{0, 7}, true, params) == 5.0);
  // Deviation: current observation unmatched, I(cur) = 0.
  CHECK(high_reward(DemoIndex{1, 5}, std::nullopt, true, params) == -4.0);
  // First decision of an episode usually has no previous match.
  CHECK(high_reward(std::nullopt, DemoIndex{0, 2}, true, params) == 3.0);

  params.alpha = 0.0;
  CHECK(high_reward(DemoIndex{0, 1}, DemoIndex{0, 9}, true, params) == 1.0);
  CHECK(high_reward(DemoIndex{0, 1}, DemoIndex{0, 9}, false, params) == 0.0);

  params.alpha = 2.5;
  CHECK(high_reward(DemoIndex{0, 2}, DemoIndex{0, 6}, true, params) == 1.0 + 2.5 * 4.0);
}

TEST_CASE("high_reward phase terms telescope over an achieved run") {
  RewardParams params;
  params.alpha = 1.0;
  const std::vector<std::size_t> indices{2, 5, 4, 9, 14, 14, 20};
  double phase_sum = 0.0;
  for (std::size_t k = 1; k < indices.size(); ++k) {
    const double r =
        high_reward(DemoIndex{0, indices[k - 1]}, DemoIndex{0, indices[k]}, true, params);
    phase_sum += r - 1.0;
  }
  CHECK(phase_sum == static_cast<double>(indices.back()) - static_cast<double>(indices.front()));
}

TEST_CASE("value inequality: spot values against the series oracle") {
  const auto spot = verify_value_inequality(0.9, 10, 1);
  const auto oracle = value_sum_oracle(0.9, 10, 1);
  CHECK(spot.v1 == doctest::Approx(oracle.v1).epsilon(1e-12));
  CHECK(spot.v2 == doctest::Approx(oracle.v2).epsilon(1e-12));
  CHECK(spot.v1 == doctest::Approx(7.54808344301).epsilon(1e-9));
  CHECK(spot.v2 == doctest::Approx(0.69735688025).epsilon(1e-9));
  CHECK(spot.holds);

  // Small-gamma regime: v1 just above 1 + delta_t/T, v2 vanishes.
  const auto small = verify_value_inequality(0.01, 10, 1);
  CHECK(small.v1 == doctest::Approx(1.1 * (1.0 - std::pow(0.01, 11.0)) / 0.99).epsilon(1e-12));
  CHECK(small.v2 == doctest::Approx(2e-20).epsilon(1e-9));
  CHECK(small.holds);
}

TEST_CASE("value inequality holds across the sweep grid") {
  const auto rows = value_inequality_sweep();
  CHECK(rows.size() == 15);  // T=5 contributes one delta_t, T=10 and T=50 two each
  for (const auto& row : rows) {
    CAPTURE(row.gamma);
    CAPTURE(row.T);
    CAPTURE(row.delta_t);
    CHECK(row.result.holds);
    const auto oracle = value_sum_oracle(row.gamma, row.T, row.delta_t);
    CHECK(row.result.v1 == doctest::Approx(oracle.v1).epsilon(1e-10));
    CHECK(row.result.v2 == doctest::Approx(oracle.v2).epsilon(1e-10));
  }
}

TEST_CASE("value inequality rejects out-of-domain parameters") {
  CHECK_THROWS_AS((void)verify_value_inequality(1.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)verify_value_inequality(0.0, 10, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)verify_value_inequality(0.9, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)verify_value_inequality(0.9, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS((void)verify_value_inequality(0.9, 10, 11), std::invalid_argument);
}
