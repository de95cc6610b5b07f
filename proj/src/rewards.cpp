#include "hilonet/rewards.hpp"

#include <cmath>
#include <stdexcept>

#include "hilonet/kernels.hpp"

namespace hilonet {

bool achieved(std::span<const double> obs, std::span<const double> goal, double eps) {
  if (obs.size() != goal.size()) {
    throw ShapeError("achieved: observation and goal dimensions differ");
  }
  return std::sqrt(kern::sq_dist(goal, obs)) < eps;
}

double low_reward(std::span<const double> next_obs, std::span<const double> goal,
                  const RewardParams& params) {
  if (next_obs.size() != goal.size()) {
    throw ShapeError("low_reward: observation and goal dimensions differ");
  }
  const double sq = kern::sq_dist(goal, next_obs);
  double r = -sq;
  if (std::sqrt(sq) < params.eps) r += params.r_bonus;
  return r;
}

namespace {

double phase_index(const std::optional<DemoIndex>& index) {
  return index ? static_cast<double>(index->observation_index) : 0.0;
}

}  // namespace

double high_reward(std::optional<DemoIndex> prev_index, std::optional<DemoIndex> cur_index,
                   bool subgoal_achieved, const RewardParams& params) {
  if (!subgoal_achieved) return 0.0;
  return 1.0 + params.alpha * (phase_index(cur_index) - phase_index(prev_index));
}

ValueInequality verify_value_inequality(double gamma, std::size_t T, std::size_t delta_t) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("verify_value_inequality: gamma must lie in (0, 1)");
  }
  if (T < 1) {
    throw std::invalid_argument("verify_value_inequality: T must be at least 1");
  }
  if (delta_t < 1 || delta_t > T) {
    throw std::invalid_argument("verify_value_inequality: delta_t must lie in [1, T]");
  }
  const double Td = static_cast<double>(T);
  const double per_step = 1.0 + static_cast<double>(delta_t) / Td;
  // sum_{t=0}^{T} gamma^t = (1 - gamma^{T+1}) / (1 - gamma)
  const double geometric = (1.0 - std::pow(gamma, Td + 1.0)) / (1.0 - gamma);
  ValueInequality out;
  out.v1 = per_step * geometric;
  out.v2 = 2.0 * std::pow(gamma, Td);
  out.holds = out.v1 > out.v2;
  return out;
}

std::vector<ValueSweepRow> value_inequality_sweep() {
  std::vector<ValueSweepRow> rows;
  for (const double gamma : {0.5, 0.9, 0.99}) {
    for (const std::size_t T : {std::size_t{5}, std::size_t{10}, std::size_t{50}}) {
      for (const std::size_t delta_t : {std::size_t{1}, T / 5}) {
        if (delta_t != 1 || rows.empty() || rows.back().gamma != gamma || rows.back().T != T) {
          rows.push_back({gamma, T, delta_t, verify_value_inequality(gamma, T, delta_t)});
        }
      }
    }
  }
  return rows;
}

}  // namespace hilonet
