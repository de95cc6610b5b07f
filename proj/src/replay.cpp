#include "hilonet/replay.hpp"

namespace hilonet {

bool low_done(std::span<const double> next_obs, std::span<const double> goal, double eps,
              bool env_done) {
  return env_done || achieved(next_obs, goal, eps);
}

std::optional<HighTransition> relabel_high(const Segment& segment, const DemoSet& demos,
                                           const RewardParams& params) {
  if (segment.observations.size() < 2 || segment.actions.size() + 1 != segment.observations.size()) {
    throw ShapeError("relabel_high: malformed segment");
  }
  const auto match = match_observation(demos, segment.final_obs(), params.eps);
  if (!match) return std::nullopt;

  const auto prev = match_observation(demos, segment.start_obs(), params.eps);
  const RatePair rates = subgoal_rates(demos, *match);

  HighTransition out;
  out.obs = segment.start_obs();
  out.high_action = {rates.a1, rates.a2};
  out.reward = high_reward(prev, match, /*subgoal_achieved=*/true, params);
  out.next_obs = segment.final_obs();
  out.done = segment.env_done;
  return out;
}

std::vector<LowTransition> relabel_low(const Segment& segment, const DemoSet& demos,
                                       const RewardParams& params) {
  if (segment.observations.size() < 2 || segment.actions.size() + 1 != segment.observations.size()) {
    throw ShapeError("relabel_low: malformed segment");
  }
  const auto match = match_observation(demos, segment.final_obs(), params.eps);
  if (!match) return {};

  const auto& hindsight_goal = segment.final_obs();
  std::vector<LowTransition> out;
  out.reserve(segment.steps());
  for (std::size_t k = 0; k < segment.steps(); ++k) {
    LowTransition t;
    t.obs = segment.observations[k];
    t.action = segment.actions[k];
    t.next_obs = segment.observations[k + 1];
    t.goal = hindsight_goal;
    t.reward = low_reward(t.next_obs, t.goal, params);
    const bool env_done = segment.env_done && (k + 1 == segment.steps());
    t.done = low_done(t.next_obs, t.goal, params.eps, env_done);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace hilonet
