#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "hilonet/config.hpp"
#include "hilonet/kernels.hpp"
#include "hilonet/trainer.hpp"

using namespace hilonet;

namespace {

// Drifts along a line, never succeeds, fixed sentinel eval reward.
// Exists to pin down counting and reward-isolation behavior.
class CountingEnv final : public Env {
 public:
  explicit CountingEnv(std::size_t max_steps)
      : Env({.name = "countingenv",
             .observation_dim = 2,
             .action_dim = 2,
             .action_low = {-1.0, -1.0},
             .action_high = {1.0, 1.0},
             .max_episode_steps = max_steps,
             .task_class = TaskClass::single_goal}) {}

  std::vector<double> expert_action(std::span<const double>) const override {
    return {1.0, 0.0};
  }

 private:
  std::vector<double> do_reset(std::uint64_t seed) override {
    x_ = 0.001 * static_cast<double>(seed % 7);
    y_ = 0.0;
    return {x_, y_};
  }
  std::pair<std::vector<double>, double> do_step(std::span<const double> action) override {
    x_ += 0.01 * action[0];
    y_ += 0.01 * action[1];
    return {{x_, y_}, 12345.0};  // sentinel: must never leak into training rewards
  }
  bool goal_reached() const override { return false; }

  double x_ = 0.0;
  double y_ = 0.0;
};

// Moves straight to wherever the action points: a low policy that
// returns the sub-goal observation reaches it exactly in one step.
class TeleportEnv final : public Env {
 public:
  TeleportEnv()
      : Env({.name = "teleportenv",
             .observation_dim = 2,
             .action_dim = 2,
             .action_low = {-1.0, -1.0},
             .action_high = {1.0, 1.0},
             .max_episode_steps = 40,
             .task_class = TaskClass::single_goal}) {}

  std::vector<double> expert_action(std::span<const double> obs) const override {
    // Halfway toward the goal each step; episode length varies with
    // the start distance.
    return {obs[0] + 0.5 * (0.8 - obs[0]), obs[1] + 0.5 * (0.8 - obs[1])};
  }

 private:
  std::vector<double> do_reset(std::uint64_t seed) override {
    RandomEngine rng(mix_seed(seed));
    x_ = rng.uniform(-0.9, -0.1);
    y_ = rng.uniform(-0.9, -0.1);
    return {x_, y_};
  }
  std::pair<std::vector<double>, double> do_step(std::span<const double> action) override {
    x_ = action[0];
    y_ = action[1];
    return {{x_, y_}, 0.0};
  }
  bool goal_reached() const override { return std::hypot(x_ - 0.8, y_ - 0.8) < 0.05; }

  double x_ = 0.0;
  double y_ = 0.0;
};

DemoSet counting_demos() {
  DemoSet demos;
  demos.env_name = "countingenv";
  demos.observation_dim = 2;
  demos.trajectories.resize(2);
  for (int j = 0; j < 8; ++j) {
    demos.trajectories[0].observations.push_back({0.01 * j, 0.0});
    demos.trajectories[1].observations.push_back({0.01 * j, 0.5});
  }
  return demos;
}

std::string pointnav_demo_file(std::size_t n = 6, std::uint64_t seed = 7) {
  static std::filesystem::path path;
  static std::size_t cached_n = 0;
  if (path.empty() || cached_n != n) {
    auto env = make_env("pointnav");
    const auto demos = generate_demonstrations(*env, n, seed);
    path = std::filesystem::temp_directory_path() /
           ("hilonet_trainer_demos_" + std::to_string(n) + ".hilodemo");
    save_demos(demos, path.string());
    cached_n = n;
  }
  return path.string();
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.env_name = "pointnav";
  cfg.demo_path = pointnav_demo_file();
  cfg.total_env_steps = 400;
  cfg.warmup_steps = 100;
  cfg.batch_size = 16;
  cfg.eval_interval = 200;
  cfg.eval_episodes = 2;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("run_episode: 15 steps with delta_t 5 produce exactly 3 high decisions") {
  CountingEnv env(15);
  const auto demos = counting_demos();
  RewardParams params;
  params.eps = 0.004;
  params.delta_t = 5;
  const auto high = [](std::span<const double>) { return HighAction{0.2, 0.9}; };
  const auto low = [](std::span<const double>, std::span<const double>) {
    return std::vector<double>{0.5, 0.0};
  };
  const auto ep = run_episode(env, demos, high, low, params, 3);
  CHECK(ep.steps == 15);
  CHECK(ep.segments.size() == 3);
  CHECK(ep.high_transitions.size() == 3);
  CHECK(ep.low_transitions.size() == 15);
  for (const auto& seg : ep.segments) CHECK(seg.steps() == 5);
  CHECK_FALSE(ep.success);
}

TEST_CASE("run_episode: a final short segment still yields a high transition") {
  CountingEnv env(13);
  const auto demos = counting_demos();
  RewardParams params;
  params.eps = 0.004;
  params.delta_t = 5;
  const auto high = [](std::span<const double>) { return HighAction{0.2, 0.9}; };
  const auto low = [](std::span<const double>, std::span<const double>) {
    return std::vector<double>{0.3, 0.1};
  };
  const auto ep = run_episode(env, demos, high, low, params, 3);
  CHECK(ep.segments.size() == 3);
  CHECK(ep.segments.back().steps() == 3);
  CHECK(ep.high_transitions.back().done);
}

TEST_CASE("run_episode: environment eval rewards never reach stored transitions") {
  CountingEnv env(20);
  const auto demos = counting_demos();
  RewardParams params;
  params.eps = 0.05;
  params.delta_t = 4;
  const auto high = [](std::span<const double>) { return HighAction{0.6, 0.4}; };
  const auto low = [](std::span<const double>, std::span<const double>) {
    return std::vector<double>{0.2, 0.2};
  };
  const auto ep = run_episode(env, demos, high, low, params, 1);

  CHECK(ep.eval_return == doctest::Approx(20 * 12345.0));
  for (const auto& t : ep.low_transitions) {
    CHECK(t.reward == low_reward(t.next_obs, t.goal, params));
    CHECK(std::abs(t.reward) < 100.0);
  }
  for (std::size_t i = 0; i < ep.segments.size(); ++i) {
    const auto& seg = ep.segments[i];
    const auto prev = match_observation(demos, seg.start_obs(), params.eps);
    const auto cur = match_observation(demos, seg.final_obs(), params.eps);
    const bool ach = achieved(seg.final_obs(), seg.subgoal, params.eps);
    CHECK(ep.high_transitions[i].reward == high_reward(prev, cur, ach, params));
  }
}

TEST_CASE("run_episode: every issued sub-goal is a demonstration observation") {
  CountingEnv env(30);
  const auto demos = counting_demos();
  RewardParams params;
  params.eps = 0.05;
  params.delta_t = 5;
  RandomEngine rng(17);
  const auto high = [&rng](std::span<const double>) {
    return HighAction{rng.u01(), rng.u01()};
  };
  const auto low = [](std::span<const double>, std::span<const double>) {
    return std::vector<double>{0.1, -0.1};
  };
  const auto ep = run_episode(env, demos, high, low, params, 9);
  for (const auto& seg : ep.segments) {
    CHECK(seg.subgoal == observation_at(demos, seg.subgoal_index));
  }
}

TEST_CASE("run_episode with a teleporting low policy achieves every sub-goal") {
  TeleportEnv env;
  DemoSet demos;
  {
    TeleportEnv gen;
    demos = generate_demonstrations(gen, 6, 21);
  }
  RewardParams params;
  params.eps = 0.05;
  params.delta_t = 5;
  RandomEngine rng(3);
  const auto high = [&rng](std::span<const double>) {
    return HighAction{rng.u01(), rng.u01()};
  };
  // Test double: emit the sub-goal itself as the action.
  const auto low = [](std::span<const double>, std::span<const double> goal) {
    return std::vector<double>(goal.begin(), goal.end());
  };
  const auto ep = run_episode(env, demos, high, low, params, 4);
  REQUIRE(!ep.segments.empty());
  for (std::size_t i = 0; i < ep.segments.size(); ++i) {
    CHECK(achieved(ep.segments[i].final_obs(), ep.segments[i].subgoal, params.eps));
    CHECK(ep.high_transitions[i].reward >= 1.0 - params.alpha * 8.0);
    CHECK(ep.high_transitions[i].reward != 0.0);
  }
}

TEST_CASE("run_episode rejects mismatched demos") {
  CountingEnv env(10);
  auto demos = counting_demos();
  demos.env_name = "other";
  RewardParams params;
  const auto high = [](std::span<const double>) { return HighAction{0.5, 0.5}; };
  const auto low = [](std::span<const double>, std::span<const double>) {
    return std::vector<double>{0.0, 0.0};
  };
  CHECK_THROWS_AS((void)run_episode(env, demos, high, low, params, 1), ShapeError);
}

TEST_CASE("train: null run leaves the initial checkpoint untouched") {
  TrainConfig cfg = tiny_config();
  cfg.total_env_steps = 0;
  const auto result = train(cfg);
  CHECK(result.curve.points.empty());
  CHECK(result.stats.env_steps == 0);
  CHECK(result.stats.low_updates == 0);

  // Replicate the seeded construction: same draw order, same nets.
  auto env = make_env(cfg.env_name);
  RandomEngine rng(mix_seed(cfg.seed));
  const auto high = make_agent(4, 2, {0.0, 0.0}, {1.0, 1.0}, Activation::sigmoid, cfg.actor_lr,
                               cfg.critic_lr, rng);
  const auto low =
      make_agent(8, 2, env->spec().action_low, env->spec().action_high, Activation::tanh,
                 cfg.actor_lr, cfg.critic_lr, rng);
  CHECK(result.checkpoint.agent("high").actor.weights == high.actor.weights);
  CHECK(result.checkpoint.agent("low").actor.weights == low.actor.weights);
  CHECK(result.checkpoint.agent("low").critic.weights == low.critic.weights);
  CHECK(result.checkpoint.agent("high").actor_opt.step_count == 0);
}

TEST_CASE("train: update schedule matches the counters") {
  TrainConfig cfg = tiny_config();
  cfg.total_env_steps = 600;
  cfg.warmup_steps = 150;
  const auto result = train(cfg);
  CHECK_FALSE(result.stats.diverged);
  CHECK(result.stats.env_steps == 600);
  CHECK(result.stats.low_updates == 600 - 150);
  CHECK(result.stats.high_updates ==
        result.stats.high_decisions_after_warmup / cfg.high_update_delay);
  CHECK(result.stats.high_decisions >= result.stats.high_decisions_after_warmup);

  // disable_delay trains at every post-warmup high decision.
  cfg.ablation.disable_delay = true;
  const auto no_delay = train(cfg);
  CHECK(no_delay.stats.high_updates == no_delay.stats.high_decisions_after_warmup);
}

TEST_CASE("train: hindsight can be disabled") {
  TrainConfig cfg = tiny_config();
  const auto full = train(cfg);
  CHECK(full.stats.relabeled_low > 0);
  cfg.ablation.disable_hindsight = true;
  const auto off = train(cfg);
  CHECK(off.stats.relabeled_low == 0);
  CHECK(off.stats.relabeled_high == 0);
}

TEST_CASE("train: identical config and seed give bitwise-identical curves") {
  const TrainConfig cfg = tiny_config();
  const auto a = train(cfg);
  const auto b = train(cfg);
  REQUIRE(a.curve.points.size() == b.curve.points.size());
  for (std::size_t i = 0; i < a.curve.points.size(); ++i) {
    CHECK(a.curve.points[i].env_steps == b.curve.points[i].env_steps);
    CHECK(a.curve.points[i].mean_return == b.curve.points[i].mean_return);
    CHECK(a.curve.points[i].success_rate == b.curve.points[i].success_rate);
    CHECK(a.curve.points[i].mean_length == b.curve.points[i].mean_length);
  }
  CHECK(a.checkpoint.agent("low").actor.weights == b.checkpoint.agent("low").actor.weights);
  CHECK(a.checkpoint.agent("high").critic.weights == b.checkpoint.agent("high").critic.weights);

  // Byte-identical CSV artifacts.
  const auto dir = std::filesystem::temp_directory_path();
  write_curve_csv(a.curve, (dir / "hilonet_curve_a.csv").string());
  write_curve_csv(b.curve, (dir / "hilonet_curve_b.csv").string());
  std::ifstream fa(dir / "hilonet_curve_a.csv");
  std::ifstream fb(dir / "hilonet_curve_b.csv");
  const std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  const std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(ca == cb);
  CHECK(!ca.empty());
  std::filesystem::remove(dir / "hilonet_curve_a.csv");
  std::filesystem::remove(dir / "hilonet_curve_b.csv");
}

TEST_CASE("train: curve steps are strictly increasing and end at the budget") {
  TrainConfig cfg = tiny_config();
  cfg.total_env_steps = 500;  // not a multiple of eval_interval
  const auto result = train(cfg);
  REQUIRE(!result.curve.points.empty());
  for (std::size_t i = 1; i < result.curve.points.size(); ++i) {
    CHECK(result.curve.points[i].env_steps > result.curve.points[i - 1].env_steps);
  }
  CHECK(result.curve.points.back().env_steps == 500);
}

TEST_CASE("train: divergence aborts with diagnostics and a partial curve") {
  TrainConfig cfg = tiny_config();
  cfg.critic_lr = 1e250;  // first update pushes the critic into overflow
  cfg.total_env_steps = 2000;
  const auto result = train(cfg);
  CHECK(result.stats.diverged);
  CHECK(!result.stats.divergence_message.empty());
  CHECK(result.stats.env_steps < 2000);
}

TEST_CASE("train_tsre: flat baseline trains and reports the same curve schema") {
  TrainConfig cfg = tiny_config();
  const auto result = train_tsre(cfg);
  CHECK_FALSE(result.stats.diverged);
  CHECK(result.checkpoint.algo == "tsre");
  CHECK(result.checkpoint.agents.size() == 1);
  REQUIRE(!result.curve.points.empty());
  CHECK(result.curve.points.back().env_steps == cfg.total_env_steps);
  CHECK(result.stats.low_updates == cfg.total_env_steps - cfg.warmup_steps);
}

TEST_CASE("tsre rewards: perfect alignment scores zero, episodes clamp to the demo tail") {
  // An agent replaying the demonstration exactly sees reward 0 (the
  // maximum) at every step, including steps past the demo's end where
  // the comparison clamps to its final observation.
  const auto demos = load_demos(pointnav_demo_file());
  const auto& demo = demos.trajectories.front();
  for (std::size_t t = 0; t < demo.length() + 25; ++t) {
    const std::size_t agent_index = std::min(t + 1, demo.length() - 1);
    const std::size_t demo_index = std::min(t + 1, demo.length() - 1);
    const auto& agent_obs = demo.observations[agent_index];
    const auto& target = demo.observations[demo_index];
    CHECK(-kern::sq_dist(std::span<const double>(target),
                         std::span<const double>(agent_obs)) == 0.0);
  }
}

TEST_CASE("evaluate: deterministic, and the scripted expert scores perfectly") {
  auto env = make_env("pointnav");
  const SteppedPolicyFn expert = [&env](std::span<const double> obs, std::size_t) {
    return env->expert_action(obs);
  };
  const auto a = evaluate_policy(*env, expert, 10, 99);
  const auto b = evaluate_policy(*env, expert, 10, 99);
  CHECK(a.success_rate == 1.0);
  CHECK(a.mean_return == b.mean_return);
  CHECK(a.mean_length == b.mean_length);

  // Untrained agents sit at the ground level.
  RandomEngine rng(1234);
  const auto high = make_agent(4, 2, {0.0, 0.0}, {1.0, 1.0}, Activation::sigmoid, 1e-4, 1e-3,
                               rng);
  const auto low = make_agent(8, 2, env->spec().action_low, env->spec().action_high,
                              Activation::tanh, 1e-4, 1e-3, rng);
  const auto demos = load_demos(pointnav_demo_file());
  const auto m = evaluate(high, low, *env, demos, 10, 99, 5, 0.15);
  CHECK(m.success_rate <= 0.3);
}

TEST_CASE("ablate produces the four named variants with one shared seed") {
  TrainConfig cfg = tiny_config();
  cfg.total_env_steps = 300;
  cfg.warmup_steps = 80;
  const auto variants = ablate(cfg);
  REQUIRE(variants.size() == 4);
  CHECK(variants[0].first == "full");
  CHECK(variants[1].first == "no_hindsight");
  CHECK(variants[2].first == "no_delay");
  CHECK(variants[3].first == "double_high_buffer");
  for (const auto& [name, result] : variants) {
    CAPTURE(name);
    CHECK(result.curve.seed == cfg.seed);
    CHECK(!result.curve.points.empty());
  }
  CHECK(variants[1].second.stats.relabeled_low == 0);
  CHECK(variants[2].second.stats.high_updates ==
        variants[2].second.stats.high_decisions_after_warmup);
}

TEST_CASE("config validation names the offending key") {
  TrainConfig cfg = tiny_config();
  cfg.gamma = 1.5;
  CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("gamma"), ParseError);
  cfg = tiny_config();
  cfg.delta_t = 0;
  CHECK_THROWS_WITH_AS(validate_config(cfg), doctest::Contains("delta_t"), ParseError);
}

TEST_CASE("train rejects demos from a different environment") {
  TrainConfig cfg = tiny_config();
  auto env = make_env("hillclimb");
  const auto demos = generate_demonstrations(*env, 4, 3);
  const auto path = std::filesystem::temp_directory_path() / "hilonet_wrong_env.hilodemo";
  save_demos(demos, path.string());
  cfg.demo_path = path.string();
  CHECK_THROWS_AS((void)train(cfg), ParseError);
  std::filesystem::remove(path);
}
