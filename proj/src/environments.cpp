#include "hilonet/environments.hpp"

#include <algorithm>
#include <cmath>

#include "hilonet/rng.hpp"

namespace hilonet {

std::vector<double> Env::reset(std::uint64_t seed) {
  steps_ = 0;
  started_ = true;
  done_ = false;
  success_ = false;
  auto obs = do_reset(seed);
  if (obs.size() != spec_.observation_dim) {
    throw ShapeError("env '" + spec_.name + "': reset produced a wrong-size observation");
  }
  return obs;
}

StepResult Env::step(std::span<const double> action) {
  if (!started_) {
    throw std::logic_error("env '" + spec_.name + "': step before reset");
  }
  if (done_) {
    throw std::logic_error("env '" + spec_.name + "': step after episode end");
  }
  if (action.size() != spec_.action_dim) {
    throw ShapeError("env '" + spec_.name + "': action dimension mismatch");
  }
  std::vector<double> clipped(action.begin(), action.end());
  for (std::size_t i = 0; i < clipped.size(); ++i) {
    const double lo = spec_.action_low[i];
    const double hi = spec_.action_high[i];
    if (clipped[i] < lo || clipped[i] > hi) {
      clipped[i] = std::clamp(clipped[i], lo, hi);
      ++clip_events_;
    }
  }

  auto [obs, eval_reward] = do_step(clipped);
  ++steps_;
  if (goal_reached()) success_ = true;

  StepResult out;
  out.observation = std::move(obs);
  out.eval_reward = eval_reward;
  out.steps_elapsed = steps_;
  out.done = success_ || steps_ >= spec_.max_episode_steps;
  if (spec_.task_class == TaskClass::key_sequence) {
    // No terminal goal state; only the step budget ends the episode.
    out.done = steps_ >= spec_.max_episode_steps;
  }
  done_ = out.done;
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// PointNav2D: point mass on the plane, obs = (x, y, gx - x, gy - y).
// pos' = clamp(pos + kStep * a), terminal when within kGoalRadius of
// the goal. eval_reward = -distance per step, +100 on reaching.
// ---------------------------------------------------------------------------

class PointNav2D final : public Env {
 public:
  static constexpr double kStep = 0.05;
  static constexpr double kGoalRadius = 0.1;
  static constexpr double kArena = 1.0;

  PointNav2D()
      : Env({.name = "pointnav",
             .observation_dim = 4,
             .action_dim = 2,
             .action_low = {-1.0, -1.0},
             .action_high = {1.0, 1.0},
             .max_episode_steps = 80,
             .task_class = TaskClass::single_goal}) {}

  std::vector<double> expert_action(std::span<const double> obs) const override {
    if (obs.size() != 4) throw ShapeError("pointnav expert: bad observation size");
    const double dx = obs[2];
    const double dy = obs[3];
    const double norm = std::hypot(dx, dy);
    if (norm < 1e-12) return {0.0, 0.0};
    return {dx / norm, dy / norm};
  }

 private:
  std::vector<double> do_reset(std::uint64_t seed) override {
    RandomEngine rng(mix_seed(seed));
    x_ = rng.uniform(-0.8, -0.2);
    y_ = rng.uniform(-0.8, -0.2);
    return observation();
  }

  std::pair<std::vector<double>, double> do_step(std::span<const double> action) override {
    x_ = std::clamp(x_ + kStep * action[0], -kArena, kArena);
    y_ = std::clamp(y_ + kStep * action[1], -kArena, kArena);
    const double dist = std::hypot(kGoalX - x_, kGoalY - y_);
    double reward = -dist;
    if (dist < kGoalRadius) reward += 100.0;
    return {observation(), reward};
  }

  bool goal_reached() const override {
    return std::hypot(kGoalX - x_, kGoalY - y_) < kGoalRadius;
  }

  std::vector<double> observation() const { return {x_, y_, kGoalX - x_, kGoalY - y_}; }

  static constexpr double kGoalX = 0.5;
  static constexpr double kGoalY = 0.5;
  double x_ = 0.0;
  double y_ = 0.0;
};

// ---------------------------------------------------------------------------
// HillClimb: underpowered car in a valley, obs = (x, v).
//   v' = clamp(v + 0.001 * a - 0.0025 * cos(3x))
//   x' = clamp(x + v'), with the velocity zeroed at the left wall.
// Success at x >= 0.45. eval_reward = -1 per step until success.
// ---------------------------------------------------------------------------

class HillClimb final : public Env {
 public:
  HillClimb()
      : Env({.name = "hillclimb",
             .observation_dim = 2,
             .action_dim = 1,
             .action_low = {-1.0},
             .action_high = {1.0},
             .max_episode_steps = 200,
             .task_class = TaskClass::single_goal}) {}

  std::vector<double> expert_action(std::span<const double> obs) const override {
    if (obs.size() != 2) throw ShapeError("hillclimb expert: bad observation size");
    // Bang-bang energy pumping; the kick at v = 0 pushes toward the goal.
    return {obs[1] >= 0.0 ? 1.0 : -1.0};
  }

 private:
  std::vector<double> do_reset(std::uint64_t seed) override {
    RandomEngine rng(mix_seed(seed));
    x_ = rng.uniform(-0.6, -0.4);
    v_ = 0.0;
    return {x_, v_};
  }

  std::pair<std::vector<double>, double> do_step(std::span<const double> action) override {
    v_ = std::clamp(v_ + 0.001 * action[0] - 0.0025 * std::cos(3.0 * x_), -kMaxSpeed, kMaxSpeed);
    x_ = std::clamp(x_ + v_, kMinPos, kMaxPos);
    if (x_ <= kMinPos && v_ < 0.0) v_ = 0.0;
    return {{x_, v_}, -1.0};
  }

  bool goal_reached() const override { return x_ >= kGoalPos; }

  static constexpr double kMinPos = -1.2;
  static constexpr double kMaxPos = 0.6;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoalPos = 0.45;
  double x_ = 0.0;
  double v_ = 0.0;
};

// ---------------------------------------------------------------------------
// CyclePattern: traverse four waypoints on a circle in cyclic order,
// indefinitely. obs = (x, y, tx - x, ty - y) where t is the next
// waypoint. There is no terminal goal state; success means two full
// cycles (8 hits) inside the step budget. eval_reward = +1 per waypoint
// hit in order. Starts perturbed around waypoint 0 with zero hits
// credited, first target waypoint 1.
// ---------------------------------------------------------------------------

class CyclePattern final : public Env {
 public:
  static constexpr std::size_t kWaypoints = 4;
  static constexpr double kStep = 0.08;
  static constexpr double kHitRadius = 0.1;
  static constexpr std::size_t kSuccessHits = 2 * kWaypoints;

  CyclePattern()
      : Env({.name = "cyclepattern",
             .observation_dim = 4,
             .action_dim = 2,
             .action_low = {-1.0, -1.0},
             .action_high = {1.0, 1.0},
             .max_episode_steps = 160,
             .task_class = TaskClass::key_sequence}) {}

  std::vector<double> expert_action(std::span<const double> obs) const override {
    if (obs.size() != 4) throw ShapeError("cyclepattern expert: bad observation size");
    const double dx = obs[2];
    const double dy = obs[3];
    const double norm = std::hypot(dx, dy);
    if (norm < 1e-12) return {0.0, 0.0};
    return {dx / norm, dy / norm};
  }

  std::size_t hits() const { return hits_; }

 private:
  static std::pair<double, double> waypoint(std::size_t k) {
    switch (k % kWaypoints) {
      case 0: return {0.5, 0.0};
      case 1: return {0.0, 0.5};
      case 2: return {-0.5, 0.0};
      default: return {0.0, -0.5};
    }
  }

  std::vector<double> do_reset(std::uint64_t seed) override {
    RandomEngine rng(mix_seed(seed));
    const auto [wx, wy] = waypoint(0);
    x_ = wx + rng.uniform(-0.15, 0.15);
    y_ = wy + rng.uniform(-0.15, 0.15);
    hits_ = 0;
    return observation();
  }

  std::pair<std::vector<double>, double> do_step(std::span<const double> action) override {
    x_ = std::clamp(x_ + kStep * action[0], -1.0, 1.0);
    y_ = std::clamp(y_ + kStep * action[1], -1.0, 1.0);
    double reward = 0.0;
    const auto [tx, ty] = waypoint(1 + hits_);
    if (std::hypot(tx - x_, ty - y_) < kHitRadius) {
      ++hits_;
      reward = 1.0;
    }
    return {observation(), reward};
  }

  bool goal_reached() const override { return hits_ >= kSuccessHits; }

  std::vector<double> observation() const {
    const auto [tx, ty] = waypoint(1 + hits_);
    return {x_, y_, tx - x_, ty - y_};
  }

  double x_ = 0.0;
  double y_ = 0.0;
  std::size_t hits_ = 0;
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "pointnav") return std::make_unique<PointNav2D>();
  if (name == "hillclimb") return std::make_unique<HillClimb>();
  if (name == "cyclepattern") return std::make_unique<CyclePattern>();
  throw ParseError("unknown environment '" + name +
                   "' (expected pointnav, hillclimb or cyclepattern)");
}

DemoSet generate_demonstrations(Env& env, std::size_t n_trajectories, std::uint64_t seed) {
  if (n_trajectories == 0) {
    throw std::invalid_argument("generate_demonstrations: need at least one trajectory");
  }
  DemoSet demos;
  demos.env_name = env.spec().name;
  demos.observation_dim = env.spec().observation_dim;
  demos.trajectories.reserve(n_trajectories);

  for (std::size_t i = 0; i < n_trajectories; ++i) {
    const std::uint64_t episode_seed = mix_seed(seed + i);
    Trajectory traj;
    traj.observations.push_back(env.reset(episode_seed));
    bool done = false;
    while (!done) {
      const auto action = env.expert_action(traj.observations.back());
      const StepResult sr = env.step(action);
      traj.observations.push_back(sr.observation);
      // A key-sequence episode has no terminal state; the recording
      // stops once the success criterion is met.
      done = sr.done || env.success();
    }
    if (!env.success()) {
      throw NumericError("scripted expert failed on seed " + std::to_string(seed + i) +
                         " in env '" + env.spec().name + "'");
    }
    demos.trajectories.push_back(std::move(traj));
  }

  if (n_trajectories >= 2) {
    const std::size_t first = demos.trajectories.front().length();
    const bool all_equal = std::all_of(
        demos.trajectories.begin(), demos.trajectories.end(),
        [first](const Trajectory& t) { return t.length() == first; });
    if (all_equal) {
      throw ParseError("generated demonstrations are time-aligned (all lengths " +
                       std::to_string(first) + "); change the seed");
    }
  }
  validate_demos(demos);
  return demos;
}

}  // namespace hilonet
