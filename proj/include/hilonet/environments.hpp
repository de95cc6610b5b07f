#pragma once
// Deterministic toy control environments with scripted experts. The
// per-step eval_reward is an evaluation metric only; the trainer never
// feeds it to a learner. Start-state randomization is the only source
// of episode-length variation, which is what makes the generated
// demonstrations non-time-aligned.

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hilonet/demos.hpp"
#include "hilonet/errors.hpp"

namespace hilonet {

enum class TaskClass { single_goal, key_sequence };

struct EnvSpec {
  std::string name;
  std::size_t observation_dim = 0;
  std::size_t action_dim = 0;
  std::vector<double> action_low;
  std::vector<double> action_high;
  std::size_t max_episode_steps = 0;
  TaskClass task_class = TaskClass::single_goal;
};

struct StepResult {
  std::vector<double> observation;
  double eval_reward = 0.0;  // evaluation metric only
  bool done = false;
  std::size_t steps_elapsed = 0;
};

class Env {
 public:
  virtual ~Env() = default;

  const EnvSpec& spec() const { return spec_; }

  // Seeded start state; identical seed, identical start observation.
  std::vector<double> reset(std::uint64_t seed);

  // Deterministic transition under the clipped action. Throws
  // std::logic_error when called after done or before reset.
  StepResult step(std::span<const double> action);

  // Competent deterministic controller, a total function of the
  // observation.
  virtual std::vector<double> expert_action(std::span<const double> obs) const = 0;

  // Task success within the current episode (terminal region reached;
  // for the key-sequence task, two full waypoint cycles).
  bool success() const { return success_; }

  std::size_t steps_elapsed() const { return steps_; }
  // Count of action components clipped into bounds so far.
  std::size_t clip_events() const { return clip_events_; }

 protected:
  explicit Env(EnvSpec spec) : spec_(std::move(spec)) {}

  virtual std::vector<double> do_reset(std::uint64_t seed) = 0;
  // Advances internal state; returns (observation, eval_reward).
  virtual std::pair<std::vector<double>, double> do_step(std::span<const double> action) = 0;
  virtual bool goal_reached() const = 0;

  EnvSpec spec_;
  std::size_t steps_ = 0;
  std::size_t clip_events_ = 0;
  bool started_ = false;
  bool done_ = true;
  bool success_ = false;
};

// pointnav  | hillclimb | cyclepattern; anything else is rejected.
std::unique_ptr<Env> make_env(const std::string& name);

// Rolls the scripted expert from n seeded starts and stores the
// observation sequences only. Throws NumericError naming the failing
// seed when the expert does not reach success, and ParseError when the
// episode lengths collapse to a single value (n >= 2).
DemoSet generate_demonstrations(Env& env, std::size_t n_trajectories, std::uint64_t seed);

}  // namespace hilonet
