#pragma once
// End-to-end training: the hierarchical control flow (a high decision
// every delta_t steps, low actions in between), engineered rewards,
// hindsight relabeling, the delayed high-policy update schedule, the
// step-by-step TSRE baseline, evaluation and the ablation harness.
//
// A run is fully determined by (config, seed): every random draw goes
// through one seeded engine in a fixed order, and evaluation uses
// derived seeds that do not disturb the training stream.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hilonet/environments.hpp"
#include "hilonet/policy.hpp"
#include "hilonet/replay.hpp"
#include "hilonet/rewards.hpp"

namespace hilonet {

struct AblationFlags {
  bool disable_hindsight = false;
  bool disable_delay = false;
  bool double_high_buffer = false;
};

struct TrainConfig {
  std::string env_name = "pointnav";
  std::string demo_path;
  std::size_t total_env_steps = 30000;
  std::size_t delta_t = 5;            // high policy acts every delta_t steps
  std::size_t high_update_delay = 2;  // high decisions per high update
  double gamma = 0.98;
  double tau = 0.005;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  std::size_t batch_size = 128;
  double noise_scale_start = 0.1;  // fraction of the action range
  double noise_scale_final = 0.02;
  double eps = 0.0;  // 0 = 5% of the demo bounding-box diagonal
  double r_bonus = 1.0;
  double alpha = 1.0;
  std::size_t low_buffer_capacity = 100000;
  std::size_t high_buffer_capacity = 10000;
  std::size_t warmup_steps = 1000;
  std::size_t eval_interval = 2000;
  std::size_t eval_episodes = 20;
  std::uint64_t seed = 0;
  AblationFlags ablation;
};

// Throws ParseError naming the offending field.
void validate_config(const TrainConfig& config);

struct CurvePoint {
  std::size_t env_steps = 0;
  double mean_return = 0.0;
  double success_rate = 0.0;
  double mean_length = 0.0;
};

struct LearningCurve {
  std::vector<CurvePoint> points;
  std::uint64_t seed = 0;
  std::string config_fingerprint;
};

struct EvalMetrics {
  double mean_return = 0.0;
  double success_rate = 0.0;
  double mean_length = 0.0;
};

struct TrainStats {
  std::size_t env_steps = 0;
  std::size_t episodes = 0;
  std::size_t low_updates = 0;
  std::size_t high_updates = 0;
  std::size_t high_decisions = 0;       // total segments completed
  std::size_t high_decisions_after_warmup = 0;
  std::size_t relabeled_high = 0;
  std::size_t relabeled_low = 0;
  bool diverged = false;
  std::string divergence_message;
};

struct TrainResult {
  LearningCurve curve;
  Checkpoint checkpoint;
  TrainStats stats;
  double resolved_eps = 0.0;
};

// ---------------------------------------------------------------------------
// Episode rollout
// ---------------------------------------------------------------------------

struct EpisodeResult {
  std::vector<Segment> segments;
  std::vector<LowTransition> low_transitions;   // original-goal transitions
  std::vector<HighTransition> high_transitions; // original high transitions
  double eval_return = 0.0;  // metrics only, never fed to a learner
  std::size_t steps = 0;
  bool success = false;
  bool truncated_by_caller = false;
};

using HighPolicyFn = std::function<HighAction(std::span<const double> obs)>;
using LowPolicyFn =
    std::function<std::vector<double>(std::span<const double> obs, std::span<const double> goal)>;
// Return false to stop the episode (used for the global step budget).
using StepHook = std::function<bool(const LowTransition&)>;
using SegmentHook = std::function<void(const Segment&, const HighTransition&)>;

// One episode under the hierarchical control flow. Every delta_t steps
// the high policy emits rates that index_subgoal decodes into a
// demonstration observation; the low policy pursues it in between. Low
// rewards are recomputed against the active sub-goal at every step;
// the high reward is evaluated at each segment boundary from the
// matched indices of the boundary observations and the achievement of
// the sub-goal. A final short segment still yields a high transition.
EpisodeResult run_episode(Env& env, const DemoSet& demos, const HighPolicyFn& high_policy,
                          const LowPolicyFn& low_policy, const RewardParams& params,
                          std::uint64_t episode_seed, const StepHook& on_step = {},
                          const SegmentHook& on_segment = {});

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Greedy rollouts from seeded starts; policy receives (obs, episode
// step index).
using SteppedPolicyFn =
    std::function<std::vector<double>(std::span<const double> obs, std::size_t t)>;
EvalMetrics evaluate_policy(Env& env, const SteppedPolicyFn& policy, std::size_t n_episodes,
                            std::uint64_t seed);

// Noise-free hierarchical evaluation.
EvalMetrics evaluate(const AgentPair& high, const AgentPair& low, Env& env, const DemoSet& demos,
                     std::size_t n_episodes, std::uint64_t seed, std::size_t delta_t, double eps);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

TrainResult train(const TrainConfig& config);

// Flat DDPG baseline rewarded by -||d_t - o_t||^2 against the same
// time index of a single demonstration trajectory (clamped to its last
// observation when the episode outlives it).
TrainResult train_tsre(const TrainConfig& config);

// {full, no_hindsight, no_delay, double_high_buffer} with shared seeds.
std::vector<std::pair<std::string, TrainResult>> ablate(const TrainConfig& config);

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

std::string serialize_config(const TrainConfig& config);     // ordered key = value lines
std::string config_fingerprint(const TrainConfig& config);   // hex FNV-1a of the above

void write_curve_csv(const LearningCurve& curve, const std::string& path);
std::vector<CurvePoint> read_curve_csv(const std::string& path);

}  // namespace hilonet
