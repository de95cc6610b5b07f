#pragma once
// The two DDPG agents. The high agent maps an observation to two rates
// in [0,1] (decoded elsewhere into a demonstration index); the low
// agent maps {goal, observation} to an environment action. Exploration
// noise is Gaussian in the actor's output space, clamped to bounds.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hilonet/demos.hpp"
#include "hilonet/mlp.hpp"
#include "hilonet/optimizer.hpp"
#include "hilonet/rng.hpp"

namespace hilonet {

struct HighAction {
  double a1 = 0.0;
  double a2 = 0.0;
};

struct AgentPair {
  Mlp actor;
  Mlp critic;
  Mlp target_actor;
  Mlp target_critic;
  OptimizerState actor_opt;
  OptimizerState critic_opt;
  // Exploration noise stddev as a fraction of the action range,
  // annealed by the trainer.
  double noise_scale = 0.1;
  std::size_t action_dim = 0;
  std::vector<double> action_low;
  std::vector<double> action_high;
};

// Actor: state_dim -> hidden -> action_dim with the given output
// activation (sigmoid for the high agent, tanh for the low agent).
// Critic: state_dim + action_dim -> hidden -> 1, identity output.
// Targets start as exact copies of the online networks.
AgentPair make_agent(std::size_t state_dim, std::size_t action_dim,
                     std::vector<double> action_low, std::vector<double> action_high,
                     Activation actor_output, double actor_lr, double critic_lr,
                     RandomEngine& rng, std::vector<std::size_t> hidden = {64, 64});

// Affine map from the actor's activation codomain onto the action
// bounds ([0,1] for sigmoid, [-1,1] for tanh).
std::vector<double> map_actor_output(const AgentPair& agent, std::span<const double> raw);
// d(action_i)/d(raw_i) of the same map.
double actor_output_slope(const AgentPair& agent, std::size_t dim);

// Deterministic when explore is false; otherwise adds Gaussian noise of
// stddev noise_scale * range per component and clamps into bounds.
std::vector<double> act(const AgentPair& agent, std::span<const double> state, bool explore,
                        RandomEngine& rng);

HighAction high_act(const AgentPair& agent, std::span<const double> obs, bool explore,
                    RandomEngine& rng);

// Input is the concatenation {goal, obs}.
std::vector<double> low_act(const AgentPair& agent, std::span<const double> obs,
                            std::span<const double> goal, bool explore, RandomEngine& rng);

struct BatchItem {
  std::vector<double> state;       // critic/actor state input
  std::vector<double> action;      // action actually taken (bounded)
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
};

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_loss = 0.0;
};

namespace detail {
// Critic loss mean((Q(s,a) - y)^2) with y = r + gamma*(1-done)*
// Q_target(s', mu_target(s')) held constant, and its parameter
// gradients. Exposed so the finite-difference tests can probe it.
struct LossGrads {
  double loss = 0.0;
  MlpGrads grads;
};
LossGrads critic_loss_grads(const AgentPair& agent, std::span<const BatchItem> batch,
                            double gamma);
// Actor loss -mean(Q(s, mu(s))) and its gradients through the critic.
LossGrads actor_loss_grads(const AgentPair& agent, std::span<const BatchItem> batch);
}  // namespace detail

// One critic step, one actor step, then soft updates of both targets.
// Throws NumericError with batch statistics when a loss goes
// non-finite.
UpdateStats ddpg_update(AgentPair& agent, std::span<const BatchItem> batch, double gamma,
                        double tau);

// ---------------------------------------------------------------------------
// Checkpoint container: named agents plus run metadata, text format,
// round-trip exact.
// ---------------------------------------------------------------------------

struct Checkpoint {
  std::string algo;      // hilonet | tsre
  std::string env_name;
  double eps = 0.0;      // resolved achievement threshold
  std::vector<std::pair<std::string, AgentPair>> agents;

  const AgentPair& agent(const std::string& name) const;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace hilonet
