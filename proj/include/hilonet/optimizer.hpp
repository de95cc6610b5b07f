#pragma once
// Gradient optimizer (plain SGD or Adam) and target-network tracking.

#include <cstdint>

#include "hilonet/mlp.hpp"

namespace hilonet {

enum class OptMode { sgd, adam };

struct OptimizerState {
  OptMode mode = OptMode::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;
  // Moment accumulators, shaped like the tracked parameters. Unused in
  // SGD mode but kept allocated so checkpoints stay uniform.
  std::vector<std::vector<double>> m_weights, v_weights;
  std::vector<std::vector<double>> m_biases, v_biases;
};

OptimizerState make_optimizer(const Mlp& net, OptMode mode, double learning_rate);

// One update in place. Throws NumericError naming the offending layer
// when any gradient entry is non-finite.
void optimizer_step(Mlp& net, const MlpGrads& grads, OptimizerState& state);

// target <- (1 - tau) * target + tau * online, element-wise.
void soft_update(Mlp& target, const Mlp& online, double tau);

}  // namespace hilonet
