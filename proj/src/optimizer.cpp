#include "hilonet/optimizer.hpp"

#include <cmath>
#include <string>

#include "hilonet/kernels.hpp"

namespace hilonet {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (const double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

void check_grads_finite(const MlpGrads& grads) {
  for (std::size_t l = 0; l < grads.weights.size(); ++l) {
    if (!all_finite(grads.weights[l])) {
      throw NumericError("non-finite gradient in layer " + std::to_string(l) + " weights");
    }
    if (!all_finite(grads.biases[l])) {
      throw NumericError("non-finite gradient in layer " + std::to_string(l) + " biases");
    }
  }
}

}  // namespace

OptimizerState make_optimizer(const Mlp& net, OptMode mode, double learning_rate) {
  OptimizerState st;
  st.mode = mode;
  st.learning_rate = learning_rate;
  const std::size_t layers = net.num_layers();
  st.m_weights.resize(layers);
  st.v_weights.resize(layers);
  st.m_biases.resize(layers);
  st.v_biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    st.m_weights[l].assign(net.weights[l].size(), 0.0);
    st.v_weights[l].assign(net.weights[l].size(), 0.0);
    st.m_biases[l].assign(net.biases[l].size(), 0.0);
    st.v_biases[l].assign(net.biases[l].size(), 0.0);
  }
  return st;
}

void optimizer_step(Mlp& net, const MlpGrads& grads, OptimizerState& state) {
  const std::size_t layers = net.num_layers();
  if (grads.weights.size() != layers || state.m_weights.size() != layers) {
    throw ShapeError("optimizer_step: gradient/state shape does not match the network");
  }
  for (std::size_t l = 0; l < layers; ++l) {
    if (grads.weights[l].size() != net.weights[l].size() ||
        grads.biases[l].size() != net.biases[l].size()) {
      throw ShapeError("optimizer_step: gradient shape mismatch at layer " + std::to_string(l));
    }
  }
  check_grads_finite(grads);

  state.step_count += 1;
  const auto& kt = kern::active_table();
  if (state.mode == OptMode::sgd) {
    for (std::size_t l = 0; l < layers; ++l) {
      kt.axpy(-state.learning_rate, grads.weights[l].data(), net.weights[l].data(),
              net.weights[l].size());
      kt.axpy(-state.learning_rate, grads.biases[l].data(), net.biases[l].data(),
              net.biases[l].size());
    }
    return;
  }

  const double t = static_cast<double>(state.step_count);
  const double c1 = 1.0 / (1.0 - std::pow(state.beta1, t));
  const double c2 = 1.0 / (1.0 - std::pow(state.beta2, t));
  for (std::size_t l = 0; l < layers; ++l) {
    kt.adam(net.weights[l].data(), grads.weights[l].data(), state.m_weights[l].data(),
            state.v_weights[l].data(), net.weights[l].size(), state.learning_rate, state.beta1,
            state.beta2, state.epsilon, c1, c2);
    kt.adam(net.biases[l].data(), grads.biases[l].data(), state.m_biases[l].data(),
            state.v_biases[l].data(), net.biases[l].size(), state.learning_rate, state.beta1,
            state.beta2, state.epsilon, c1, c2);
  }
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (!same_architecture(target, online)) {
    throw ShapeError("soft_update: target and online architectures differ");
  }
  if (tau < 0.0 || tau > 1.0) {
    throw std::invalid_argument("soft_update: tau must be in [0, 1]");
  }
  const auto& kt = kern::active_table();
  for (std::size_t l = 0; l < target.num_layers(); ++l) {
    kt.mix(target.weights[l].data(), online.weights[l].data(), tau, target.weights[l].size());
    kt.mix(target.biases[l].data(), online.biases[l].data(), tau, target.biases[l].size());
  }
}

}  // namespace hilonet
