#pragma once
// Feed-forward network with explicit per-layer backpropagation. Both
// policy levels run on this; everything is double precision and small
// enough that the finite-difference checks in the test suite bite.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hilonet/errors.hpp"
#include "hilonet/rng.hpp"

namespace hilonet {

enum class Activation { identity, relu, sigmoid, tanh };

std::string activation_name(Activation a);
Activation activation_from_name(const std::string& name);

// Layer l maps layer_sizes[l] -> layer_sizes[l+1]; weights[l] is
// row-major (out x in), biases[l] has one entry per output unit.
struct Mlp {
  std::vector<std::size_t> layer_sizes;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::identity;

  std::size_t num_layers() const { return weights.size(); }
  std::size_t input_dim() const { return layer_sizes.front(); }
  std::size_t output_dim() const { return layer_sizes.back(); }
};

// Parameters drawn uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], layer
// by layer, weights before biases. The draw order is part of the
// determinism contract.
Mlp make_mlp(std::vector<std::size_t> layer_sizes, Activation hidden, Activation output,
             RandomEngine& rng);

bool same_architecture(const Mlp& a, const Mlp& b);

std::vector<double> forward(const Mlp& net, std::span<const double> input);

struct MlpGrads {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
  std::vector<double> input;
};

MlpGrads zero_grads_like(const Mlp& net);

// Recomputes the forward pass, then accumulates scale * dLoss/dParam
// into `acc` given upstream = dLoss/dOutput. When `input_grad` is
// non-null it receives scale * dLoss/dInput, accumulated as well.
// Scratch buffers live in `ws` so batch loops do not reallocate.
struct MlpWorkspace {
  std::vector<std::vector<double>> pre;    // pre-activations per layer
  std::vector<std::vector<double>> post;   // post[0] = input copy
  std::vector<double> delta;
  std::vector<double> delta_next;
};

void backward_accumulate(const Mlp& net, std::span<const double> input,
                         std::span<const double> upstream, double scale, MlpGrads& acc,
                         std::vector<double>* input_grad, MlpWorkspace& ws);

// Single-call form returning fresh gradients (tests and one-off use).
MlpGrads backward(const Mlp& net, std::span<const double> input,
                  std::span<const double> upstream);

}  // namespace hilonet
