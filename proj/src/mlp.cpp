#include "hilonet/mlp.hpp"

#include <cmath>

#include "hilonet/kernels.hpp"

namespace hilonet {

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  throw std::logic_error("unknown activation");
}

Activation activation_from_name(const std::string& name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  throw ShapeError("unknown activation name: " + name);
}

namespace {

void apply_activation(Activation act, std::span<const double> pre, std::vector<double>& post) {
  post.resize(pre.size());
  switch (act) {
    case Activation::identity:
      for (std::size_t i = 0; i < pre.size(); ++i) post[i] = pre[i];
      break;
    case Activation::relu:
      for (std::size_t i = 0; i < pre.size(); ++i) post[i] = pre[i] > 0.0 ? pre[i] : 0.0;
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < pre.size(); ++i) post[i] = 1.0 / (1.0 + std::exp(-pre[i]));
      break;
    case Activation::tanh:
      for (std::size_t i = 0; i < pre.size(); ++i) post[i] = std::tanh(pre[i]);
      break;
  }
}

// Derivative from the post-activation value (valid for all four
// activations; relu uses post > 0 which matches pre > 0).
double activation_grad(Activation act, double post) {
  switch (act) {
    case Activation::identity: return 1.0;
    case Activation::relu: return post > 0.0 ? 1.0 : 0.0;
    case Activation::sigmoid: return post * (1.0 - post);
    case Activation::tanh: return 1.0 - post * post;
  }
  return 0.0;
}

void affine_forward(std::span<const double> w, std::span<const double> b,
                    std::span<const double> x, std::vector<double>& out) {
  const std::size_t rows = b.size();
  const std::size_t cols = x.size();
  out.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = kern::active_table().dot(w.data() + r * cols, x.data(), cols) + b[r];
  }
}

}  // namespace

Mlp make_mlp(std::vector<std::size_t> layer_sizes, Activation hidden, Activation output,
             RandomEngine& rng) {
  if (layer_sizes.size() < 2) {
    throw ShapeError("mlp needs at least an input and an output layer");
  }
  for (const std::size_t s : layer_sizes) {
    if (s == 0) throw ShapeError("mlp layer sizes must be positive");
  }
  Mlp net;
  net.layer_sizes = std::move(layer_sizes);
  net.hidden_activation = hidden;
  net.output_activation = output;
  const std::size_t layers = net.layer_sizes.size() - 1;
  net.weights.resize(layers);
  net.biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t fan_in = net.layer_sizes[l];
    const std::size_t fan_out = net.layer_sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    net.weights[l].resize(fan_out * fan_in);
    for (double& w : net.weights[l]) w = rng.uniform(-bound, bound);
    net.biases[l].resize(fan_out);
    for (double& b : net.biases[l]) b = rng.uniform(-bound, bound);
  }
  return net;
}

bool same_architecture(const Mlp& a, const Mlp& b) {
  return a.layer_sizes == b.layer_sizes && a.hidden_activation == b.hidden_activation &&
         a.output_activation == b.output_activation;
}

std::vector<double> forward(const Mlp& net, std::span<const double> input) {
  if (input.size() != net.input_dim()) {
    throw ShapeError("forward: input size " + std::to_string(input.size()) +
                     " does not match first layer size " + std::to_string(net.input_dim()));
  }
  std::vector<double> cur(input.begin(), input.end());
  std::vector<double> pre;
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    affine_forward(net.weights[l], net.biases[l], cur, pre);
    const Activation act =
        (l + 1 == net.num_layers()) ? net.output_activation : net.hidden_activation;
    apply_activation(act, pre, cur);
  }
  return cur;
}

MlpGrads zero_grads_like(const Mlp& net) {
  MlpGrads g;
  g.weights.resize(net.num_layers());
  g.biases.resize(net.num_layers());
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    g.weights[l].assign(net.weights[l].size(), 0.0);
    g.biases[l].assign(net.biases[l].size(), 0.0);
  }
  g.input.assign(net.input_dim(), 0.0);
  return g;
}

void backward_accumulate(const Mlp& net, std::span<const double> input,
                         std::span<const double> upstream, double scale, MlpGrads& acc,
                         std::vector<double>* input_grad, MlpWorkspace& ws) {
  const std::size_t layers = net.num_layers();
  if (input.size() != net.input_dim()) {
    throw ShapeError("backward: input size does not match first layer size");
  }
  if (upstream.size() != net.output_dim()) {
    throw ShapeError("backward: upstream gradient size does not match output size");
  }
  if (acc.weights.size() != layers) {
    throw ShapeError("backward: gradient accumulator does not match the network");
  }

  ws.pre.resize(layers);
  ws.post.resize(layers + 1);
  ws.post[0].assign(input.begin(), input.end());
  for (std::size_t l = 0; l < layers; ++l) {
    affine_forward(net.weights[l], net.biases[l], ws.post[l], ws.pre[l]);
    const Activation act = (l + 1 == layers) ? net.output_activation : net.hidden_activation;
    apply_activation(act, ws.pre[l], ws.post[l + 1]);
  }

  // delta starts as dLoss/dPre for the output layer.
  ws.delta.resize(net.output_dim());
  for (std::size_t i = 0; i < ws.delta.size(); ++i) {
    ws.delta[i] = scale * upstream[i] * activation_grad(net.output_activation, ws.post[layers][i]);
  }

  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t rows = net.layer_sizes[l + 1];
    const std::size_t cols = net.layer_sizes[l];
    const auto& below = ws.post[l];
    for (std::size_t r = 0; r < rows; ++r) {
      kern::active_table().axpy(ws.delta[r], below.data(), acc.weights[l].data() + r * cols, cols);
      acc.biases[l][r] += ws.delta[r];
    }
    const bool need_down = l > 0 || input_grad != nullptr;
    if (!need_down) break;
    ws.delta_next.assign(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      kern::active_table().axpy(ws.delta[r], net.weights[l].data() + r * cols,
                                ws.delta_next.data(), cols);
    }
    if (l > 0) {
      for (std::size_t c = 0; c < cols; ++c) {
        ws.delta_next[c] *= activation_grad(net.hidden_activation, ws.post[l][c]);
      }
      std::swap(ws.delta, ws.delta_next);
    } else if (input_grad != nullptr) {
      input_grad->resize(cols);
      for (std::size_t c = 0; c < cols; ++c) (*input_grad)[c] += ws.delta_next[c];
    }
  }
}

MlpGrads backward(const Mlp& net, std::span<const double> input,
                  std::span<const double> upstream) {
  MlpGrads grads = zero_grads_like(net);
  MlpWorkspace ws;
  std::vector<double> input_grad(net.input_dim(), 0.0);
  backward_accumulate(net, input, upstream, 1.0, grads, &input_grad, ws);
  grads.input = std::move(input_grad);
  return grads;
}

}  // namespace hilonet
