#include "hilonet/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hilonet {

AgentPair make_agent(std::size_t state_dim, std::size_t action_dim,
                     std::vector<double> action_low, std::vector<double> action_high,
                     Activation actor_output, double actor_lr, double critic_lr,
                     RandomEngine& rng, std::vector<std::size_t> hidden) {
  if (action_low.size() != action_dim || action_high.size() != action_dim) {
    throw ShapeError("make_agent: action bounds do not match action_dim");
  }
  for (std::size_t i = 0; i < action_dim; ++i) {
    if (!(action_low[i] < action_high[i])) {
      throw ShapeError("make_agent: action bounds must be ordered low < high");
    }
  }
  if (actor_output != Activation::sigmoid && actor_output != Activation::tanh) {
    throw ShapeError("make_agent: actor output must be sigmoid or tanh");
  }

  std::vector<std::size_t> actor_sizes;
  actor_sizes.push_back(state_dim);
  actor_sizes.insert(actor_sizes.end(), hidden.begin(), hidden.end());
  actor_sizes.push_back(action_dim);

  std::vector<std::size_t> critic_sizes;
  critic_sizes.push_back(state_dim + action_dim);
  critic_sizes.insert(critic_sizes.end(), hidden.begin(), hidden.end());
  critic_sizes.push_back(1);

  AgentPair agent;
  agent.actor = make_mlp(actor_sizes, Activation::relu, actor_output, rng);
  agent.critic = make_mlp(critic_sizes, Activation::relu, Activation::identity, rng);
  agent.target_actor = agent.actor;
  agent.target_critic = agent.critic;
  agent.actor_opt = make_optimizer(agent.actor, OptMode::adam, actor_lr);
  agent.critic_opt = make_optimizer(agent.critic, OptMode::adam, critic_lr);
  agent.action_dim = action_dim;
  agent.action_low = std::move(action_low);
  agent.action_high = std::move(action_high);
  return agent;
}

std::vector<double> map_actor_output(const AgentPair& agent, std::span<const double> raw) {
  std::vector<double> action(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double lo = agent.action_low[i];
    const double hi = agent.action_high[i];
    if (agent.actor.output_activation == Activation::sigmoid) {
      action[i] = lo + raw[i] * (hi - lo);
    } else {
      action[i] = 0.5 * (lo + hi) + raw[i] * 0.5 * (hi - lo);
    }
  }
  return action;
}

double actor_output_slope(const AgentPair& agent, std::size_t dim) {
  const double range = agent.action_high[dim] - agent.action_low[dim];
  return agent.actor.output_activation == Activation::sigmoid ? range : 0.5 * range;
}

std::vector<double> act(const AgentPair& agent, std::span<const double> state, bool explore,
                        RandomEngine& rng) {
  auto action = map_actor_output(agent, forward(agent.actor, state));
  if (explore && agent.noise_scale > 0.0) {
    for (std::size_t i = 0; i < action.size(); ++i) {
      const double range = agent.action_high[i] - agent.action_low[i];
      action[i] += rng.normal(0.0, agent.noise_scale * range);
    }
  }
  for (std::size_t i = 0; i < action.size(); ++i) {
    action[i] = std::clamp(action[i], agent.action_low[i], agent.action_high[i]);
  }
  return action;
}

HighAction high_act(const AgentPair& agent, std::span<const double> obs, bool explore,
                    RandomEngine& rng) {
  if (agent.action_dim != 2) {
    throw ShapeError("high_act: the high agent emits exactly two rates");
  }
  const auto a = act(agent, obs, explore, rng);
  return {a[0], a[1]};
}

std::vector<double> low_act(const AgentPair& agent, std::span<const double> obs,
                            std::span<const double> goal, bool explore, RandomEngine& rng) {
  std::vector<double> input;
  input.reserve(goal.size() + obs.size());
  input.insert(input.end(), goal.begin(), goal.end());
  input.insert(input.end(), obs.begin(), obs.end());
  return act(agent, input, explore, rng);
}

namespace detail {

LossGrads critic_loss_grads(const AgentPair& agent, std::span<const BatchItem> batch,
                            double gamma) {
  if (batch.empty()) throw std::invalid_argument("critic_loss_grads: empty batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  LossGrads out;
  out.grads = zero_grads_like(agent.critic);
  MlpWorkspace ws;
  std::vector<double> x;
  std::vector<double> upstream(1);
  for (const BatchItem& item : batch) {
    const auto next_action = map_actor_output(agent, forward(agent.target_actor, item.next_state));
    x.assign(item.next_state.begin(), item.next_state.end());
    x.insert(x.end(), next_action.begin(), next_action.end());
    const double q_next = forward(agent.target_critic, x)[0];
    const double y = item.reward + gamma * (item.done ? 0.0 : 1.0) * q_next;

    x.assign(item.state.begin(), item.state.end());
    x.insert(x.end(), item.action.begin(), item.action.end());
    const double q = forward(agent.critic, x)[0];
    const double err = q - y;
    out.loss += err * err * inv_n;
    upstream[0] = 2.0 * err;
    backward_accumulate(agent.critic, x, upstream, inv_n, out.grads, nullptr, ws);
  }
  return out;
}

LossGrads actor_loss_grads(const AgentPair& agent, std::span<const BatchItem> batch) {
  if (batch.empty()) throw std::invalid_argument("actor_loss_grads: empty batch");
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  const std::size_t state_dim = batch.front().state.size();
  LossGrads out;
  out.grads = zero_grads_like(agent.actor);
  MlpGrads critic_scratch = zero_grads_like(agent.critic);
  MlpWorkspace ws_critic;
  MlpWorkspace ws_actor;
  std::vector<double> x;
  std::vector<double> input_grad;
  std::vector<double> upstream_q(1, 1.0);
  std::vector<double> upstream_actor;
  for (const BatchItem& item : batch) {
    const auto raw = forward(agent.actor, item.state);
    const auto action = map_actor_output(agent, raw);
    x.assign(item.state.begin(), item.state.end());
    x.insert(x.end(), action.begin(), action.end());
    const double q = forward(agent.critic, x)[0];
    out.loss -= q * inv_n;

    // dQ/d(action) via the critic's input gradient; the critic's own
    // parameter gradients land in a scratch accumulator and are
    // discarded.
    input_grad.assign(x.size(), 0.0);
    backward_accumulate(agent.critic, x, upstream_q, 1.0, critic_scratch, &input_grad, ws_critic);

    upstream_actor.resize(agent.action_dim);
    for (std::size_t d = 0; d < agent.action_dim; ++d) {
      upstream_actor[d] = -inv_n * input_grad[state_dim + d] * actor_output_slope(agent, d);
    }
    backward_accumulate(agent.actor, item.state, upstream_actor, 1.0, out.grads, nullptr,
                        ws_actor);
  }
  return out;
}

}  // namespace detail

UpdateStats ddpg_update(AgentPair& agent, std::span<const BatchItem> batch, double gamma,
                        double tau) {
  if (batch.empty()) throw std::invalid_argument("ddpg_update: empty batch");
  for (const BatchItem& item : batch) {
    if (item.state.size() != batch.front().state.size() ||
        item.action.size() != agent.action_dim) {
      throw ShapeError("ddpg_update: inconsistent transition shapes in batch");
    }
  }

  auto critic_eval = detail::critic_loss_grads(agent, batch, gamma);
  optimizer_step(agent.critic, critic_eval.grads, agent.critic_opt);

  auto actor_eval = detail::actor_loss_grads(agent, batch);
  optimizer_step(agent.actor, actor_eval.grads, agent.actor_opt);

  soft_update(agent.target_actor, agent.actor, tau);
  soft_update(agent.target_critic, agent.critic, tau);

  if (!std::isfinite(critic_eval.loss) || !std::isfinite(actor_eval.loss)) {
    double r_lo = std::numeric_limits<double>::infinity();
    double r_hi = -std::numeric_limits<double>::infinity();
    for (const BatchItem& item : batch) {
      r_lo = std::min(r_lo, item.reward);
      r_hi = std::max(r_hi, item.reward);
    }
    std::ostringstream oss;
    oss << "ddpg_update: non-finite loss (critic=" << critic_eval.loss
        << ", actor=" << actor_eval.loss << "; batch size " << batch.size() << ", rewards ["
        << r_lo << ", " << r_hi << "])";
    throw NumericError(oss.str());
  }
  return {critic_eval.loss, actor_eval.loss};
}

// ---------------------------------------------------------------------------
// Checkpoint serialization
// ---------------------------------------------------------------------------

namespace {

void write_vector(std::ostream& out, const std::vector<double>& v) {
  out << v.size();
  for (const double x : v) out << ' ' << format_double(x);
  out << '\n';
}

std::vector<double> read_vector(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("truncated checkpoint: expected " + what);
  std::istringstream iss(line);
  std::size_t n = 0;
  if (!(iss >> n)) throw ParseError("bad vector header in " + what);
  std::vector<double> v(n);
  std::string tok;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(iss >> tok)) throw ParseError("short vector in " + what);
    v[i] = parse_double(tok, what);
  }
  return v;
}

void write_mlp(std::ostream& out, const Mlp& net) {
  out << "mlp " << net.layer_sizes.size();
  for (const std::size_t s : net.layer_sizes) out << ' ' << s;
  out << ' ' << activation_name(net.hidden_activation) << ' '
      << activation_name(net.output_activation) << '\n';
  for (std::size_t l = 0; l < net.num_layers(); ++l) {
    write_vector(out, net.weights[l]);
    write_vector(out, net.biases[l]);
  }
}

Mlp read_mlp(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("truncated checkpoint: expected " + what);
  std::istringstream iss(line);
  std::string tag;
  std::size_t n_sizes = 0;
  if (!(iss >> tag >> n_sizes) || tag != "mlp") {
    throw ParseError("bad mlp header in " + what);
  }
  Mlp net;
  net.layer_sizes.resize(n_sizes);
  for (auto& s : net.layer_sizes) {
    if (!(iss >> s)) throw ParseError("short mlp layer sizes in " + what);
  }
  std::string hidden_name, output_name;
  if (!(iss >> hidden_name >> output_name)) throw ParseError("missing activations in " + what);
  net.hidden_activation = activation_from_name(hidden_name);
  net.output_activation = activation_from_name(output_name);
  if (n_sizes < 2) throw ParseError("mlp in " + what + " has fewer than two layers");
  const std::size_t layers = n_sizes - 1;
  net.weights.resize(layers);
  net.biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    net.weights[l] = read_vector(in, what + " weights " + std::to_string(l));
    net.biases[l] = read_vector(in, what + " biases " + std::to_string(l));
    if (net.weights[l].size() != net.layer_sizes[l] * net.layer_sizes[l + 1] ||
        net.biases[l].size() != net.layer_sizes[l + 1]) {
      throw ParseError("mlp parameter shapes in " + what + " do not match layer sizes");
    }
  }
  return net;
}

void write_optimizer(std::ostream& out, const OptimizerState& st) {
  out << "opt " << (st.mode == OptMode::adam ? "adam" : "sgd") << ' '
      << format_double(st.learning_rate) << ' ' << format_double(st.beta1) << ' '
      << format_double(st.beta2) << ' ' << format_double(st.epsilon) << ' ' << st.step_count
      << ' ' << st.m_weights.size() << '\n';
  for (std::size_t l = 0; l < st.m_weights.size(); ++l) {
    write_vector(out, st.m_weights[l]);
    write_vector(out, st.v_weights[l]);
    write_vector(out, st.m_biases[l]);
    write_vector(out, st.v_biases[l]);
  }
}

OptimizerState read_optimizer(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("truncated checkpoint: expected " + what);
  std::istringstream iss(line);
  std::string tag, mode, lr, b1, b2, eps;
  std::size_t layers = 0;
  OptimizerState st;
  if (!(iss >> tag >> mode >> lr >> b1 >> b2 >> eps >> st.step_count >> layers) || tag != "opt") {
    throw ParseError("bad optimizer header in " + what);
  }
  if (mode == "adam") {
    st.mode = OptMode::adam;
  } else if (mode == "sgd") {
    st.mode = OptMode::sgd;
  } else {
    throw ParseError("unknown optimizer mode '" + mode + "' in " + what);
  }
  st.learning_rate = parse_double(lr, what);
  st.beta1 = parse_double(b1, what);
  st.beta2 = parse_double(b2, what);
  st.epsilon = parse_double(eps, what);
  st.m_weights.resize(layers);
  st.v_weights.resize(layers);
  st.m_biases.resize(layers);
  st.v_biases.resize(layers);
  for (std::size_t l = 0; l < layers; ++l) {
    st.m_weights[l] = read_vector(in, what + " m_weights " + std::to_string(l));
    st.v_weights[l] = read_vector(in, what + " v_weights " + std::to_string(l));
    st.m_biases[l] = read_vector(in, what + " m_biases " + std::to_string(l));
    st.v_biases[l] = read_vector(in, what + " v_biases " + std::to_string(l));
  }
  return st;
}

void write_agent(std::ostream& out, const std::string& name, const AgentPair& agent) {
  out << "agent " << name << ' ' << agent.action_dim << ' ' << format_double(agent.noise_scale)
      << '\n';
  write_vector(out, agent.action_low);
  write_vector(out, agent.action_high);
  write_mlp(out, agent.actor);
  write_mlp(out, agent.critic);
  write_mlp(out, agent.target_actor);
  write_mlp(out, agent.target_critic);
  write_optimizer(out, agent.actor_opt);
  write_optimizer(out, agent.critic_opt);
}

std::pair<std::string, AgentPair> read_agent(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("truncated checkpoint: expected agent header");
  std::istringstream iss(line);
  std::string tag, name, noise;
  AgentPair agent;
  if (!(iss >> tag >> name >> agent.action_dim >> noise) || tag != "agent") {
    throw ParseError("bad agent header: '" + line + "'");
  }
  agent.noise_scale = parse_double(noise, "agent " + name + " noise scale");
  agent.action_low = read_vector(in, "agent " + name + " action_low");
  agent.action_high = read_vector(in, "agent " + name + " action_high");
  agent.actor = read_mlp(in, "agent " + name + " actor");
  agent.critic = read_mlp(in, "agent " + name + " critic");
  agent.target_actor = read_mlp(in, "agent " + name + " target_actor");
  agent.target_critic = read_mlp(in, "agent " + name + " target_critic");
  agent.actor_opt = read_optimizer(in, "agent " + name + " actor_opt");
  agent.critic_opt = read_optimizer(in, "agent " + name + " critic_opt");
  return {name, std::move(agent)};
}

}  // namespace

const AgentPair& Checkpoint::agent(const std::string& name) const {
  for (const auto& [agent_name, agent] : agents) {
    if (agent_name == name) return agent;
  }
  throw ParseError("checkpoint has no agent named '" + name + "'");
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "HILOCKPT v1\n";
  out << "algo " << ckpt.algo << '\n';
  out << "env " << ckpt.env_name << '\n';
  out << "eps " << format_double(ckpt.eps) << '\n';
  out << "agents " << ckpt.agents.size() << '\n';
  for (const auto& [name, agent] : ckpt.agents) {
    write_agent(out, name, agent);
  }
  if (!out) throw ParseError("write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open checkpoint '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "HILOCKPT v1") {
    throw ParseError("bad checkpoint header in '" + path + "'");
  }
  Checkpoint ckpt;
  std::string key;
  if (!(in >> key >> ckpt.algo) || key != "algo") throw ParseError("missing algo line");
  if (!(in >> key >> ckpt.env_name) || key != "env") throw ParseError("missing env line");
  std::string eps;
  if (!(in >> key >> eps) || key != "eps") throw ParseError("missing eps line");
  ckpt.eps = parse_double(eps, "checkpoint eps");
  std::size_t n_agents = 0;
  if (!(in >> key >> n_agents) || key != "agents") throw ParseError("missing agents line");
  in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  for (std::size_t i = 0; i < n_agents; ++i) {
    ckpt.agents.push_back(read_agent(in));
  }
  return ckpt;
}

}  // namespace hilonet
