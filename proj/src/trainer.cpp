#include "hilonet/trainer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hilonet/kernels.hpp"

namespace hilonet {

void validate_config(const TrainConfig& config) {
  const auto positive = [](std::size_t v, const char* key) {
    if (v == 0) throw ParseError(std::string("config: ") + key + " must be positive");
  };
  positive(config.delta_t, "delta_t");
  positive(config.high_update_delay, "high_update_delay");
  positive(config.batch_size, "batch_size");
  positive(config.low_buffer_capacity, "low_buffer_capacity");
  positive(config.high_buffer_capacity, "high_buffer_capacity");
  positive(config.eval_interval, "eval_interval");
  positive(config.eval_episodes, "eval_episodes");
  if (!(config.gamma >= 0.0 && config.gamma < 1.0)) {
    throw ParseError("config: gamma must lie in [0, 1)");
  }
  if (!(config.tau > 0.0 && config.tau <= 1.0)) {
    throw ParseError("config: tau must lie in (0, 1]");
  }
  for (const auto& [v, key] : {std::pair<double, const char*>{config.actor_lr, "actor_lr"},
                               {config.critic_lr, "critic_lr"},
                               {config.r_bonus, "r_bonus"}}) {
    if (!(v > 0.0)) throw ParseError(std::string("config: ") + key + " must be positive");
  }
  if (config.alpha < 0.0) throw ParseError("config: alpha must be non-negative");
  if (config.eps < 0.0) throw ParseError("config: eps must be non-negative");
  if (config.noise_scale_start < 0.0 || config.noise_scale_final < 0.0) {
    throw ParseError("config: noise scales must be non-negative");
  }
}

// ---------------------------------------------------------------------------
// Episode rollout
// ---------------------------------------------------------------------------

EpisodeResult run_episode(Env& env, const DemoSet& demos, const HighPolicyFn& high_policy,
                          const LowPolicyFn& low_policy, const RewardParams& params,
                          std::uint64_t episode_seed, const StepHook& on_step,
                          const SegmentHook& on_segment) {
  if (env.spec().observation_dim != demos.observation_dim) {
    throw ShapeError("run_episode: demo observation dim does not match the environment");
  }
  if (env.spec().name != demos.env_name) {
    throw ShapeError("run_episode: demos were generated for env '" + demos.env_name +
                     "', not '" + env.spec().name + "'");
  }

  EpisodeResult result;
  std::vector<double> obs = env.reset(episode_seed);

  Segment segment;
  bool segment_open = false;
  bool stop = false;

  while (!stop) {
    if (!segment_open) {
      const HighAction rates = high_policy(obs);
      const SubgoalLookup lookup = index_subgoal(demos, rates.a1, rates.a2);
      segment = Segment{};
      segment.high_action = rates;
      segment.subgoal_index = lookup.index;
      segment.subgoal = lookup.observation;
      segment.observations.push_back(obs);
      segment_open = true;
    }

    const std::vector<double> action = low_policy(obs, segment.subgoal);
    const StepResult sr = env.step(action);
    result.eval_return += sr.eval_reward;
    ++result.steps;

    LowTransition t;
    t.obs = obs;
    t.action = action;
    t.next_obs = sr.observation;
    t.goal = segment.subgoal;
    t.reward = low_reward(sr.observation, segment.subgoal, params);
    t.done = low_done(sr.observation, segment.subgoal, params.eps, sr.done);
    result.low_transitions.push_back(t);

    segment.observations.push_back(sr.observation);
    segment.actions.push_back(action);
    obs = sr.observation;

    bool keep_going = true;
    if (on_step) keep_going = on_step(result.low_transitions.back());
    if (!keep_going && !sr.done) result.truncated_by_caller = true;

    if (sr.done || !keep_going || segment.steps() == params.delta_t) {
      segment.env_done = sr.done;
      const auto prev = match_observation(demos, segment.start_obs(), params.eps);
      const auto cur = match_observation(demos, segment.final_obs(), params.eps);
      const bool subgoal_achieved = achieved(segment.final_obs(), segment.subgoal, params.eps);

      HighTransition ht;
      ht.obs = segment.start_obs();
      ht.high_action = segment.high_action;
      ht.reward = high_reward(prev, cur, subgoal_achieved, params);
      ht.next_obs = segment.final_obs();
      ht.done = sr.done;
      result.high_transitions.push_back(ht);
      result.segments.push_back(segment);
      if (on_segment) on_segment(result.segments.back(), result.high_transitions.back());
      segment_open = false;
    }

    stop = sr.done || !keep_going;
    if (sr.done) result.success = env.success();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

EvalMetrics evaluate_policy(Env& env, const SteppedPolicyFn& policy, std::size_t n_episodes,
                            std::uint64_t seed) {
  if (n_episodes == 0) throw std::invalid_argument("evaluate_policy: need at least one episode");
  double total_return = 0.0;
  double total_length = 0.0;
  std::size_t successes = 0;
  for (std::size_t i = 0; i < n_episodes; ++i) {
    std::vector<double> obs = env.reset(mix_seed(seed + i));
    std::size_t t = 0;
    bool done = false;
    while (!done) {
      const StepResult sr = env.step(policy(obs, t));
      total_return += sr.eval_reward;
      obs = sr.observation;
      done = sr.done;
      ++t;
    }
    total_length += static_cast<double>(t);
    if (env.success()) ++successes;
  }
  const double n = static_cast<double>(n_episodes);
  return {total_return / n, static_cast<double>(successes) / n, total_length / n};
}

EvalMetrics evaluate(const AgentPair& high, const AgentPair& low, Env& env, const DemoSet& demos,
                     std::size_t n_episodes, std::uint64_t seed, std::size_t delta_t,
                     double eps) {
  (void)eps;
  RandomEngine unused(0);  // never drawn from: exploration is off
  std::vector<double> subgoal;
  const SteppedPolicyFn policy = [&](std::span<const double> obs,
                                     std::size_t t) -> std::vector<double> {
    if (t % delta_t == 0) {
      const HighAction rates = high_act(high, obs, /*explore=*/false, unused);
      subgoal = index_subgoal(demos, rates.a1, rates.a2).observation;
    }
    return low_act(low, obs, subgoal, /*explore=*/false, unused);
  };
  return evaluate_policy(env, policy, n_episodes, seed);
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

double anneal_noise(const TrainConfig& cfg, std::size_t env_steps) {
  if (cfg.total_env_steps == 0) return cfg.noise_scale_start;
  const double frac = std::min(1.0, static_cast<double>(env_steps) /
                                        static_cast<double>(cfg.total_env_steps));
  return cfg.noise_scale_start + frac * (cfg.noise_scale_final - cfg.noise_scale_start);
}

std::vector<BatchItem> assemble_low_batch(const std::vector<LowTransition>& sampled) {
  std::vector<BatchItem> batch(sampled.size());
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    const LowTransition& t = sampled[i];
    BatchItem& b = batch[i];
    b.state.reserve(t.goal.size() + t.obs.size());
    b.state.insert(b.state.end(), t.goal.begin(), t.goal.end());
    b.state.insert(b.state.end(), t.obs.begin(), t.obs.end());
    b.action = t.action;
    b.reward = t.reward;
    b.next_state.reserve(t.goal.size() + t.next_obs.size());
    b.next_state.insert(b.next_state.end(), t.goal.begin(), t.goal.end());
    b.next_state.insert(b.next_state.end(), t.next_obs.begin(), t.next_obs.end());
    b.done = t.done;
  }
  return batch;
}

std::vector<BatchItem> assemble_high_batch(const std::vector<HighTransition>& sampled) {
  std::vector<BatchItem> batch(sampled.size());
  for (std::size_t i = 0; i < sampled.size(); ++i) {
    const HighTransition& t = sampled[i];
    BatchItem& b = batch[i];
    b.state = t.obs;
    b.action = {t.high_action.a1, t.high_action.a2};
    b.reward = t.reward;
    b.next_state = t.next_obs;
    b.done = t.done;
  }
  return batch;
}

struct CommonSetup {
  std::unique_ptr<Env> env;
  std::unique_ptr<Env> eval_env;
  DemoSet demos;
  RewardParams params;
  std::uint64_t eval_seed;
};

CommonSetup prepare(const TrainConfig& cfg) {
  validate_config(cfg);
  CommonSetup s;
  s.env = make_env(cfg.env_name);
  s.eval_env = make_env(cfg.env_name);
  s.demos = load_demos(cfg.demo_path);
  if (s.demos.env_name != cfg.env_name) {
    throw ParseError("demo file '" + cfg.demo_path + "' was generated for env '" +
                     s.demos.env_name + "', config says '" + cfg.env_name + "'");
  }
  if (s.demos.observation_dim != s.env->spec().observation_dim) {
    throw ShapeError("demo observation dim does not match the environment");
  }
  s.params.eps = cfg.eps > 0.0 ? cfg.eps : 0.05 * demo_space_diameter(s.demos);
  s.params.r_bonus = cfg.r_bonus;
  s.params.alpha = cfg.alpha;
  s.params.delta_t = cfg.delta_t;
  // Fixed evaluation seed set per run: curve points stay comparable
  // across training time.
  s.eval_seed = mix_seed(cfg.seed ^ 0x4556414cULL);
  return s;
}

void append_eval_point(LearningCurve& curve, std::size_t env_steps, const EvalMetrics& m) {
  curve.points.push_back({env_steps, m.mean_return, m.success_rate, m.mean_length});
}

}  // namespace

TrainResult train(const TrainConfig& cfg) {
  CommonSetup s = prepare(cfg);
  const std::size_t obs_dim = s.env->spec().observation_dim;
  const EnvSpec& spec = s.env->spec();

  RandomEngine rng(mix_seed(cfg.seed));
  AgentPair high = make_agent(obs_dim, 2, {0.0, 0.0}, {1.0, 1.0}, Activation::sigmoid,
                              cfg.actor_lr, cfg.critic_lr, rng);
  AgentPair low = make_agent(2 * obs_dim, spec.action_dim, spec.action_low, spec.action_high,
                             Activation::tanh, cfg.actor_lr, cfg.critic_lr, rng);

  const auto check_low = [obs_dim, &spec](const LowTransition& t) {
    if (t.obs.size() != obs_dim || t.next_obs.size() != obs_dim || t.goal.size() != obs_dim ||
        t.action.size() != spec.action_dim) {
      throw ShapeError("low transition dimensions are inconsistent");
    }
    if (!std::isfinite(t.reward)) throw NumericError("low transition reward is non-finite");
  };
  const auto check_high = [obs_dim](const HighTransition& t) {
    if (t.obs.size() != obs_dim || t.next_obs.size() != obs_dim) {
      throw ShapeError("high transition dimensions are inconsistent");
    }
    if (!std::isfinite(t.reward)) throw NumericError("high transition reward is non-finite");
  };
  ReplayBuffer<LowTransition> low_buf(cfg.low_buffer_capacity, check_low);
  const std::size_t high_capacity =
      cfg.high_buffer_capacity * (cfg.ablation.double_high_buffer ? 2 : 1);
  ReplayBuffer<HighTransition> high_buf(high_capacity, check_high);

  TrainResult result;
  TrainStats& stats = result.stats;
  LearningCurve& curve = result.curve;
  curve.seed = cfg.seed;
  curve.config_fingerprint = config_fingerprint(cfg);

  const std::size_t effective_delay = cfg.ablation.disable_delay ? 1 : cfg.high_update_delay;
  std::size_t last_eval_step = 0;

  const auto run_eval = [&](std::size_t at_steps) {
    append_eval_point(curve, at_steps,
                      evaluate(high, low, *s.eval_env, s.demos, cfg.eval_episodes, s.eval_seed,
                               cfg.delta_t, s.params.eps));
    last_eval_step = at_steps;
  };

  const HighPolicyFn high_policy = [&](std::span<const double> obs) -> HighAction {
    if (stats.env_steps < cfg.warmup_steps) {
      return {rng.u01(), rng.u01()};
    }
    return high_act(high, obs, /*explore=*/true, rng);
  };
  const LowPolicyFn low_policy = [&](std::span<const double> obs,
                                     std::span<const double> goal) -> std::vector<double> {
    if (stats.env_steps < cfg.warmup_steps) {
      std::vector<double> a(spec.action_dim);
      for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = rng.uniform(spec.action_low[i], spec.action_high[i]);
      }
      return a;
    }
    return low_act(low, obs, goal, /*explore=*/true, rng);
  };

  const StepHook on_step = [&](const LowTransition& t) -> bool {
    ++stats.env_steps;
    low_buf.push(t);
    const double noise = anneal_noise(cfg, stats.env_steps);
    high.noise_scale = noise;
    low.noise_scale = noise;

    if (stats.env_steps > cfg.warmup_steps) {
      try {
        const auto batch = assemble_low_batch(low_buf.sample(cfg.batch_size, rng));
        ddpg_update(low, batch, cfg.gamma, cfg.tau);
        ++stats.low_updates;
      } catch (const NumericError& e) {
        stats.diverged = true;
        stats.divergence_message = std::string("low update diverged: ") + e.what();
        return false;
      }
    }
    if (stats.env_steps % cfg.eval_interval == 0) run_eval(stats.env_steps);
    return stats.env_steps < cfg.total_env_steps;
  };

  const SegmentHook on_segment = [&](const Segment& segment, const HighTransition& ht) {
    if (stats.diverged) return;
    high_buf.push(ht);
    ++stats.high_decisions;
    if (!cfg.ablation.disable_hindsight) {
      if (auto relabeled = relabel_high(segment, s.demos, s.params)) {
        high_buf.push(std::move(*relabeled));
        ++stats.relabeled_high;
      }
      for (auto& t : relabel_low(segment, s.demos, s.params)) {
        low_buf.push(std::move(t));
        ++stats.relabeled_low;
      }
    }
    if (stats.env_steps > cfg.warmup_steps) {
      ++stats.high_decisions_after_warmup;
      if (stats.high_decisions_after_warmup % effective_delay == 0) {
        try {
          const auto batch = assemble_high_batch(high_buf.sample(cfg.batch_size, rng));
          ddpg_update(high, batch, cfg.gamma, cfg.tau);
          ++stats.high_updates;
        } catch (const NumericError& e) {
          stats.diverged = true;
          stats.divergence_message = std::string("high update diverged: ") + e.what();
        }
      }
    }
  };

  while (stats.env_steps < cfg.total_env_steps && !stats.diverged) {
    const std::uint64_t episode_seed = rng.next_u64();
    const EpisodeResult ep =
        run_episode(*s.env, s.demos, high_policy, low_policy, s.params, episode_seed, on_step,
                    on_segment);
    (void)ep;
    ++stats.episodes;
  }
  if (!stats.diverged && cfg.total_env_steps > 0 && last_eval_step < stats.env_steps) {
    run_eval(stats.env_steps);
  }

  result.checkpoint.algo = "hilonet";
  result.checkpoint.env_name = cfg.env_name;
  result.checkpoint.eps = s.params.eps;
  result.checkpoint.agents.emplace_back("high", std::move(high));
  result.checkpoint.agents.emplace_back("low", std::move(low));
  result.resolved_eps = s.params.eps;
  return result;
}

TrainResult train_tsre(const TrainConfig& cfg) {
  CommonSetup s = prepare(cfg);
  const std::size_t obs_dim = s.env->spec().observation_dim;
  const EnvSpec& spec = s.env->spec();
  const Trajectory& demo = s.demos.trajectories.front();  // the baseline follows one expert

  RandomEngine rng(mix_seed(cfg.seed));
  AgentPair flat = make_agent(obs_dim, spec.action_dim, spec.action_low, spec.action_high,
                              Activation::tanh, cfg.actor_lr, cfg.critic_lr, rng);

  ReplayBuffer<LowTransition> buf(cfg.low_buffer_capacity);

  TrainResult result;
  TrainStats& stats = result.stats;
  LearningCurve& curve = result.curve;
  curve.seed = cfg.seed;
  curve.config_fingerprint = config_fingerprint(cfg);
  std::size_t last_eval_step = 0;
  RandomEngine eval_unused(0);

  const auto run_eval = [&](std::size_t at_steps) {
    const SteppedPolicyFn policy = [&](std::span<const double> obs,
                                       std::size_t) -> std::vector<double> {
      return act(flat, obs, /*explore=*/false, eval_unused);
    };
    append_eval_point(curve, at_steps,
                      evaluate_policy(*s.eval_env, policy, cfg.eval_episodes, s.eval_seed));
    last_eval_step = at_steps;
  };

  while (stats.env_steps < cfg.total_env_steps && !stats.diverged) {
    const std::uint64_t episode_seed = rng.next_u64();
    std::vector<double> obs = s.env->reset(episode_seed);
    std::size_t t = 0;
    bool done = false;
    while (!done) {
      std::vector<double> action;
      if (stats.env_steps < cfg.warmup_steps) {
        action.resize(spec.action_dim);
        for (std::size_t i = 0; i < action.size(); ++i) {
          action[i] = rng.uniform(spec.action_low[i], spec.action_high[i]);
        }
      } else {
        action = act(flat, obs, /*explore=*/true, rng);
      }
      const StepResult sr = s.env->step(action);
      ++stats.env_steps;
      ++t;

      // Reward against the demonstration observation at the same time
      // index, clamped to its final observation.
      const std::size_t demo_index = std::min(t, demo.length() - 1);
      const auto& target = demo.observations[demo_index];
      LowTransition tr;
      tr.obs = std::move(obs);
      tr.action = action;
      tr.next_obs = sr.observation;
      tr.reward = -kern::sq_dist(std::span<const double>(target),
                                 std::span<const double>(sr.observation));
      tr.done = sr.done;
      buf.push(std::move(tr));

      flat.noise_scale = anneal_noise(cfg, stats.env_steps);
      if (stats.env_steps > cfg.warmup_steps) {
        try {
          const auto batch = assemble_low_batch(buf.sample(cfg.batch_size, rng));
          ddpg_update(flat, batch, cfg.gamma, cfg.tau);
          ++stats.low_updates;
        } catch (const NumericError& e) {
          stats.diverged = true;
          stats.divergence_message = std::string("tsre update diverged: ") + e.what();
          break;
        }
      }
      if (stats.env_steps % cfg.eval_interval == 0) run_eval(stats.env_steps);

      obs = sr.observation;
      done = sr.done || stats.env_steps >= cfg.total_env_steps;
    }
    ++stats.episodes;
  }
  if (!stats.diverged && cfg.total_env_steps > 0 && last_eval_step < stats.env_steps) {
    run_eval(stats.env_steps);
  }

  result.checkpoint.algo = "tsre";
  result.checkpoint.env_name = cfg.env_name;
  result.checkpoint.eps = s.params.eps;
  result.checkpoint.agents.emplace_back("flat", std::move(flat));
  result.resolved_eps = s.params.eps;
  return result;
}

std::vector<std::pair<std::string, TrainResult>> ablate(const TrainConfig& base) {
  std::vector<std::pair<std::string, TrainResult>> out;
  const auto with_flags = [&](AblationFlags flags) {
    TrainConfig cfg = base;
    cfg.ablation = flags;
    return cfg;
  };
  out.emplace_back("full", train(with_flags({})));
  out.emplace_back("no_hindsight", train(with_flags({.disable_hindsight = true})));
  out.emplace_back("no_delay", train(with_flags({.disable_delay = true})));
  out.emplace_back("double_high_buffer", train(with_flags({.double_high_buffer = true})));
  return out;
}

// ---------------------------------------------------------------------------
// Artifacts
// ---------------------------------------------------------------------------

std::string serialize_config(const TrainConfig& c) {
  std::ostringstream out;
  out << "env_name = " << c.env_name << '\n';
  out << "demo_path = " << c.demo_path << '\n';
  out << "total_env_steps = " << c.total_env_steps << '\n';
  out << "delta_t = " << c.delta_t << '\n';
  out << "high_update_delay = " << c.high_update_delay << '\n';
  out << "gamma = " << format_double(c.gamma) << '\n';
  out << "tau = " << format_double(c.tau) << '\n';
  out << "actor_lr = " << format_double(c.actor_lr) << '\n';
  out << "critic_lr = " << format_double(c.critic_lr) << '\n';
  out << "batch_size = " << c.batch_size << '\n';
  out << "noise_scale_start = " << format_double(c.noise_scale_start) << '\n';
  out << "noise_scale_final = " << format_double(c.noise_scale_final) << '\n';
  out << "eps = " << format_double(c.eps) << '\n';
  out << "r_bonus = " << format_double(c.r_bonus) << '\n';
  out << "alpha = " << format_double(c.alpha) << '\n';
  out << "low_buffer_capacity = " << c.low_buffer_capacity << '\n';
  out << "high_buffer_capacity = " << c.high_buffer_capacity << '\n';
  out << "warmup_steps = " << c.warmup_steps << '\n';
  out << "eval_interval = " << c.eval_interval << '\n';
  out << "eval_episodes = " << c.eval_episodes << '\n';
  out << "seed = " << c.seed << '\n';
  out << "disable_hindsight = " << (c.ablation.disable_hindsight ? "true" : "false") << '\n';
  out << "disable_delay = " << (c.ablation.disable_delay ? "true" : "false") << '\n';
  out << "double_high_buffer = " << (c.ablation.double_high_buffer ? "true" : "false") << '\n';
  return out.str();
}

std::string config_fingerprint(const TrainConfig& c) {
  std::ostringstream out;
  out << std::hex << fnv1a(serialize_config(c));
  return out.str();
}

void write_curve_csv(const LearningCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "env_steps,mean_return,success_rate,mean_length\n";
  for (const CurvePoint& p : curve.points) {
    out << p.env_steps << ',' << format_double(p.mean_return) << ','
        << format_double(p.success_rate) << ',' << format_double(p.mean_length) << '\n';
  }
  if (!out) throw ParseError("write to '" + path + "' failed");
}

std::vector<CurvePoint> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open curve file '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "env_steps,mean_return,success_rate,mean_length") {
    throw ParseError("bad curve header in '" + path + "'");
  }
  std::vector<CurvePoint> points;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<std::string, 4> fields;
    std::size_t field = 0;
    std::string cur;
    for (const char ch : line) {
      if (ch == ',') {
        if (field >= 3) throw ParseError("curve row " + std::to_string(row) + ": too many fields");
        fields[field++] = cur;
        cur.clear();
      } else {
        cur += ch;
      }
    }
    fields[field++] = cur;
    if (field != 4) throw ParseError("curve row " + std::to_string(row) + ": expected 4 fields");
    CurvePoint p;
    p.env_steps = parse_u64(fields[0], "curve row " + std::to_string(row));
    p.mean_return = parse_double(fields[1], "curve row " + std::to_string(row));
    p.success_rate = parse_double(fields[2], "curve row " + std::to_string(row));
    p.mean_length = parse_double(fields[3], "curve row " + std::to_string(row));
    points.push_back(p);
    ++row;
  }
  return points;
}

}  // namespace hilonet
