// hilonet command-line tool: demonstration generation, training,
// evaluation, ablations, numerical verification, and chart emission.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "hilonet/config.hpp"
#include "hilonet/svg.hpp"
#include "hilonet/trainer.hpp"
#include "hilonet/verify.hpp"

namespace fs = std::filesystem;
using namespace hilonet;

namespace {

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "' for fingerprinting");
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  std::ostringstream oss;
  oss << std::hex << fnv1a(bytes);
  return oss.str();
}

std::vector<std::pair<std::string, std::string>> parse_set_flags(
    const std::vector<std::string>& entries) {
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& entry : entries) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      throw ParseError("--set expects key=value, got '" + entry + "'");
    }
    overrides.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
  }
  return overrides;
}

TrainConfig resolve_config(const std::string& config_path,
                           const std::vector<std::string>& set_flags) {
  TrainConfig cfg;
  if (!config_path.empty()) cfg = parse_config_file(config_path);
  apply_overrides(cfg, parse_set_flags(set_flags));
  return cfg;
}

void write_manifest(const fs::path& dir, const std::string& algo, const TrainConfig& cfg,
                    const TrainResult& result, const std::vector<std::string>& artifacts) {
  std::ofstream out(dir / "manifest.txt");
  out << "HILOMANIFEST v1\n";
  out << "algo " << algo << '\n';
  out << "seed " << cfg.seed << '\n';
  out << "config_fingerprint " << config_fingerprint(cfg) << '\n';
  out << "demo_file " << cfg.demo_path << '\n';
  out << "demo_fingerprint " << file_fingerprint(cfg.demo_path) << '\n';
  out << "resolved_eps " << format_double(result.resolved_eps) << '\n';
  out << "env_steps " << result.stats.env_steps << '\n';
  out << "episodes " << result.stats.episodes << '\n';
  out << "diverged " << (result.stats.diverged ? "true" : "false") << '\n';
  if (!result.curve.points.empty()) {
    const auto& last = result.curve.points.back();
    out << "final_success_rate " << format_double(last.success_rate) << '\n';
    out << "final_mean_return " << format_double(last.mean_return) << '\n';
  }
  for (const auto& a : artifacts) out << "artifact " << a << '\n';
}

// Writes curve.csv, checkpoint.txt, config.txt and manifest.txt.
void emit_run(const fs::path& dir, const std::string& algo, const TrainConfig& cfg,
              const TrainResult& result) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "config.txt");
    out << serialize_config(cfg);
  }
  write_curve_csv(result.curve, (dir / "curve.csv").string());
  save_checkpoint(result.checkpoint, (dir / "checkpoint.txt").string());
  write_manifest(dir, algo, cfg, result, {"config.txt", "curve.csv", "checkpoint.txt"});
}

void print_curve_tail(const LearningCurve& curve) {
  for (const auto& p : curve.points) {
    std::cout << "steps=" << p.env_steps << " return=" << p.mean_return
              << " success=" << p.success_rate << " length=" << p.mean_length << '\n';
  }
}

int cmd_gen_demos(const std::string& env_name, std::size_t n, std::uint64_t seed,
                  const std::string& out_path) {
  auto env = make_env(env_name);
  const DemoSet demos = generate_demonstrations(*env, n, seed);
  save_demos(demos, out_path);

  std::size_t lo = demos.trajectories.front().length();
  std::size_t hi = lo;
  double mean = 0.0;
  for (const auto& t : demos.trajectories) {
    lo = std::min(lo, t.length());
    hi = std::max(hi, t.length());
    mean += static_cast<double>(t.length());
  }
  mean /= static_cast<double>(demos.num_trajectories());
  std::cout << "wrote " << out_path << ": " << demos.num_trajectories() << " trajectories, "
            << "length min/mean/max = " << lo << '/' << mean << '/' << hi << '\n';
  return 0;
}

int cmd_train(const std::string& config_path, const std::vector<std::string>& set_flags,
              const std::string& algo, const std::string& out_dir) {
  const TrainConfig cfg = resolve_config(config_path, set_flags);
  TrainResult result = algo == "tsre" ? train_tsre(cfg) : train(cfg);
  print_curve_tail(result.curve);
  emit_run(out_dir, algo, cfg, result);
  std::cout << "run directory: " << out_dir << '\n';
  if (result.stats.diverged) {
    std::cerr << "training diverged: " << result.stats.divergence_message << '\n';
    return 2;
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& demo_path,
             std::size_t episodes, std::uint64_t seed, std::size_t delta_t) {
  const Checkpoint ckpt = load_checkpoint(checkpoint_path);
  auto env = make_env(ckpt.env_name);
  EvalMetrics m;
  if (ckpt.algo == "tsre") {
    const AgentPair& flat = ckpt.agent("flat");
    RandomEngine unused(0);
    m = evaluate_policy(
        *env,
        [&](std::span<const double> obs, std::size_t) { return act(flat, obs, false, unused); },
        episodes, seed);
  } else {
    const DemoSet demos = load_demos(demo_path);
    m = evaluate(ckpt.agent("high"), ckpt.agent("low"), *env, demos, episodes, seed, delta_t,
                 ckpt.eps);
  }
  std::cout << "episodes=" << episodes << " mean_return=" << m.mean_return
            << " success_rate=" << m.success_rate << " mean_length=" << m.mean_length << '\n';
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::vector<std::string>& set_flags,
               const std::string& out_dir) {
  const TrainConfig cfg = resolve_config(config_path, set_flags);
  const auto variants = ablate(cfg);
  bool any_diverged = false;
  for (const auto& [name, result] : variants) {
    TrainConfig variant_cfg = cfg;
    variant_cfg.ablation = {};
    if (name == "no_hindsight") variant_cfg.ablation.disable_hindsight = true;
    if (name == "no_delay") variant_cfg.ablation.disable_delay = true;
    if (name == "double_high_buffer") variant_cfg.ablation.double_high_buffer = true;
    emit_run(fs::path(out_dir) / name, "hilonet", variant_cfg, result);
    const double final_success =
        result.curve.points.empty() ? 0.0 : result.curve.points.back().success_rate;
    std::cout << name << ": final_success_rate=" << final_success
              << (result.stats.diverged ? " (diverged)" : "") << '\n';
    any_diverged = any_diverged || result.stats.diverged;
  }
  return any_diverged ? 2 : 0;
}

int cmd_verify(std::size_t n_nets, double inject_error) {
  std::cout << "value inequality sweep (alpha = 1):\n";
  std::cout << "  gamma     T   delta_t          V1          V2   V1>V2\n";
  bool all_hold = true;
  for (const auto& row : value_inequality_sweep()) {
    std::cout << "  " << std::setw(5) << row.gamma << ' ' << std::setw(5) << row.T << ' '
              << std::setw(9) << row.delta_t << ' ' << std::setw(11) << row.result.v1 << ' '
              << std::setw(11) << row.result.v2 << "   " << (row.result.holds ? "yes" : "NO")
              << '\n';
    all_hold = all_hold && row.result.holds;
  }

  const GradCheckReport report = gradient_check(n_nets, 1e-5, 1e-4, 1000, inject_error);
  std::cout << "gradient check: " << report.nets_checked << " nets, "
            << report.components_checked << " components, max relative error "
            << report.max_rel_error;
  if (!report.worst_case.empty()) std::cout << " (" << report.worst_case << ")";
  std::cout << (report.passed ? " -- pass" : " -- FAIL") << '\n';

  if (!all_hold) std::cerr << "value inequality violated\n";
  if (!report.passed) std::cerr << "gradient check failed\n";
  return all_hold && report.passed ? 0 : 1;
}

std::vector<std::vector<double>> greedy_rollout(const Checkpoint& ckpt, const DemoSet& demos,
                                                Env& env, std::size_t delta_t,
                                                std::uint64_t seed) {
  RandomEngine unused(0);
  std::vector<std::vector<double>> states;
  std::vector<double> obs = env.reset(seed);
  std::vector<double> subgoal;
  states.push_back(obs);
  bool done = false;
  std::size_t t = 0;
  while (!done) {
    std::vector<double> action;
    if (ckpt.algo == "tsre") {
      action = act(ckpt.agent("flat"), obs, false, unused);
    } else {
      if (t % delta_t == 0) {
        const HighAction rates = high_act(ckpt.agent("high"), obs, false, unused);
        subgoal = index_subgoal(demos, rates.a1, rates.a2).observation;
      }
      action = low_act(ckpt.agent("low"), obs, subgoal, false, unused);
    }
    const StepResult sr = env.step(action);
    states.push_back(sr.observation);
    obs = sr.observation;
    done = sr.done;
    ++t;
  }
  return states;
}

int cmd_plot(const std::vector<std::string>& run_dirs, const std::string& out_dir) {
  fs::create_directories(out_dir);
  struct Metric {
    const char* field;
    const char* title;
  };
  const Metric metrics[] = {{"mean_return", "Mean evaluation return"},
                            {"success_rate", "Success rate"},
                            {"mean_length", "Mean episode length"}};

  std::vector<std::vector<CurvePoint>> curves;
  std::vector<std::string> names;
  for (const auto& dir : run_dirs) {
    curves.push_back(read_curve_csv((fs::path(dir) / "curve.csv").string()));
    names.push_back(fs::path(dir).filename().string());
  }

  for (const auto& metric : metrics) {
    std::vector<SvgSeries> series;
    for (std::size_t i = 0; i < curves.size(); ++i) {
      SvgSeries s;
      s.name = names[i];
      for (const auto& p : curves[i]) {
        double y = p.mean_return;
        if (std::string(metric.field) == "success_rate") y = p.success_rate;
        if (std::string(metric.field) == "mean_length") y = p.mean_length;
        s.points.emplace_back(static_cast<double>(p.env_steps), y);
      }
      series.push_back(std::move(s));
    }
    const auto path = fs::path(out_dir) / (std::string("curve_") + metric.field + ".svg");
    write_line_chart(path.string(), metric.title, "environment steps", metric.field, series);
    std::cout << "wrote " << path.string() << '\n';
  }

  // Trajectory plots for runs in 2-D environments, plus the expert
  // demonstrations they trained from.
  for (std::size_t i = 0; i < run_dirs.size(); ++i) {
    const fs::path dir = run_dirs[i];
    if (!fs::exists(dir / "checkpoint.txt") || !fs::exists(dir / "config.txt")) continue;
    const Checkpoint ckpt = load_checkpoint((dir / "checkpoint.txt").string());
    if (ckpt.env_name != "pointnav" && ckpt.env_name != "cyclepattern") continue;
    const TrainConfig cfg = parse_config_file((dir / "config.txt").string());
    const DemoSet demos = load_demos(cfg.demo_path);
    auto env = make_env(ckpt.env_name);

    std::vector<SvgPath> paths;
    for (std::uint64_t ep = 0; ep < 10; ++ep) {
      SvgPath p;
      for (const auto& s : greedy_rollout(ckpt, demos, *env, cfg.delta_t, mix_seed(7000 + ep))) {
        p.points.emplace_back(s[0], s[1]);
      }
      paths.push_back(std::move(p));
    }
    std::vector<SvgMarker> markers;
    if (ckpt.env_name == "pointnav") {
      markers.push_back({0.5, 0.5, 0.1, "goal"});
    } else {
      markers.push_back({0.5, 0.0, 0.1, "w0"});
      markers.push_back({0.0, 0.5, 0.1, "w1"});
      markers.push_back({-0.5, 0.0, 0.1, "w2"});
      markers.push_back({0.0, -0.5, 0.1, "w3"});
    }
    const auto path = fs::path(out_dir) / ("trajectories_" + names[i] + ".svg");
    write_trajectory_plot(path.string(), "Greedy rollouts: " + names[i], paths, markers);
    std::cout << "wrote " << path.string() << '\n';

    std::vector<SvgPath> demo_paths;
    for (const auto& traj : demos.trajectories) {
      SvgPath p;
      p.color = "#999999";
      for (const auto& o : traj.observations) p.points.emplace_back(o[0], o[1]);
      demo_paths.push_back(std::move(p));
    }
    const auto demo_plot = fs::path(out_dir) / ("trajectories_demos_" + names[i] + ".svg");
    write_trajectory_plot(demo_plot.string(), "Expert demonstrations (" + ckpt.env_name + ")",
                          demo_paths, markers);
    std::cout << "wrote " << demo_plot.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HILONet: hierarchical imitation learning from observation"};
  app.require_subcommand(1);

  // gen-demos
  std::string env_name = "pointnav";
  std::size_t n_traj = 20;
  std::uint64_t seed = 0;
  std::string out_path = "demos.hilodemo";
  auto* gen = app.add_subcommand("gen-demos", "Generate expert demonstration trajectories");
  gen->add_option("--env", env_name, "pointnav|hillclimb|cyclepattern");
  gen->add_option("--n", n_traj, "number of trajectories")->check(CLI::PositiveNumber);
  gen->add_option("--seed", seed, "generation seed");
  gen->add_option("--out", out_path, "output .hilodemo path");

  // train
  std::string config_path;
  std::vector<std::string> set_flags;
  std::string algo = "hilonet";
  std::string run_dir = "runs/run";
  auto* tr = app.add_subcommand("train", "Train a policy and write a run directory");
  tr->add_option("--config", config_path, "key = value config file");
  tr->add_option("--set", set_flags, "override, e.g. --set seed=3")->take_all();
  tr->add_option("--algo", algo, "hilonet|tsre")->check(CLI::IsMember({"hilonet", "tsre"}));
  tr->add_option("--out", run_dir, "run directory");

  // eval
  std::string ckpt_path;
  std::string demo_path;
  std::size_t episodes = 20;
  std::uint64_t eval_seed = 0;
  std::size_t delta_t = 5;
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint greedily");
  ev->add_option("--checkpoint", ckpt_path, "checkpoint file")->required();
  ev->add_option("--demos", demo_path, "demo file (hilonet checkpoints)");
  ev->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
  ev->add_option("--seed", eval_seed);
  ev->add_option("--delta-t", delta_t)->check(CLI::PositiveNumber);

  // ablate
  std::string ablate_config;
  std::vector<std::string> ablate_set;
  std::string ablate_dir = "runs/ablation";
  auto* ab = app.add_subcommand("ablate", "Run the four ablation variants with shared seeds");
  ab->add_option("--config", ablate_config, "key = value config file");
  ab->add_option("--set", ablate_set, "override, e.g. --set seed=3")->take_all();
  ab->add_option("--out", ablate_dir, "output directory (one subdir per variant)");

  // verify
  std::size_t n_nets = 20;
  double inject_error = 0.0;
  auto* vf = app.add_subcommand("verify", "Value-inequality sweep and gradient checks");
  vf->add_option("--nets", n_nets, "networks to gradient-check")->check(CLI::PositiveNumber);
  vf->add_option("--inject-gradient-error", inject_error,
                 "fault injection for testing the detector");

  // plot
  std::vector<std::string> run_dirs;
  std::string plot_dir = "plots";
  auto* pl = app.add_subcommand("plot", "Render curve and trajectory charts from run dirs");
  pl->add_option("runs", run_dirs, "run directories")->required();
  pl->add_option("--out", plot_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_demos(env_name, n_traj, seed, out_path);
    if (tr->parsed()) return cmd_train(config_path, set_flags, algo, run_dir);
    if (ev->parsed()) return cmd_eval(ckpt_path, demo_path, episodes, eval_seed, delta_t);
    if (ab->parsed()) return cmd_ablate(ablate_config, ablate_set, ablate_dir);
    if (vf->parsed()) return cmd_verify(n_nets, inject_error);
    if (pl->parsed()) return cmd_plot(run_dirs, plot_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
