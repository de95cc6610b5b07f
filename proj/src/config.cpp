#include "hilonet/config.hpp"

#include <algorithm>
#include <fstream>

namespace hilonet {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ParseError("config key '" + key + "': expected true/false, got '" + value + "'");
}

}  // namespace

void apply_config_entry(TrainConfig& c, const std::string& key, const std::string& value) {
  const auto as_u64 = [&] { return parse_u64(value, "config key '" + key + "'"); };
  const auto as_real = [&] { return parse_double(value, "config key '" + key + "'"); };

  if (key == "env_name") c.env_name = value;
  else if (key == "demo_path") c.demo_path = value;
  else if (key == "total_env_steps") c.total_env_steps = as_u64();
  else if (key == "delta_t") c.delta_t = as_u64();
  else if (key == "high_update_delay") c.high_update_delay = as_u64();
  else if (key == "gamma") c.gamma = as_real();
  else if (key == "tau") c.tau = as_real();
  else if (key == "actor_lr") c.actor_lr = as_real();
  else if (key == "critic_lr") c.critic_lr = as_real();
  else if (key == "batch_size") c.batch_size = as_u64();
  else if (key == "noise_scale_start") c.noise_scale_start = as_real();
  else if (key == "noise_scale_final") c.noise_scale_final = as_real();
  else if (key == "eps") c.eps = as_real();
  else if (key == "r_bonus") c.r_bonus = as_real();
  else if (key == "alpha") c.alpha = as_real();
  else if (key == "low_buffer_capacity") c.low_buffer_capacity = as_u64();
  else if (key == "high_buffer_capacity") c.high_buffer_capacity = as_u64();
  else if (key == "warmup_steps") c.warmup_steps = as_u64();
  else if (key == "eval_interval") c.eval_interval = as_u64();
  else if (key == "eval_episodes") c.eval_episodes = as_u64();
  else if (key == "seed") c.seed = as_u64();
  else if (key == "disable_hindsight") c.ablation.disable_hindsight = parse_bool(value, key);
  else if (key == "disable_delay") c.ablation.disable_delay = parse_bool(value, key);
  else if (key == "double_high_buffer") c.ablation.double_high_buffer = parse_bool(value, key);
  else throw ParseError("unknown config key '" + key + "'");
}

TrainConfig parse_config_file(const std::string& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) + " in '" + path +
                       "': expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw ParseError("config line " + std::to_string(lineno) + " in '" + path +
                       "': empty key");
    }
    apply_config_entry(base, key, value);
  }
  return base;
}

void apply_overrides(TrainConfig& config,
                     const std::vector<std::pair<std::string, std::string>>& overrides) {
  for (const auto& [key, value] : overrides) {
    apply_config_entry(config, key, value);
  }
}

}  // namespace hilonet
