#include "hilonet/demos.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hilonet/kernels.hpp"

namespace hilonet {

std::size_t DemoSet::total_observations() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.length();
  return n;
}

void validate_demos(const DemoSet& demos) {
  if (demos.trajectories.empty()) {
    throw ParseError("demo set has no trajectories");
  }
  if (demos.observation_dim == 0) {
    throw ParseError("demo set observation dimension must be positive");
  }
  for (std::size_t i = 0; i < demos.trajectories.size(); ++i) {
    const auto& traj = demos.trajectories[i];
    if (traj.length() < 2) {
      throw ParseError("trajectory " + std::to_string(i) + " has fewer than 2 observations");
    }
    for (const auto& obs : traj.observations) {
      if (obs.size() != demos.observation_dim) {
        throw ParseError("trajectory " + std::to_string(i) +
                         " contains an observation of dimension " + std::to_string(obs.size()) +
                         ", expected " + std::to_string(demos.observation_dim));
      }
    }
  }
}

const std::vector<double>& observation_at(const DemoSet& demos, DemoIndex index) {
  return demos.trajectories.at(index.trajectory_index).observations.at(index.observation_index);
}

SubgoalLookup index_subgoal(const DemoSet& demos, double a1, double a2) {
  if (demos.trajectories.empty()) {
    throw ParseError("index_subgoal: empty demo set");
  }
  SubgoalLookup out;
  if (a1 < 0.0 || a1 > 1.0 || a2 < 0.0 || a2 > 1.0) {
    out.clamped = true;
    a1 = std::clamp(a1, 0.0, 1.0);
    a2 = std::clamp(a2, 0.0, 1.0);
  }
  const std::size_t n_traj = demos.num_trajectories();
  const auto ti = static_cast<std::size_t>(a1 * static_cast<double>(n_traj));
  out.index.trajectory_index = std::min(ti, n_traj - 1);
  const std::size_t len = demos.trajectories[out.index.trajectory_index].length();
  const auto oi = static_cast<std::size_t>(a2 * static_cast<double>(len));
  out.index.observation_index = std::min(oi, len - 1);
  out.observation = observation_at(demos, out.index);
  return out;
}

RatePair subgoal_rates(const DemoSet& demos, DemoIndex index) {
  const std::size_t n_traj = demos.num_trajectories();
  if (index.trajectory_index >= n_traj) {
    throw ParseError("subgoal_rates: trajectory index out of range");
  }
  const std::size_t len = demos.trajectories[index.trajectory_index].length();
  if (index.observation_index >= len) {
    throw ParseError("subgoal_rates: observation index out of range");
  }
  RatePair r;
  r.a1 = (static_cast<double>(index.trajectory_index) + 0.5) / static_cast<double>(n_traj);
  r.a2 = (static_cast<double>(index.observation_index) + 0.5) / static_cast<double>(len);
  return r;
}

std::optional<DemoIndex> match_observation(const DemoSet& demos, std::span<const double> obs,
                                           double eps) {
  if (obs.size() != demos.observation_dim) {
    throw ShapeError("match_observation: observation dimension mismatch");
  }
  double best = std::numeric_limits<double>::infinity();
  DemoIndex best_index;
  const auto& kt = kern::active_table();
  for (std::size_t i = 0; i < demos.trajectories.size(); ++i) {
    const auto& traj = demos.trajectories[i];
    for (std::size_t j = 0; j < traj.observations.size(); ++j) {
      const double d = kt.sq_dist(traj.observations[j].data(), obs.data(), obs.size());
      if (d < best) {
        best = d;
        best_index = {i, j};
      }
    }
  }
  if (std::sqrt(best) < eps) return best_index;
  return std::nullopt;
}

double demo_space_diameter(const DemoSet& demos) {
  validate_demos(demos);
  std::vector<double> lo(demos.observation_dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(demos.observation_dim, -std::numeric_limits<double>::infinity());
  for (const auto& traj : demos.trajectories) {
    for (const auto& obs : traj.observations) {
      for (std::size_t k = 0; k < obs.size(); ++k) {
        lo[k] = std::min(lo[k], obs[k]);
        hi[k] = std::max(hi[k], obs[k]);
      }
    }
  }
  double sq = 0.0;
  for (std::size_t k = 0; k < lo.size(); ++k) {
    const double d = hi[k] - lo[k];
    sq += d * d;
  }
  return std::sqrt(sq);
}

void save_demos(const DemoSet& demos, const std::string& path) {
  validate_demos(demos);
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << "HILODEMO v1 " << demos.env_name << ' ' << demos.observation_dim << ' '
      << demos.num_trajectories() << '\n';
  for (const auto& traj : demos.trajectories) {
    out << traj.length() << '\n';
    for (const auto& obs : traj.observations) {
      for (std::size_t k = 0; k < obs.size(); ++k) {
        if (k > 0) out << ' ';
        out << format_double(obs[k]);
      }
      out << '\n';
    }
  }
  if (!out) throw ParseError("write to '" + path + "' failed");
}

namespace {

std::string next_line(std::istream& in, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("truncated demo file: expected " + what);
  }
  return line;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream iss(line);
  std::string f;
  while (iss >> f) fields.push_back(f);
  return fields;
}

}  // namespace

DemoSet load_demos(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open demo file '" + path + "'");

  const auto header = split_ws(next_line(in, "header"));
  if (header.size() != 5 || header[0] != "HILODEMO") {
    throw ParseError("bad header in '" + path + "': expected 'HILODEMO v1 <env> <dim> <n>'");
  }
  if (header[1] != "v1") {
    throw ParseError("unsupported demo format version '" + header[1] + "' in '" + path + "'");
  }
  DemoSet demos;
  demos.env_name = header[2];
  demos.observation_dim = parse_u64(header[3], "header observation dim");
  const std::size_t n_traj = parse_u64(header[4], "header trajectory count");

  demos.trajectories.reserve(n_traj);
  for (std::size_t i = 0; i < n_traj; ++i) {
    const std::string where = "trajectory " + std::to_string(i);
    const std::size_t len = parse_u64(next_line(in, where + " length"), where + " length");
    Trajectory traj;
    traj.observations.reserve(len);
    for (std::size_t j = 0; j < len; ++j) {
      const std::string record = where + " observation " + std::to_string(j);
      const auto fields = split_ws(next_line(in, record));
      if (fields.size() != demos.observation_dim) {
        throw ParseError(record + " has " + std::to_string(fields.size()) +
                         " values, expected " + std::to_string(demos.observation_dim));
      }
      std::vector<double> obs(fields.size());
      for (std::size_t k = 0; k < fields.size(); ++k) {
        obs[k] = parse_double(fields[k], record);
      }
      traj.observations.push_back(std::move(obs));
    }
    demos.trajectories.push_back(std::move(traj));
  }
  validate_demos(demos);
  return demos;
}

}  // namespace hilonet
