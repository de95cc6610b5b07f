#pragma once
// Observation-only demonstration set: storage, the rate-pair indexing
// that turns two numbers in [0,1] into a (trajectory, observation)
// pair, nearest-observation matching, and the .hilodemo text format.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hilonet/text_io.hpp"

namespace hilonet {

struct Trajectory {
  std::vector<std::vector<double>> observations;
  std::size_t length() const { return observations.size(); }
};

struct DemoSet {
  std::vector<Trajectory> trajectories;
  std::size_t observation_dim = 0;
  std::string env_name;

  std::size_t num_trajectories() const { return trajectories.size(); }
  std::size_t total_observations() const;
};

// Throws ParseError when a structural invariant fails (empty set,
// mixed observation dims, trajectories shorter than 2).
void validate_demos(const DemoSet& demos);

struct DemoIndex {
  std::size_t trajectory_index = 0;
  std::size_t observation_index = 0;
  bool operator==(const DemoIndex&) const = default;
};

const std::vector<double>& observation_at(const DemoSet& demos, DemoIndex index);

struct SubgoalLookup {
  DemoIndex index;
  std::vector<double> observation;
  bool clamped = false;  // set when a rate fell outside [0,1]
};

// Floor-and-clamp decode of two rates:
//   trajectory  = min(floor(a1 * n_traj), n_traj - 1)
//   observation = min(floor(a2 * len),    len - 1)
SubgoalLookup index_subgoal(const DemoSet& demos, double a1, double a2);

// Interval-midpoint rates that decode back to exactly `index`:
//   a1 = (i + 0.5) / n_traj,  a2 = (j + 0.5) / len_i
struct RatePair {
  double a1 = 0.0;
  double a2 = 0.0;
};
RatePair subgoal_rates(const DemoSet& demos, DemoIndex index);

// Index of the expert observation nearest to obs in Euclidean
// distance, when that distance is below eps; ties break toward the
// lowest trajectory index, then the lowest observation index.
std::optional<DemoIndex> match_observation(const DemoSet& demos, std::span<const double> obs,
                                           double eps);

// Euclidean diagonal of the axis-aligned bounding box over every
// stored observation; the default achievement threshold is 5% of this.
double demo_space_diameter(const DemoSet& demos);

void save_demos(const DemoSet& demos, const std::string& path);
DemoSet load_demos(const std::string& path);

}  // namespace hilonet
