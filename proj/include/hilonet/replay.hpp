#pragma once
// Experience storage for the two policy levels and the hindsight
// relabeling that turns a segment whose final observation landed on
// the expert manifold into stationary training data: the high action
// is replaced by the rate pair that decodes to the matched
// demonstration index, and the low goal by the actually reached
// observation. Originals are stored alongside the relabeled copies.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "hilonet/demos.hpp"
#include "hilonet/policy.hpp"
#include "hilonet/rewards.hpp"
#include "hilonet/rng.hpp"

namespace hilonet {

struct LowTransition {
  std::vector<double> obs;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_obs;
  std::vector<double> goal;
  bool done = false;
};

struct HighTransition {
  std::vector<double> obs;       // observation at the decision point
  HighAction high_action;
  double reward = 0.0;
  std::vector<double> next_obs;  // observation delta_t steps later
  bool done = false;
};

// Ring buffer, oldest-first eviction, uniform sampling with
// replacement. An optional validator runs on every push.
template <typename T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity, std::function<void(const T&)> validator = {})
      : capacity_(capacity), validator_(std::move(validator)) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    storage_.reserve(capacity_);
  }

  void push(T transition) {
    if (validator_) validator_(transition);
    if (storage_.size() < capacity_) {
      storage_.push_back(std::move(transition));
    } else {
      storage_[next_] = std::move(transition);
    }
    next_ = (next_ + 1) % capacity_;
    ++insertions_;
  }

  std::vector<T> sample(std::size_t n, RandomEngine& rng) const {
    if (storage_.empty()) {
      throw std::logic_error("ReplayBuffer: sample from empty buffer");
    }
    std::vector<T> batch;
    batch.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      batch.push_back(storage_[rng.index(storage_.size())]);
    }
    return batch;
  }

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t insertions() const { return insertions_; }
  const T& at(std::size_t i) const { return storage_.at(i); }

 private:
  std::size_t capacity_;
  std::vector<T> storage_;
  std::size_t next_ = 0;
  std::size_t insertions_ = 0;
  std::function<void(const T&)> validator_;
};

// One high-policy decision period: the observations seen from the
// decision point through (at most) delta_t steps, the actions taken,
// and the sub-goal that was active.
struct Segment {
  HighAction high_action;                          // rates as issued
  DemoIndex subgoal_index;
  std::vector<double> subgoal;                     // decoded observation
  std::vector<std::vector<double>> observations;   // k+1 entries, k >= 1
  std::vector<std::vector<double>> actions;        // k entries
  bool env_done = false;                           // episode ended here

  const std::vector<double>& start_obs() const { return observations.front(); }
  const std::vector<double>& final_obs() const { return observations.back(); }
  std::size_t steps() const { return actions.size(); }
};

// Low-level done flag: the pursuit of `goal` ends on achievement or
// when the environment episode ends.
bool low_done(std::span<const double> next_obs, std::span<const double> goal, double eps,
              bool env_done);

// Hindsight replacement for the high level. Present only when the
// segment's final observation matches an expert observation within
// eps; the reward is recomputed on the achieved branch with the
// matched index as I(cur) and the match of the segment start as
// I(prev).
std::optional<HighTransition> relabel_high(const Segment& segment, const DemoSet& demos,
                                           const RewardParams& params);

// Hindsight replacement for the low level: when the final observation
// matches the expert manifold, every step of the segment is re-labeled
// with goal = that final observation and rewards recomputed. Empty
// when there is no match.
std::vector<LowTransition> relabel_low(const Segment& segment, const DemoSet& demos,
                                       const RewardParams& params);

}  // namespace hilonet
