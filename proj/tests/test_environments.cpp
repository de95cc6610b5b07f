#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "hilonet/environments.hpp"
#include "hilonet/rng.hpp"

using namespace hilonet;

TEST_CASE("make_env rejects unknown names") {
  CHECK_THROWS_AS((void)make_env("gym"), ParseError);
}

TEST_CASE("reset is deterministic in the seed") {
  for (const char* name : {"pointnav", "hillclimb", "cyclepattern"}) {
    auto env = make_env(name);
    const auto a = env->reset(0);
    const auto b = env->reset(0);
    CHECK(a == b);
    const auto c = env->reset(1);
    CHECK(a != c);
  }
}

TEST_CASE("hillclimb reset: position in [-0.6,-0.4], velocity 0") {
  auto env = make_env("hillclimb");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto obs = env->reset(seed);
    REQUIRE(obs.size() == 2);
    CHECK(obs[0] >= -0.6);
    CHECK(obs[0] <= -0.4);
    CHECK(obs[1] == 0.0);
  }
}

TEST_CASE("cyclepattern reset: near waypoint 0 with zero progress") {
  auto env = make_env("cyclepattern");
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto obs = env->reset(seed);
    REQUIRE(obs.size() == 4);
    // Anchored at waypoint 0 = (0.5, 0).
    CHECK(std::abs(obs[0] - 0.5) <= 0.15);
    CHECK(std::abs(obs[1] - 0.0) <= 0.15);
    // Zero phase offset: the offset features point at waypoint 1 = (0, 0.5).
    CHECK(obs[0] + obs[2] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(obs[1] + obs[3] == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("pointnav kinematics follow the declared update rule") {
  auto env = make_env("pointnav");
  const auto obs = env->reset(3);
  const double x0 = obs[0];
  const double y0 = obs[1];
  const auto sr = env->step(std::vector<double>{1.0, 0.0});
  CHECK(sr.observation[0] == x0 + 0.05 * 1.0);
  CHECK(sr.observation[1] == y0);
  CHECK(sr.observation[2] == 0.5 - sr.observation[0]);
  CHECK(sr.observation[3] == 0.5 - sr.observation[1]);
  CHECK(sr.steps_elapsed == 1);
}

TEST_CASE("hillclimb dynamics follow the declared update rule") {
  auto env = make_env("hillclimb");
  auto obs = env->reset(17);
  // Zero action from rest: v' = -0.0025*cos(3x), recomputed here.
  for (int k = 0; k < 10; ++k) {
    const double x = obs[0];
    const double v = obs[1];
    const double v_next =
        std::clamp(v + 0.001 * 0.0 - 0.0025 * std::cos(3.0 * x), -0.07, 0.07);
    const double x_next = std::clamp(x + v_next, -1.2, 0.6);
    const auto sr = env->step(std::vector<double>{0.0});
    CHECK(sr.observation[0] == x_next);
    CHECK(sr.observation[1] == v_next);
    obs = sr.observation;
  }
}

TEST_CASE("zero action from an equilibrium state changes only the step counter") {
  for (const char* name : {"pointnav", "cyclepattern"}) {
    auto env = make_env(name);
    const auto obs = env->reset(5);
    const auto sr = env->step(std::vector<double>{0.0, 0.0});
    CHECK(sr.observation == obs);
    CHECK(sr.steps_elapsed == 1);
  }
}

TEST_CASE("step after episode end is rejected") {
  auto env = make_env("pointnav");
  auto obs = env->reset(1);
  bool done = false;
  while (!done) {
    const auto sr = env->step(env->expert_action(obs));
    obs = sr.observation;
    done = sr.done;
  }
  CHECK_THROWS_AS((void)env->step(std::vector<double>{0.0, 0.0}), std::logic_error);
}

TEST_CASE("step before reset is rejected") {
  auto env = make_env("pointnav");
  CHECK_THROWS_AS((void)env->step(std::vector<double>{0.0, 0.0}), std::logic_error);
}

TEST_CASE("out-of-bounds actions are clipped and the event recorded") {
  auto env = make_env("pointnav");
  const auto obs = env->reset(2);
  CHECK(env->clip_events() == 0);
  const auto sr = env->step(std::vector<double>{2.0, 0.0});
  CHECK(env->clip_events() == 1);
  CHECK(sr.observation[0] == obs[0] + 0.05 * 1.0);  // moved by the clipped action
}

TEST_CASE("scripted experts succeed from 100 seeded starts with varying lengths") {
  for (const char* name : {"pointnav", "hillclimb", "cyclepattern"}) {
    CAPTURE(name);
    auto env = make_env(name);
    std::set<std::size_t> lengths;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto obs = env->reset(mix_seed(seed));
      bool stop = false;
      std::size_t steps = 0;
      while (!stop) {
        const auto sr = env->step(env->expert_action(obs));
        obs = sr.observation;
        ++steps;
        stop = sr.done || env->success();
      }
      CHECK(env->success());
      lengths.insert(steps);
    }
    CHECK(lengths.size() > 1);
  }
}

TEST_CASE("generate_demonstrations: counts, spread, success") {
  auto env = make_env("pointnav");
  const auto demos = generate_demonstrations(*env, 20, 7);
  CHECK(demos.num_trajectories() == 20);
  CHECK(demos.env_name == "pointnav");
  CHECK(demos.observation_dim == 4);

  double mean = 0.0;
  for (const auto& t : demos.trajectories) mean += static_cast<double>(t.length());
  mean /= 20.0;
  double var = 0.0;
  for (const auto& t : demos.trajectories) {
    const double d = static_cast<double>(t.length()) - mean;
    var += d * d;
  }
  CHECK(var > 0.0);  // non-time-aligned

  // Every trajectory ends inside the goal region (success).
  for (const auto& t : demos.trajectories) {
    const auto& last = t.observations.back();
    CHECK(std::hypot(last[2], last[3]) < 0.1);
  }
}

TEST_CASE("generate_demonstrations: single trajectory allowed") {
  auto env = make_env("hillclimb");
  const auto demos = generate_demonstrations(*env, 1, 3);
  CHECK(demos.num_trajectories() == 1);
}

TEST_CASE("demonstrations are observation-only on disk") {
  auto env = make_env("cyclepattern");
  const auto demos = generate_demonstrations(*env, 5, 11);
  const auto path = std::filesystem::temp_directory_path() / "hilonet_obs_only.hilodemo";
  save_demos(demos, path.string());
  // Reload enforces that every record has exactly observation_dim
  // fields; action_dim extra columns would fail the parse.
  const auto loaded = load_demos(path.string());
  CHECK(loaded.observation_dim == env->spec().observation_dim);
  std::filesystem::remove(path);
}
