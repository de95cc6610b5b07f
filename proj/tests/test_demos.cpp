#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "hilonet/demos.hpp"
#include "hilonet/rng.hpp"

using namespace hilonet;

namespace {

DemoSet make_demoset(const std::vector<std::size_t>& lengths, std::size_t dim,
                     std::uint64_t seed = 99) {
  RandomEngine rng(seed);
  DemoSet demos;
  demos.env_name = "testenv";
  demos.observation_dim = dim;
  for (const std::size_t len : lengths) {
    Trajectory t;
    for (std::size_t j = 0; j < len; ++j) {
      std::vector<double> obs(dim);
      for (auto& v : obs) v = rng.uniform(-5.0, 5.0);
      t.observations.push_back(std::move(obs));
    }
    demos.trajectories.push_back(std::move(t));
  }
  return demos;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("index_subgoal boundaries") {
  const auto demos = make_demoset({4, 5, 6}, 3);
  const auto lo = index_subgoal(demos, 0.0, 0.0);
  CHECK(lo.index == DemoIndex{0, 0});
  CHECK(lo.observation == demos.trajectories[0].observations[0]);
  CHECK_FALSE(lo.clamped);

  const auto hi = index_subgoal(demos, 1.0, 1.0);
  CHECK(hi.index == DemoIndex{2, 5});
  CHECK(hi.observation == demos.trajectories[2].observations[5]);
}

TEST_CASE("index_subgoal floor rule on lengths (4,5,6)") {
  const auto demos = make_demoset({4, 5, 6}, 2);
  const auto mid = index_subgoal(demos, 0.5, 0.5);
  CHECK(mid.index == DemoIndex{1, 2});
}

TEST_CASE("index_subgoal clamps out-of-range rates and reports it") {
  const auto demos = make_demoset({4, 5}, 2);
  const auto below = index_subgoal(demos, -0.2, 0.3);
  CHECK(below.clamped);
  CHECK(below.index.trajectory_index == 0);
  const auto above = index_subgoal(demos, 0.3, 1.7);
  CHECK(above.clamped);
  CHECK(above.index.observation_index == 3);  // last index of trajectory 0
  CHECK_THROWS_AS((void)index_subgoal(DemoSet{}, 0.5, 0.5), ParseError);
}

TEST_CASE("index_subgoal is surjective over a fine grid and monotone in a2") {
  const auto demos = make_demoset({4, 5, 6}, 2);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (int i = 0; i < 200; ++i) {
    std::size_t prev_obs_index = 0;
    for (int j = 0; j < 200; ++j) {
      const auto r = index_subgoal(demos, i / 199.0, j / 199.0);
      seen.insert({r.index.trajectory_index, r.index.observation_index});
      if (j > 0) CHECK(r.index.observation_index >= prev_obs_index);
      prev_obs_index = r.index.observation_index;
    }
  }
  CHECK(seen.size() == 4 + 5 + 6);
}

TEST_CASE("subgoal_rates is an exact inverse of index_subgoal") {
  const auto demos = make_demoset({4, 5, 6, 9}, 3);
  for (std::size_t i = 0; i < demos.num_trajectories(); ++i) {
    for (std::size_t j = 0; j < demos.trajectories[i].length(); ++j) {
      const auto rates = subgoal_rates(demos, {i, j});
      const auto back = index_subgoal(demos, rates.a1, rates.a2);
      CHECK(back.index == DemoIndex{i, j});
    }
  }
  CHECK_THROWS_AS((void)subgoal_rates(demos, {9, 0}), ParseError);
  CHECK_THROWS_AS((void)subgoal_rates(demos, {0, 99}), ParseError);
}

TEST_CASE("match_observation: exact membership, threshold, tie-break") {
  auto demos = make_demoset({5, 5}, 2);
  const auto& target = demos.trajectories[0].observations[3];
  const auto hit = match_observation(demos, target, 1e-9);
  REQUIRE(hit.has_value());
  CHECK(*hit == DemoIndex{0, 3});

  // Far from everything: bounded observations, probe far outside.
  const std::vector<double> far{1e6, 1e6};
  CHECK_FALSE(match_observation(demos, far, 0.5).has_value());

  // Exact tie: two stored observations at the same distance.
  DemoSet tie;
  tie.env_name = "testenv";
  tie.observation_dim = 2;
  tie.trajectories.resize(2);
  tie.trajectories[0].observations = {{10.0, 10.0}, {1.0, 0.0}};
  tie.trajectories[1].observations = {{0.0, 1.0}, {-10.0, -10.0}};
  const auto t = match_observation(tie, std::vector<double>{0.0, 0.0}, 2.0);
  REQUIRE(t.has_value());
  CHECK(*t == DemoIndex{0, 1});
}

TEST_CASE("match_observation recovers every stored observation") {
  const auto demos = make_demoset({6, 3, 8}, 4);
  for (std::size_t i = 0; i < demos.num_trajectories(); ++i) {
    for (std::size_t j = 0; j < demos.trajectories[i].length(); ++j) {
      const auto m = match_observation(demos, demos.trajectories[i].observations[j], 1e-6);
      REQUIRE(m.has_value());
      CHECK(*m == DemoIndex{i, j});
    }
  }
  CHECK_THROWS_AS((void)match_observation(demos, std::vector<double>{1.0}, 0.1), ShapeError);
}

TEST_CASE("save/load round-trips bitwise") {
  RandomEngine rng(123);
  for (int rep = 0; rep < 5; ++rep) {
    auto demos = make_demoset({3 + rng.index(5), 2 + rng.index(9), 4}, 1 + rng.index(6),
                              1000 + rep);
    // Exercise awkward magnitudes as well.
    demos.trajectories[0].observations[0][0] = 1e-300;
    demos.trajectories[0].observations[1][0] = -9.87654321e280;
    const auto path = temp_file("hilonet_demos_roundtrip.hilodemo");
    save_demos(demos, path.string());
    const auto loaded = load_demos(path.string());
    CHECK(loaded.env_name == demos.env_name);
    CHECK(loaded.observation_dim == demos.observation_dim);
    REQUIRE(loaded.num_trajectories() == demos.num_trajectories());
    for (std::size_t i = 0; i < demos.num_trajectories(); ++i) {
      CHECK(loaded.trajectories[i].observations == demos.trajectories[i].observations);
    }
    std::filesystem::remove(path);
  }
}

TEST_CASE("load rejects truncated files outright") {
  const auto demos = make_demoset({4, 4, 5}, 3);
  const auto path = temp_file("hilonet_demos_trunc.hilodemo");
  save_demos(demos, path.string());
  const auto full_size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, full_size / 2);
  CHECK_THROWS_AS((void)load_demos(path.string()), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("load rejects mixed observation dimensions naming the record") {
  const auto path = temp_file("hilonet_demos_mixed.hilodemo");
  {
    std::ofstream out(path);
    out << "HILODEMO v1 testenv 2 1\n3\n0 1\n1 2 3\n2 3\n";
  }
  CHECK_THROWS_WITH_AS((void)load_demos(path.string()),
                       doctest::Contains("trajectory 0 observation 1"), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("load rejects unknown versions and bad headers") {
  const auto path = temp_file("hilonet_demos_badheader.hilodemo");
  {
    std::ofstream out(path);
    out << "HILODEMO v9 testenv 2 0\n";
  }
  CHECK_THROWS_AS((void)load_demos(path.string()), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("demo_space_diameter is the bounding-box diagonal") {
  DemoSet demos;
  demos.env_name = "testenv";
  demos.observation_dim = 2;
  demos.trajectories.resize(1);
  demos.trajectories[0].observations = {{0.0, 0.0}, {3.0, 4.0}};
  CHECK(demo_space_diameter(demos) == doctest::Approx(5.0));
}
