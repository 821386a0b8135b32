#include <algorithm>
#include <cmath>

#include "coexplorer/policy.hpp"
#include "doctest.h"

using namespace coexplorer;

namespace {

SpaceConfig space(int n, double step = 0.01) {
  SpaceConfig s;
  s.n = n;
  s.step = step;
  return s;
}

RewardModel zero_model(int n) {
  RewardModelOptions o;
  o.inputs = n;
  return RewardModel(o, 1);
}

}  // namespace

TEST_CASE("epsilon schedule") {
  const EpsilonSchedule eps;
  CHECK(eps(0) == 0.1);
  CHECK(std::abs(eps(2000) - 0.1 * std::exp(-1.0)) <= 1e-9);
  CHECK(eps(2000) == doctest::Approx(0.0368).epsilon(1e-3));
  CHECK(eps(1'000'000) < 1e-12);
  CHECK(eps(1'000'000) >= 0.0);
  EpsilonSchedule bad;
  bad.decay = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("greedy picks the lowest index on ties") {
  const auto s = space(3);
  CHECK(greedy_action(center_state(s), std::vector<double>(6, 0.0), s) == ActionId{0, +1});
  std::vector<double> p(6, 0.0);
  p[3] = 0.4;
  p[5] = 0.4;
  CHECK(greedy_action(center_state(s), p, s) == ActionId{1, -1});
  // the best action is illegal at the upper corner
  p = {0.9, 0.0, 0.9, 0.1, 0.0, 0.0};
  CHECK(greedy_action(ParameterState{{1.0, 1.0, 0.5}}, p, s) == ActionId{1, -1});
}

TEST_CASE("greedy is invariant to shifting every prediction") {
  const auto s = space(4);
  Rng rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> p(8);
    for (auto& x : p) x = u(rng);
    auto shifted = p;
    for (auto& x : shifted) x += 3.25;
    const auto state = random_state(s, rng);
    CHECK(greedy_action(state, p, s) == greedy_action(state, shifted, s));
  }
}

TEST_CASE("untrained model with eps 0 takes the first action") {
  const auto s = space(10);
  const auto m = zero_model(10);
  DensityModel d(s);
  Rng rng(1);
  CHECK(select_action(center_state(s), m, d, s, 0.0, rng) == ActionId{0, +1});
}

TEST_CASE("novelty picks the only unvisited neighbour") {
  TileCoderOptions o;
  o.num_tilings = 1;
  o.tile_width = 0.1;
  const auto s = space(2, 0.1);
  DensityModel d(s, o);
  const ParameterState here{{0.5, 0.5}};
  d.update(here);
  for (const ActionId a : legal_actions(here, s))
    if (!(a == ActionId{1, -1})) d.update(apply_action(here, a, s));
  const auto m = zero_model(2);
  Rng rng(2);
  CHECK(novelty_action(here, d, s) == ActionId{1, -1});
  CHECK(select_action(here, m, d, s, 1.0, rng) == ActionId{1, -1});
}

TEST_CASE("select_action is always legal") {
  const auto s = space(3, 0.25);
  const auto m = zero_model(3);
  DensityModel d(s);
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    auto state = random_state(s, rng);
    if (i % 10 == 0) state = ParameterState{{0.0, 1.0, 0.0}};
    d.update(state);
    const double eps = (i % 3) * 0.5;
    const ActionId a = select_action(state, m, d, s, eps, rng);
    CHECK(is_legal(state, a, s));
  }
}

TEST_CASE("random_state is a valid grid state") {
  const auto s = space(5);
  Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK(is_valid_state(random_state(s, rng), s));
}

TEST_CASE("change_zone on an empty model is seeded and reproducible") {
  const auto s = space(4);
  DensityModel d(s);
  Rng a(42), b(42), c(42);
  const auto z1 = change_zone(d, s, {}, a);
  const auto z2 = change_zone(d, s, {}, b);
  CHECK(z1 == z2);
  CHECK(z1 == random_state(s, c));
}

TEST_CASE("change_zone leaves the visited corner") {
  const auto s = space(3, 0.01);
  DensityModel d(s);
  Rng fill(9);
  std::uniform_int_distribution<int> idx(0, 10);
  std::vector<ParameterState> visited;
  for (int i = 0; i < 300; ++i) {
    const ParameterState p{{idx(fill) * 0.01, idx(fill) * 0.01, idx(fill) * 0.01}};
    visited.push_back(snap_to_grid(p.values, s));
    d.update(visited.back());
  }
  std::vector<double> densities;
  for (const auto& v : visited) densities.push_back(d.density(v));
  std::nth_element(densities.begin(), densities.begin() + densities.size() / 2, densities.end());
  const double median = densities[densities.size() / 2];

  Rng rng(10), again(10);
  const auto z = change_zone(d, s, {}, rng);
  CHECK(d.density(z) < median);
  CHECK(change_zone(d, s, {}, again) == z);
}
