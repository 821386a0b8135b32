#pragma once

#include <cstdint>

#include "coexplorer/density.hpp"
#include "coexplorer/reward_model.hpp"
#include "coexplorer/space.hpp"

namespace coexplorer {

/// Exploration probability eps(t) = end + (start - end) * exp(-t / decay).
struct EpsilonSchedule {
  double start = 0.1;
  double end = 0.0;
  double decay = 2000.0;  // steps

  void validate() const;
  double operator()(std::uint64_t t) const;
};

struct PolicyConfig {
  int change_zone_samples = 1000;
};

/// Greedy pick over the reward model's predictions for the legal actions;
/// ties go to the lowest action index.
ActionId greedy_action(const ParameterState& state, const std::vector<double>& predictions, const SpaceConfig& space);

/// The legal action whose successor state is least dense. Ties: highest
/// prediction gain, then lowest action index. An empty model counts as
/// density 0 everywhere.
ActionId novelty_action(const ParameterState& state, const DensityModel& density, const SpaceConfig& space);

/// epsilon-greedy: exploit the reward model with probability 1 - eps, take the
/// novelty-directed action with probability eps. Always draws exactly one
/// uniform number from `rng`.
ActionId select_action(const ParameterState& state, const RewardModel& model, const DensityModel& density,
                       const SpaceConfig& space, double epsilon, Rng& rng);

/// Uniform random grid state.
ParameterState random_state(const SpaceConfig& space, Rng& rng);

/// Samples candidate grid states and returns the one with maximal prediction
/// gain (first drawn wins ties). On an empty model that is the first sample.
ParameterState change_zone(const DensityModel& density, const SpaceConfig& space, const PolicyConfig& cfg, Rng& rng);

}  // namespace coexplorer
