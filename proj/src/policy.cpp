#include "coexplorer/policy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace coexplorer {

void EpsilonSchedule::validate() const {
  if (!(0.0 <= end && end <= start && start <= 1.0)) throw std::invalid_argument("epsilon: need 0 <= end <= start <= 1");
  if (!(decay > 0.0)) throw std::invalid_argument("epsilon: decay must be > 0");
}

double EpsilonSchedule::operator()(std::uint64_t t) const {
  return end + (start - end) * std::exp(-static_cast<double>(t) / decay);
}

ActionId greedy_action(const ParameterState& state, const std::vector<double>& predictions, const SpaceConfig& space) {
  const auto actions = legal_actions(state, space);
  ActionId best = actions.front();
  double best_value = -std::numeric_limits<double>::infinity();
  for (const ActionId a : actions) {
    const double v = predictions[static_cast<std::size_t>(a.index())];
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

ActionId novelty_action(const ParameterState& state, const DensityModel& density, const SpaceConfig& space) {
  const auto actions = legal_actions(state, space);
  const bool empty = density.total() == 0;
  ActionId best = actions.front();
  double best_density = std::numeric_limits<double>::infinity();
  double best_gain = -std::numeric_limits<double>::infinity();
  for (const ActionId a : actions) {
    const ParameterState next = apply_action(state, a, space);
    const double p = empty ? 0.0 : density.density(next);
    if (p > best_density) continue;
    const double gain = density.prediction_gain(next);
    if (p < best_density || gain > best_gain) {
      best = a;
      best_density = p;
      best_gain = gain;
    }
  }
  return best;
}

ActionId select_action(const ParameterState& state, const RewardModel& model, const DensityModel& density,
                       const SpaceConfig& space, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) return novelty_action(state, density, space);
  return greedy_action(state, model.predict(state), space);
}

ParameterState random_state(const SpaceConfig& space, Rng& rng) {
  ParameterState s;
  s.values.resize(static_cast<std::size_t>(space.n));
  for (int d = 0; d < space.n; ++d) {
    std::uniform_int_distribution<std::int64_t> pick(0, space.levels(d));
    s.values[static_cast<std::size_t>(d)] = grid_value(pick(rng), d, space);
  }
  return s;
}

ParameterState change_zone(const DensityModel& density, const SpaceConfig& space, const PolicyConfig& cfg, Rng& rng) {
  if (cfg.change_zone_samples < 1) throw std::invalid_argument("change_zone: need at least one sample");
  ParameterState best = random_state(space, rng);
  if (density.total() == 0) return best;
  double best_gain = density.prediction_gain(best);
  for (int i = 1; i < cfg.change_zone_samples; ++i) {
    ParameterState candidate = random_state(space, rng);
    const double gain = density.prediction_gain(candidate);
    if (gain > best_gain) {
      best_gain = gain;
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace coexplorer
