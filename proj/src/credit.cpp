#include "coexplorer/credit.hpp"

#include <cmath>
#include <stdexcept>

namespace coexplorer {

namespace {

constexpr double kTimeTolerance = 1e-9;

void check_valence(int valence) {
  if (valence != 1 && valence != -1) throw std::invalid_argument("feedback valence must be +1 or -1");
}

double gamma_ratio(double age, const CreditOptions& o) {
  if (o.gamma_shape < 1.0 || !(o.gamma_scale > 0.0)) throw std::invalid_argument("gamma credit needs shape >= 1, scale > 0");
  if (age < 0.0) return 0.0;
  if (o.gamma_shape == 1.0) return std::exp(-age / o.gamma_scale);
  const double mode = (o.gamma_shape - 1.0) * o.gamma_scale;
  return std::pow(age / mode, o.gamma_shape - 1.0) * std::exp(-(age - mode) / o.gamma_scale);
}

}  // namespace

std::vector<Sample> credit_window(const FeedbackEvent& feedback, const TrajectoryWindow& window,
                                  const CreditOptions& options) {
  check_valence(feedback.valence);
  const double earliest = feedback.time - options.max_delay - kTimeTolerance;
  const double latest = feedback.time - options.min_delay + kTimeTolerance;

  std::vector<Sample> credited;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const auto& e = window[i];
    if (e.time >= earliest && e.time <= latest)
      credited.push_back({e.state, e.action, feedback.valence * options.reward_value, 1.0});
  }
  const double weight = credited.empty() ? 0.0 : 1.0 / static_cast<double>(credited.size());
  for (Sample& s : credited) s.weight = weight;
  return credited;
}

std::vector<Sample> guiding_credit(const FeedbackEvent& feedback, const TrajectoryWindow& window,
                                   const CreditOptions& options) {
  check_valence(feedback.valence);
  std::vector<Sample> credited;
  std::size_t end = window.size();
  while (end > 0 && window[end - 1].time > feedback.time + kTimeTolerance) --end;

  for (int j = 0; j < options.reward_length && static_cast<std::size_t>(j) < end; ++j) {
    const auto& e = window[end - 1 - static_cast<std::size_t>(j)];
    const double scale =
        options.curve == GuidingCurve::Exponential ? std::exp(-j) : gamma_ratio(feedback.time - e.time, options);
    credited.push_back({e.state, e.action, feedback.valence * options.reward_value * scale, 1.0});
  }
  return credited;
}

std::vector<Sample> zone_expand(const ParameterState& state, int valence, const SpaceConfig& space,
                                const CreditOptions& options) {
  check_valence(valence);
  check_state(state, space);
  std::vector<Sample> credited;
  credited.reserve(static_cast<std::size_t>(2 * space.n * options.reward_length));
  const double target = valence * options.reward_value;
  for (int d = 0; d < space.n; ++d) {
    const std::int64_t idx = grid_index(state[d], d, space);
    for (int k = 1; k <= options.reward_length; ++k) {
      // Below the label, stepping up leads toward it; above, stepping down.
      if (idx - k >= 0) {
        ParameterState from = state;
        from.values[d] = grid_value(idx - k, d, space);
        credited.push_back({std::move(from), {d, +1}, target, 1.0});
      }
      if (idx + k <= space.levels(d)) {
        ParameterState from = state;
        from.values[d] = grid_value(idx + k, d, space);
        credited.push_back({std::move(from), {d, -1}, target, 1.0});
      }
    }
  }
  return credited;
}

}  // namespace coexplorer
