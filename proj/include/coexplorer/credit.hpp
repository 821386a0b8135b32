#pragma once

#include <vector>

#include "coexplorer/reward_model.hpp"
#include "coexplorer/space.hpp"

namespace coexplorer {

enum class FeedbackKind { Guiding, Zone };

/// A single user reinforcement (+1 or -1) stamped with the time it was given.
struct FeedbackEvent {
  FeedbackKind kind = FeedbackKind::Guiding;
  int valence = +1;
  double time = 0.0;
};

enum class GuidingCurve { Exponential, Gamma };

struct CreditOptions {
  double reward_value = 1.0;  // |R|
  int reward_length = 10;
  double min_delay = 0.2;  // seconds
  double max_delay = 4.0;  // seconds
  GuidingCurve curve = GuidingCurve::Exponential;
  double gamma_shape = 2.0;
  double gamma_scale = 0.3;  // seconds
};

/// Uniform credit over every pair stamped in [time - max_delay, time - min_delay].
/// Each credited pair gets weight 1/k and target valence * |R|.
std::vector<Sample> credit_window(const FeedbackEvent& feedback, const TrajectoryWindow& window,
                                  const CreditOptions& options = {});

/// Credits the last reward_length pairs taken no later than the feedback.
///
/// With the exponential curve the pair j steps back from the most recent one
/// gets target valence * |R| * exp(-j). The gamma curve instead scales by the
/// gamma density of the pair's age in seconds, normalized to 1 at its mode.
/// Weights are 1.
std::vector<Sample> guiding_credit(const FeedbackEvent& feedback, const TrajectoryWindow& window,
                                   const CreditOptions& options = {});

/// Inbound pairs of a labelled state: for every dimension and k = 1..reward_length,
/// the state k steps away on either side (when inside the bounds) together with
/// the action pointing back toward the label. Targets are valence * |R|, weights 1.
std::vector<Sample> zone_expand(const ParameterState& state, int valence, const SpaceConfig& space,
                                const CreditOptions& options = {});

}  // namespace coexplorer
