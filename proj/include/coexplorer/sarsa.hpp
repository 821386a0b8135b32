#pragma once

#include <cstdint>
#include <string_view>
#include <unordered_map>

#include "coexplorer/reward_model.hpp"
#include "coexplorer/space.hpp"

namespace coexplorer {

/// Tabular Sarsa baseline over a coarse grid.
///
/// epsilon is the probability of a uniformly random (exploring) action. Some
/// descriptions use the exploit probability instead, so the presets are named
/// by behaviour: AlwaysExploit is eps = 0, AlwaysExplore eps = 1, Balanced 0.5.
struct SarsaParams {
  double alpha = 0.1;
  double gamma = 0.9;
  double epsilon = 0.1;
};

enum class SarsaPreset { AlwaysExploit, AlwaysExplore, Balanced };

SarsaParams sarsa_preset(SarsaPreset preset);
std::string_view to_string(SarsaPreset preset);

/// n parameters discretized in three levels {0, 0.5, 1}.
SpaceConfig pilot_space(int n = 12);

/// Dense key of a grid state (hashed when the grid is too large to enumerate).
std::uint64_t state_key(const ParameterState& state, const SpaceConfig& space);

class QTable {
 public:
  explicit QTable(SpaceConfig space) : space_(std::move(space)) {}

  double get(const ParameterState& s, ActionId a) const;
  void set(const ParameterState& s, ActionId a, double value);
  std::size_t size() const { return values_.size(); }
  const SpaceConfig& space() const { return space_; }
  void clear() { values_.clear(); }

 private:
  std::uint64_t key(const ParameterState& s, ActionId a) const;

  SpaceConfig space_;
  std::unordered_map<std::uint64_t, double> values_;
};

/// q(s,a) += alpha * (r + gamma * q(s',a') - q(s,a)).
void sarsa_update(QTable& q, const ParameterState& s, ActionId a, double r, const ParameterState& s_next,
                  ActionId a_next, const SarsaParams& params);

/// Update toward r alone, for transitions that end an episode.
void sarsa_update_terminal(QTable& q, const ParameterState& s, ActionId a, double r, const SarsaParams& params);

/// Greedy (lowest index on ties) with probability 1 - eps, otherwise uniform
/// over the legal actions.
ActionId sarsa_policy(const QTable& q, const ParameterState& s, double eps, Rng& rng);

}  // namespace coexplorer
