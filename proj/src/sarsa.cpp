#include "coexplorer/sarsa.hpp"

#include <limits>

namespace coexplorer {

SarsaParams sarsa_preset(SarsaPreset preset) {
  SarsaParams p;
  switch (preset) {
    case SarsaPreset::AlwaysExploit: p.epsilon = 0.0; break;
    case SarsaPreset::AlwaysExplore: p.epsilon = 1.0; break;
    case SarsaPreset::Balanced: p.epsilon = 0.5; break;
  }
  return p;
}

std::string_view to_string(SarsaPreset preset) {
  switch (preset) {
    case SarsaPreset::AlwaysExploit: return "always-exploit";
    case SarsaPreset::AlwaysExplore: return "always-explore";
    case SarsaPreset::Balanced: return "balanced";
  }
  return "?";
}

SpaceConfig pilot_space(int n) {
  SpaceConfig s;
  s.n = n;
  s.step = 0.5;
  return s;
}

std::uint64_t state_key(const ParameterState& state, const SpaceConfig& space) {
  long double key_space = 1.0L;
  for (int d = 0; d < space.n; ++d) key_space *= static_cast<long double>(space.levels(d) + 1);
  const bool exact = key_space < static_cast<long double>(std::numeric_limits<std::uint64_t>::max() / 1024);

  std::uint64_t key = 0;
  for (int d = 0; d < space.n; ++d) {
    const auto idx = static_cast<std::uint64_t>(grid_index(state[d], d, space));
    if (exact) {
      key = key * static_cast<std::uint64_t>(space.levels(d) + 1) + idx;
    } else {
      key ^= idx + 0x9e3779b97f4a7c15ULL + (key << 6) + (key >> 2);
      key *= 0xbf58476d1ce4e5b9ULL;
    }
  }
  return key;
}

std::uint64_t QTable::key(const ParameterState& s, ActionId a) const {
  return state_key(s, space_) * static_cast<std::uint64_t>(action_count(space_)) + static_cast<std::uint64_t>(a.index());
}

double QTable::get(const ParameterState& s, ActionId a) const {
  const auto it = values_.find(key(s, a));
  return it == values_.end() ? 0.0 : it->second;
}

void QTable::set(const ParameterState& s, ActionId a, double value) { values_[key(s, a)] = value; }

void sarsa_update(QTable& q, const ParameterState& s, ActionId a, double r, const ParameterState& s_next,
                  ActionId a_next, const SarsaParams& params) {
  const double current = q.get(s, a);
  q.set(s, a, current + params.alpha * (r + params.gamma * q.get(s_next, a_next) - current));
}

void sarsa_update_terminal(QTable& q, const ParameterState& s, ActionId a, double r, const SarsaParams& params) {
  const double current = q.get(s, a);
  q.set(s, a, current + params.alpha * (r - current));
}

ActionId sarsa_policy(const QTable& q, const ParameterState& s, double eps, Rng& rng) {
  const auto actions = legal_actions(s, q.space());
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < eps) {
    std::uniform_int_distribution<std::size_t> pick(0, actions.size() - 1);
    return actions[pick(rng)];
  }
  ActionId best = actions.front();
  double best_value = -std::numeric_limits<double>::infinity();
  for (const ActionId a : actions) {
    const double v = q.get(s, a);
    if (v > best_value) {
      best_value = v;
      best = a;
    }
  }
  return best;
}

}  // namespace coexplorer
