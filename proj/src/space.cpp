#include "coexplorer/space.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coexplorer {

namespace {

constexpr double kGridTolerance = 1e-9;

}  // namespace

std::int64_t SpaceConfig::levels(int dim) const {
  return static_cast<std::int64_t>(std::llround((upper(dim) - lower(dim)) / step));
}

void SpaceConfig::validate() const {
  if (n < 1) throw std::invalid_argument("space: n must be >= 1");
  if (!lo.empty() && static_cast<int>(lo.size()) != n)
    throw std::invalid_argument("space: lo must have n entries");
  if (!hi.empty() && static_cast<int>(hi.size()) != n)
    throw std::invalid_argument("space: hi must have n entries");
  for (int d = 0; d < n; ++d) {
    const double range = upper(d) - lower(d);
    if (!(step > 0.0) || step > range + kGridTolerance)
      throw std::invalid_argument("space: step must lie in (0, hi - lo]");
    const double cells = range / step;
    if (std::abs(cells - std::round(cells)) > 1e-6)
      throw std::invalid_argument("space: (hi - lo) / step must be an integer on every dimension");
  }
}

std::int64_t grid_index(double value, int dim, const SpaceConfig& cfg) {
  // nearbyint honours the default rounding mode, which is round-half-even.
  return static_cast<std::int64_t>(std::nearbyint((value - cfg.lower(dim)) / cfg.step));
}

double grid_value(std::int64_t index, int dim, const SpaceConfig& cfg) {
  // index / levels is one rounding, so on [0, 1] this is the double nearest the decimal grid point
  const double frac = static_cast<double>(index) / static_cast<double>(cfg.levels(dim));
  return cfg.lower(dim) + (cfg.upper(dim) - cfg.lower(dim)) * frac;
}

bool is_valid_state(const ParameterState& state, const SpaceConfig& cfg) {
  if (state.size() != cfg.n) return false;
  for (int d = 0; d < cfg.n; ++d) {
    const double v = state[d];
    if (!std::isfinite(v)) return false;
    if (v < cfg.lower(d) - kGridTolerance || v > cfg.upper(d) + kGridTolerance) return false;
    const double cells = (v - cfg.lower(d)) / cfg.step;
    if (std::abs(cells - std::round(cells)) * cfg.step > kGridTolerance) return false;
  }
  return true;
}

void check_state(const ParameterState& state, const SpaceConfig& cfg) {
  if (state.size() != cfg.n)
    throw DimensionMismatch("state has " + std::to_string(state.size()) + " values, expected " +
                            std::to_string(cfg.n));
  if (!is_valid_state(state, cfg)) throw std::invalid_argument("state is off-grid or out of bounds");
}

bool is_legal(const ParameterState& state, ActionId action, const SpaceConfig& cfg) {
  if (action.dim < 0 || action.dim >= cfg.n || (action.sign != 1 && action.sign != -1)) return false;
  const std::int64_t idx = grid_index(state[action.dim], action.dim, cfg);
  if (action.sign > 0) return idx < cfg.levels(action.dim);
  return idx > 0;
}

std::vector<ActionId> legal_actions(const ParameterState& state, const SpaceConfig& cfg) {
  std::vector<ActionId> actions;
  actions.reserve(2 * cfg.n);
  for (int d = 0; d < cfg.n; ++d) {
    for (int sign : {+1, -1}) {
      if (is_legal(state, {d, sign}, cfg)) actions.push_back({d, sign});
    }
  }
  return actions;
}

ParameterState apply_action(const ParameterState& state, ActionId action, const SpaceConfig& cfg) {
  if (state.size() != cfg.n) throw DimensionMismatch("apply_action: state size differs from n");
  if (!is_legal(state, action, cfg))
    throw IllegalAction("action " + to_string(action) + " is not legal in this state");
  ParameterState next = state;
  const std::int64_t idx = grid_index(state[action.dim], action.dim, cfg) + action.sign;
  next.values[action.dim] = grid_value(idx, action.dim, cfg);
  return next;
}

ParameterState snap_to_grid(std::span<const double> raw, const SpaceConfig& cfg) {
  if (static_cast<int>(raw.size()) != cfg.n)
    throw DimensionMismatch("expected " + std::to_string(cfg.n) + " values, got " +
                            std::to_string(raw.size()));
  ParameterState out;
  out.values.resize(cfg.n);
  for (int d = 0; d < cfg.n; ++d) {
    double v = raw[d];
    if (std::isnan(v)) throw std::invalid_argument("snap_to_grid: NaN coordinate");
    v = std::clamp(v, cfg.lower(d), cfg.upper(d));
    const std::int64_t idx = std::clamp<std::int64_t>(grid_index(v, d, cfg), 0, cfg.levels(d));
    out.values[d] = grid_value(idx, d, cfg);
  }
  return out;
}

ParameterState center_state(const SpaceConfig& cfg) {
  std::vector<double> mid(cfg.n);
  for (int d = 0; d < cfg.n; ++d) mid[d] = 0.5 * (cfg.lower(d) + cfg.upper(d));
  return snap_to_grid(mid, cfg);
}

double linf_distance(const ParameterState& a, const ParameterState& b) {
  double m = 0.0;
  for (int d = 0; d < a.size(); ++d) m = std::max(m, std::abs(a[d] - b[d]));
  return m;
}

double l2_distance(const ParameterState& a, const ParameterState& b) {
  double s = 0.0;
  for (int d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(s);
}

std::string to_string(ActionId action) {
  std::ostringstream os;
  os << "(" << action.dim << "," << (action.sign > 0 ? "+" : "-") << ")";
  return os.str();
}

}  // namespace coexplorer
