#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace coexplorer {

class IllegalAction : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Bounded, regularly gridded parameter space.
///
/// Every dimension runs from lo to hi in increments of `step`; the grid must
/// close exactly on both bounds. Defaults match a space normalized to [0, 1].
struct SpaceConfig {
  int n = 10;
  double step = 0.01;
  std::vector<double> lo;  // empty means 0 for every dimension
  std::vector<double> hi;  // empty means 1 for every dimension

  double lower(int dim) const { return lo.empty() ? 0.0 : lo[dim]; }
  double upper(int dim) const { return hi.empty() ? 1.0 : hi[dim]; }

  /// Largest grid index on `dim` (index 0 is the lower bound).
  std::int64_t levels(int dim) const;

  /// Throws std::invalid_argument when an invariant does not hold.
  void validate() const;
};

/// A point of the design space. Values are always grid aligned.
struct ParameterState {
  std::vector<double> values;

  int size() const { return static_cast<int>(values.size()); }
  double operator[](int dim) const { return values[dim]; }
  bool operator==(const ParameterState&) const = default;
};

/// A signed unit step on one dimension.
///
/// Actions are indexed densely as 2*dim for +step and 2*dim+1 for -step; this
/// layout is also the output layout of the reward model.
struct ActionId {
  int dim = 0;
  int sign = +1;

  int index() const { return 2 * dim + (sign > 0 ? 0 : 1); }
  static ActionId from_index(int index) { return {index / 2, (index % 2 == 0) ? +1 : -1}; }
  ActionId opposite() const { return {dim, -sign}; }
  bool operator==(const ActionId&) const = default;
};

inline int action_count(const SpaceConfig& cfg) { return 2 * cfg.n; }

/// Grid index of a coordinate (nearest, round-half-even).
std::int64_t grid_index(double value, int dim, const SpaceConfig& cfg);
double grid_value(std::int64_t index, int dim, const SpaceConfig& cfg);

/// Throws std::invalid_argument if the state is off-grid, out of bounds or of
/// the wrong size.
void check_state(const ParameterState& state, const SpaceConfig& cfg);
bool is_valid_state(const ParameterState& state, const SpaceConfig& cfg);

bool is_legal(const ParameterState& state, ActionId action, const SpaceConfig& cfg);

/// All moves except stepping past a bound, in ascending action index order.
std::vector<ActionId> legal_actions(const ParameterState& state, const SpaceConfig& cfg);

ParameterState apply_action(const ParameterState& state, ActionId action, const SpaceConfig& cfg);

/// Clamps each coordinate into its bounds, then rounds to the nearest grid
/// point. Exact ties between two grid points go to the even grid index.
ParameterState snap_to_grid(std::span<const double> raw, const SpaceConfig& cfg);

/// Midpoint of the space, snapped onto the grid.
ParameterState center_state(const SpaceConfig& cfg);

double linf_distance(const ParameterState& a, const ParameterState& b);
double l2_distance(const ParameterState& a, const ParameterState& b);

std::string to_string(ActionId action);

}  // namespace coexplorer
