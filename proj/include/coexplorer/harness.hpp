#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "coexplorer/config.hpp"
#include "coexplorer/sarsa.hpp"
#include "coexplorer/space.hpp"

namespace coexplorer {

enum class AgentKind { Coexplorer, Random, Sarsa };
enum class OracleMode { Guiding, Mixed };

std::string_view to_string(AgentKind kind);
std::string_view to_string(OracleMode mode);
/// Throw std::invalid_argument on unknown names.
AgentKind parse_agent_kind(std::string_view text);
OracleMode parse_oracle_mode(std::string_view text);

/// Synthetic user with a hidden target state. Every `feedback_period` steps it
/// judges the last action: +1 if it brought the agent closer (L2), -1 if it
/// moved away. In Mixed mode it labels the current state as a positive zone
/// instead whenever the agent is within `zone_radius` steps of the target.
struct OracleUser {
  ParameterState target;
  int feedback_period = 5;
  OracleMode mode = OracleMode::Guiding;
  int zone_radius = 5;

  /// Sign of the distance decrease caused by moving `before` -> `after`; 0 if unchanged.
  int judge(const ParameterState& before, const ParameterState& after) const;
  bool near_target(const ParameterState& state, const SpaceConfig& space) const;
};

struct EpisodeOptions {
  AgentKind agent = AgentKind::Coexplorer;
  Config config{};  // space, learning and exploration settings; seed is overridden
  int budget = 5000;
  std::uint64_t seed = 0;
  int feedback_period = 5;
  OracleMode oracle = OracleMode::Guiding;
  std::optional<ParameterState> target;  // drawn from the seed when absent
  SarsaParams sarsa{};
};

struct RunReport {
  AgentKind agent = AgentKind::Coexplorer;
  int dims = 0;
  std::uint64_t seed = 0;
  bool reached = false;
  /// Steps taken until the target region was reached; the budget when it was not.
  std::int64_t steps_to_target = 0;
  std::int64_t feedback_count = 0;
  double final_distance = 0.0;       // L2 to the target
  std::vector<double> distances;     // L2 to the target after each simulated step

  bool operator==(const RunReport&) const = default;
};

/// Target region: L-infinity distance at most two grid steps.
bool target_reached(const ParameterState& state, const ParameterState& target, const SpaceConfig& space);

/// One seeded, deterministic episode on a simulated clock (100 ms per step),
/// starting from the centre of the space.
RunReport run_episode(const EpisodeOptions& options);

/// Pilot setup: n-dim three-level space, random start and target, reward +1
/// inside the target region (L-infinity <= one step) and -1 elsewhere, a fresh
/// table per episode. `agent` is Sarsa or Random.
struct PilotOptions {
  AgentKind agent = AgentKind::Sarsa;
  int dims = 12;
  int budget = 2000;
  std::uint64_t seed = 0;
  SarsaParams sarsa{};
};
RunReport run_pilot_episode(const PilotOptions& options);

struct Summary {
  double median = 0.0, q1 = 0.0, q3 = 0.0;
};
/// Linear-interpolation quartiles. Throws std::invalid_argument when empty.
Summary summarize(std::vector<double> values);

/// P(at least `wins` successes out of wins + losses fair coin flips); ties are
/// excluded by the caller. 1.0 when there are no untied pairs.
double sign_test_p(int wins, int losses);

struct CompareOptions {
  std::vector<AgentKind> agents{AgentKind::Coexplorer, AgentKind::Random, AgentKind::Sarsa};
  std::vector<int> dims{2, 6, 10, 12};
  int seeds = 20;
  std::uint64_t first_seed = 1;
  int budget_small = 2000;  // for dims <= 2
  int budget_large = 10000;
  int feedback_period = 5;
  OracleMode oracle = OracleMode::Guiding;
  Config config{};
};

/// "default" or "quick" (fewer seeds and steps, for smoke runs).
CompareOptions compare_matrix(std::string_view name);

struct CompareCell {
  AgentKind agent = AgentKind::Coexplorer;
  int dims = 0;
  int budget = 0;
  int runs = 0;
  int reached = 0;
  Summary steps;
  Summary feedback;
};

/// Every cell uses the same seed list, so results do not depend on order.
std::vector<CompareCell> compare(const CompareOptions& options);

void write_compare_table(std::ostream& out, const std::vector<CompareCell>& cells);
void write_compare_csv(std::ostream& out, const std::vector<CompareCell>& cells);
void write_report_csv(std::ostream& out, const RunReport& report);

}  // namespace coexplorer
