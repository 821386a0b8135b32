#include "coexplorer/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "coexplorer/policy.hpp"
#include "coexplorer/session.hpp"

namespace coexplorer {

namespace {

constexpr double kSimulatedTick = 0.1;  // seconds per step
constexpr std::uint64_t kTargetStream = 0x7a26e7b1c0ffee11ULL;

ParameterState draw_target(const SpaceConfig& space, std::uint64_t seed) {
  Rng rng(seed ^ kTargetStream);
  return random_state(space, rng);
}

ActionId uniform_legal(const ParameterState& s, const SpaceConfig& space, Rng& rng) {
  const auto legal = legal_actions(s, space);
  std::uniform_int_distribution<std::size_t> pick(0, legal.size() - 1);
  return legal[pick(rng)];
}

}  // namespace

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Coexplorer: return "coexplorer";
    case AgentKind::Random: return "random";
    case AgentKind::Sarsa: return "sarsa";
  }
  return "?";
}

std::string_view to_string(OracleMode mode) { return mode == OracleMode::Guiding ? "guiding" : "mixed"; }

AgentKind parse_agent_kind(std::string_view text) {
  if (text == "coexplorer") return AgentKind::Coexplorer;
  if (text == "random") return AgentKind::Random;
  if (text == "sarsa") return AgentKind::Sarsa;
  throw std::invalid_argument("unknown agent '" + std::string(text) + "'");
}

OracleMode parse_oracle_mode(std::string_view text) {
  if (text == "guiding") return OracleMode::Guiding;
  if (text == "mixed") return OracleMode::Mixed;
  throw std::invalid_argument("unknown oracle mode '" + std::string(text) + "'");
}

int OracleUser::judge(const ParameterState& before, const ParameterState& after) const {
  const double d0 = l2_distance(before, target);
  const double d1 = l2_distance(after, target);
  if (d1 < d0) return 1;
  if (d1 > d0) return -1;
  return 0;
}

bool OracleUser::near_target(const ParameterState& state, const SpaceConfig& space) const {
  return linf_distance(state, target) <= zone_radius * space.step + 1e-9;
}

bool target_reached(const ParameterState& state, const ParameterState& target, const SpaceConfig& space) {
  return linf_distance(state, target) <= 2.0 * space.step + 1e-9;
}

RunReport run_episode(const EpisodeOptions& options) {
  if (options.budget < 0) throw std::invalid_argument("budget must be non-negative");
  if (options.feedback_period < 1) throw std::invalid_argument("feedback period must be at least 1");

  Config config = options.config;
  config.seed = options.seed;
  config.mode = StartMode::Autonomous;
  config.log_path.clear();
  config.validate();
  const SpaceConfig& space = config.space;

  OracleUser oracle;
  oracle.target = options.target ? snap_to_grid(options.target->values, space) : draw_target(space, options.seed);
  oracle.feedback_period = options.feedback_period;
  oracle.mode = options.oracle;

  RunReport report;
  report.agent = options.agent;
  report.dims = space.n;
  report.seed = options.seed;

  auto clock = std::make_shared<double>(0.0);
  std::unique_ptr<Session> session;
  if (options.agent == AgentKind::Coexplorer) {
    session = std::make_unique<Session>(config, [clock] { return *clock; });
  }
  Rng rng(options.seed);
  QTable q(space);

  ParameterState state = center_state(space);
  std::optional<ActionId> action;  // Sarsa's pending A'
  if (target_reached(state, oracle.target, space)) {
    report.reached = true;
    report.final_distance = l2_distance(state, oracle.target);
    return report;
  }

  for (int step = 1; step <= options.budget; ++step) {
    *clock = step * kSimulatedTick;
    const ParameterState before = state;
    ActionId taken;
    switch (options.agent) {
      case AgentKind::Coexplorer:
        session->tick();
        state = session->current();
        break;
      case AgentKind::Random:
        state = apply_action(state, uniform_legal(state, space, rng), space);
        break;
      case AgentKind::Sarsa:
        if (!action) action = sarsa_policy(q, state, options.sarsa.epsilon, rng);
        taken = *action;
        state = apply_action(state, taken, space);
        break;
    }

    const bool reached = target_reached(state, oracle.target, space);
    int reward = 0;
    if (step % oracle.feedback_period == 0) {
      if (oracle.mode == OracleMode::Mixed && oracle.near_target(state, space)) {
        reward = 1;
        if (session) session->submit_feedback({FeedbackKind::Zone, 1, *clock});
        ++report.feedback_count;
      } else if (const int v = oracle.judge(before, state); v != 0) {
        reward = v;
        if (session) session->submit_feedback({FeedbackKind::Guiding, v, *clock});
        ++report.feedback_count;
      }
    }

    if (options.agent == AgentKind::Sarsa) {
      if (reached) {
        sarsa_update_terminal(q, before, taken, reward, options.sarsa);
      } else {
        const ActionId next = sarsa_policy(q, state, options.sarsa.epsilon, rng);
        sarsa_update(q, before, taken, reward, state, next, options.sarsa);
        action = next;
      }
    }

    report.distances.push_back(l2_distance(state, oracle.target));
    if (reached) {
      report.reached = true;
      report.steps_to_target = step;
      break;
    }
  }
  if (!report.reached) report.steps_to_target = options.budget;
  report.final_distance = l2_distance(state, oracle.target);
  return report;
}

RunReport run_pilot_episode(const PilotOptions& options) {
  if (options.agent == AgentKind::Coexplorer) throw std::invalid_argument("pilot episodes run Sarsa or random agents");
  const SpaceConfig space = pilot_space(options.dims);
  Rng rng(options.seed);
  const ParameterState target = random_state(space, rng);
  ParameterState state = random_state(space, rng);
  // Inside the region means every parameter is at most one level away.
  const auto in_region = [&](const ParameterState& s) { return linf_distance(s, target) <= space.step + 1e-9; };

  RunReport report;
  report.agent = options.agent;
  report.dims = space.n;
  report.seed = options.seed;
  QTable q(space);

  if (in_region(state)) {
    report.reached = true;
    report.final_distance = l2_distance(state, target);
    return report;
  }

  const double eps = options.agent == AgentKind::Random ? 1.0 : options.sarsa.epsilon;
  ActionId action = sarsa_policy(q, state, eps, rng);
  for (int step = 1; step <= options.budget; ++step) {
    const ParameterState next = apply_action(state, action, space);
    const bool reached = in_region(next);
    const double reward = reached ? 1.0 : -1.0;
    ++report.feedback_count;
    if (reached) {
      sarsa_update_terminal(q, state, action, reward, options.sarsa);
    } else {
      const ActionId next_action = sarsa_policy(q, next, eps, rng);
      sarsa_update(q, state, action, reward, next, next_action, options.sarsa);
      action = next_action;
    }
    state = next;
    report.distances.push_back(l2_distance(state, target));
    if (reached) {
      report.reached = true;
      report.steps_to_target = step;
      break;
    }
  }
  if (!report.reached) report.steps_to_target = options.budget;
  report.final_distance = l2_distance(state, target);
  return report;
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("cannot summarize an empty sample");
  std::sort(values.begin(), values.end());
  const auto quantile = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {quantile(0.5), quantile(0.25), quantile(0.75)};
}

double sign_test_p(int wins, int losses) {
  if (wins < 0 || losses < 0) throw std::invalid_argument("negative counts");
  const int n = wins + losses;
  if (n == 0) return 1.0;
  double p = 0.0;
  for (int k = wins; k <= n; ++k)
    p += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
  return std::min(p, 1.0);
}

CompareOptions compare_matrix(std::string_view name) {
  CompareOptions o;
  if (name == "default") return o;
  if (name == "quick") {
    o.seeds = 3;
    o.budget_small = 300;
    o.budget_large = 600;
    return o;
  }
  throw std::invalid_argument("unknown matrix '" + std::string(name) + "' (default|quick)");
}

std::vector<CompareCell> compare(const CompareOptions& options) {
  std::vector<CompareCell> cells;
  for (const int dims : options.dims) {
    for (const AgentKind agent : options.agents) {
      CompareCell cell;
      cell.agent = agent;
      cell.dims = dims;
      cell.budget = dims <= 2 ? options.budget_small : options.budget_large;
      std::vector<double> steps, feedback;
      for (int i = 0; i < options.seeds; ++i) {
        EpisodeOptions ep;
        ep.agent = agent;
        ep.config = options.config;
        ep.config.space.n = dims;
        ep.config.space.lo.clear();
        ep.config.space.hi.clear();
        ep.budget = cell.budget;
        ep.seed = options.first_seed + static_cast<std::uint64_t>(i);
        ep.feedback_period = options.feedback_period;
        ep.oracle = options.oracle;
        const RunReport r = run_episode(ep);
        ++cell.runs;
        if (r.reached) ++cell.reached;
        steps.push_back(static_cast<double>(r.steps_to_target));
        feedback.push_back(static_cast<double>(r.feedback_count));
      }
      if (!steps.empty()) {
        cell.steps = summarize(steps);
        cell.feedback = summarize(feedback);
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_compare_table(std::ostream& out, const std::vector<CompareCell>& cells) {
  out << std::left << std::setw(12) << "agent" << std::right << std::setw(5) << "n" << std::setw(8) << "budget"
      << std::setw(9) << "reached" << std::setw(10) << "median" << std::setw(10) << "q1" << std::setw(10) << "q3"
      << std::setw(11) << "feedback" << '\n';
  out << std::fixed << std::setprecision(1);
  for (const auto& c : cells) {
    std::ostringstream reached;
    reached << c.reached << '/' << c.runs;
    out << std::left << std::setw(12) << to_string(c.agent) << std::right << std::setw(5) << c.dims << std::setw(8)
        << c.budget << std::setw(9) << reached.str() << std::setw(10) << c.steps.median << std::setw(10) << c.steps.q1
        << std::setw(10) << c.steps.q3 << std::setw(11) << c.feedback.median << '\n';
  }
  out << std::defaultfloat;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareCell>& cells) {
  out << "agent,dims,budget,runs,reached,median_steps,q1_steps,q3_steps,median_feedback,q1_feedback,q3_feedback\n";
  for (const auto& c : cells) {
    out << to_string(c.agent) << ',' << c.dims << ',' << c.budget << ',' << c.runs << ',' << c.reached << ','
        << c.steps.median << ',' << c.steps.q1 << ',' << c.steps.q3 << ',' << c.feedback.median << ','
        << c.feedback.q1 << ',' << c.feedback.q3 << '\n';
  }
}

void write_report_csv(std::ostream& out, const RunReport& report) {
  out << "# agent=" << to_string(report.agent) << " dims=" << report.dims << " seed=" << report.seed
      << " reached=" << (report.reached ? "yes" : "no") << " steps_to_target=" << report.steps_to_target
      << " feedback=" << report.feedback_count << " final_distance=" << report.final_distance << '\n';
  out << "step,distance\n";
  for (std::size_t i = 0; i < report.distances.size(); ++i) out << i + 1 << ',' << report.distances[i] << '\n';
}

}  // namespace coexplorer
