#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "coexplorer/config.hpp"
#include "coexplorer/credit.hpp"
#include "coexplorer/density.hpp"
#include "coexplorer/messages.hpp"
#include "coexplorer/reward_model.hpp"

namespace coexplorer {

class WrongMode : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class UnknownHistoryId : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Raised for learning requests while training is halted after a divergence.
class TrainingHalted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { StartAuto, StopAuto, ChangeZone, Reset };
enum class TrainingBranch { None = 0, Feedback = 1, Replay = 2, Bonus = 3 };

std::string_view to_string(Command cmd);
std::string_view to_string(TrainingBranch branch);

struct HistoryEntry {
  std::int64_t id = 0;
  ParameterState state;
  double time = 0.0;
  HistoryTag tag = HistoryTag::Neutral;
};

/// Append-only record of visited states with dense ids.
class SessionHistory {
 public:
  std::int64_t append(ParameterState state, double time);
  void tag(std::int64_t id, HistoryTag tag);
  void clear() { entries_.clear(); }

  const HistoryEntry& at(std::int64_t id) const;
  const HistoryEntry& latest() const { return entries_.back(); }
  /// Latest entry stamped no later than `time` (the first entry if none is).
  const HistoryEntry& at_time(double time) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<HistoryEntry>& entries() const { return entries_; }

 private:
  std::vector<HistoryEntry> entries_;
};

/// Line-delimited JSON event log: {"time", "type", "payload"} per line.
class SessionLog {
 public:
  explicit SessionLog(std::ostream& out) : out_(&out) {}
  void write(double time, std::string_view type, const std::string& payload_json);

 private:
  std::ostream* out_;
};

/// Seconds on the steady clock.
double steady_seconds();

/// The agent control loop: ticking, feedback crediting and training, state
/// commands and direct manipulation. Owned by one thread at a time.
///
/// Initial state is the centre of the space, stored as history id 0.
class Session {
 public:
  using Clock = std::function<double()>;

  explicit Session(Config config, Clock clock = steady_seconds);
  ~Session();
  Session(Session&&) noexcept;
  Session& operator=(Session&&) noexcept;

  /// One autonomous step: act, record, update density, run at most one
  /// training branch, emit. Throws WrongMode outside Autonomous mode.
  const ParameterState& tick();

  /// Routes a feedback event: queued for the next tick in Autonomous mode,
  /// handled at once in Stepwise mode. Throws TrainingHalted when Paused.
  void submit_feedback(const FeedbackEvent& feedback);

  /// Stepwise mode: credit and train on the feedback, then take one action.
  const ParameterState& step_on_feedback(const FeedbackEvent& feedback);

  const ParameterState& go_backward(std::int64_t history_id);
  const ParameterState& set_state(std::span<const double> raw);
  void command(Command cmd);

  /// Queues the current mode, epsilon, full history and state, for peers that
  /// just came online.
  void announce();

  /// Queues an error message for peers.
  void report_error(std::string code, std::string detail);
  std::vector<OutboundMessage> drain_outbound();

  /// Session events are appended to `out` (not owned) from now on.
  void attach_log(std::ostream* out);
  void open_log(const std::string& path);

  /// Wall-time budget per tick; default is the action period.
  void set_tick_budget(std::chrono::nanoseconds budget) { tick_budget_ = budget; }

  const Config& config() const { return config_; }
  const SpaceConfig& space() const { return config_.space; }
  Mode mode() const { return mode_; }
  bool training_halted() const { return training_halted_; }
  std::uint64_t t() const { return t_; }
  double epsilon() const { return config_.epsilon(t_); }
  const ParameterState& current() const { return current_; }
  const SessionHistory& history() const { return history_; }
  const RewardModel& model() const { return model_; }
  const DensityModel& density() const { return density_; }
  const ReplayBuffer& replay() const { return replay_; }
  const TrajectoryWindow& window() const { return window_; }
  std::size_t pending_feedback() const { return pending_.size(); }
  TrainingBranch last_branch() const { return last_branch_; }
  std::uint64_t branch_count(TrainingBranch b) const { return branch_counts_[static_cast<std::size_t>(b)]; }
  std::uint64_t tick_overruns() const { return tick_overruns_; }
  std::chrono::nanoseconds max_tick_time() const { return max_tick_time_; }
  double now() const { return clock_(); }

 private:
  void act(double now);
  void train_on(const std::vector<Sample>& samples);
  void store_and_train(const std::vector<Sample>& samples);
  std::vector<Sample> credit(const FeedbackEvent& feedback, bool autonomous) const;
  void append_history(double time);
  void emit(OutboundMessage msg);
  void emit_state();
  void set_mode(Mode mode);
  void log(double time, std::string_view type, const std::string& payload);

  Config config_;
  Clock clock_;
  Rng rng_;
  RewardModel model_;
  ReplayBuffer replay_;
  TrajectoryWindow window_;
  DensityModel density_;
  SessionHistory history_;
  ParameterState current_;
  Mode mode_;
  bool training_halted_ = false;
  std::uint64_t t_ = 0;
  std::deque<FeedbackEvent> pending_;
  std::deque<OutboundMessage> outbound_;
  TrainingBranch last_branch_ = TrainingBranch::None;
  std::array<std::uint64_t, 4> branch_counts_{};
  std::chrono::nanoseconds tick_budget_;
  std::chrono::nanoseconds max_tick_time_{0};
  std::uint64_t tick_overruns_ = 0;
  std::unique_ptr<std::ostream> owned_log_;
  std::ostream* log_ = nullptr;
};

}  // namespace coexplorer
