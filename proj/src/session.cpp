#include "coexplorer/session.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "coexplorer/policy.hpp"

namespace coexplorer {

namespace {

constexpr std::size_t kOutboundCapacity = 4096;

RewardModelOptions model_options(const Config& c) {
  RewardModelOptions o;
  o.inputs = c.space.n;
  o.hidden_units = c.hidden_units;
  o.hidden_layers = c.hidden_layers;
  o.learning_rate = c.learning_rate;
  return scaled_to(c.space, o);
}

const Config& validated(const Config& c) {
  c.validate();
  return c;
}

nlohmann::json values_json(const ParameterState& s) { return s.values; }

}  // namespace

std::string_view to_string(Command cmd) {
  switch (cmd) {
    case Command::StartAuto: return "start_auto";
    case Command::StopAuto: return "stop_auto";
    case Command::ChangeZone: return "change_zone";
    case Command::Reset: return "reset";
  }
  return "?";
}

std::string_view to_string(TrainingBranch branch) {
  switch (branch) {
    case TrainingBranch::None: return "none";
    case TrainingBranch::Feedback: return "feedback";
    case TrainingBranch::Replay: return "replay";
    case TrainingBranch::Bonus: return "bonus";
  }
  return "?";
}

std::int64_t SessionHistory::append(ParameterState state, double time) {
  const auto id = static_cast<std::int64_t>(entries_.size());
  entries_.push_back({id, std::move(state), time, HistoryTag::Neutral});
  return id;
}

const HistoryEntry& SessionHistory::at(std::int64_t id) const {
  if (id < 0 || id >= static_cast<std::int64_t>(entries_.size()))
    throw UnknownHistoryId("no history entry with id " + std::to_string(id));
  return entries_[static_cast<std::size_t>(id)];
}

void SessionHistory::tag(std::int64_t id, HistoryTag tag) {
  at(id);
  entries_[static_cast<std::size_t>(id)].tag = tag;
}

const HistoryEntry& SessionHistory::at_time(double time) const {
  if (entries_.empty()) throw UnknownHistoryId("history is empty");
  auto it = std::upper_bound(entries_.begin(), entries_.end(), time,
                             [](double t, const HistoryEntry& e) { return t < e.time; });
  return it == entries_.begin() ? entries_.front() : *std::prev(it);
}

void SessionLog::write(double time, std::string_view type, const std::string& payload_json) {
  nlohmann::json rec;
  rec["time"] = time;
  rec["type"] = type;
  rec["payload"] = nlohmann::json::parse(payload_json);
  *out_ << rec.dump() << '\n';
}

double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

Session::Session(Config config, Clock clock)
    : config_(validated(config)),
      clock_(std::move(clock)),
      rng_(config_.seed),
      model_(model_options(config_), rng_()),
      replay_(config_.replay_memory),
      window_(config_.trajectory_capacity),
      density_(config_.space, config_.tiles),
      current_(center_state(config_.space)),
      mode_(config_.mode == StartMode::Autonomous ? Mode::Autonomous : Mode::Stepwise),
      tick_budget_(std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::duration<double>(config_.tick_period()))) {
  if (!config_.log_path.empty()) open_log(config_.log_path);
  append_history(clock_());
  density_.update(current_);
}

Session::~Session() = default;
Session::Session(Session&&) noexcept = default;
Session& Session::operator=(Session&&) noexcept = default;

void Session::attach_log(std::ostream* out) {
  owned_log_.reset();
  log_ = out;
}

void Session::open_log(const std::string& path) {
  auto file = std::make_unique<std::ofstream>(path, std::ios::app);
  if (!*file) throw std::runtime_error("cannot open session log " + path);
  owned_log_ = std::move(file);
  log_ = owned_log_.get();
}

void Session::log(double time, std::string_view type, const std::string& payload) {
  if (!log_) return;
  SessionLog(*log_).write(time, type, payload);
  log_->flush();
}

void Session::emit(OutboundMessage msg) {
  outbound_.push_back(std::move(msg));
  if (outbound_.size() > kOutboundCapacity) outbound_.pop_front();
}

void Session::emit_state() { emit(out::State{static_cast<std::int64_t>(t_), current_.values}); }

std::vector<OutboundMessage> Session::drain_outbound() {
  std::vector<OutboundMessage> out(std::make_move_iterator(outbound_.begin()), std::make_move_iterator(outbound_.end()));
  outbound_.clear();
  return out;
}

void Session::announce() {
  emit(out::ModeChange{mode_});
  emit(out::Epsilon{config_.epsilon(t_)});
  for (const auto& e : history_.entries()) emit(out::HistoryAppend{e.id, e.tag});
  emit_state();
}

void Session::report_error(std::string code, std::string detail) {
  emit(out::Error{std::move(code), std::move(detail)});
}

void Session::set_mode(Mode mode) {
  if (mode == mode_) return;
  mode_ = mode;
  emit(out::ModeChange{mode_});
}

void Session::append_history(double time) {
  const std::int64_t id = history_.append(current_, time);
  emit(out::HistoryAppend{id, HistoryTag::Neutral});
}

void Session::act(double now) {
  // Trajectory stamps must increase even if the clock has not moved.
  if (!window_.empty() && now <= window_.back().time) now = std::nextafter(window_.back().time, HUGE_VAL);
  const double eps = config_.epsilon(t_);
  const ActionId action = select_action(current_, model_, density_, config_.space, eps, rng_);
  ParameterState next = apply_action(current_, action, config_.space);
  window_.push(current_, action, now);
  current_ = std::move(next);
  ++t_;
  append_history(now);
  density_.update(current_);
  emit_state();
  emit(out::Epsilon{eps});

  nlohmann::json payload;
  payload["t"] = t_;
  payload["action"] = {{"dim", action.dim}, {"sign", action.sign}};
  payload["values"] = values_json(current_);
  payload["epsilon"] = eps;
  log(now, "action", payload.dump());
}

void Session::train_on(const std::vector<Sample>& samples) {
  if (samples.empty() || training_halted_) return;
  try {
    model_.sgd_step(samples);
  } catch (const NonFiniteLoss& e) {
    training_halted_ = true;
    set_mode(Mode::Paused);
    report_error("non_finite_loss", e.what());
    log(clock_(), "command", nlohmann::json{{"command", "halt"}, {"reason", e.what()}}.dump());
  }
}

void Session::store_and_train(const std::vector<Sample>& samples) {
  for (const Sample& s : samples) check_credited(s, config_.credit.reward_value);
  replay_.store(samples);
  train_on(samples);
}

std::vector<Sample> Session::credit(const FeedbackEvent& feedback, bool autonomous) const {
  if (feedback.kind == FeedbackKind::Zone)
    return zone_expand(history_.at_time(feedback.time).state, feedback.valence, config_.space, config_.credit);
  return autonomous ? guiding_credit(feedback, window_, config_.credit)
                    : credit_window(feedback, window_, config_.credit);
}

const ParameterState& Session::tick() {
  if (mode_ != Mode::Autonomous) throw WrongMode("tick requires autonomous mode");
  const auto started = std::chrono::steady_clock::now();
  const double now = clock_();

  act(now);

  const auto reward_length = static_cast<std::uint64_t>(config_.credit.reward_length);
  const auto batch = static_cast<std::size_t>(config_.batch_size);
  TrainingBranch branch = TrainingBranch::None;
  if (!pending_.empty() && t_ > reward_length) {
    const FeedbackEvent feedback = pending_.front();
    pending_.pop_front();
    store_and_train(credit(feedback, true));
    branch = TrainingBranch::Feedback;
  } else if (replay_ready(replay_, batch)) {
    if (!training_halted_) train_on(replay_.sample(batch, rng_));
    branch = TrainingBranch::Replay;
  } else if (t_ > reward_length) {
    const auto& last = window_.back();
    const double target = density_.bonus(current_, 0.0, config_.bonus);
    train_on({Sample{last.state, last.action, target, 1.0}});
    branch = TrainingBranch::Bonus;
  }
  last_branch_ = branch;
  ++branch_counts_[static_cast<std::size_t>(branch)];

  const auto elapsed = std::chrono::steady_clock::now() - started;
  max_tick_time_ = std::max(max_tick_time_, std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed));
  if (elapsed > tick_budget_) {
    ++tick_overruns_;
    std::clog << "coexplorer: tick " << t_ << " overran its budget ("
              << std::chrono::duration<double, std::milli>(elapsed).count() << " ms)\n";
  }
  return current_;
}

void Session::submit_feedback(const FeedbackEvent& feedback) {
  if (feedback.valence != 1 && feedback.valence != -1) throw std::invalid_argument("feedback valence must be +1 or -1");
  if (mode_ == Mode::Paused) throw TrainingHalted("training is halted; reset the agent memory");

  const HistoryEntry& heard = history_.at_time(feedback.time);
  const HistoryTag tag = feedback.valence > 0 ? HistoryTag::Positive : HistoryTag::Negative;
  history_.tag(heard.id, tag);
  emit(out::HistoryAppend{heard.id, tag});

  nlohmann::json payload{{"kind", feedback.kind == FeedbackKind::Zone ? "zone" : "guide"},
                         {"valence", feedback.valence},
                         {"history_id", heard.id}};
  log(feedback.time, "feedback", payload.dump());

  if (mode_ == Mode::Autonomous) {
    pending_.push_back(feedback);
  } else {
    step_on_feedback(feedback);
  }
}

const ParameterState& Session::step_on_feedback(const FeedbackEvent& feedback) {
  if (mode_ != Mode::Stepwise) throw WrongMode("step_on_feedback requires stepwise mode");
  store_and_train(credit(feedback, false));
  act(clock_());
  return current_;
}

const ParameterState& Session::go_backward(std::int64_t history_id) {
  current_ = history_.at(history_id).state;
  const double now = clock_();
  append_history(now);
  emit_state();
  log(now, "command", nlohmann::json{{"command", "back"}, {"history_id", history_id}, {"values", current_.values}}.dump());
  return current_;
}

const ParameterState& Session::set_state(std::span<const double> raw) {
  current_ = snap_to_grid(raw, config_.space);
  const double now = clock_();
  append_history(now);
  density_.update(current_);
  emit_state();
  log(now, "state_set", nlohmann::json{{"values", current_.values}}.dump());
  return current_;
}

void Session::command(Command cmd) {
  const double now = clock_();
  nlohmann::json payload{{"command", to_string(cmd)}};
  switch (cmd) {
    case Command::StartAuto:
    case Command::StopAuto:
      if (mode_ == Mode::Paused) throw TrainingHalted("training is halted; reset the agent memory");
      set_mode(cmd == Command::StartAuto ? Mode::Autonomous : Mode::Stepwise);
      break;
    case Command::ChangeZone:
      current_ = change_zone(density_, config_.space, config_.policy, rng_);
      append_history(now);
      density_.update(current_);
      emit_state();
      payload["values"] = current_.values;
      break;
    case Command::Reset:
      model_.reinitialize(rng_());
      replay_.clear();
      window_.clear();
      density_.clear();
      history_.clear();
      pending_.clear();
      t_ = 0;
      training_halted_ = false;
      if (mode_ == Mode::Paused) set_mode(Mode::Stepwise);
      current_ = center_state(config_.space);
      append_history(now);
      density_.update(current_);
      emit_state();
      payload["values"] = current_.values;
      break;
  }
  log(now, "command", payload.dump());
}

}  // namespace coexplorer
