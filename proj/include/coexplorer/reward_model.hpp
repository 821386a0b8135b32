#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "coexplorer/space.hpp"

namespace coexplorer {

class NonFiniteLoss : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Rng = std::mt19937_64;

/// One regression target for the reward model: the credited value of taking
/// `action` in `state`, weighted by how much of a feedback event it received.
struct Sample {
  ParameterState state;
  ActionId action;
  double target = 0.0;
  double weight = 1.0;
};

/// Throws std::invalid_argument unless weight > 0 and |target| <= reward_value.
void check_credited(const Sample& sample, double reward_value);

enum class TrainScope {
  All,
  OutputLayerOnly,  // diagnostic: hidden layers frozen
};

struct RewardModelOptions {
  int inputs = 10;
  int hidden_units = 100;
  int hidden_layers = 2;
  double learning_rate = 0.002;
  bool zero_output_layer = true;
  // Inputs are fed as (s - input_center) * input_scale; empty means 0 and 1.
  std::vector<double> input_center;
  std::vector<double> input_scale;
};

/// Options that map `space` onto [-1, 1] in every dimension.
RewardModelOptions scaled_to(const SpaceConfig& space, RewardModelOptions options);

/// Feed-forward estimate of the human reward for every action of a state.
///
/// Shape: inputs -> hidden_units (ReLU) x hidden_layers -> 2*inputs (linear).
/// Output k is the estimate for ActionId::from_index(k). Hidden weights are
/// He-uniform, biases zero, and the output layer starts at zero so an
/// untrained model predicts 0 everywhere.
class RewardModel {
 public:
  RewardModel(RewardModelOptions options, std::uint64_t seed);

  std::vector<double> predict(const ParameterState& state) const;

  /// Mean weighted squared error over the batch, each sample scored only on
  /// its own action's output.
  double loss(std::span<const Sample> batch) const;

  /// Gradient of loss() flattened in parameters() order.
  std::vector<double> gradient(std::span<const Sample> batch) const;

  /// One plain SGD step on loss(). Returns the pre-step loss. Throws
  /// NonFiniteLoss (leaving the weights untouched) if the loss or the update
  /// is not finite.
  double sgd_step(std::span<const Sample> batch, TrainScope scope = TrainScope::All);

  /// Fresh weights drawn from `seed`.
  void reinitialize(std::uint64_t seed);

  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);
  std::size_t parameter_count() const;

  const RewardModelOptions& options() const { return options_; }
  int outputs() const { return 2 * options_.inputs; }

  /// Versioned text snapshot: header, layer shapes, row-major weights.
  void write_snapshot(std::ostream& os) const;
  static RewardModel read_snapshot(std::istream& is);

 private:
  struct Layer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;
  };

  struct Pass {
    std::vector<Eigen::MatrixXd> activations;  // [0] is the input batch
    Eigen::MatrixXd output;
  };

  double feature(double value, int dim) const {
    if (!options_.input_center.empty()) value -= options_.input_center[dim];
    if (!options_.input_scale.empty()) value *= options_.input_scale[dim];
    return value;
  }
  Pass forward(const Eigen::MatrixXd& inputs) const;
  Eigen::MatrixXd to_inputs(std::span<const Sample> batch) const;
  void check_batch(std::span<const Sample> batch) const;
  double batch_loss(std::span<const Sample> batch, const Eigen::MatrixXd& output) const;
  std::vector<Layer> backward(std::span<const Sample> batch, const Pass& pass) const;

  RewardModelOptions options_;
  std::vector<Layer> layers_;
};

/// Fixed-capacity replay memory; the oldest sample is evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 700) : capacity_(capacity) {}

  void store(std::span<const Sample> samples);
  void clear() { entries_.clear(); }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const Sample& operator[](std::size_t i) const { return entries_[i]; }

  /// `count` draws, uniform with replacement.
  std::vector<Sample> sample(std::size_t count, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::deque<Sample> entries_;
};

/// True when the buffer holds more than twice the batch size.
inline bool replay_ready(const ReplayBuffer& buffer, std::size_t batch_size) {
  return buffer.size() > 2 * batch_size;
}

/// Trains on `batch_size` uniform draws from the buffer. The caller is
/// responsible for the replay_ready() guard; a violation throws std::logic_error.
double replay_step(RewardModel& model, const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng);

/// Most recent (state, action, time) triples taken by the agent.
class TrajectoryWindow {
 public:
  struct Entry {
    ParameterState state;
    ActionId action;
    double time = 0.0;
  };

  explicit TrajectoryWindow(std::size_t capacity = 64) : capacity_(capacity) {}

  /// Throws std::invalid_argument if `time` does not exceed the last stamp.
  void push(ParameterState state, ActionId action, double time);
  void clear() { entries_.clear(); }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  const Entry& back() const { return entries_.back(); }

 private:
  std::size_t capacity_;
  std::deque<Entry> entries_;
};

}  // namespace coexplorer
