#include "coexplorer/reward_model.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace coexplorer {

namespace {

constexpr const char* kSnapshotMagic = "coexplorer-reward-model";
constexpr int kSnapshotVersion = 1;

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

}  // namespace

void check_credited(const Sample& sample, double reward_value) {
  if (!(sample.weight > 0.0)) throw std::invalid_argument("credited sample weight must be > 0");
  if (!(std::abs(sample.target) <= reward_value + 1e-12))
    throw std::invalid_argument("credited sample target exceeds |R|");
}

RewardModel::RewardModel(RewardModelOptions options, std::uint64_t seed) : options_(options) {
  if (options_.inputs < 1 || options_.hidden_units < 1 || options_.hidden_layers < 0)
    throw std::invalid_argument("reward model: bad layer sizes");
  if (!(options_.learning_rate > 0.0)) throw std::invalid_argument("reward model: learning rate must be > 0");
  const auto n = static_cast<std::size_t>(options_.inputs);
  if ((!options_.input_center.empty() && options_.input_center.size() != n) ||
      (!options_.input_scale.empty() && options_.input_scale.size() != n))
    throw std::invalid_argument("reward model: input scaling size differs from inputs");
  reinitialize(seed);
}

RewardModelOptions scaled_to(const SpaceConfig& space, RewardModelOptions options) {
  options.input_center.assign(static_cast<std::size_t>(space.n), 0.0);
  options.input_scale.assign(static_cast<std::size_t>(space.n), 1.0);
  for (int d = 0; d < space.n; ++d) {
    options.input_center[d] = 0.5 * (space.lower(d) + space.upper(d));
    options.input_scale[d] = 2.0 / (space.upper(d) - space.lower(d));
  }
  return options;
}

void RewardModel::reinitialize(std::uint64_t seed) {
  Rng rng(seed);
  layers_.clear();
  int fan_in = options_.inputs;
  for (int l = 0; l < options_.hidden_layers; ++l) {
    Layer layer;
    const double bound = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    layer.weights.resize(options_.hidden_units, fan_in);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = dist(rng);
    layer.bias = Eigen::VectorXd::Zero(options_.hidden_units);
    layers_.push_back(std::move(layer));
    fan_in = options_.hidden_units;
  }
  Layer out;
  out.weights = Eigen::MatrixXd::Zero(outputs(), fan_in);
  out.bias = Eigen::VectorXd::Zero(outputs());
  if (!options_.zero_output_layer) {
    const double bound = std::sqrt(6.0 / (fan_in + outputs()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < out.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < out.weights.cols(); ++c) out.weights(r, c) = dist(rng);
  }
  layers_.push_back(std::move(out));
}

RewardModel::Pass RewardModel::forward(const Eigen::MatrixXd& inputs) const {
  Pass pass;
  pass.activations.reserve(layers_.size());
  pass.activations.push_back(inputs);
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    Eigen::MatrixXd z = layers_[l].weights * pass.activations.back();
    z.colwise() += layers_[l].bias;
    pass.activations.push_back(z.cwiseMax(0.0));
  }
  pass.output = layers_.back().weights * pass.activations.back();
  pass.output.colwise() += layers_.back().bias;
  return pass;
}

std::vector<double> RewardModel::predict(const ParameterState& state) const {
  if (state.size() != options_.inputs) throw DimensionMismatch("predict: state size differs from model inputs");
  Eigen::MatrixXd x(options_.inputs, 1);
  for (int d = 0; d < options_.inputs; ++d) x(d, 0) = feature(state[d], d);
  const Pass pass = forward(x);
  return {pass.output.data(), pass.output.data() + pass.output.size()};
}

void RewardModel::check_batch(std::span<const Sample> batch) const {
  if (batch.empty()) throw std::invalid_argument("reward model: empty batch");
  for (const Sample& s : batch) {
    if (s.state.size() != options_.inputs) throw DimensionMismatch("reward model: sample state size differs from inputs");
    if (s.action.index() < 0 || s.action.index() >= outputs())
      throw std::invalid_argument("reward model: sample action out of range");
  }
}

Eigen::MatrixXd RewardModel::to_inputs(std::span<const Sample> batch) const {
  Eigen::MatrixXd x(options_.inputs, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (int d = 0; d < options_.inputs; ++d) x(d, static_cast<Eigen::Index>(i)) = feature(batch[i].state[d], d);
  return x;
}

double RewardModel::batch_loss(std::span<const Sample> batch, const Eigen::MatrixXd& output) const {
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double err = batch[i].target - output(batch[i].action.index(), static_cast<Eigen::Index>(i));
    total += batch[i].weight * err * err;
  }
  return total / static_cast<double>(batch.size());
}

double RewardModel::loss(std::span<const Sample> batch) const {
  check_batch(batch);
  return batch_loss(batch, forward(to_inputs(batch)).output);
}

std::vector<RewardModel::Layer> RewardModel::backward(std::span<const Sample> batch, const Pass& pass) const {
  const auto cols = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(outputs(), cols);
  for (Eigen::Index i = 0; i < cols; ++i) {
    const Sample& s = batch[static_cast<std::size_t>(i)];
    const int a = s.action.index();
    delta(a, i) = 2.0 * s.weight * (pass.output(a, i) - s.target) / static_cast<double>(cols);
  }

  std::vector<Layer> grads(layers_.size());
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const Eigen::MatrixXd& input = pass.activations[l];
    grads[l].weights = delta * input.transpose();
    grads[l].bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd back = layers_[l].weights.transpose() * delta;
      delta = back.cwiseProduct((input.array() > 0.0).cast<double>().matrix());
    }
  }
  return grads;
}

std::vector<double> RewardModel::gradient(std::span<const Sample> batch) const {
  check_batch(batch);
  const std::vector<Layer> grads = backward(batch, forward(to_inputs(batch)));
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Layer& g : grads) {
    for (Eigen::Index r = 0; r < g.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < g.weights.cols(); ++c) flat.push_back(g.weights(r, c));
    for (Eigen::Index r = 0; r < g.bias.size(); ++r) flat.push_back(g.bias(r));
  }
  return flat;
}

double RewardModel::sgd_step(std::span<const Sample> batch, TrainScope scope) {
  check_batch(batch);
  const Pass pass = forward(to_inputs(batch));
  const double pre_loss = batch_loss(batch, pass.output);
  if (!std::isfinite(pre_loss)) throw NonFiniteLoss("reward model loss is not finite");

  std::vector<Layer> grads = backward(batch, pass);
  const std::size_t first = scope == TrainScope::OutputLayerOnly ? layers_.size() - 1 : 0;
  std::vector<Layer> updated(layers_.begin() + static_cast<std::ptrdiff_t>(first), layers_.end());
  for (std::size_t l = first; l < layers_.size(); ++l) {
    Layer& u = updated[l - first];
    u.weights -= options_.learning_rate * grads[l].weights;
    u.bias -= options_.learning_rate * grads[l].bias;
    if (!all_finite(u.weights) || !all_finite(u.bias))
      throw NonFiniteLoss("reward model update produced non-finite weights");
  }
  for (std::size_t l = first; l < layers_.size(); ++l) layers_[l] = std::move(updated[l - first]);
  return pre_loss;
}

std::size_t RewardModel::parameter_count() const {
  std::size_t count = 0;
  for (const Layer& l : layers_) count += static_cast<std::size_t>(l.weights.size() + l.bias.size());
  return count;
}

std::vector<double> RewardModel::parameters() const {
  std::vector<double> flat;
  flat.reserve(parameter_count());
  for (const Layer& l : layers_) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) flat.push_back(l.weights(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat.push_back(l.bias(r));
  }
  return flat;
}

void RewardModel::set_parameters(std::span<const double> flat) {
  if (flat.size() != parameter_count()) throw std::invalid_argument("set_parameters: wrong parameter count");
  std::size_t k = 0;
  for (Layer& l : layers_) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = flat[k++];
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat[k++];
  }
}

void RewardModel::write_snapshot(std::ostream& os) const {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << kSnapshotMagic << ' ' << kSnapshotVersion << '\n';
  os << options_.inputs << ' ' << options_.hidden_units << ' ' << options_.hidden_layers << ' '
     << options_.learning_rate << ' ' << (options_.zero_output_layer ? 1 : 0) << '\n';
  for (const auto* v : {&options_.input_center, &options_.input_scale}) {
    os << v->size();
    for (double x : *v) os << ' ' << x;
    os << '\n';
  }
  os << layers_.size() << '\n';
  for (const Layer& l : layers_) {
    os << l.weights.rows() << ' ' << l.weights.cols() << '\n';
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) os << (c ? " " : "") << l.weights(r, c);
      os << '\n';
    }
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) os << (r ? " " : "") << l.bias(r);
    os << '\n';
  }
  os.precision(old_precision);
}

RewardModel RewardModel::read_snapshot(std::istream& is) {
  std::string magic;
  int version = 0;
  if (!(is >> magic >> version) || magic != kSnapshotMagic || version != kSnapshotVersion)
    throw std::runtime_error("not a reward model snapshot (or unsupported version)");
  RewardModelOptions options;
  int zero_out = 1;
  std::size_t layer_count = 0;
  if (!(is >> options.inputs >> options.hidden_units >> options.hidden_layers >> options.learning_rate >> zero_out))
    throw std::runtime_error("truncated reward model snapshot header");
  for (auto* v : {&options.input_center, &options.input_scale}) {
    std::size_t count = 0;
    if (!(is >> count) || count > static_cast<std::size_t>(std::max(options.inputs, 0)))
      throw std::runtime_error("bad input scaling in snapshot");
    v->resize(count);
    for (double& x : *v)
      if (!(is >> x)) throw std::runtime_error("truncated input scaling in snapshot");
  }
  if (!(is >> layer_count)) throw std::runtime_error("truncated reward model snapshot header");
  options.zero_output_layer = zero_out != 0;
  RewardModel model(options, 0);
  if (layer_count != model.layers_.size()) throw std::runtime_error("snapshot layer count does not match header");
  for (Layer& l : model.layers_) {
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> rows >> cols) || rows != l.weights.rows() || cols != l.weights.cols())
      throw std::runtime_error("snapshot layer shape mismatch");
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        if (!(is >> l.weights(r, c))) throw std::runtime_error("truncated snapshot weights");
    for (Eigen::Index r = 0; r < rows; ++r)
      if (!(is >> l.bias(r))) throw std::runtime_error("truncated snapshot biases");
  }
  return model;
}

void ReplayBuffer::store(std::span<const Sample> samples) {
  for (const Sample& s : samples) {
    entries_.push_back(s);
    if (entries_.size() > capacity_) entries_.pop_front();
  }
}

std::vector<Sample> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
  if (entries_.empty()) throw std::logic_error("replay buffer is empty");
  std::uniform_int_distribution<std::size_t> pick(0, entries_.size() - 1);
  std::vector<Sample> batch;
  batch.reserve(count);
  for (std::size_t i = 0; i < count; ++i) batch.push_back(entries_[pick(rng)]);
  return batch;
}

double replay_step(RewardModel& model, const ReplayBuffer& buffer, std::size_t batch_size, Rng& rng) {
  if (!replay_ready(buffer, batch_size)) throw std::logic_error("replay_step called with |D| <= 2 * batch size");
  const std::vector<Sample> batch = buffer.sample(batch_size, rng);
  return model.sgd_step(batch);
}

void TrajectoryWindow::push(ParameterState state, ActionId action, double time) {
  if (!entries_.empty() && !(time > entries_.back().time))
    throw std::invalid_argument("trajectory timestamps must be strictly increasing");
  entries_.push_back({std::move(state), action, time});
  if (entries_.size() > capacity_) entries_.pop_front();
}

}  // namespace coexplorer
