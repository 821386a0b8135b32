#include "coexplorer/density.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace coexplorer {

namespace {

// Guards floor() against grid values that land a hair under a tile edge.
constexpr double kEdgeNudge = 1e-9;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  // splitmix64 finalizer over a running hash
  h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

}  // namespace

TileCoder::TileCoder(const SpaceConfig& space, TileCoderOptions options) : n_(space.n), options_(options) {
  if (options_.num_tilings < 1) throw std::invalid_argument("tile coder: need at least one tiling");
  if (!(options_.tile_width > 0.0)) throw std::invalid_argument("tile coder: tile width must be > 0");

  const auto tilings = static_cast<std::size_t>(options_.num_tilings);
  lower_.resize(static_cast<std::size_t>(n_));
  radix_.resize(static_cast<std::size_t>(n_));
  offsets_.resize(tilings * static_cast<std::size_t>(n_));

  long double key_space = 1.0L;
  for (int d = 0; d < n_; ++d) {
    lower_[d] = space.lower(d);
    const double range = space.upper(d) - space.lower(d);
    radix_[d] = static_cast<std::uint64_t>(std::floor((range + options_.tile_width) / options_.tile_width + kEdgeNudge)) + 1;
    key_space *= static_cast<long double>(radix_[d]);
  }
  exact_keys_ = key_space < static_cast<long double>(std::numeric_limits<std::uint64_t>::max());

  if (options_.offset_seed) {
    std::mt19937_64 rng(*options_.offset_seed);
    std::uniform_real_distribution<double> dist(0.0, options_.tile_width);
    for (double& o : offsets_) o = dist(rng);
  } else {
    const auto t_count = static_cast<std::uint64_t>(options_.num_tilings);
    for (std::uint64_t t = 0; t < t_count; ++t)
      for (int d = 0; d < n_; ++d) {
        const std::uint64_t slot = (t * (2 * static_cast<std::uint64_t>(d) + 1)) % t_count;
        offsets_[t * static_cast<std::size_t>(n_) + static_cast<std::size_t>(d)] =
            static_cast<double>(slot) * options_.tile_width / static_cast<double>(t_count);
      }
  }
}

std::uint64_t TileCoder::tile(const ParameterState& state, int tiling) const {
  std::uint64_t key = exact_keys_ ? 0 : 0x2545f4914f6cdd1dULL;
  for (int d = 0; d < n_; ++d) {
    const double shifted = (state[d] - lower_[d] + offset(tiling, d)) / options_.tile_width;
    const auto cell = static_cast<std::uint64_t>(std::max(0.0, std::floor(shifted + kEdgeNudge)));
    key = exact_keys_ ? key * radix_[d] + cell : mix(key, cell);
  }
  return key;
}

std::vector<std::uint64_t> TileCoder::tiles(const ParameterState& state) const {
  if (state.size() != n_) throw DimensionMismatch("tile coder: state size differs from n");
  std::vector<std::uint64_t> out(static_cast<std::size_t>(options_.num_tilings));
  for (int t = 0; t < options_.num_tilings; ++t) out[static_cast<std::size_t>(t)] = tile(state, t);
  return out;
}

std::uint64_t CountTable::count(int tiling, std::uint64_t tile) const {
  const auto& m = counts[static_cast<std::size_t>(tiling)];
  const auto it = m.find(tile);
  return it == m.end() ? 0 : it->second;
}

void CountTable::clear() {
  for (auto& m : counts) m.clear();
  total = 0;
}

double exploration_bonus(double pseudo_count, double r, const BonusParams& params) {
  if (std::isinf(pseudo_count)) return r;
  return r + params.beta * std::sqrt(1.0 / (pseudo_count + params.c));
}

DensityModel::DensityModel(const SpaceConfig& space, TileCoderOptions options)
    : coder_(space, options), table_(options.num_tilings) {}

void DensityModel::update(const ParameterState& state) {
  const auto keys = coder_.tiles(state);
  for (std::size_t t = 0; t < keys.size(); ++t) ++table_.counts[t][keys[t]];
  ++table_.total;
}

DensityModel::Tally DensityModel::tally(const ParameterState& state) const {
  if (state.size() != coder_.dims()) throw DimensionMismatch("density model: state size differs from n");
  Tally out;
  const double total = static_cast<double>(table_.total);
  for (int t = 0; t < coder_.num_tilings(); ++t) {
    const double c = static_cast<double>(table_.count(t, coder_.tile(state, t)));
    out.sum_counts += c;
    out.sum_missing += total - c;
  }
  return out;
}

double DensityModel::density(const ParameterState& state) const {
  if (table_.total == 0) throw EmptyModel("density model has no visits yet");
  const Tally s = tally(state);
  return s.sum_counts / (coder_.num_tilings() * static_cast<double>(table_.total));
}

double DensityModel::recoding_density(const ParameterState& state) const {
  const Tally s = tally(state);
  const double tilings = coder_.num_tilings();
  return (s.sum_counts + tilings) / (tilings * (static_cast<double>(table_.total) + 1.0));
}

double DensityModel::pseudo_count(const ParameterState& state) const {
  if (table_.total == 0) return 0.0;
  const Tally s = tally(state);
  const double tilings = coder_.num_tilings();
  const double total = static_cast<double>(table_.total);
  const double p = s.sum_counts / (tilings * total);
  // 1 - p' and p' - p, each expanded over the counts so neither is a
  // difference of two nearly equal densities.
  const double one_minus_recoded = s.sum_missing / (tilings * (total + 1.0));
  const double recoded_gain = s.sum_missing / (tilings * total * (total + 1.0));
  if (!(recoded_gain > 0.0)) return std::numeric_limits<double>::infinity();
  return p * one_minus_recoded / recoded_gain;
}

double DensityModel::prediction_gain(const ParameterState& state) const {
  const double p = table_.total == 0 ? 0.0 : density(state);
  return std::log(recoding_density(state)) - std::log(std::max(p, kDensityFloor));
}

}  // namespace coexplorer
