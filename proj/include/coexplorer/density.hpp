#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "coexplorer/space.hpp"

namespace coexplorer {

class EmptyModel : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct TileCoderOptions {
  int num_tilings = 64;
  double tile_width = 0.4;                   // per dimension, in state units
  std::optional<std::uint64_t> offset_seed;  // random offsets instead of the fixed pattern
};

/// Overlapping axis-aligned grids ("tilings") over the state space.
///
/// Tiling t is displaced by offset[t][d] in [0, tile_width) on dimension d. The
/// default pattern is ((t * (2d + 1)) mod T) * tile_width / T, which staggers
/// the tilings differently along each axis.
class TileCoder {
 public:
  TileCoder(const SpaceConfig& space, TileCoderOptions options = {});

  int dims() const { return n_; }
  int num_tilings() const { return options_.num_tilings; }
  double tile_width() const { return options_.tile_width; }
  double offset(int tiling, int dim) const { return offsets_[static_cast<std::size_t>(tiling * n_ + dim)]; }

  /// Key of the tile holding `state` in `tiling`; unique within that tiling.
  std::uint64_t tile(const ParameterState& state, int tiling) const;
  std::vector<std::uint64_t> tiles(const ParameterState& state) const;

 private:
  int n_;
  TileCoderOptions options_;
  std::vector<double> lower_;
  std::vector<double> offsets_;
  std::vector<std::uint64_t> radix_;
  bool exact_keys_ = true;
};

/// Per-tiling visit counts.
struct CountTable {
  std::vector<std::unordered_map<std::uint64_t, std::uint64_t>> counts;
  std::uint64_t total = 0;

  explicit CountTable(int num_tilings = 0) : counts(static_cast<std::size_t>(num_tilings)) {}
  std::uint64_t count(int tiling, std::uint64_t tile) const;
  void clear();
};

struct BonusParams {
  double beta = 1.0;
  double c = 0.01;
};

/// R+ = r + beta * sqrt(1 / (V + C)). An infinite pseudo-count adds nothing.
double exploration_bonus(double pseudo_count, double r, const BonusParams& params = {});

/// Tile-coding density model over visited states with pseudo-counts.
class DensityModel {
 public:
  static constexpr double kDensityFloor = 1e-9;

  DensityModel(const SpaceConfig& space, TileCoderOptions options = {});

  void update(const ParameterState& state);
  void clear() { table_.clear(); }

  std::uint64_t total() const { return table_.total; }
  const CountTable& table() const { return table_; }
  const TileCoder& coder() const { return coder_; }

  /// Average over tilings of count(tile) / total. Throws EmptyModel when nothing
  /// has been visited yet.
  double density(const ParameterState& state) const;

  /// Density the state would have right after one more visit to it.
  double recoding_density(const ParameterState& state) const;

  /// V = p(1 - p') / (p' - p). Returns +infinity ("fully known") when p' <= p.
  double pseudo_count(const ParameterState& state) const;

  double bonus(const ParameterState& state, double r, const BonusParams& params = {}) const {
    return exploration_bonus(pseudo_count(state), r, params);
  }

  /// log p' - log max(p, 1e-9); an empty model counts as p = 0.
  double prediction_gain(const ParameterState& state) const;

 private:
  struct Tally {
    double sum_counts = 0.0;   // sum over tilings of count(tile)
    double sum_missing = 0.0;  // sum over tilings of (total - count(tile))
  };
  Tally tally(const ParameterState& state) const;

  TileCoder coder_;
  CountTable table_;
};

}  // namespace coexplorer
