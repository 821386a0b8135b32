#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "coexplorer/credit.hpp"
#include "coexplorer/density.hpp"
#include "coexplorer/policy.hpp"
#include "coexplorer/space.hpp"

namespace coexplorer {

enum class StartMode { Autonomous, Stepwise };

/// Every tunable of an agent session and its service, with the reference
/// hyperparameters as defaults.
struct Config {
  SpaceConfig space{};

  // reward model
  int hidden_layers = 2;
  int hidden_units = 100;
  double learning_rate = 0.002;
  int batch_size = 32;
  std::size_t replay_memory = 700;
  std::size_t trajectory_capacity = 64;
  CreditOptions credit{};

  // exploration
  EpsilonSchedule epsilon{};
  double action_hz = 10.0;
  TileCoderOptions tiles{};
  BonusParams bonus{};
  PolicyConfig policy{};

  // service
  std::string bind_address = "127.0.0.1";
  int port_osc = 9000;
  int port_ui = 9001;
  std::string osc_out;  // optional "host:port" that always receives outbound OSC
  std::string log_path;
  std::uint64_t seed = 0;
  StartMode mode = StartMode::Autonomous;

  double tick_period() const { return 1.0 / action_hz; }
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sets one documented key. Throws ConfigError for unknown keys or bad values.
void set_config_value(Config& cfg, std::string_view key, std::string_view value);

/// Flat "key = value" text; '#' starts a comment. Later keys win.
Config parse_config(std::istream& in, Config base = {});
Config load_config(const std::string& path, Config base = {});
void write_config(std::ostream& out, const Config& cfg);

std::string to_string(StartMode mode);
StartMode parse_start_mode(std::string_view text);

}  // namespace coexplorer
