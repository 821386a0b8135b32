#include "coexplorer/config.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace coexplorer {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("config: bad value '" + std::string(text) + "' for key '" + std::string(key) + "'");
  return value;
}

std::vector<double> parse_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    out.push_back(parse_number<double>(key, trim(text.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string join(const std::vector<double>& values) {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
  return os.str();
}

}  // namespace

void Config::validate() const {
  space.validate();
  if (hidden_layers < 0 || hidden_units < 1) throw ConfigError("config: bad network shape");
  if (!(learning_rate > 0.0)) throw ConfigError("config: learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
  if (replay_memory < 1) throw ConfigError("config: replay_memory must be >= 1");
  if (credit.reward_length < 1) throw ConfigError("config: reward_length must be >= 1");
  if (trajectory_capacity < static_cast<std::size_t>(credit.reward_length))
    throw ConfigError("config: trajectory_capacity must be >= reward_length");
  if (!(credit.reward_value > 0.0)) throw ConfigError("config: reward_value must be > 0");
  if (!(0.0 <= credit.min_delay && credit.min_delay <= credit.max_delay))
    throw ConfigError("config: need 0 <= credit_min_delay <= credit_max_delay");
  epsilon.validate();
  if (!(action_hz > 0.0)) throw ConfigError("config: action_hz must be > 0");
  if (tiles.num_tilings < 1 || !(tiles.tile_width > 0.0)) throw ConfigError("config: bad tile coding");
  if (!(bonus.c > 0.0)) throw ConfigError("config: bonus_c must be > 0");
  if (policy.change_zone_samples < 1) throw ConfigError("config: change_zone_samples must be >= 1");
}

void set_config_value(Config& cfg, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "n") {
    cfg.space.n = parse_number<int>(key, value);
  } else if (key == "step") {
    cfg.space.step = parse_number<double>(key, value);
  } else if (key == "lo") {
    cfg.space.lo = parse_list(key, value);
  } else if (key == "hi") {
    cfg.space.hi = parse_list(key, value);
  } else if (key == "hidden_layers") {
    cfg.hidden_layers = parse_number<int>(key, value);
  } else if (key == "hidden_units") {
    cfg.hidden_units = parse_number<int>(key, value);
  } else if (key == "learning_rate") {
    cfg.learning_rate = parse_number<double>(key, value);
  } else if (key == "batch_size") {
    cfg.batch_size = parse_number<int>(key, value);
  } else if (key == "replay_memory") {
    cfg.replay_memory = parse_number<std::size_t>(key, value);
  } else if (key == "trajectory_capacity") {
    cfg.trajectory_capacity = parse_number<std::size_t>(key, value);
  } else if (key == "reward_value") {
    cfg.credit.reward_value = parse_number<double>(key, value);
  } else if (key == "reward_length") {
    cfg.credit.reward_length = parse_number<int>(key, value);
  } else if (key == "credit_min_delay") {
    cfg.credit.min_delay = parse_number<double>(key, value);
  } else if (key == "credit_max_delay") {
    cfg.credit.max_delay = parse_number<double>(key, value);
  } else if (key == "guiding_curve") {
    if (value == "exponential") {
      cfg.credit.curve = GuidingCurve::Exponential;
    } else if (value == "gamma") {
      cfg.credit.curve = GuidingCurve::Gamma;
    } else {
      throw ConfigError("config: guiding_curve must be exponential or gamma");
    }
  } else if (key == "gamma_shape") {
    cfg.credit.gamma_shape = parse_number<double>(key, value);
  } else if (key == "gamma_scale") {
    cfg.credit.gamma_scale = parse_number<double>(key, value);
  } else if (key == "epsilon_start") {
    cfg.epsilon.start = parse_number<double>(key, value);
  } else if (key == "epsilon_end") {
    cfg.epsilon.end = parse_number<double>(key, value);
  } else if (key == "epsilon_decay") {
    cfg.epsilon.decay = parse_number<double>(key, value);
  } else if (key == "action_hz") {
    cfg.action_hz = parse_number<double>(key, value);
  } else if (key == "num_tilings") {
    cfg.tiles.num_tilings = parse_number<int>(key, value);
  } else if (key == "tile_width") {
    cfg.tiles.tile_width = parse_number<double>(key, value);
  } else if (key == "tile_offset_seed") {
    if (value.empty() || value == "none") {
      cfg.tiles.offset_seed.reset();
    } else {
      cfg.tiles.offset_seed = parse_number<std::uint64_t>(key, value);
    }
  } else if (key == "bonus_beta") {
    cfg.bonus.beta = parse_number<double>(key, value);
  } else if (key == "bonus_c") {
    cfg.bonus.c = parse_number<double>(key, value);
  } else if (key == "change_zone_samples") {
    cfg.policy.change_zone_samples = parse_number<int>(key, value);
  } else if (key == "bind_address") {
    cfg.bind_address = std::string(trim(value));
  } else if (key == "port_osc") {
    cfg.port_osc = parse_number<int>(key, value);
  } else if (key == "port_ui") {
    cfg.port_ui = parse_number<int>(key, value);
  } else if (key == "osc_out") {
    cfg.osc_out = std::string(value);
  } else if (key == "log_path") {
    cfg.log_path = std::string(value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "mode") {
    cfg.mode = parse_start_mode(value);
  } else {
    throw ConfigError("config: unknown key '" + std::string(key) + "'");
  }
}

Config parse_config(std::istream& in, Config cfg) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    set_config_value(cfg, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  cfg.validate();
  return cfg;
}

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  return parse_config(in, std::move(base));
}

void write_config(std::ostream& out, const Config& cfg) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "n = " << cfg.space.n << '\n'
      << "step = " << cfg.space.step << '\n';
  if (!cfg.space.lo.empty()) out << "lo = " << join(cfg.space.lo) << '\n';
  if (!cfg.space.hi.empty()) out << "hi = " << join(cfg.space.hi) << '\n';
  out << "hidden_layers = " << cfg.hidden_layers << '\n'
      << "hidden_units = " << cfg.hidden_units << '\n'
      << "learning_rate = " << cfg.learning_rate << '\n'
      << "batch_size = " << cfg.batch_size << '\n'
      << "replay_memory = " << cfg.replay_memory << '\n'
      << "trajectory_capacity = " << cfg.trajectory_capacity << '\n'
      << "reward_value = " << cfg.credit.reward_value << '\n'
      << "reward_length = " << cfg.credit.reward_length << '\n'
      << "credit_min_delay = " << cfg.credit.min_delay << '\n'
      << "credit_max_delay = " << cfg.credit.max_delay << '\n'
      << "guiding_curve = " << (cfg.credit.curve == GuidingCurve::Gamma ? "gamma" : "exponential") << '\n'
      << "gamma_shape = " << cfg.credit.gamma_shape << '\n'
      << "gamma_scale = " << cfg.credit.gamma_scale << '\n'
      << "epsilon_start = " << cfg.epsilon.start << '\n'
      << "epsilon_end = " << cfg.epsilon.end << '\n'
      << "epsilon_decay = " << cfg.epsilon.decay << '\n'
      << "action_hz = " << cfg.action_hz << '\n'
      << "num_tilings = " << cfg.tiles.num_tilings << '\n'
      << "tile_width = " << cfg.tiles.tile_width << '\n';
  if (cfg.tiles.offset_seed) out << "tile_offset_seed = " << *cfg.tiles.offset_seed << '\n';
  out << "bonus_beta = " << cfg.bonus.beta << '\n'
      << "bonus_c = " << cfg.bonus.c << '\n'
      << "change_zone_samples = " << cfg.policy.change_zone_samples << '\n'
      << "bind_address = " << cfg.bind_address << '\n'
      << "port_osc = " << cfg.port_osc << '\n'
      << "port_ui = " << cfg.port_ui << '\n';
  if (!cfg.osc_out.empty()) out << "osc_out = " << cfg.osc_out << '\n';
  if (!cfg.log_path.empty()) out << "log_path = " << cfg.log_path << '\n';
  out << "seed = " << cfg.seed << '\n'
      << "mode = " << to_string(cfg.mode) << '\n';
  out.precision(old_precision);
}

std::string to_string(StartMode mode) { return mode == StartMode::Autonomous ? "auto" : "stepwise"; }

StartMode parse_start_mode(std::string_view text) {
  if (text == "auto") return StartMode::Autonomous;
  if (text == "stepwise") return StartMode::Stepwise;
  throw ConfigError("mode must be auto or stepwise");
}

}  // namespace coexplorer
