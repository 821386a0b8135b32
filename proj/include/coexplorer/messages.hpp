#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace coexplorer {

enum class Mode { Autonomous, Stepwise, Paused };
enum class HistoryTag { Neutral, Positive, Negative };

std::string_view to_string(Mode mode);
std::string_view to_string(HistoryTag tag);
/// Both throw std::invalid_argument on unknown names.
Mode parse_mode(std::string_view text);
HistoryTag parse_history_tag(std::string_view text);

// Inbound vocabulary (peer -> agent).
namespace in {

struct GuideFeedback {
  int valence = 1;
  bool operator==(const GuideFeedback&) const = default;
};
struct ZoneFeedback {
  int valence = 1;
  bool operator==(const ZoneFeedback&) const = default;
};
struct Auto {
  bool start = true;
  bool operator==(const Auto&) const = default;
};
struct ChangeZone {
  bool operator==(const ChangeZone&) const = default;
};
struct Back {
  std::int64_t history_id = 0;
  bool operator==(const Back&) const = default;
};
struct Reset {
  bool operator==(const Reset&) const = default;
};
struct SetState {
  std::vector<double> values;
  bool operator==(const SetState&) const = default;
};

}  // namespace in

using InboundMessage =
    std::variant<in::GuideFeedback, in::ZoneFeedback, in::Auto, in::ChangeZone, in::Back, in::Reset, in::SetState>;

// Outbound vocabulary (agent -> peers).
namespace out {

struct State {
  std::int64_t t = 0;
  std::vector<double> values;
  bool operator==(const State&) const = default;
};
/// Also re-sent with the same id when an entry's tag changes; id 0 starts a
/// new history.
struct HistoryAppend {
  std::int64_t id = 0;
  HistoryTag tag = HistoryTag::Neutral;
  bool operator==(const HistoryAppend&) const = default;
};
struct ModeChange {
  Mode mode = Mode::Stepwise;
  bool operator==(const ModeChange&) const = default;
};
struct Epsilon {
  double value = 0.0;
  bool operator==(const Epsilon&) const = default;
};
struct Error {
  std::string code;
  std::string detail;
  bool operator==(const Error&) const = default;
};

}  // namespace out

using OutboundMessage = std::variant<out::State, out::HistoryAppend, out::ModeChange, out::Epsilon, out::Error>;

}  // namespace coexplorer
