#include "coexplorer/messages.hpp"

#include <stdexcept>

namespace coexplorer {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Autonomous: return "autonomous";
    case Mode::Stepwise: return "stepwise";
    case Mode::Paused: return "paused";
  }
  return "?";
}

std::string_view to_string(HistoryTag tag) {
  switch (tag) {
    case HistoryTag::Neutral: return "neutral";
    case HistoryTag::Positive: return "positive";
    case HistoryTag::Negative: return "negative";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "autonomous") return Mode::Autonomous;
  if (text == "stepwise") return Mode::Stepwise;
  if (text == "paused") return Mode::Paused;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

HistoryTag parse_history_tag(std::string_view text) {
  if (text == "neutral") return HistoryTag::Neutral;
  if (text == "positive") return HistoryTag::Positive;
  if (text == "negative") return HistoryTag::Negative;
  throw std::invalid_argument("unknown history tag '" + std::string(text) + "'");
}

}  // namespace coexplorer
