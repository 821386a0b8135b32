#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "coexplorer/messages.hpp"

namespace coexplorer {

/// Any payload that cannot be mapped onto the message vocabulary.
class MalformedMessage : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace osc {

/// Supported type tags: i (int32), h (int64), f (float32), d (float64), s (string).
using Argument = std::variant<std::int32_t, std::int64_t, float, double, std::string>;

struct Message {
  std::string address;
  std::vector<Argument> args;
  bool operator==(const Message&) const = default;
};

/// Big-endian OSC 1.0 layout: padded address, padded ",tags", arguments.
std::vector<std::uint8_t> serialize(const Message& msg);

/// One message, or every message of a (possibly nested) #bundle.
std::vector<Message> parse_packet(std::span<const std::uint8_t> bytes);

}  // namespace osc

osc::Message to_osc(const InboundMessage& msg);
osc::Message to_osc(const OutboundMessage& msg);

/// `dims` is the state dimension count expected by /state/set.
InboundMessage inbound_from_osc(const osc::Message& msg, int dims);
OutboundMessage outbound_from_osc(const osc::Message& msg);

std::vector<std::uint8_t> encode_osc(const InboundMessage& msg);
std::vector<std::uint8_t> encode_osc(const OutboundMessage& msg);
InboundMessage decode_inbound_osc(std::span<const std::uint8_t> bytes, int dims);
OutboundMessage decode_outbound_osc(std::span<const std::uint8_t> bytes);

/// JSON mirror, one object per line: {"address": "/state/set", "args": [...]}.
/// Floats are printed as the shortest decimal that parses back to the same double.
std::string encode_json(const InboundMessage& msg);
std::string encode_json(const OutboundMessage& msg);
InboundMessage decode_inbound_json(std::string_view line, int dims);
OutboundMessage decode_outbound_json(std::string_view line);

std::string_view address_of(const InboundMessage& msg);
std::string_view address_of(const OutboundMessage& msg);

}  // namespace coexplorer
