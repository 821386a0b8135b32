#include "coexplorer/protocol.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include <nlohmann/json.hpp>

namespace coexplorer {

namespace osc {

namespace {

constexpr int kMaxBundleDepth = 8;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_string(std::vector<std::uint8_t>& out, std::string_view s) {
  if (s.find('\0') != std::string_view::npos) throw MalformedMessage("OSC strings cannot contain NUL");
  out.insert(out.end(), s.begin(), s.end());
  out.push_back(0);
  while (out.size() % 4 != 0) out.push_back(0);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | bytes_[pos_++];
    return v;
  }

  std::string padded_string() {
    std::size_t end = pos_;
    while (end < bytes_.size() && bytes_[end] != 0) ++end;
    if (end == bytes_.size()) throw MalformedMessage("unterminated OSC string");
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), end - pos_);
    const std::size_t padded = (end - pos_ + 1 + 3) / 4 * 4;
    need(padded);
    pos_ += padded;
    return s;
  }

  std::span<const std::uint8_t> take(std::size_t count) {
    need(count);
    auto view = bytes_.subspan(pos_, count);
    pos_ += count;
    return view;
  }

 private:
  void need(std::size_t count) const {
    if (remaining() < count) throw MalformedMessage("truncated OSC packet");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

Message parse_message(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  Message msg;
  msg.address = r.padded_string();
  if (msg.address.empty() || msg.address.front() != '/') throw MalformedMessage("OSC address must start with '/'");
  if (r.done()) return msg;
  const std::string tags = r.padded_string();
  if (tags.empty() || tags.front() != ',') throw MalformedMessage("OSC type tag string must start with ','");
  for (std::size_t i = 1; i < tags.size(); ++i) {
    switch (tags[i]) {
      case 'i': msg.args.emplace_back(static_cast<std::int32_t>(r.u32())); break;
      case 'h': msg.args.emplace_back(static_cast<std::int64_t>(r.u64())); break;
      case 'f': msg.args.emplace_back(std::bit_cast<float>(r.u32())); break;
      case 'd': msg.args.emplace_back(std::bit_cast<double>(r.u64())); break;
      case 's': msg.args.emplace_back(r.padded_string()); break;
      default: throw MalformedMessage(std::string("unsupported OSC type tag '") + tags[i] + "'");
    }
  }
  if (!r.done()) throw MalformedMessage("trailing bytes after OSC arguments");
  return msg;
}

void parse_into(std::span<const std::uint8_t> bytes, std::vector<Message>& out, int depth) {
  if (bytes.empty() || bytes.size() % 4 != 0) throw MalformedMessage("OSC packet size must be a positive multiple of 4");
  static constexpr char kBundle[] = "#bundle";
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kBundle, 8) == 0) {
    if (depth >= kMaxBundleDepth) throw MalformedMessage("OSC bundles nested too deeply");
    Reader r(bytes);
    r.take(8);
    r.u64();  // time tag; everything is handled on arrival
    while (!r.done()) {
      const std::uint32_t size = r.u32();
      if (size > r.remaining()) throw MalformedMessage("OSC bundle element overruns the packet");
      parse_into(r.take(size), out, depth + 1);
    }
    return;
  }
  out.push_back(parse_message(bytes));
}

}  // namespace

std::vector<std::uint8_t> serialize(const Message& msg) {
  if (msg.address.empty() || msg.address.front() != '/') throw MalformedMessage("OSC address must start with '/'");
  std::vector<std::uint8_t> out;
  put_string(out, msg.address);
  std::string tags = ",";
  for (const Argument& a : msg.args) tags.push_back("ihfds"[a.index()]);
  put_string(out, tags);
  for (const Argument& a : msg.args) {
    std::visit(
        [&out](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, std::int32_t>) {
            put_u32(out, static_cast<std::uint32_t>(v));
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            put_u64(out, static_cast<std::uint64_t>(v));
          } else if constexpr (std::is_same_v<T, float>) {
            put_u32(out, std::bit_cast<std::uint32_t>(v));
          } else if constexpr (std::is_same_v<T, double>) {
            put_u64(out, std::bit_cast<std::uint64_t>(v));
          } else {
            put_string(out, v);
          }
        },
        a);
  }
  return out;
}

std::vector<Message> parse_packet(std::span<const std::uint8_t> bytes) {
  std::vector<Message> out;
  parse_into(bytes, out, 0);
  return out;
}

}  // namespace osc

namespace {

using osc::Argument;

[[noreturn]] void malformed(std::string_view address, std::string_view reason) {
  throw MalformedMessage(std::string(address) + ": " + std::string(reason));
}

void expect_arity(const osc::Message& m, std::size_t count) {
  if (m.args.size() != count)
    malformed(m.address, "expected " + std::to_string(count) + " argument(s), got " + std::to_string(m.args.size()));
}

bool is_numeric(const Argument& a) { return !std::holds_alternative<std::string>(a); }

double as_double(const osc::Message& m, const Argument& a) {
  if (!is_numeric(a)) malformed(m.address, "expected a number");
  return std::visit(
      [](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::string>) {
          return 0.0;
        } else {
          return static_cast<double>(v);
        }
      },
      a);
}

std::int64_t as_integer(const osc::Message& m, const Argument& a) {
  if (const auto* i = std::get_if<std::int32_t>(&a)) return *i;
  if (const auto* h = std::get_if<std::int64_t>(&a)) return *h;
  const double v = as_double(m, a);
  if (!std::isfinite(v) || v != std::floor(v) || std::abs(v) > 9.0e15) malformed(m.address, "expected an integer");
  return static_cast<std::int64_t>(v);
}

const std::string& as_string(const osc::Message& m, const Argument& a) {
  const auto* s = std::get_if<std::string>(&a);
  if (!s) malformed(m.address, "expected a string");
  return *s;
}

int valence_of(const osc::Message& m) {
  expect_arity(m, 1);
  const double v = as_double(m, m.args[0]);
  if (v != 1.0 && v != -1.0) malformed(m.address, "valence must be +1 or -1");
  return static_cast<int>(v);
}

Argument integer_arg(std::int64_t v) {
  if (v >= std::numeric_limits<std::int32_t>::min() && v <= std::numeric_limits<std::int32_t>::max())
    return static_cast<std::int32_t>(v);
  return v;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

nlohmann::json to_json(const osc::Message& m) {
  nlohmann::json args = nlohmann::json::array();
  for (const Argument& a : m.args) std::visit([&args](const auto& v) { args.push_back(v); }, a);
  return {{"address", m.address}, {"args", std::move(args)}};
}

osc::Message from_json(std::string_view line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw MalformedMessage("not a JSON object");
  const auto addr = j.find("address");
  if (addr == j.end() || !addr->is_string()) throw MalformedMessage("missing string field 'address'");
  osc::Message m;
  m.address = addr->get<std::string>();
  if (m.address.empty() || m.address.front() != '/') throw MalformedMessage("address must start with '/'");
  const auto args = j.find("args");
  if (args == j.end()) return m;
  if (!args->is_array()) malformed(m.address, "'args' must be an array");
  for (const auto& a : *args) {
    if (a.is_number_integer()) {
      m.args.push_back(integer_arg(a.get<std::int64_t>()));
    } else if (a.is_number_float()) {
      m.args.emplace_back(a.get<double>());
    } else if (a.is_string()) {
      m.args.emplace_back(a.get<std::string>());
    } else {
      malformed(m.address, "arguments must be numbers or strings");
    }
  }
  return m;
}

}  // namespace

std::string_view address_of(const InboundMessage& msg) {
  return std::visit(overloaded{
                        [](const in::GuideFeedback&) { return std::string_view("/feedback/guide"); },
                        [](const in::ZoneFeedback&) { return std::string_view("/feedback/zone"); },
                        [](const in::Auto&) { return std::string_view("/command/auto"); },
                        [](const in::ChangeZone&) { return std::string_view("/command/change_zone"); },
                        [](const in::Back&) { return std::string_view("/command/back"); },
                        [](const in::Reset&) { return std::string_view("/command/reset"); },
                        [](const in::SetState&) { return std::string_view("/state/set"); },
                    },
                    msg);
}

std::string_view address_of(const OutboundMessage& msg) {
  return std::visit(overloaded{
                        [](const out::State&) { return std::string_view("/state"); },
                        [](const out::HistoryAppend&) { return std::string_view("/history/append"); },
                        [](const out::ModeChange&) { return std::string_view("/mode"); },
                        [](const out::Epsilon&) { return std::string_view("/epsilon"); },
                        [](const out::Error&) { return std::string_view("/error"); },
                    },
                    msg);
}

osc::Message to_osc(const InboundMessage& msg) {
  osc::Message m{std::string(address_of(msg)), {}};
  std::visit(overloaded{
                 [&m](const in::GuideFeedback& f) { m.args.emplace_back(static_cast<std::int32_t>(f.valence)); },
                 [&m](const in::ZoneFeedback& f) { m.args.emplace_back(static_cast<std::int32_t>(f.valence)); },
                 [&m](const in::Auto& a) { m.args.emplace_back(std::string(a.start ? "start" : "stop")); },
                 [](const in::ChangeZone&) {},
                 [&m](const in::Back& b) { m.args.push_back(integer_arg(b.history_id)); },
                 [](const in::Reset&) {},
                 [&m](const in::SetState& s) {
                   for (double v : s.values) m.args.emplace_back(v);
                 },
             },
             msg);
  return m;
}

osc::Message to_osc(const OutboundMessage& msg) {
  osc::Message m{std::string(address_of(msg)), {}};
  std::visit(overloaded{
                 [&m](const out::State& s) {
                   m.args.push_back(integer_arg(s.t));
                   for (double v : s.values) m.args.emplace_back(v);
                 },
                 [&m](const out::HistoryAppend& h) {
                   m.args.push_back(integer_arg(h.id));
                   m.args.emplace_back(std::string(to_string(h.tag)));
                 },
                 [&m](const out::ModeChange& c) { m.args.emplace_back(std::string(to_string(c.mode))); },
                 [&m](const out::Epsilon& e) { m.args.emplace_back(e.value); },
                 [&m](const out::Error& e) {
                   m.args.emplace_back(e.code);
                   m.args.emplace_back(e.detail);
                 },
             },
             msg);
  return m;
}

InboundMessage inbound_from_osc(const osc::Message& m, int dims) {
  const std::string& a = m.address;
  if (a == "/feedback/guide") return in::GuideFeedback{valence_of(m)};
  if (a == "/feedback/zone") return in::ZoneFeedback{valence_of(m)};
  if (a == "/command/auto") {
    expect_arity(m, 1);
    if (const auto* s = std::get_if<std::string>(&m.args[0])) {
      if (*s == "start") return in::Auto{true};
      if (*s == "stop") return in::Auto{false};
      malformed(a, "expected \"start\" or \"stop\"");
    }
    const std::int64_t flag = as_integer(m, m.args[0]);
    if (flag != 0 && flag != 1) malformed(a, "expected \"start\" or \"stop\"");
    return in::Auto{flag == 1};
  }
  if (a == "/command/change_zone") {
    expect_arity(m, 0);
    return in::ChangeZone{};
  }
  if (a == "/command/back") {
    expect_arity(m, 1);
    const std::int64_t id = as_integer(m, m.args[0]);
    if (id < 0) malformed(a, "history id must be >= 0");
    return in::Back{id};
  }
  if (a == "/command/reset") {
    expect_arity(m, 0);
    return in::Reset{};
  }
  if (a == "/state/set") {
    expect_arity(m, static_cast<std::size_t>(dims));
    in::SetState s;
    s.values.reserve(m.args.size());
    for (const Argument& arg : m.args) {
      const double v = as_double(m, arg);
      if (!std::isfinite(v)) malformed(a, "values must be finite");
      s.values.push_back(v);
    }
    return s;
  }
  malformed(a, "unknown address");
}

OutboundMessage outbound_from_osc(const osc::Message& m) {
  const std::string& a = m.address;
  if (a == "/state") {
    if (m.args.empty()) malformed(a, "missing step counter");
    out::State s;
    s.t = as_integer(m, m.args[0]);
    for (std::size_t i = 1; i < m.args.size(); ++i) s.values.push_back(as_double(m, m.args[i]));
    return s;
  }
  try {
    if (a == "/history/append") {
      expect_arity(m, 2);
      return out::HistoryAppend{as_integer(m, m.args[0]), parse_history_tag(as_string(m, m.args[1]))};
    }
    if (a == "/mode") {
      expect_arity(m, 1);
      return out::ModeChange{parse_mode(as_string(m, m.args[0]))};
    }
  } catch (const std::invalid_argument& e) {
    malformed(a, e.what());
  }
  if (a == "/epsilon") {
    expect_arity(m, 1);
    return out::Epsilon{as_double(m, m.args[0])};
  }
  if (a == "/error") {
    expect_arity(m, 2);
    return out::Error{as_string(m, m.args[0]), as_string(m, m.args[1])};
  }
  malformed(a, "unknown address");
}

std::vector<std::uint8_t> encode_osc(const InboundMessage& msg) { return osc::serialize(to_osc(msg)); }
std::vector<std::uint8_t> encode_osc(const OutboundMessage& msg) { return osc::serialize(to_osc(msg)); }

InboundMessage decode_inbound_osc(std::span<const std::uint8_t> bytes, int dims) {
  const auto msgs = osc::parse_packet(bytes);
  if (msgs.size() != 1) throw MalformedMessage("expected exactly one OSC message");
  return inbound_from_osc(msgs.front(), dims);
}

OutboundMessage decode_outbound_osc(std::span<const std::uint8_t> bytes) {
  const auto msgs = osc::parse_packet(bytes);
  if (msgs.size() != 1) throw MalformedMessage("expected exactly one OSC message");
  return outbound_from_osc(msgs.front());
}

std::string encode_json(const InboundMessage& msg) { return to_json(to_osc(msg)).dump(); }
std::string encode_json(const OutboundMessage& msg) { return to_json(to_osc(msg)).dump(); }

InboundMessage decode_inbound_json(std::string_view line, int dims) { return inbound_from_osc(from_json(line), dims); }
OutboundMessage decode_outbound_json(std::string_view line) { return outbound_from_osc(from_json(line)); }

}  // namespace coexplorer
