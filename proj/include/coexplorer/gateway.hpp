#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "coexplorer/bounded_queue.hpp"
#include "coexplorer/config.hpp"
#include "coexplorer/messages.hpp"
#include "coexplorer/session.hpp"

namespace coexplorer {

/// A decoded inbound message and the time it arrived (session clock).
struct InboundItem {
  InboundMessage message;
  double received = 0.0;
};

struct GatewayOptions {
  std::string bind_address = "127.0.0.1";
  int osc_port = 9000;  // 0 picks a free port
  int ui_port = 9001;   // 0 picks a free port
  std::string osc_out;  // optional host:port that always gets outbound OSC
  int dims = 10;
  std::size_t inbound_capacity = 1024;
  std::size_t outbound_capacity = 1024;  // per UI client, in lines
};

/// Socket side of the service: an OSC datagram endpoint and a line-delimited
/// JSON stream endpoint feeding one inbound queue, and a fan-out of outbound
/// messages to every known peer.
///
/// Datagram peers are remembered from the first packet they send. Decode
/// failures are answered to the sender with an /error message.
class Gateway {
 public:
  /// Binds both endpoints; throws std::runtime_error naming the port on failure.
  explicit Gateway(GatewayOptions options);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  int osc_port() const;
  int ui_port() const;

  void start();
  void stop();

  BoundedQueue<InboundItem>& inbound();
  void publish(const std::vector<OutboundMessage>& messages);

  std::size_t ui_clients() const;
  std::size_t osc_peers() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Applies one inbound message to the session. Session-level failures
/// (unknown history id, wrong arity, halted training) become /error messages.
void dispatch(Session& session, const InboundItem& item);

/// Runs the agent: Autonomous mode ticks at the configured rate and drains the
/// inbound queue at tick boundaries; the other modes handle messages as they
/// arrive. Returns when `stop` is requested.
void run_control_loop(Session& session, Gateway& gateway, std::stop_token stop);

/// Binds the gateway for `config`, announces the session and runs the control
/// loop until `stop` is requested.
void serve(const Config& config, Session& session, std::stop_token stop);

}  // namespace coexplorer
