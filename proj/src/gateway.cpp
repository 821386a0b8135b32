#include "coexplorer/gateway.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <deque>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>

#include "coexplorer/protocol.hpp"

namespace coexplorer {

namespace {

constexpr std::size_t kMaxOscPeers = 64;
constexpr std::size_t kMaxLineBytes = 64 * 1024;
constexpr std::size_t kDatagramBytes = 64 * 1024;

std::runtime_error socket_error(const std::string& what) {
  return std::runtime_error(what + ": " + std::strerror(errno));
}

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

sockaddr_in make_address(const std::string& host, int port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    addrinfo* res = nullptr;
    if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || !res)
      throw std::runtime_error("cannot resolve host '" + host + "'");
    addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
    freeaddrinfo(res);
  }
  return addr;
}

int bound_port(int fd) {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

int open_socket(int type, const std::string& host, int port, const char* label) {
  const int fd = ::socket(AF_INET, type, 0);
  if (fd < 0) throw socket_error(std::string("cannot create ") + label + " socket");
  const int yes = 1;
  setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  const sockaddr_in addr = make_address(host, port);
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    const int err = errno;
    ::close(fd);
    errno = err;
    throw socket_error(std::string("cannot bind ") + label + " port " + std::to_string(port) + " on " + host);
  }
  set_nonblocking(fd);
  return fd;
}

bool same_peer(const sockaddr_in& a, const sockaddr_in& b) {
  return a.sin_addr.s_addr == b.sin_addr.s_addr && a.sin_port == b.sin_port;
}

struct UiClient {
  int fd = -1;
  std::string read_buffer;
  std::deque<std::string> lines;  // pending outbound lines, newline included
  std::size_t front_offset = 0;   // bytes of lines.front() already written
};

}  // namespace

struct Gateway::Impl {
  GatewayOptions options;
  int osc_fd = -1;
  int listen_fd = -1;
  int wake_read = -1;
  int wake_write = -1;
  std::optional<sockaddr_in> osc_out;

  BoundedQueue<InboundItem> inbound;
  BoundedQueue<OutboundMessage> outbound;

  mutable std::mutex peers_mutex;
  std::vector<sockaddr_in> osc_peers;
  std::map<int, UiClient> clients;
  std::atomic<std::size_t> client_count{0};

  // Replayed to UI clients when they connect.
  std::optional<OutboundMessage> last_state, last_mode, last_epsilon;
  std::vector<out::HistoryAppend> history;

  std::jthread thread;

  explicit Impl(GatewayOptions opts)
      : options(std::move(opts)), inbound(options.inbound_capacity), outbound(options.inbound_capacity * 4) {}

  ~Impl() {
    for (int fd : {osc_fd, listen_fd, wake_read, wake_write})
      if (fd >= 0) ::close(fd);
    for (auto& [fd, c] : clients) ::close(fd);
  }

  void remember_peer(const sockaddr_in& from) {
    std::lock_guard lock(peers_mutex);
    for (const auto& p : osc_peers)
      if (same_peer(p, from)) return;
    if (osc_peers.size() >= kMaxOscPeers) osc_peers.erase(osc_peers.begin());
    osc_peers.push_back(from);
  }

  void send_datagram(const sockaddr_in& to, const std::vector<std::uint8_t>& bytes) const {
    ::sendto(osc_fd, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&to), sizeof to);
  }

  void enqueue_line(UiClient& c, std::string line) {
    c.lines.push_back(std::move(line));
    // Drop the oldest whole lines, never the one being written.
    while (c.lines.size() > options.outbound_capacity && c.lines.size() > 1) {
      if (c.front_offset > 0) {
        c.lines.erase(c.lines.begin() + 1);
      } else {
        c.lines.pop_front();
      }
    }
  }

  void handle_datagram() {
    std::vector<std::uint8_t> buffer(kDatagramBytes);
    for (;;) {
      sockaddr_in from{};
      socklen_t len = sizeof from;
      const ssize_t got =
          ::recvfrom(osc_fd, buffer.data(), buffer.size(), 0, reinterpret_cast<sockaddr*>(&from), &len);
      if (got < 0) return;
      remember_peer(from);
      const double received = steady_seconds();
      try {
        const auto msgs = osc::parse_packet({buffer.data(), static_cast<std::size_t>(got)});
        for (const auto& m : msgs) inbound.push({inbound_from_osc(m, options.dims), received});
      } catch (const MalformedMessage& e) {
        send_datagram(from, encode_osc(OutboundMessage{out::Error{"malformed_message", e.what()}}));
      }
    }
  }

  void accept_clients() {
    for (;;) {
      const int fd = ::accept(listen_fd, nullptr, nullptr);
      if (fd < 0) return;
      set_nonblocking(fd);
      UiClient& c = clients[fd];
      c.fd = fd;
      for (const auto* cached : {&last_mode, &last_epsilon})
        if (*cached) enqueue_line(c, encode_json(**cached) + "\n");
      for (const auto& h : history) enqueue_line(c, encode_json(OutboundMessage{h}) + "\n");
      if (last_state) enqueue_line(c, encode_json(*last_state) + "\n");
    }
  }

  /// Returns false when the client should be dropped.
  bool read_client(UiClient& c) {
    char chunk[4096];
    for (;;) {
      const ssize_t got = ::recv(c.fd, chunk, sizeof chunk, 0);
      if (got == 0) return false;
      if (got < 0) return errno == EAGAIN || errno == EWOULDBLOCK;
      c.read_buffer.append(chunk, static_cast<std::size_t>(got));
      std::size_t nl;
      while ((nl = c.read_buffer.find('\n')) != std::string::npos) {
        std::string line = c.read_buffer.substr(0, nl);
        c.read_buffer.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
          inbound.push({decode_inbound_json(line, options.dims), steady_seconds()});
        } catch (const MalformedMessage& e) {
          enqueue_line(c, encode_json(OutboundMessage{out::Error{"malformed_message", e.what()}}) + "\n");
        }
      }
      if (c.read_buffer.size() > kMaxLineBytes) {
        c.read_buffer.clear();
        enqueue_line(c, encode_json(OutboundMessage{out::Error{"malformed_message", "line too long"}}) + "\n");
      }
    }
  }

  bool flush_client(UiClient& c) {
    while (!c.lines.empty()) {
      const std::string& line = c.lines.front();
      const ssize_t sent =
          ::send(c.fd, line.data() + c.front_offset, line.size() - c.front_offset, MSG_NOSIGNAL);
      if (sent < 0) return errno == EAGAIN || errno == EWOULDBLOCK;
      c.front_offset += static_cast<std::size_t>(sent);
      if (c.front_offset == line.size()) {
        c.lines.pop_front();
        c.front_offset = 0;
      }
    }
    return true;
  }

  void cache(const OutboundMessage& msg) {
    if (std::holds_alternative<out::State>(msg)) last_state = msg;
    if (std::holds_alternative<out::ModeChange>(msg)) last_mode = msg;
    if (std::holds_alternative<out::Epsilon>(msg)) last_epsilon = msg;
    if (const auto* h = std::get_if<out::HistoryAppend>(&msg)) {
      if (h->id == 0) history.clear();
      if (h->id >= 0 && static_cast<std::size_t>(h->id) < history.size()) {
        history[static_cast<std::size_t>(h->id)] = *h;
      } else if (history.size() < 100000) {
        history.push_back(*h);
      }
    }
  }

  void fan_out() {
    std::vector<OutboundMessage> msgs = outbound.drain();
    if (msgs.empty()) return;
    std::vector<sockaddr_in> peers;
    {
      std::lock_guard lock(peers_mutex);
      peers = osc_peers;
    }
    if (osc_out) peers.push_back(*osc_out);
    for (const OutboundMessage& m : msgs) {
      cache(m);
      const auto bytes = encode_osc(m);
      for (const auto& p : peers) send_datagram(p, bytes);
      const std::string line = encode_json(m) + "\n";
      for (auto& [fd, c] : clients) enqueue_line(c, line);
    }
  }

  void run(std::stop_token stop) {
    while (!stop.stop_requested()) {
      std::vector<pollfd> fds;
      fds.push_back({osc_fd, POLLIN, 0});
      fds.push_back({listen_fd, POLLIN, 0});
      fds.push_back({wake_read, POLLIN, 0});
      for (auto& [fd, c] : clients)
        fds.push_back({fd, static_cast<short>(POLLIN | (c.lines.empty() ? 0 : POLLOUT)), 0});

      if (::poll(fds.data(), fds.size(), 20) < 0 && errno != EINTR) {
        std::cerr << "coexplorer: poll failed: " << std::strerror(errno) << '\n';
        return;
      }
      if (fds[2].revents & POLLIN) {
        char drain[256];
        while (::read(wake_read, drain, sizeof drain) > 0) {
        }
      }
      if (fds[0].revents & POLLIN) handle_datagram();
      if (fds[1].revents & POLLIN) accept_clients();
      client_count = clients.size();

      std::vector<int> dead;
      for (std::size_t i = 3; i < fds.size(); ++i) {
        UiClient& c = clients[fds[i].fd];
        bool alive = !(fds[i].revents & (POLLERR | POLLHUP | POLLNVAL)) || (fds[i].revents & POLLIN);
        if (alive && (fds[i].revents & POLLIN)) alive = read_client(c);
        if (!alive) dead.push_back(fds[i].fd);
      }
      for (int fd : dead) {
        std::clog << "coexplorer: UI client disconnected\n";
        ::close(fd);
        clients.erase(fd);
      }

      fan_out();
      dead.clear();
      for (auto& [fd, c] : clients)
        if (!flush_client(c)) dead.push_back(fd);
      for (int fd : dead) {
        std::clog << "coexplorer: UI client dropped after a write error\n";
        ::close(fd);
        clients.erase(fd);
      }
      client_count = clients.size();
    }
  }
};

Gateway::Gateway(GatewayOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  Impl& g = *impl_;
  g.osc_fd = open_socket(SOCK_DGRAM, g.options.bind_address, g.options.osc_port, "OSC (udp)");
  g.listen_fd = open_socket(SOCK_STREAM, g.options.bind_address, g.options.ui_port, "UI (tcp)");
  if (::listen(g.listen_fd, 16) != 0) throw socket_error("cannot listen on UI port");
  int pipe_fds[2];
  if (::pipe(pipe_fds) != 0) throw socket_error("cannot create wake pipe");
  g.wake_read = pipe_fds[0];
  g.wake_write = pipe_fds[1];
  set_nonblocking(g.wake_read);
  set_nonblocking(g.wake_write);
  if (!g.options.osc_out.empty()) {
    const auto colon = g.options.osc_out.rfind(':');
    if (colon == std::string::npos) throw std::runtime_error("osc_out must be host:port");
    g.osc_out = make_address(g.options.osc_out.substr(0, colon), std::stoi(g.options.osc_out.substr(colon + 1)));
  }
}

Gateway::~Gateway() { stop(); }

int Gateway::osc_port() const { return bound_port(impl_->osc_fd); }
int Gateway::ui_port() const { return bound_port(impl_->listen_fd); }

void Gateway::start() {
  if (impl_->thread.joinable()) return;
  impl_->thread = std::jthread([this](std::stop_token st) { impl_->run(st); });
}

void Gateway::stop() {
  if (!impl_ || !impl_->thread.joinable()) return;
  impl_->thread.request_stop();
  impl_->thread.join();
}

BoundedQueue<InboundItem>& Gateway::inbound() { return impl_->inbound; }

void Gateway::publish(const std::vector<OutboundMessage>& messages) {
  if (messages.empty()) return;
  for (const auto& m : messages) impl_->outbound.push(m);
  const char wake = 1;
  [[maybe_unused]] const auto ignored = ::write(impl_->wake_write, &wake, 1);
}

std::size_t Gateway::ui_clients() const { return impl_->client_count; }

std::size_t Gateway::osc_peers() const {
  std::lock_guard lock(impl_->peers_mutex);
  return impl_->osc_peers.size();
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

void dispatch(Session& session, const InboundItem& item) {
  try {
    std::visit(overloaded{
                   [&](const in::GuideFeedback& f) {
                     session.submit_feedback({FeedbackKind::Guiding, f.valence, item.received});
                   },
                   [&](const in::ZoneFeedback& f) {
                     session.submit_feedback({FeedbackKind::Zone, f.valence, item.received});
                   },
                   [&](const in::Auto& a) { session.command(a.start ? Command::StartAuto : Command::StopAuto); },
                   [&](const in::ChangeZone&) { session.command(Command::ChangeZone); },
                   [&](const in::Back& b) { session.go_backward(b.history_id); },
                   [&](const in::Reset&) { session.command(Command::Reset); },
                   [&](const in::SetState& s) { session.set_state(s.values); },
               },
               item.message);
  } catch (const UnknownHistoryId& e) {
    session.report_error("unknown_history_id", e.what());
  } catch (const DimensionMismatch& e) {
    session.report_error("dimension_mismatch", e.what());
  } catch (const TrainingHalted& e) {
    session.report_error("training_halted", e.what());
  } catch (const std::exception& e) {
    session.report_error("rejected", e.what());
  }
}

void run_control_loop(Session& session, Gateway& gateway, std::stop_token stop) {
  using clock = std::chrono::steady_clock;
  const auto period = std::chrono::duration_cast<clock::duration>(
      std::chrono::duration<double>(session.config().tick_period()));
  auto next_tick = clock::now();

  while (!stop.stop_requested()) {
    if (session.mode() == Mode::Autonomous) {
      for (const InboundItem& item : gateway.inbound().drain()) dispatch(session, item);
      if (session.mode() == Mode::Autonomous) session.tick();
      gateway.publish(session.drain_outbound());
      next_tick += period;
      const auto now = clock::now();
      if (next_tick < now) next_tick = now;
      std::this_thread::sleep_until(next_tick);
    } else {
      if (auto item = gateway.inbound().pop_for(std::chrono::milliseconds(20))) {
        dispatch(session, *item);
        for (const InboundItem& more : gateway.inbound().drain()) dispatch(session, more);
      }
      gateway.publish(session.drain_outbound());
      next_tick = clock::now();
    }
  }
}

void serve(const Config& config, Session& session, std::stop_token stop) {
  GatewayOptions options;
  options.bind_address = config.bind_address;
  options.osc_port = config.port_osc;
  options.ui_port = config.port_ui;
  options.osc_out = config.osc_out;
  options.dims = config.space.n;
  Gateway gateway(options);
  std::clog << "coexplorer: OSC on udp/" << gateway.osc_port() << ", UI bridge on tcp/" << gateway.ui_port()
            << ", mode " << to_string(session.mode()) << '\n';
  gateway.start();
  session.announce();
  gateway.publish(session.drain_outbound());
  run_control_loop(session, gateway, stop);
  gateway.stop();
}

}  // namespace coexplorer
