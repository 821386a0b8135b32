// Agent service: OSC over UDP plus a line-delimited JSON bridge over TCP.
#include <csignal>
#include <iostream>
#include <stop_token>
#include <thread>

#include "CLI11.hpp"
#include "coexplorer/config.hpp"
#include "coexplorer/gateway.hpp"
#include "coexplorer/session.hpp"

namespace {

std::stop_source g_stop;

extern "C" void on_signal(int) { g_stop.request_stop(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive parameter-space exploration agent"};
  std::string config_path, log_path, mode, bind, osc_out;
  int port_osc = -1, port_ui = -1;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--port-osc", port_osc, "UDP port for OSC messages");
  app.add_option("--port-ui", port_ui, "TCP port for the JSON bridge");
  app.add_option("--bind", bind, "address both endpoints bind to");
  app.add_option("--osc-out", osc_out, "host:port that also receives outbound OSC");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--log", log_path, "append session events to this file");
  app.add_option("--mode", mode, "start mode")->check(CLI::IsMember({"auto", "stepwise"}));
  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  try {
    coexplorer::Config config = config_path.empty() ? coexplorer::Config{} : coexplorer::load_config(config_path);
    if (port_osc >= 0) config.port_osc = port_osc;
    if (port_ui >= 0) config.port_ui = port_ui;
    if (!bind.empty()) config.bind_address = bind;
    if (!osc_out.empty()) config.osc_out = osc_out;
    if (seed_set) config.seed = seed;
    if (!log_path.empty()) config.log_path = log_path;
    if (!mode.empty()) config.mode = coexplorer::parse_start_mode(mode);
    config.validate();

    coexplorer::Session session(config);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    coexplorer::serve(config, session, g_stop.get_token());
    std::clog << "coexplorer: stopped after " << session.t() << " actions, " << session.tick_overruns()
              << " late ticks\n";
  } catch (const std::exception& e) {
    std::cerr << "coexplorer: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
