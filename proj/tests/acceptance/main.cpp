// Headless acceptance checks. Prints one [PASS]/[FAIL] line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../common/generators.hpp"
#include "../common/sockets.hpp"
#include "CLI11.hpp"
#include "coexplorer/credit.hpp"
#include "coexplorer/density.hpp"
#include "coexplorer/gateway.hpp"
#include "coexplorer/harness.hpp"
#include "coexplorer/pca.hpp"
#include "coexplorer/policy.hpp"
#include "coexplorer/protocol.hpp"
#include "coexplorer/reward_model.hpp"
#include "coexplorer/session.hpp"

using namespace coexplorer;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Options {
  bool paced = false;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

// 1: analytic vs central-difference gradients on small random nets.
Outcome gradients(const Options&) {
  const auto start = Clock::now();
  Rng rng(20240);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int config = 0; config < 50; ++config) {
    RewardModelOptions o;
    o.inputs = 2;
    o.hidden_units = 5;
    RewardModel m(o, rng());
    auto params = m.parameters();
    for (auto& p : params) p = 1.6 * u(rng) - 0.8;
    m.set_parameters(params);
    std::vector<Sample> batch(1 + rng() % 8);
    for (auto& s : batch) {
      s.state = ParameterState{{u(rng), u(rng)}};
      s.action = ActionId::from_index(static_cast<int>(rng() % 4));
      s.target = 2 * u(rng) - 1;
      s.weight = 0.1 + u(rng);
    }
    const auto grad = m.gradient(batch);
    const double h = 1e-5;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + h;
      m.set_parameters(params);
      const double up = m.loss(batch);
      params[i] = keep - h;
      m.set_parameters(params);
      const double down = m.loss(batch);
      params[i] = keep;
      m.set_parameters(params);
      const double fd = (up - down) / (2 * h);
      const double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
      worst = std::max(worst, std::abs(fd - grad[i]) / scale);
      ++checked;
    }
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-4 && secs <= 10.0,
          "50 configs, " + std::to_string(checked) + " partials, max rel err " + fmt("%.2e", worst) + ", " +
              fmt("%.2f", secs) + " s"};
}

// 2: pseudo-count equals the brute-force visit count with one per-state tiling.
Outcome pseudo_counts(const Options&) {
  const auto start = Clock::now();
  SpaceConfig space;
  space.n = 1;
  space.step = 0.01;
  TileCoderOptions tiles;
  tiles.num_tilings = 1;
  tiles.tile_width = space.step;
  const ParameterState probe{{0.37}};
  Rng rng(2);
  double worst = 0.0;
  int cases = 0;
  for (int k = 0; k <= 50; ++k) {
    DensityModel m(space, tiles);
    int visits_to_probe = 0;
    for (int i = 0; i < k; ++i) {
      m.update(probe);
      ++visits_to_probe;
    }
    for (int total = k + 1; total <= 200; ++total) {
      ParameterState other;
      do other = random_state(space, rng);
      while (other == probe);
      m.update(other);
      // the brute-force count is visits_to_probe; saturation (k == N) is excluded
      const double v = m.pseudo_count(probe);
      const double err = visits_to_probe == 0 ? std::abs(v) : std::abs(v - visits_to_probe) / visits_to_probe;
      worst = std::max(worst, err);
      ++cases;
    }
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-6 && secs <= 5.0, std::to_string(cases) + " (k, N) pairs, max rel err " + fmt("%.2e", worst) +
                                            ", " + fmt("%.2f", secs) + " s"};
}

// 3: bonus constants and monotonicity.
Outcome bonus_values(const Options&) {
  const BonusParams constants{1.0, 0.01};
  const double fresh = exploration_bonus(0.0, 0.0, constants);
  SpaceConfig space;
  DensityModel model(space);
  model.update(ParameterState{std::vector<double>(10, 0.0)});
  const double via_model = model.bonus(ParameterState{std::vector<double>(10, 1.0)}, 0.0, constants);
  bool monotone = true;
  double last = fresh;
  for (int i = 1; i <= 10000; ++i) {
    const double now = exploration_bonus(i * 0.01, 0.0, constants);
    monotone &= now < last;
    last = now;
  }
  return {fresh == 10.0 && via_model == 10.0 && monotone,
          "R+(unvisited) = " + fmt("%.17g", fresh) + " (density model " + fmt("%.17g", via_model) +
              "), strictly decreasing over V = 0..100 in 0.01 steps: " + (monotone ? "yes" : "no")};
}

// 4: credit window and guiding credit.
Outcome credit_windows(const Options&) {
  TrajectoryWindow w(128);
  for (int i = 0; i <= 50; ++i) w.push(ParameterState{{i / 100.0}}, ActionId{0, +1}, i * 0.1);
  const auto window = credit_window({FeedbackKind::Guiding, +1, 5.0}, w);
  bool ok = window.size() == 39;
  for (std::size_t i = 0; ok && i < window.size(); ++i) {
    ok &= std::abs(window[i].state[0] - (10 + static_cast<int>(i)) / 100.0) < 1e-12;
    ok &= window[i].weight == 1.0 / 39.0;
  }
  const auto guided = guiding_credit({FeedbackKind::Guiding, +1, 5.0}, w);
  double worst = guided.size() == 10 ? 0.0 : 1.0;
  for (std::size_t j = 0; j < guided.size(); ++j) {
    worst = std::max(worst, std::abs(guided[j].target - std::exp(-static_cast<double>(j))));
    ok &= std::abs(guided[j].state[0] - (50 - static_cast<int>(j)) / 100.0) < 1e-12;
  }
  return {ok && worst <= 1e-12, "window credits " + std::to_string(window.size()) +
                                    " pairs stamped 1.0..4.8 s at weight 1/39; guiding targets exp(-j), j=0..9, max err " +
                                    fmt("%.1e", worst)};
}

// 5: zone expansion counts.
Outcome zone_counts(const Options&) {
  SpaceConfig space;
  const auto interior = zone_expand(center_state(space), +1, space).size();
  const auto corner = zone_expand(ParameterState{std::vector<double>(10, 0.0)}, +1, space).size();
  return {interior == 200 && corner == 100,
          "interior " + std::to_string(interior) + " pairs, all-zero corner " + std::to_string(corner) + " pairs"};
}

struct ArmResult {
  std::vector<double> steps;
  int reached = 0;
};

ArmResult run_arm(AgentKind agent, int dims, int budget, int seeds) {
  ArmResult r;
  for (int seed = 1; seed <= seeds; ++seed) {
    EpisodeOptions o;
    o.agent = agent;
    o.config.space.n = dims;
    o.budget = budget;
    o.seed = static_cast<std::uint64_t>(seed);
    const auto report = run_episode(o);
    r.steps.push_back(static_cast<double>(report.steps_to_target));
    r.reached += report.reached;
  }
  return r;
}

// 6: co-explorer vs random with the guiding oracle, 20 paired seeds.
Outcome convergence(int dims, int budget) {
  const auto start = Clock::now();
  const auto co = run_arm(AgentKind::Coexplorer, dims, budget, 20);
  const auto rnd = run_arm(AgentKind::Random, dims, budget, 20);
  int wins = 0, losses = 0;
  for (std::size_t i = 0; i < co.steps.size(); ++i) {
    wins += co.steps[i] < rnd.steps[i];
    losses += co.steps[i] > rnd.steps[i];
  }
  const double p = sign_test_p(wins, losses);
  const double med_co = summarize(co.steps).median, med_rnd = summarize(rnd.steps).median;
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "n=" << dims << ", budget " << budget << ": co-explorer median " << med_co << " (" << co.reached
    << "/20 reached), random median " << med_rnd << " (" << rnd.reached << "/20), wins " << wins << " losses "
    << losses << ", sign test p=" << fmt("%.3g", p) << ", " << fmt("%.1f", secs) << " s";
  return {med_co < med_rnd && p < 0.05, d.str()};
}

Outcome convergence_small(const Options&) { return convergence(2, 2000); }
Outcome convergence_large(const Options&) { return convergence(10, 10000); }

// 7: Sarsa vs random on the 12-dim three-level pilot space.
Outcome sarsa_pilot(const Options&) {
  const auto start = Clock::now();
  std::vector<double> sarsa, rnd;
  int wins = 0, losses = 0, sarsa_reached = 0, rnd_reached = 0;
  for (int seed = 1; seed <= 50; ++seed) {
    PilotOptions o;
    o.seed = static_cast<std::uint64_t>(seed);
    o.agent = AgentKind::Sarsa;
    const auto a = run_pilot_episode(o);
    o.agent = AgentKind::Random;
    const auto b = run_pilot_episode(o);
    sarsa.push_back(static_cast<double>(a.steps_to_target));
    rnd.push_back(static_cast<double>(b.steps_to_target));
    sarsa_reached += a.reached;
    rnd_reached += b.reached;
    wins += a.steps_to_target < b.steps_to_target;
    losses += a.steps_to_target > b.steps_to_target;
  }
  const double ms = summarize(sarsa).median, mr = summarize(rnd).median;
  const double secs = seconds_since(start);
  std::ostringstream d;
  d << "50 episodes, budget 2000: Sarsa(eps=0.1) median " << ms << " (" << sarsa_reached << "/50 reached), random median "
    << mr << " (" << rnd_reached << "/50), per-seed wins " << wins << " losses " << losses << ", "
    << fmt("%.1f", secs) << " s";
  return {ms < mr && secs <= 120.0, d.str()};
}

// 8: epsilon schedule.
Outcome epsilon_schedule(const Options&) {
  const EpsilonSchedule eps;
  const double at0 = eps(0), at2000 = eps(2000), far = eps(10'000'000);
  const double err = std::abs(at2000 - 0.1 * std::exp(-1.0));
  return {at0 == 0.1 && err <= 1e-9 && far == 0.0,
          "eps(0)=" + fmt("%.17g", at0) + ", eps(2000)=" + fmt("%.12g", at2000) + " (err " + fmt("%.1e", err) +
              "), eps(1e7)=" + fmt("%g", far)};
}

// 9: 10,000 autonomous ticks within the 100 ms period with replay training running.
Outcome realtime(const Options& opt) {
  Config c;
  c.seed = 9;
  Session s(c);
  const auto period = std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(c.tick_period()));
  std::vector<double> ms;
  ms.reserve(10000);
  auto next = Clock::now() + period;
  for (int i = 0; i < 10000; ++i) {
    if (i % 5 == 4) s.submit_feedback({FeedbackKind::Guiding, (i / 5) % 3 ? +1 : -1, s.now()});
    const auto t0 = Clock::now();
    s.tick();
    ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
    s.drain_outbound();
    if (opt.paced) {
      std::this_thread::sleep_until(next);
      next += period;
    }
  }
  std::sort(ms.begin(), ms.end());
  const auto replay = s.branch_count(TrainingBranch::Replay);
  std::ostringstream d;
  d << (opt.paced ? "paced at 10 Hz" : "back to back on the steady clock") << ": " << s.t() << " ticks, "
    << s.tick_overruns() << " overruns of the 100 ms budget, per-tick median " << fmt("%.3f", ms[5000]) << " ms, p99 "
    << fmt("%.3f", ms[9900]) << " ms, max " << fmt("%.3f", ms.back()) << " ms; replay steps " << replay
    << ", feedback steps " << s.branch_count(TrainingBranch::Feedback);
  return {s.t() == 10000 && s.tick_overruns() == 0 && replay > 0, d.str()};
}

// 10: codec round trip over generated messages, then a fuzzed live service.
Outcome protocol(const Options&) {
  std::mt19937_64 rng(10);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const int dims = 1 + static_cast<int>(rng() % 12);
    const auto inbound = testgen::any_inbound(rng, dims);
    failures += !(decode_inbound_osc(encode_osc(inbound), dims) == inbound);
    failures += !(decode_inbound_json(encode_json(inbound), dims) == inbound);
    const auto outbound = testgen::any_outbound(rng, dims);
    failures += !(decode_outbound_osc(encode_osc(outbound)) == outbound);
    failures += !(decode_outbound_json(encode_json(outbound)) == outbound);
  }

  Config c;
  c.mode = StartMode::Stepwise;
  Session session(c);
  GatewayOptions g;
  g.osc_port = 0;
  g.ui_port = 0;
  g.dims = c.space.n;
  Gateway gateway(g);
  gateway.start();
  std::jthread loop([&](std::stop_token st) { run_control_loop(session, gateway, st); });

  int sent = 0;
  {
    testnet::Udp peer;
    testnet::Tcp ui(gateway.ui_port());
    for (int i = 0; i < 2000; ++i) {
      peer.send(testgen::mangle(encode_osc(testgen::any_inbound(rng, c.space.n)), rng), gateway.osc_port());
      ui.send(testgen::mangle(encode_json(testgen::any_inbound(rng, c.space.n)), rng) + "\n");
      sent += 2;
      if (i % 200 == 0) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    testnet::Tcp flood(gateway.ui_port());
    flood.send(std::string(70000, '{'));
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }

  // still alive: a fresh client can stop autonomous mode and set the state
  bool alive = false;
  {
    testnet::Tcp probe(gateway.ui_port());
    probe.send("{\"address\":\"/command/auto\",\"args\":[\"stop\"]}\n");
    std::string set = "{\"address\":\"/state/set\",\"args\":[";
    for (int d = 0; d < c.space.n; ++d) set += std::string(d ? "," : "") + "0.25";
    probe.send(set + "]}\n");
    for (int i = 0; i < 200 && !alive; ++i) {
      const auto line = probe.line_with("/state", 3000);
      if (!line) break;
      const auto st = std::get<out::State>(decode_outbound_json(*line));
      alive = st.values == std::vector<double>(static_cast<std::size_t>(c.space.n), 0.25);
    }
  }
  loop.request_stop();
  std::ostringstream d;
  d << "40000 encode/decode round trips over 10000 generated messages, " << failures << " mismatches; " << sent
    << " malformed packets and lines plus a 70 KB line sent to the live service, which "
    << (alive ? "kept serving" : "stopped answering");
  return {failures == 0 && alive, d.str()};
}

// 11: PCA on rank-1 data and against the closed-form 2x2 eigen solve.
Outcome pca(const Options&) {
  std::vector<TimedState> line;
  for (int i = 0; i < 50; ++i)
    line.push_back({i * 0.1, {0.5 + 0.003 * i, 0.5 - 0.001 * i, 0.2 + 0.002 * i, 0.7, 0.1 + 0.004 * i}});
  double worst_pc2 = 0;
  for (const auto& pt : project_pca(line).points) worst_pc2 = std::max(worst_pc2, std::abs(pt.pc2));

  const std::vector<TimedState> tri = {{0.0, {0.1, 0.3}}, {1.0, {0.6, 0.2}}, {2.0, {0.35, 0.9}}};
  const double mx = (0.1 + 0.6 + 0.35) / 3, my = (0.3 + 0.2 + 0.9) / 3;
  double a = 0, b = 0, cc = 0;
  for (const auto& s : tri) {
    a += (s.values[0] - mx) * (s.values[0] - mx) / 2;
    b += (s.values[0] - mx) * (s.values[1] - my) / 2;
    cc += (s.values[1] - my) * (s.values[1] - my) / 2;
  }
  const double l1 = (a + cc) / 2 + std::sqrt((a - cc) * (a - cc) / 4 + b * b);
  double vx = b, vy = l1 - a;
  const double norm = std::hypot(vx, vy);
  vx /= norm;
  vy /= norm;
  if (vx < 0) vx = -vx, vy = -vy;
  double wx = -vy, wy = vx;
  if (wx < 0) wx = -wx, wy = -wy;
  const auto proj = project_pca(tri);
  double worst = 0;
  for (std::size_t i = 0; i < tri.size(); ++i) {
    const double dx = tri[i].values[0] - mx, dy = tri[i].values[1] - my;
    worst = std::max(worst, std::abs(proj.points[i].pc1 - (dx * vx + dy * vy)));
    worst = std::max(worst, std::abs(proj.points[i].pc2 - (dx * wx + dy * wy)));
  }
  return {worst_pc2 <= 1e-8 && worst <= 1e-9,
          "rank-1 max |pc2| " + fmt("%.1e", worst_pc2) + "; 2x2 closed form max err " + fmt("%.1e", worst)};
}

struct Criterion {
  std::string id;
  std::string title;
  std::function<Outcome(const Options&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"1", "gradient correctness", gradients},
      {"2", "pseudo-count equals visit count", pseudo_counts},
      {"3", "exploration bonus values", bonus_values},
      {"4", "credit windows", credit_windows},
      {"5", "zone expansion counts", zone_counts},
      {"6a", "convergence benchmark, n=2", convergence_small},
      {"6b", "convergence benchmark, n=10", convergence_large},
      {"7", "Sarsa pilot baseline", sarsa_pilot},
      {"8", "epsilon schedule", epsilon_schedule},
      {"9", "real-time tick budget", realtime},
      {"10", "protocol round trip and fuzzing", protocol},
      {"11", "PCA utility", pca},
  };

  CLI::App app{"Acceptance checks"};
  std::vector<std::string> only;
  Options opt;
  bool report = false;
  app.add_option("--only", only, "criterion ids to run (default: all)")->delimiter(',');
  app.add_flag("--paced", opt.paced, "run criterion 9 at the real 10 Hz rate (about 17 minutes)");
  app.add_flag("--report", report, "print every line but always exit 0");
  CLI11_PARSE(app, argc, argv);

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    Outcome o;
    try {
      o = c.run(opt);
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << ": " << o.detail << std::endl;
  }
  return report ? 0 : (failed == 0 ? 0 : 1);
}
