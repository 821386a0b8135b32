#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "coexplorer/config.hpp"
#include "coexplorer/credit.hpp"
#include "coexplorer/density.hpp"
#include "coexplorer/harness.hpp"
#include "coexplorer/pca.hpp"
#include "coexplorer/protocol.hpp"
#include "coexplorer/session.hpp"

namespace py = pybind11;
using namespace coexplorer;

namespace {

Config config_from(const py::dict& overrides) {
  Config cfg;
  for (const auto& [key, value] : overrides) {
    std::string text;
    if (py::isinstance<py::list>(value) || py::isinstance<py::tuple>(value)) {
      for (const auto& v : value) {
        if (!text.empty()) text += ',';
        text += py::str(v).cast<std::string>();
      }
    } else if (py::isinstance<py::bool_>(value)) {
      text = value.cast<bool>() ? "true" : "false";
    } else {
      text = py::str(value).cast<std::string>();
    }
    set_config_value(cfg, key.cast<std::string>(), text);
  }
  cfg.validate();
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_coexplorer, m) {
  m.doc() = "Human-in-the-loop exploration agent";

  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<MalformedMessage>(m, "MalformedMessage", PyExc_ValueError);
  py::register_exception<UnknownHistoryId>(m, "UnknownHistoryId", PyExc_KeyError);
  py::register_exception<WrongMode>(m, "WrongMode", PyExc_RuntimeError);
  py::register_exception<TrainingHalted>(m, "TrainingHalted", PyExc_RuntimeError);
  py::register_exception<DegenerateTrajectory>(m, "DegenerateTrajectory", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Config>(m, "Config")
      .def(py::init([](const py::kwargs& kw) { return config_from(kw); }))
      .def_property_readonly("dims", [](const Config& c) { return c.space.n; })
      .def_property_readonly("step", [](const Config& c) { return c.space.step; })
      .def_readonly("seed", &Config::seed)
      .def("__str__", [](const Config& c) {
        std::ostringstream out;
        write_config(out, c);
        return out.str();
      });

  py::class_<Session>(m, "Session")
      .def(py::init([](const Config& cfg, std::optional<std::function<double()>> clock) {
             return clock ? Session(cfg, *clock) : Session(cfg);
           }),
           py::arg("config"), py::arg("clock") = py::none())
      .def("tick", [](Session& s) { return s.tick().values; })
      .def(
          "feedback",
          [](Session& s, const std::string& kind, int valence, std::optional<double> time) {
            FeedbackKind k;
            if (kind == "guide") k = FeedbackKind::Guiding;
            else if (kind == "zone") k = FeedbackKind::Zone;
            else throw py::value_error("kind must be 'guide' or 'zone'");
            s.submit_feedback({k, valence, time.value_or(s.now())});
          },
          py::arg("kind"), py::arg("valence"), py::arg("time") = py::none())
      .def("command",
           [](Session& s, const std::string& name) {
             if (name == "start_auto") s.command(Command::StartAuto);
             else if (name == "stop_auto") s.command(Command::StopAuto);
             else if (name == "change_zone") s.command(Command::ChangeZone);
             else if (name == "reset") s.command(Command::Reset);
             else throw py::value_error("unknown command " + name);
           })
      .def("back", [](Session& s, std::int64_t id) { return s.go_backward(id).values; })
      .def("set_state", [](Session& s, const std::vector<double>& v) { return s.set_state(v).values; })
      .def("outbound_json",
           [](Session& s) {
             std::vector<std::string> lines;
             for (const auto& msg : s.drain_outbound()) lines.push_back(encode_json(msg));
             return lines;
           })
      .def_property_readonly("state", [](const Session& s) { return s.current().values; })
      .def_property_readonly("t", &Session::t)
      .def_property_readonly("epsilon", &Session::epsilon)
      .def_property_readonly("mode", [](const Session& s) { return std::string(to_string(s.mode())); })
      .def_property_readonly("history_size", [](const Session& s) { return s.history().size(); })
      .def_property_readonly("replay_size", [](const Session& s) { return s.replay().size(); })
      .def_property_readonly("training_halted", &Session::training_halted);

  py::class_<RunReport>(m, "RunReport")
      .def_readonly("agent", &RunReport::agent)
      .def_readonly("dims", &RunReport::dims)
      .def_readonly("seed", &RunReport::seed)
      .def_readonly("reached", &RunReport::reached)
      .def_readonly("steps_to_target", &RunReport::steps_to_target)
      .def_readonly("feedback_count", &RunReport::feedback_count)
      .def_readonly("final_distance", &RunReport::final_distance)
      .def_readonly("distances", &RunReport::distances);

  py::enum_<AgentKind>(m, "AgentKind")
      .value("coexplorer", AgentKind::Coexplorer)
      .value("random", AgentKind::Random)
      .value("sarsa", AgentKind::Sarsa);

  m.def(
      "run_episode",
      [](const std::string& agent, int dims, int budget, std::uint64_t seed, int feedback_period,
         const std::string& oracle) {
        EpisodeOptions ep;
        ep.agent = parse_agent_kind(agent);
        ep.config.space.n = dims;
        ep.budget = budget;
        ep.seed = seed;
        ep.feedback_period = feedback_period;
        ep.oracle = parse_oracle_mode(oracle);
        py::gil_scoped_release release;
        return run_episode(ep);
      },
      py::arg("agent") = "coexplorer", py::arg("dims") = 2, py::arg("budget") = 2000, py::arg("seed") = 0,
      py::arg("feedback_period") = 5, py::arg("oracle") = "guiding");

  m.def("exploration_bonus", [](double pseudo_count, double r, double beta, double c) {
    return exploration_bonus(pseudo_count, r, {beta, c});
  }, py::arg("pseudo_count"), py::arg("r") = 0.0, py::arg("beta") = 1.0, py::arg("c") = 0.01);

  m.def("zone_expand_count", [](const std::vector<double>& state, double step) {
    SpaceConfig space;
    space.n = static_cast<int>(state.size());
    space.step = step;
    return zone_expand(snap_to_grid(state, space), 1, space).size();
  }, py::arg("state"), py::arg("step") = 0.01);

  m.def("project_pca", [](const std::vector<std::vector<double>>& rows) {
    std::vector<TimedState> states;
    for (std::size_t i = 0; i < rows.size(); ++i) states.push_back({static_cast<double>(i), rows[i]});
    std::vector<std::pair<double, double>> out;
    for (const auto& p : project_pca(states).points) out.emplace_back(p.pc1, p.pc2);
    return out;
  });

  m.def("project_trajectory_pca", [](const std::string& path) {
    std::vector<std::tuple<double, double, double>> out;
    for (const auto& p : project_trajectory_pca(path)) out.emplace_back(p.time, p.pc1, p.pc2);
    return out;
  });

  m.def("roundtrip_json", [](const std::string& line, int dims) { return encode_json(decode_inbound_json(line, dims)); },
        py::arg("line"), py::arg("dims") = 10);
}
