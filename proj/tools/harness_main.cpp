// Offline benchmarks and analysis against synthetic users.
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "coexplorer/config.hpp"
#include "coexplorer/harness.hpp"
#include "coexplorer/pca.hpp"

using namespace coexplorer;

int main(int argc, char** argv) {
  CLI::App app{"Co-exploration benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);

  auto* run = app.add_subcommand("run", "one episode against a synthetic user");
  std::string agent = "coexplorer", oracle = "guiding", csv_path;
  int dims = 10, budget = 5000, period = 5;
  std::uint64_t seed = 0;
  run->add_option("--agent", agent)->check(CLI::IsMember({"coexplorer", "random", "sarsa"}));
  run->add_option("--dims", dims)->check(CLI::Range(1, 1000));
  run->add_option("--budget", budget)->check(CLI::NonNegativeNumber);
  run->add_option("--seed", seed);
  run->add_option("--feedback-period", period)->check(CLI::PositiveNumber);
  run->add_option("--oracle", oracle)->check(CLI::IsMember({"guiding", "mixed"}));
  run->add_option("--csv", csv_path, "write the per-step distance series here");

  auto* cmp = app.add_subcommand("compare", "agents x dimensions table of steps to target");
  std::string matrix = "default", cmp_csv;
  cmp->add_option("--matrix", matrix)->check(CLI::IsMember({"default", "quick"}));
  cmp->add_option("--csv", cmp_csv, "also write the summary as CSV");

  auto* pca = app.add_subcommand("pca", "project a session log's states on two principal axes");
  std::string log_path, out_path;
  pca->add_option("--log", log_path)->required()->check(CLI::ExistingFile);
  pca->add_option("--out", out_path, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    const Config base = config_path.empty() ? Config{} : load_config(config_path);
    if (*run) {
      EpisodeOptions ep;
      ep.agent = parse_agent_kind(agent);
      ep.config = base;
      ep.config.space.n = dims;
      if (static_cast<int>(ep.config.space.lo.size()) != dims) ep.config.space.lo.clear();
      if (static_cast<int>(ep.config.space.hi.size()) != dims) ep.config.space.hi.clear();
      ep.budget = budget;
      ep.seed = seed;
      ep.feedback_period = period;
      ep.oracle = parse_oracle_mode(oracle);
      const RunReport r = run_episode(ep);
      std::cout << "agent " << to_string(r.agent) << ", n=" << r.dims << ", seed " << r.seed << ": "
                << (r.reached ? "reached target in " : "budget exhausted after ") << r.steps_to_target << " steps, "
                << r.feedback_count << " feedback events, final distance " << r.final_distance << '\n';
      if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        write_report_csv(out, r);
      }
    } else if (*cmp) {
      CompareOptions options = compare_matrix(matrix);
      options.config = base;
      const auto cells = compare(options);
      write_compare_table(std::cout, cells);
      if (!cmp_csv.empty()) {
        std::ofstream out(cmp_csv);
        write_compare_csv(out, cells);
      }
    } else if (*pca) {
      const auto points = project_trajectory_pca(log_path);
      if (out_path.empty()) {
        write_projection_csv(std::cout, points);
      } else {
        std::ofstream out(out_path);
        write_projection_csv(out, points);
        std::cout << points.size() << " points written to " << out_path << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "harness: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
