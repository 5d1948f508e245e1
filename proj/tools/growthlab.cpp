// Command-line front end: run one scenario, run a directory of scenarios, or
// print the asymptotic prediction without integrating.
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "growthlab/config.hpp"
#include "growthlab/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int run_one(const std::string& config_path, const std::string& out_dir,
            double h_override, double t_end_override) {
  growthlab::ScenarioConfig cfg = growthlab::parse_scenario_file(config_path);
  if (h_override > 0.0) cfg.h = h_override;
  if (t_end_override > 0.0) cfg.t_end = t_end_override;

  std::string csv_path;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    csv_path = (fs::path(out_dir) / (cfg.name + ".csv")).string();
  }

  growthlab::ScenarioResult res = growthlab::run_scenario(cfg, csv_path);
  std::fputs(res.report.text().c_str(), stdout);
  if (!csv_path.empty()) std::printf("trajectory: %s\n", csv_path.c_str());
  return res.report.verdict == growthlab::Verdict::Inconsistent ? 2 : 0;
}

int run_dir(const std::string& dir, const std::string& out_dir) {
  std::vector<growthlab::SuiteRow> rows = growthlab::run_suite(dir, out_dir);
  if (rows.empty()) {
    std::fprintf(stderr, "error: no *.cfg files under %s\n", dir.c_str());
    return 1;
  }
  std::size_t width = 8;
  for (const auto& row : rows) width = std::max(width, row.name.size());
  int failed = 0;
  for (const auto& row : rows) {
    std::printf("%-*s  %s\n", static_cast<int>(width), row.name.c_str(), row.outcome.c_str());
    failed += row.failed ? 1 : 0;
  }
  std::printf("%zu scenarios, %d failed\n", rows.size(), failed);
  return failed > 0 ? 2 : 0;
}

int predict_one(const std::string& config_path) {
  growthlab::ScenarioConfig cfg = growthlab::parse_scenario_file(config_path);
  growthlab::ExperimentReport rep = growthlab::predict_only(cfg);
  std::fputs(rep.text().c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growthlab: growth-rate laboratory for delay and Volterra equations"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help message and exit");

  std::string config_path, dir_path, out_dir;
  double h_override = 0.0, t_end_override = 0.0;

  CLI::App* run = app.add_subcommand("run", "integrate one scenario and report the verdict");
  run->set_help_flag("--help", "print this help message and exit");
  run->add_option("config", config_path, "scenario config file")->required();
  run->add_option("--out", out_dir, "directory that receives the trajectory CSV");
  run->add_option("--h", h_override, "override the integrator step size");
  run->add_option("--t-end", t_end_override, "override the integration horizon");

  CLI::App* suite = app.add_subcommand("suite", "run every *.cfg scenario in a directory");
  suite->add_option("dir", dir_path, "directory holding scenario configs")->required();
  suite->add_option("--out", out_dir, "directory that receives trajectory CSVs");

  CLI::App* predict = app.add_subcommand("predict", "print the asymptotic prediction only");
  predict->add_option("config", config_path, "scenario config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) return run_one(config_path, out_dir, h_override, t_end_override);
    if (app.got_subcommand(suite)) return run_dir(dir_path, out_dir);
    return predict_one(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
