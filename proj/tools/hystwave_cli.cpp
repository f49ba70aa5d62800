// hystwave: run, sweep and validate periodic hysteresis scenarios.
#include <omp.h>

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hystwave/scenario.hpp"

namespace fs = std::filesystem;
using namespace hystwave;

namespace {

int do_run(const std::string& config, const fs::path& out_dir) {
  const ScenarioConfig cfg = load_config(config);
  const RunOutcome out = run_scenario(cfg, out_dir);
  std::cout << report_table(out.report);
  std::cout << "status: " << out.status;
  if (!out.message.empty()) std::cout << " (" << out.message << ")";
  std::cout << "\nreport written to " << (out_dir / cfg.effective["output"]["report"].get<std::string>()).string()
            << '\n';
  return out.exit_code;
}

int do_sweep(const std::string& config, const std::string& param, const std::vector<double>& values,
             const fs::path& out_dir) {
  if (param != "delta") throw ConfigurationError("sweep: only --param delta is supported");
  const ScenarioConfig cfg = load_config(config);
  const SweepResult res = sweep_delta(cfg, values);
  fs::create_directories(out_dir);
  {
    std::ofstream f(out_dir / "sweep.csv");
    f << sweep_csv(res);
  }
  nlohmann::json summary;
  summary["rows"] = nlohmann::json::array();
  for (const auto& r : res.rows)
    summary["rows"].push_back({{"delta", r.delta}, {"status", r.outcome.status}, {"exit_code", r.outcome.exit_code},
                               {"message", r.outcome.message}});
  summary["delta_star"] =
      res.delta_star_row >= 0 ? nlohmann::json(res.rows[static_cast<std::size_t>(res.delta_star_row)].delta) : nlohmann::json();
  summary["config"] = cfg.effective;
  {
    std::ofstream f(out_dir / "sweep.json");
    f << summary.dump(2) << '\n';
  }
  for (const auto& r : res.rows) std::cout << "delta " << r.delta << ": " << r.outcome.status << '\n';
  std::cout << "empirical delta*: " << summary["delta_star"].dump() << '\n';
  return exit_ok;
}

int do_validate(const std::string& config, std::uint64_t seed) {
  const ScenarioConfig cfg = load_config(config);
  std::cout << validate_scenario(cfg, seed).dump(2) << '\n';
  return exit_ok;
}

int do_trajectory(const std::string& config, const std::string& input, std::vector<double> radii,
                  const fs::path& out_dir) {
  const ScenarioConfig cfg = load_config(config);
  const PreisachDensity density = build_density(cfg);
  const PreisachEvaluator eval(density,
                               static_cast<std::size_t>(cfg.effective["density"]["order"].get<int>()));
  std::ifstream in(input);
  if (!in) throw ConfigurationError("cannot read trajectory input " + input);
  const TrajectoryInput data = read_trajectory_csv(in);
  if (radii.empty()) {
    const double R = density.constants()->R;
    radii = {0.25 * R, 0.5 * R, R};
  }
  fs::create_directories(out_dir);
  std::ofstream out(out_dir / "trajectory.csv");
  write_trajectory_csv(out, data.t, data.p, radii, eval);
  std::cout << "wrote " << data.p.size() << " rows to " << (out_dir / "trajectory.csv").string() << '\n';
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic hysteresis wave solver"};
  app.require_subcommand(1);
  std::string out_dir = "out";
  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--out-dir", out_dir, "Directory for reports and exports")->capture_default_str();
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  app.add_option("--seed", seed, "Seed for randomized checks")->capture_default_str();

  std::string config;
  auto* run = app.add_subcommand("run", "Solve one scenario and write its report");
  run->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "Solve a scenario for a list of data amplitudes");
  std::string param = "delta";
  std::vector<double> values;
  sweep->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--param", param, "Swept parameter")->capture_default_str();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  auto* validate = app.add_subcommand("validate", "Check density and basis settings only");
  validate->add_option("config", config, "Scenario JSON")->required()->check(CLI::ExistingFile);

  auto* trajectory = app.add_subcommand("trajectory", "Evaluate the hysteresis operators along a CSV input");
  std::string input;
  std::vector<double> radii;
  trajectory->add_option("config", config, "Scenario JSON (density section)")->required()->check(CLI::ExistingFile);
  trajectory->add_option("--input", input, "CSV with t,p columns")->required()->check(CLI::ExistingFile);
  trajectory->add_option("--radii", radii, "Play thresholds to export")->delimiter(',');

  for (auto* sub : {run, sweep, validate, trajectory}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_config;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (*run) return do_run(config, out_dir);
    if (*sweep) return do_sweep(config, param, values, out_dir);
    if (*validate) return do_validate(config, seed);
    if (*trajectory) return do_trajectory(config, input, radii, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return exit_config;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_config;
  }
  return exit_config;
}
