#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "seaarm/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw seaarm::ConfigError("cannot open " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_metrics(const seaarm::RunMetrics& m, const std::string& out_dir) {
  std::printf("%s [%s]: %ld ticks in %.2f s\n", m.scenario_name.c_str(), m.controller.c_str(),
              m.ticks, m.wall_time_s);
  std::printf("  position error   avg %.4f m, max %.4f m\n", m.avg_position_error_m,
              m.max_position_error_m);
  std::printf("  orientation error avg %.3f deg, max %.3f deg\n", m.avg_orientation_error_deg,
              m.max_orientation_error_deg);
  if (m.catch_attempts > 0 || m.mission_done) {
    std::printf("  mission: %d catch attempt(s), %s\n", m.catch_attempts,
                m.mission_done ? "completed" : "not completed");
  }
  if (!out_dir.empty()) {
    std::printf("  outputs in %s\n", out_dir.c_str());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floating-base arm tracking simulator"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, controller_override;
  auto* run = app.add_subcommand("run", "simulate one scenario");
  run->add_option("scenario", scenario_path, "scenario JSON file")->required();
  run->add_option("--out", out_dir, "output directory (default runs/<name>-<controller>)");
  run->add_option("--controller", controller_override,
                  "override the scenario controller (traditional|mpc|mpc_estimator)");

  std::vector<std::string> compare_dirs;
  auto* cmp = app.add_subcommand("compare", "tabulate finished runs against each other");
  cmp->add_option("dirs", compare_dirs, "run output directories")->required()->expected(2, -1);

  std::string sweep_param, sweep_out;
  std::vector<std::string> sweep_values;
  auto* sweep = app.add_subcommand("sweep", "rerun one scenario over a parameter grid");
  sweep->add_option("scenario", scenario_path, "scenario JSON file")->required();
  sweep->add_option("--param", sweep_param, "JSON pointer of the value to vary, e.g. /reference/radius_m")
      ->required();
  sweep->add_option("--values", sweep_values, "values to try")->required()->delimiter(',');
  sweep->add_option("--out", sweep_out, "output root (default runs/sweep)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      seaarm::Scenario sc = seaarm::load_scenario(scenario_path);
      if (!controller_override.empty()) {
        sc.controller = seaarm::controller_from_string(controller_override);
      }
      if (out_dir.empty()) {
        out_dir = "runs/" + sc.name + "-" + seaarm::to_string(sc.controller);
      }
      const seaarm::RunMetrics m = seaarm::run_scenario(sc, out_dir);
      print_metrics(m, out_dir);
    } else if (*cmp) {
      const seaarm::CompareResult result = seaarm::compare_runs(compare_dirs);
      std::fputs(result.table.c_str(), stdout);
    } else if (*sweep) {
      if (sweep_out.empty()) {
        sweep_out = "runs/sweep";
      }
      const std::string text = slurp(scenario_path);
      const std::string base_dir =
          std::filesystem::path(scenario_path).parent_path().string();
      for (const std::string& value : sweep_values) {
        const std::string patched = seaarm::override_json_value(text, sweep_param, value);
        seaarm::Scenario sc = seaarm::scenario_from_json_text(patched, base_dir);
        const std::string dir = sweep_out + "/" + sc.name + "-" + value;
        const seaarm::RunMetrics m = seaarm::run_scenario(sc, dir);
        std::printf("%s = %s\n", sweep_param.c_str(), value.c_str());
        print_metrics(m, dir);
      }
    }
  } catch (const seaarm::SimDivergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
