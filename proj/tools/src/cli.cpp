#include <algorithm>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "qsens/error.hpp"
#include "qsens_cli/cli.hpp"

namespace qsens::cli {

namespace {

// Multi-word options accept both spellings so config files can use
// snake_case keys.
std::string names(const std::string& dashed) {
  std::string snake = dashed;
  std::replace(snake.begin() + 2, snake.end(), '-', '_');
  return snake == dashed ? dashed : dashed + "," + snake;
}

void resolve_paths(RunConfig& cfg) {
  namespace fs = std::filesystem;
  if (cfg.json_input) cfg.json_input = fs::absolute(*cfg.json_input);
  if (cfg.report_json) cfg.report_json = fs::absolute(*cfg.report_json);
  if (cfg.out_dir) cfg.out_dir = fs::absolute(*cfg.out_dir);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Fidelity, entropy and entanglement benchmarks for depolarized two-qubit states.", "qsens"};
  app.set_config("--config", "", "Flat key=value file (# comments); flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  std::string out_dir, json_input, report_json;
  std::string angle_unit = "deg";
  app.add_option("--out", out_dir, "Output directory for CSV files");
  app.add_option("--json", json_input, "Density matrix JSON file used as the (last) input state");
  app.add_option(names("--report-json"), report_json, "measures: also write the report as JSON");
  app.add_option("--level", cfg.levels, "Fidelity level (repeatable)")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", cfg.seed, "Base seed for tomography noise");
  app.add_option("--trials", cfg.trials, "Tomography trials; 0 runs until --accepted points are kept");
  app.add_option("--accepted", cfg.accepted, "Accepted points per cloud when --trials is 0");
  app.add_option(names("--max-trials"), cfg.max_trials, "Trial cap when accumulating accepted points");
  app.add_option("--budget", cfg.budget, "Count budget; each projector expects budget/4 times its outcome probability")->check(CLI::PositiveNumber);
  app.add_option("--threshold", cfg.threshold, "Acceptance fidelity")->check(CLI::Range(0.0, 1.0));
  app.add_option(names("--settings-variant"), cfg.settings_variant, "Tomography projector set")
      ->check(CLI::IsMember({"hvdr"}));
  app.add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  app.add_option("--precision", cfg.precision, "Significant digits in output")
      ->check(CLI::Range(1, kMaxPrecision));
  app.add_flag("--bits", cfg.bits, "measures: also print the von Neumann entropy in bits");
  app.add_option(names("--angle-unit"), angle_unit, "Unit of theta in state specs")
      ->check(CLI::IsMember({"deg", "rad", "degrees", "radians"}));
  app.add_option(names("--eps-min"), cfg.eps_min, "sensitivity: smallest eps");
  app.add_option(names("--eps-max"), cfg.eps_max, "sensitivity: largest eps");
  app.add_option("--points", cfg.points, "sensitivity: grid points");
  app.add_option(names("--mems-target"), cfg.mems_targets, "figure 2: MEMS concurrence r (repeatable)")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option(names("--curve-samples"), cfg.curve_samples, "Samples on the boundary and Werner curves")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20));
  app.add_option(names("--sweep-points"), cfg.sweep_points, "Sweep lines per contour direction")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 16));
  app.add_option("--raster", cfg.raster, "figure 3: raster cells per axis")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 14));
  app.add_option(names("--family-samples"), cfg.family_samples, "figure 3: samples per family parameter axis")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 14));

  auto* measures = app.add_subcommand("measures", "Single-state measures of one state")->fallthrough();
  measures->add_option("state", cfg.states, "State spec, e.g. mems:r=0.8");
  auto* compare = app.add_subcommand("compare", "Fidelity and trace distance between two states")->fallthrough();
  compare->add_option("states", cfg.states, "Two state specs");
  auto* figure = app.add_subcommand("figure", "Write the CSV data behind figure 1, 2 or 3")->fallthrough();
  figure->add_option("n", cfg.figure, "Figure number")->required()->check(CLI::IsMember({1, 2, 3}));
  auto* sensitivity =
      app.add_subcommand("sensitivity", "Leading-order behaviour of every measure under depolarization")
          ->fallthrough();
  sensitivity->add_option("state", cfg.states, "State spec");
  auto* tomo = app.add_subcommand("tomo", "Monte Carlo tomography cloud around a target")->fallthrough();
  tomo->add_option("state", cfg.states, "Target state spec");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!json_input.empty()) cfg.json_input = json_input;
  if (!report_json.empty()) cfg.report_json = report_json;
  cfg.angle_unit = angle_unit.rfind("rad", 0) == 0 ? AngleUnit::Radians : AngleUnit::Degrees;
  resolve_paths(cfg);

  const std::map<CLI::App*, void (*)(const RunConfig&, std::ostream&)> commands{
      {measures, cmd_measures}, {compare, cmd_compare},   {figure, cmd_figure},
      {sensitivity, cmd_sensitivity}, {tomo, cmd_tomo},
  };
  try {
    for (const auto& [sub, fn] : commands) {
      if (sub->parsed()) {
        cfg.command = sub->get_name();
        fn(cfg, out);
      }
    }
  } catch (const Error& e) {
    err << "qsens: " << e.what() << '\n';
    return is_numeric_failure(e.code()) ? kExitNumeric : kExitUsage;
  } catch (const std::exception& e) {
    err << "qsens: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace qsens::cli
