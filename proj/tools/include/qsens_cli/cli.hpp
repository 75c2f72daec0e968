#pragma once

// Command-line front end. Everything the executable does goes through run(),
// so tests can drive it in-process.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qsens/curves.hpp"
#include "qsens/states.hpp"

namespace qsens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

enum class AngleUnit { Degrees, Radians };

struct RunConfig {
  std::string command;
  std::vector<std::string> states;  // positional state specs
  int figure = 0;
  std::optional<std::filesystem::path> json_input;
  std::optional<std::filesystem::path> report_json;
  std::optional<std::filesystem::path> out_dir;
  std::vector<double> levels;  // empty: per-command defaults
  std::uint64_t seed = 1;
  std::uint64_t trials = 0;  // 0: run until `accepted` points are kept
  std::uint64_t accepted = 20000;
  std::uint64_t max_trials = 20'000'000;
  std::uint64_t budget = 2000;
  double threshold = 0.99;
  std::string settings_variant = "hvdr";
  unsigned threads = 0;
  int precision = 6;
  bool bits = false;  // measures: also report S_V in bits
  AngleUnit angle_unit = AngleUnit::Degrees;
  double eps_min = 1e-6;
  double eps_max = 1e-2;
  std::size_t points = 25;
  std::vector<double> mems_targets{0.3, 0.5, 0.8};
  std::size_t curve_samples = 201;
  std::size_t sweep_points = 512;
  std::size_t raster = 400;
  std::size_t family_samples = 1000;
};

inline constexpr int kMaxPrecision = 15;

/// Parses a state spec such as "rho1:eps=0.2,theta=22.5", "mems:r=0.8",
/// "phi-plus" or "json:path/to/matrix.json". Throws qsens::Error.
DensityMatrix parse_state(const std::string& spec, AngleUnit unit);

/// Runs one command line (without the program name). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Individual commands, for callers holding a parsed config.
void cmd_measures(const RunConfig& cfg, std::ostream& out);
void cmd_compare(const RunConfig& cfg, std::ostream& out);
void cmd_figure(const RunConfig& cfg, std::ostream& out);
void cmd_sensitivity(const RunConfig& cfg, std::ostream& out);
void cmd_tomo(const RunConfig& cfg, std::ostream& out);

/// %.<precision>g, with "nan"/"inf" spelled out.
std::string format_number(double v, int precision);

}  // namespace qsens::cli
