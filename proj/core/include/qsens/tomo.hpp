#pragma once

// Simulated two-qubit tomography: ideal counts, Poisson fluctuations, linear
// inversion with projection onto physical states, and acceptance clouds.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qsens/curves.hpp"
#include "qsens/states.hpp"

namespace qsens {

inline constexpr std::size_t kSettingCount = 16;
/// Outcomes that make up one complete measurement basis.
inline constexpr std::size_t kOutcomesPerBasis = 4;
inline constexpr std::uint64_t kDefaultBudget = 2000;

struct MeasurementSetting {
  std::string label;  // e.g. "HD": qubit A in H, qubit B in D
  ComplexMatrix projector;
};

/// Products of single-qubit projectors onto H=|0>, V=|1>, D=(|0>+|1>)/sqrt2
/// and R=(|0>+i|1>)/sqrt2 for each qubit.
const std::array<MeasurementSetting, kSettingCount>& tomography_settings();

/// Expected count scale of one projector: budget / 4. Over the 16 settings the
/// maximally mixed state then collects exactly `budget` counts.
double budget_per_setting(std::uint64_t budget) noexcept;

struct CountsRecord {
  std::array<std::string, kSettingCount> setting_labels;
  std::array<double, kSettingCount> expected{};
  std::array<std::uint64_t, kSettingCount> observed{};
  bool has_observed = false;
  std::uint64_t total_budget = kDefaultBudget;
  std::uint64_t seed = 0;
};

CountsRecord ideal_counts(const DensityMatrix& rho, std::uint64_t budget = kDefaultBudget);

/// Independent Poisson draw per setting from a generator seeded by (seed, k).
CountsRecord perturb_counts(const CountsRecord& rec, std::uint64_t seed);

/// Means below this use exact inversion sampling; larger means use a rounded
/// normal approximation.
inline constexpr double kPoissonInversionLimit = 30.0;

/// Poisson variate from a generator seeded by `stream_seed`.
std::uint64_t sample_poisson(double mean, std::uint64_t stream_seed);

/// Deterministic seed for sub-stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Linear inversion of 16 non-negative counts (any overall scale), then
/// projection of the spectrum onto the probability simplex.
DensityMatrix reconstruct_from_counts(const std::array<double, kSettingCount>& counts);
/// Uses the observed counts. Throws InvalidArgument if they are missing.
DensityMatrix reconstruct(const CountsRecord& rec);

/// Euclidean projection of a real vector onto {x >= 0, sum x = 1}.
std::vector<double> project_to_simplex(std::vector<double> values);

struct CloudResult {
  std::vector<PlanePoint> accepted_points;
  /// Trial index of each accepted point.
  std::vector<std::uint64_t> accepted_trials;
  std::vector<std::uint64_t> trial_seeds;
  std::uint64_t trials_run = 0;
  double acceptance_threshold = 0.0;
  std::string target_label;
};

struct CloudConfig {
  std::uint64_t budget = kDefaultBudget;
  double threshold = 0.99;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string target_label = "target";
};

/// `trials` simulate-reconstruct rounds; keeps reconstructions with
/// F(target, reconstruction) >= threshold.
CloudResult monte_carlo_cloud(const DensityMatrix& target, std::uint64_t trials, const CloudConfig& config);

/// Runs trials in index order until `accepted` points are kept (the first
/// ones by trial index) or `max_trials` is reached.
CloudResult accumulate_cloud(const DensityMatrix& target, std::uint64_t accepted, std::uint64_t max_trials,
                             const CloudConfig& config);

}  // namespace qsens
