#include "qsens/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "qsens/error.hpp"
#include "qsens/measures.hpp"
#include "qsens/parallel.hpp"

namespace qsens {

namespace {

using Design = std::array<std::array<Complex, kSettingCount>, kSettingCount>;

std::array<MeasurementSetting, kSettingCount> build_settings() {
  const double h = 1.0 / std::numbers::sqrt2;
  const std::array<std::pair<char, std::array<Complex, 2>>, 4> kets{{
      {'H', {1.0, 0.0}},
      {'V', {0.0, 1.0}},
      {'D', {h, h}},
      {'R', {h, Complex{0.0, h}}},
  }};
  std::array<MeasurementSetting, kSettingCount> out;
  std::size_t k = 0;
  for (const auto& [la, a] : kets) {
    for (const auto& [lb, b] : kets) {
      const std::array<Complex, 4> v{a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]};
      out[k++] = MeasurementSetting{std::string{la, lb}, ComplexMatrix::projector(v)};
    }
  }
  return out;
}

// Row k maps vec(rho) (row-major) to Tr(rho P_k) = sum_ij rho_ij (P_k)_ji.
Design build_design() {
  Design b{};
  const auto& settings = tomography_settings();
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) b[k][4 * i + j] = settings[k].projector(j, i);
    }
  }
  return b;
}

// Gauss-Jordan with partial pivoting.
Design invert(Design a) {
  constexpr std::size_t n = kSettingCount;
  Design inv{};
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (std::abs(a[pivot][col]) < 1e-12) {
      throw Error(Errc::SingularDesign, "measurement settings are not informationally complete");
    }
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const Complex scale = 1.0 / a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] *= scale;
      inv[col][j] *= scale;
    }
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col) continue;
      const Complex f = a[row][col];
      if (f == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a[row][j] -= f * a[col][j];
        inv[row][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

const Design& inverse_design() {
  static const Design inv = invert(build_design());
  return inv;
}

// Counter-based stream: draw n is derive_seed(stream_seed, n). Seeding is free,
// which matters with 16 short streams per trial.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t seed) noexcept : seed_(seed) {}
  double uniform01() noexcept { return static_cast<double>(derive_seed(seed_, n_++) >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::uint64_t n_ = 0;
};

struct TrialOutcome {
  std::uint64_t trial = 0;
  PlanePoint point;
};

class TrialRunner {
 public:
  TrialRunner(const DensityMatrix& target, const CloudConfig& config)
      : config_(config), fid_(target), ideal_(ideal_counts(target, config.budget)) {}

  std::optional<PlanePoint> run(std::uint64_t trial) const {
    const std::uint64_t trial_seed = derive_seed(config_.seed, trial);
    std::array<double, kSettingCount> counts{};
    for (std::size_t k = 0; k < kSettingCount; ++k) {
      counts[k] = static_cast<double>(sample_poisson(ideal_.expected[k], derive_seed(trial_seed, k)));
    }
    const DensityMatrix rho = reconstruct_from_counts(counts);
    const double f = fid_(rho);
    if (!(f >= config_.threshold)) return std::nullopt;
    const PlaneCoords c = plane_point(rho);
    return PlanePoint{c.s_l, c.t, std::nullopt, f};
  }

  // Accepted outcomes for trials [begin, end), in trial order.
  std::vector<TrialOutcome> batch(std::uint64_t begin, std::uint64_t end) const {
    std::vector<std::optional<PlanePoint>> slots(end - begin);
    parallel_for(slots.size(), config_.threads, [&](std::size_t i) { slots[i] = run(begin + i); });
    std::vector<TrialOutcome> out;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i]) out.push_back(TrialOutcome{begin + i, *slots[i]});
    }
    return out;
  }

 private:
  const CloudConfig& config_;
  FidelityEvaluator fid_;
  CountsRecord ideal_;
};

void require_cloud_config(const DensityMatrix& target, const CloudConfig& config) {
  if (target.dim() != 4) throw Error(Errc::DimensionMismatch, "tomography needs a two-qubit target");
  if (config.budget == 0) throw Error(Errc::InvalidArgument, "budget must be positive");
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
    throw Error(Errc::InvalidLevel, "acceptance threshold must be in [0, 1]");
  }
}

void append(CloudResult& result, const TrialOutcome& o, const CloudConfig& config) {
  result.accepted_points.push_back(o.point);
  result.accepted_trials.push_back(o.trial);
  result.trial_seeds.push_back(derive_seed(config.seed, o.trial));
}

constexpr std::uint64_t kBatch = 1 << 15;

}  // namespace

const std::array<MeasurementSetting, kSettingCount>& tomography_settings() {
  static const auto settings = build_settings();
  return settings;
}

double budget_per_setting(std::uint64_t budget) noexcept {
  return static_cast<double>(budget) / static_cast<double>(kOutcomesPerBasis);
}

CountsRecord ideal_counts(const DensityMatrix& rho, std::uint64_t budget) {
  if (rho.dim() != 4) throw Error(Errc::DimensionMismatch, "tomography needs a two-qubit state");
  if (budget == 0) throw Error(Errc::InvalidArgument, "budget must be positive");
  CountsRecord rec;
  rec.total_budget = budget;
  const double per_setting = budget_per_setting(budget);
  const auto& settings = tomography_settings();
  for (std::size_t k = 0; k < kSettingCount; ++k) {
    rec.setting_labels[k] = settings[k].label;
    const double p = (rho.matrix() * settings[k].projector).trace().real();
    rec.expected[k] = per_setting * std::max(p, 0.0);
  }
  return rec;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  // splitmix64 finalizer over a golden-ratio stride.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t sample_poisson(double mean, std::uint64_t stream_seed) {
  if (!(mean > 0.0)) return 0;
  CounterStream gen(stream_seed);
  if (mean < kPoissonInversionLimit) {
    const double u = gen.uniform01();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && k < 10000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p == 0.0) break;
    }
    return k;
  }
  // Box-Muller; 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - gen.uniform01();
  const double u2 = gen.uniform01();
  const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  const double x = std::round(mean + std::sqrt(mean) * z);
  return x <= 0.0 ? 0 : static_cast<std::uint64_t>(x);
}

CountsRecord perturb_counts(const CountsRecord& rec, std::uint64_t seed) {
  CountsRecord out = rec;
  out.seed = seed;
  for (std::size_t k = 0; k < kSettingCount; ++k) out.observed[k] = sample_poisson(rec.expected[k], derive_seed(seed, k));
  out.has_observed = true;
  return out;
}

std::vector<double> project_to_simplex(std::vector<double> values) {
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double shift = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) shift = candidate;
  }
  for (double& x : values) x = std::max(x - shift, 0.0);
  return values;
}

DensityMatrix reconstruct_from_counts(const std::array<double, kSettingCount>& counts) {
  for (double c : counts) {
    if (!(c >= 0.0)) throw Error(Errc::InvalidArgument, "counts must be non-negative");
  }
  const Design& inv = inverse_design();
  ComplexMatrix x(4);
  for (std::size_t m = 0; m < kSettingCount; ++m) {
    Complex s = 0.0;
    for (std::size_t k = 0; k < kSettingCount; ++k) s += inv[m][k] * counts[k];
    x(m / 4, m % 4) = s;
  }
  x = (x + x.adjoint()) * Complex{0.5};
  const double norm = x.trace().real();
  if (!(norm > 0.0)) throw Error(Errc::InvalidArgument, "counts carry no normalization (all zero?)");
  x *= Complex{1.0 / norm};

  const HermitianSpectrum spec = hermitian_eig(x);
  const std::vector<double> projected = project_to_simplex(spec.eigenvalues);
  ComplexMatrix rho = spec.compose(projected);
  rho = (rho + rho.adjoint()) * Complex{0.5};
  // Renormalize away the rounding left by the projection and recomposition.
  rho *= Complex{1.0 / rho.trace().real()};
  return DensityMatrix(rho);
}

DensityMatrix reconstruct(const CountsRecord& rec) {
  if (!rec.has_observed) throw Error(Errc::InvalidArgument, "counts record has no observed counts");
  std::array<double, kSettingCount> counts{};
  for (std::size_t k = 0; k < kSettingCount; ++k) counts[k] = static_cast<double>(rec.observed[k]);
  return reconstruct_from_counts(counts);
}

CloudResult monte_carlo_cloud(const DensityMatrix& target, std::uint64_t trials, const CloudConfig& config) {
  require_cloud_config(target, config);
  if (trials == 0) throw Error(Errc::InvalidArgument, "trials must be positive");
  const TrialRunner runner(target, config);
  CloudResult result;
  result.acceptance_threshold = config.threshold;
  result.target_label = config.target_label;
  for (std::uint64_t begin = 0; begin < trials; begin += kBatch) {
    for (const auto& o : runner.batch(begin, std::min(trials, begin + kBatch))) append(result, o, config);
  }
  result.trials_run = trials;
  return result;
}

CloudResult accumulate_cloud(const DensityMatrix& target, std::uint64_t accepted, std::uint64_t max_trials,
                             const CloudConfig& config) {
  require_cloud_config(target, config);
  if (accepted == 0) throw Error(Errc::InvalidArgument, "accepted count must be positive");
  const TrialRunner runner(target, config);
  CloudResult result;
  result.acceptance_threshold = config.threshold;
  result.target_label = config.target_label;
  std::uint64_t begin = 0;
  while (result.accepted_points.size() < accepted && begin < max_trials) {
    const std::uint64_t end = std::min(max_trials, begin + kBatch);
    for (const auto& o : runner.batch(begin, end)) {
      if (result.accepted_points.size() == accepted) break;
      append(result, o, config);
    }
    begin = end;
  }
  result.trials_run = result.accepted_points.size() == accepted ? result.accepted_trials.back() + 1 : begin;
  return result;
}

}  // namespace qsens
