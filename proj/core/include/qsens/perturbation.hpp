#pragma once

// Small-eps behaviour of each benchmark under rho -> (1 - eps) rho + (eps/N) 1.

#include <span>
#include <string_view>
#include <vector>

#include "qsens/states.hpp"

namespace qsens {

enum class Measure {
  AmplitudeFidelity,
  Fidelity,
  TraceDistance,
  LinearEntropy,
  VonNeumannEntropy,
  Concurrence,
  Tangle,
};

std::string_view to_string(Measure m) noexcept;

/// Eigenvalues below this count as zero when splitting rank into nonzero and
/// zero parts. Every expansion coefficient forks on it.
inline constexpr double kRankCutoff = 1e-12;

struct RankInfo {
  std::size_t n_nonzero = 0;
  std::size_t n_zero = 0;
};

RankInfo rank_info(const DensityMatrix& rho);

struct SensitivityExpansion {
  Measure measure = Measure::AmplitudeFidelity;
  double constant = 0.0;
  double coeff_eps = 0.0;
  double coeff_eps2 = 0.0;
  double coeff_eps_log_eps = 0.0;
  RankInfo rank;
  /// Largest eps for which the expansion is claimed; exact relations use 1.
  double validity_bound = 1.0;

  /// Concurrence and tangle: one weight w per zero eigenvalue of rho rho~,
  /// contributing -scale * sqrt(w eps (1 - eps) + eps^2 / 16).
  std::vector<double> zero_mode_weights;
  double zero_mode_scale = 1.0;
  /// Concurrence on full-rank input: the linear coefficient is below 1e-10.
  bool vanishing_linear_term = false;

  /// Approximate measure change (or value, for the fidelity types) at eps.
  double evaluate(double eps) const;
};

/// f(rho, rho') to second order.
SensitivityExpansion expand_amplitude_fidelity(const DensityMatrix& rho);
/// D(rho, rho') = (eps/2) sum |lambda_i - 1/N|, exact.
SensitivityExpansion expand_trace_distance(const DensityMatrix& rho);
/// Delta S_L = (2 eps - eps^2)(1 - S_L), exact.
SensitivityExpansion expand_linear_entropy(const DensityMatrix& rho);
/// Delta S_V to first order, including the eps ln eps term from zero eigenvalues.
SensitivityExpansion expand_von_neumann(const DensityMatrix& rho);
/// Delta C to first order. Throws NotEntangled when C(rho) = 0.
SensitivityExpansion expand_concurrence(const DensityMatrix& rho);
/// Delta T ~ 2 C Delta C.
SensitivityExpansion expand_tangle(const DensityMatrix& rho);

SensitivityExpansion expand(Measure measure, const DensityMatrix& rho);

/// Exact comparison through the measures module. Fidelity types and trace
/// distance return the pair value between rho and its depolarized version;
/// single-state measures return measure(rho') - measure(rho).
double exact_delta(Measure measure, const DensityMatrix& rho, double eps);

/// Magnitude of the change at eps: |1 - f| for fidelity types, |delta| otherwise.
double exact_deviation(Measure measure, const DensityMatrix& rho, double eps);

struct ScalingReport {
  Measure measure = Measure::AmplitudeFidelity;
  /// Slope of log|deviation| against log eps; NaN when every deviation is zero.
  double estimated_order = 0.0;
  double r_squared = 0.0;
  /// Deviation / eps grows like a ln(1/eps) with a clearly nonzero a.
  bool flagged_log_term = false;
  double max_abs_deviation = 0.0;
};

/// Deviations below this are treated as no change at all (fixed points).
inline constexpr double kNoChangeLevel = 1e-14;

/// Log-log regression of the exact deviation over eps_grid. Throws
/// DegenerateGrid unless the grid has at least two distinct values in (0, 1].
ScalingReport order_scaling_report(const DensityMatrix& rho, Measure measure, std::span<const double> eps_grid);

/// Geometric grid from eps_max down to eps_min with `points` values.
std::vector<double> geometric_grid(double eps_min, double eps_max, std::size_t points);

}  // namespace qsens
