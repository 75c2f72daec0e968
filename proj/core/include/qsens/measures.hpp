#pragma once

#include "qsens/linalg.hpp"
#include "qsens/states.hpp"

namespace qsens {

/// Contributions from eigenvalues below this are taken as 0 ln 0 = 0.
inline constexpr double kEntropyCutoff = 1e-15;

/// Uhlmann-Jozsa fidelity |Tr sqrt(sqrt(target) perturbed sqrt(target))|^2,
/// clamped to [0, 1].
double fidelity(const DensityMatrix& target, const DensityMatrix& perturbed);
/// sqrt(F).
double amplitude_fidelity(const DensityMatrix& target, const DensityMatrix& perturbed);

/// Fidelity against one fixed target, with sqrt(target) computed once.
class FidelityEvaluator {
 public:
  explicit FidelityEvaluator(const DensityMatrix& target);

  double amplitude(const DensityMatrix& perturbed) const;
  double operator()(const DensityMatrix& perturbed) const {
    const double f = amplitude(perturbed);
    return f * f;
  }
  std::size_t dim() const noexcept { return sqrt_target_.dim(); }

 private:
  ComplexMatrix sqrt_target_;
};

/// (1/2) Tr |a - b|
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// N/(N-1) (1 - Tr rho^2)
double linear_entropy(const DensityMatrix& rho);
double purity(const DensityMatrix& rho);

/// -Tr(rho ln rho), in nats.
double von_neumann_entropy(const DensityMatrix& rho);

/// (sigma_y x sigma_y) rho* (sigma_y x sigma_y); two-qubit states only.
ComplexMatrix spin_flip(const DensityMatrix& rho);

/// Square roots of the eigenvalues of rho * spin_flip(rho), descending. They
/// are obtained from the Hermitian matrix sqrt(rho) rho~ sqrt(rho), which has
/// the same spectrum.
std::vector<double> concurrence_roots(const DensityMatrix& rho);

/// Wootters concurrence max{0, s1 - s2 - s3 - s4}.
double concurrence(const DensityMatrix& rho);
double tangle(const DensityMatrix& rho);

struct MeasureReport {
  double fidelity = 0.0;
  double amplitude_fidelity = 0.0;
  double trace_distance = 0.0;
  double linear_entropy = 0.0;
  double von_neumann_entropy = 0.0;
  double concurrence = 0.0;
  double tangle = 0.0;
};

/// Pair measures between target and perturbed; single-state measures of
/// `perturbed`.
MeasureReport measure_pair(const DensityMatrix& target, const DensityMatrix& perturbed);

/// Single-state measures only; the pair fields compare rho with itself.
MeasureReport measure_state(const DensityMatrix& rho);

}  // namespace qsens
