#include "qsens/measures.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qsens/error.hpp"

namespace qsens {

namespace {

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::DimensionMismatch, "states of dimension " + std::to_string(a.dim()) + " and " +
                                             std::to_string(b.dim()));
  }
}

void require_two_qubit(const DensityMatrix& rho) {
  if (rho.dim() != 4) {
    throw Error(Errc::DimensionMismatch, "two-qubit measure needs dim 4, got " + std::to_string(rho.dim()));
  }
}

// Intermediates that should be in [0, 1] may drift by rounding.
double clamp_unit(double x, const char* what) {
  constexpr double slack = 1e-9;
  if (x < -slack || x > 1.0 + slack) {
    throw Error(Errc::NotPSD, std::string(what) + " = " + std::to_string(x) + " outside [0, 1]");
  }
  return std::clamp(x, 0.0, 1.0);
}

const ComplexMatrix& sigma_yy() {
  static const ComplexMatrix yy = kron(pauli_y(), pauli_y());
  return yy;
}

}  // namespace

FidelityEvaluator::FidelityEvaluator(const DensityMatrix& target) : sqrt_target_(sqrt_psd(target.matrix())) {}

double FidelityEvaluator::amplitude(const DensityMatrix& perturbed) const {
  if (perturbed.dim() != sqrt_target_.dim()) {
    throw Error(Errc::DimensionMismatch, "states of dimension " + std::to_string(sqrt_target_.dim()) + " and " +
                                             std::to_string(perturbed.dim()));
  }
  const ComplexMatrix inner = sqrt_target_ * perturbed.matrix() * sqrt_target_;
  // The product is Hermitian up to rounding in the two multiplications.
  ComplexMatrix sym = (inner + inner.adjoint()) * Complex{0.5};
  const std::vector<double> ev = clamp_psd_spectrum(hermitian_eigenvalues(sym));
  double f = 0.0;
  for (double x : ev) f += std::sqrt(x);
  return clamp_unit(f, "amplitude fidelity");
}

double fidelity(const DensityMatrix& target, const DensityMatrix& perturbed) {
  require_same_dim(target, perturbed);
  return FidelityEvaluator(target)(perturbed);
}

double amplitude_fidelity(const DensityMatrix& target, const DensityMatrix& perturbed) {
  require_same_dim(target, perturbed);
  return FidelityEvaluator(target).amplitude(perturbed);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a, b);
  return 0.5 * trace_norm(a.matrix() - b.matrix());
}

double purity(const DensityMatrix& rho) {
  // Tr(rho^2) = sum_ij |rho_ij|^2 for Hermitian rho.
  const double p = rho.matrix().frobenius_norm();
  return p * p;
}

double linear_entropy(const DensityMatrix& rho) {
  const double n = static_cast<double>(rho.dim());
  if (rho.dim() == 1) return 0.0;
  return clamp_unit(n / (n - 1.0) * (1.0 - purity(rho)), "linear entropy");
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double s = 0.0;
  for (double x : rho.eigenvalues()) {
    if (x > kEntropyCutoff) s -= x * std::log(x);
  }
  return std::max(s, 0.0);
}

ComplexMatrix spin_flip(const DensityMatrix& rho) {
  require_two_qubit(rho);
  const ComplexMatrix& yy = sigma_yy();
  return yy * rho.matrix().conjugate() * yy;
}

std::vector<double> concurrence_roots(const DensityMatrix& rho) {
  require_two_qubit(rho);
  const ComplexMatrix root = sqrt_psd(rho.matrix());
  const ComplexMatrix r = root * spin_flip(rho) * root;
  const ComplexMatrix sym = (r + r.adjoint()) * Complex{0.5};
  std::vector<double> ev = clamp_psd_spectrum(hermitian_eigenvalues(sym));
  for (double& x : ev) x = std::sqrt(x);
  return ev;
}

double concurrence(const DensityMatrix& rho) {
  const std::vector<double> s = concurrence_roots(rho);
  const double c = s[0] - s[1] - s[2] - s[3];
  return std::clamp(c, 0.0, 1.0);
}

double tangle(const DensityMatrix& rho) {
  const double c = concurrence(rho);
  return c * c;
}

MeasureReport measure_pair(const DensityMatrix& target, const DensityMatrix& perturbed) {
  MeasureReport r;
  r.amplitude_fidelity = amplitude_fidelity(target, perturbed);
  r.fidelity = r.amplitude_fidelity * r.amplitude_fidelity;
  r.trace_distance = trace_distance(target, perturbed);
  r.linear_entropy = linear_entropy(perturbed);
  r.von_neumann_entropy = von_neumann_entropy(perturbed);
  if (perturbed.dim() == 4) {
    r.concurrence = concurrence(perturbed);
    r.tangle = r.concurrence * r.concurrence;
  }
  return r;
}

MeasureReport measure_state(const DensityMatrix& rho) { return measure_pair(rho, rho); }

}  // namespace qsens
