#pragma once

// Two-qubit state families in the computational basis (|00>, |01>, |10>, |11>).

#include <filesystem>
#include <string>
#include <variant>

#include "qsens/linalg.hpp"

namespace qsens {

inline constexpr double kStateHermiticityTol = 1e-10;
inline constexpr double kStateTraceTol = 1e-10;
inline constexpr double kStateNegativityTol = 1e-9;

/// Hermitian, unit-trace, positive semidefinite operator. Every instance has
/// passed validation; there is no way to build an unchecked one.
class DensityMatrix {
 public:
  /// Throws Error(InvalidState) with a diagnostic describing the violation.
  explicit DensityMatrix(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return matrix_.dim(); }
  bool validated() const noexcept { return true; }

  /// Eigenvalues computed during validation, descending.
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }

 private:
  ComplexMatrix matrix_;
  std::vector<double> eigenvalues_;
};

struct PureParams {
  double theta;  // radians
};
struct Rho1Params {
  double eps;
  double theta;  // radians
};
struct MemsParams {
  double r;
};
struct Rho2Params {
  double eps;
  double r;
};
struct FullyMixedParams {
  std::size_t n;
};

using FamilyParams = std::variant<PureParams, Rho1Params, MemsParams, Rho2Params, FullyMixedParams>;

enum class MemsBranch { I, II };

/// Branch I for r > 2/3, branch II for r <= 2/3 (the formulas coincide at 2/3).
MemsBranch mems_branch(double r) noexcept;

/// Raw matrix of one branch formula, without validation.
ComplexMatrix mems_branch_matrix(MemsBranch branch, double r);

/// cos(2 theta)|00> + sin(2 theta)|11>
DensityMatrix pure_nonmax(double theta);
DensityMatrix phi_plus();
/// |ab> for a, b in {0, 1}.
DensityMatrix basis_state(int a, int b);
DensityMatrix fully_mixed(std::size_t n);

/// (1 - eps) rho + (eps / N) 1_N; eps in [0, 1].
DensityMatrix depolarize(const DensityMatrix& rho, double eps);

DensityMatrix rho1(double eps, double theta);
DensityMatrix mems(double r);
DensityMatrix rho2(double eps, double r);

DensityMatrix make_state(const FamilyParams& params);
std::string describe(const FamilyParams& params);

/// The rank-four X state used as the open-plane target (diagonal 0.7113,
/// 0.0564, 0.0564, 0.1760; corners 0.2800). Published to four decimals, so the
/// entries are rescaled by their trace (1.0001) to give a unit-trace state.
DensityMatrix open_plane_target();

double degrees_to_radians(double deg) noexcept;

// JSON matrix format: {"dim": N, "re": [[...]], "im": [[...]]}, row-major.
ComplexMatrix parse_matrix_json(const std::string& text);
std::string matrix_to_json(const ComplexMatrix& m, int precision = 17);
DensityMatrix read_density_matrix_json(const std::filesystem::path& path);

}  // namespace qsens
