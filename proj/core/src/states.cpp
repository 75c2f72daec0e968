#include "qsens/states.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qsens/error.hpp"

namespace qsens {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

void require_eps(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(Errc::EpsilonOutOfRange, "eps = " + fmt(eps));
}

void require_r(double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw Error(Errc::ROutOfRange, "r = " + fmt(r));
}

ComplexMatrix x_state(double d00, double d01, double d10, double d11, double corner) {
  ComplexMatrix m(4);
  m(0, 0) = d00;
  m(1, 1) = d01;
  m(2, 2) = d10;
  m(3, 3) = d11;
  m(0, 3) = corner;
  m(3, 0) = corner;
  return m;
}

}  // namespace

ComplexMatrix mems_branch_matrix(MemsBranch branch, double r) {
  if (branch == MemsBranch::I) return x_state(r / 2, 1 - r, 0, r / 2, r / 2);
  return x_state(1.0 / 3, 1.0 / 3, 0, 1.0 / 3, r / 2);
}

DensityMatrix::DensityMatrix(const ComplexMatrix& m) : matrix_(m) {
  if (m.dim() == 0) throw Error(Errc::InvalidState, "empty matrix");
  const double herm = m.hermiticity_error();
  if (!(herm <= kStateHermiticityTol)) {
    throw Error(Errc::InvalidState, "not Hermitian: max |m - m^dagger| = " + fmt(herm));
  }
  const Complex tr = m.trace();
  if (!(std::abs(tr - Complex{1.0}) <= kStateTraceTol)) {
    std::ostringstream os;
    os.precision(12);
    os << "trace = " << tr.real() << (tr.imag() != 0.0 ? " + i" + fmt(tr.imag()) : "") << ", expected 1";
    throw Error(Errc::InvalidState, os.str());
  }
  eigenvalues_ = hermitian_eigenvalues(m, kStateHermiticityTol);
  if (eigenvalues_.back() < -kStateNegativityTol) {
    throw Error(Errc::InvalidState, "not positive semidefinite: smallest eigenvalue " + fmt(eigenvalues_.back()));
  }
}

MemsBranch mems_branch(double r) noexcept { return r > 2.0 / 3.0 ? MemsBranch::I : MemsBranch::II; }

DensityMatrix pure_nonmax(double theta) {
  const std::array<Complex, 4> v{std::cos(2 * theta), 0.0, 0.0, std::sin(2 * theta)};
  return DensityMatrix(ComplexMatrix::projector(v));
}

DensityMatrix phi_plus() { return pure_nonmax(std::numbers::pi / 8); }

DensityMatrix basis_state(int a, int b) {
  if ((a != 0 && a != 1) || (b != 0 && b != 1)) {
    throw Error(Errc::InvalidArgument, "basis labels must be 0 or 1");
  }
  std::array<Complex, 4> v{};
  v[static_cast<std::size_t>(2 * a + b)] = 1.0;
  return DensityMatrix(ComplexMatrix::projector(v));
}

DensityMatrix fully_mixed(std::size_t n) {
  if (n != 2 && n != 4) throw Error(Errc::DimensionMismatch, "fully mixed state needs N in {2, 4}");
  return DensityMatrix(ComplexMatrix::identity(n) * Complex{1.0 / static_cast<double>(n)});
}

DensityMatrix depolarize(const DensityMatrix& rho, double eps) {
  require_eps(eps);
  const std::size_t n = rho.dim();
  ComplexMatrix m = rho.matrix() * Complex{1.0 - eps};
  for (std::size_t i = 0; i < n; ++i) m(i, i) += eps / static_cast<double>(n);
  return DensityMatrix(m);
}

DensityMatrix rho1(double eps, double theta) {
  require_eps(eps);
  return depolarize(pure_nonmax(theta), eps);
}

DensityMatrix mems(double r) {
  require_r(r);
  return DensityMatrix(mems_branch_matrix(mems_branch(r), r));
}

DensityMatrix rho2(double eps, double r) {
  require_eps(eps);
  return depolarize(mems(r), eps);
}

DensityMatrix make_state(const FamilyParams& params) {
  struct Visitor {
    DensityMatrix operator()(const PureParams& p) const { return pure_nonmax(p.theta); }
    DensityMatrix operator()(const Rho1Params& p) const { return rho1(p.eps, p.theta); }
    DensityMatrix operator()(const MemsParams& p) const { return mems(p.r); }
    DensityMatrix operator()(const Rho2Params& p) const { return rho2(p.eps, p.r); }
    DensityMatrix operator()(const FullyMixedParams& p) const { return fully_mixed(p.n); }
  };
  return std::visit(Visitor{}, params);
}

std::string describe(const FamilyParams& params) {
  struct Visitor {
    std::string operator()(const PureParams& p) const { return "pure(theta=" + fmt(p.theta) + ")"; }
    std::string operator()(const Rho1Params& p) const {
      return "rho1(eps=" + fmt(p.eps) + ",theta=" + fmt(p.theta) + ")";
    }
    std::string operator()(const MemsParams& p) const { return "mems(r=" + fmt(p.r) + ")"; }
    std::string operator()(const Rho2Params& p) const {
      return "rho2(eps=" + fmt(p.eps) + ",r=" + fmt(p.r) + ")";
    }
    std::string operator()(const FullyMixedParams& p) const { return "mixed(n=" + std::to_string(p.n) + ")"; }
  };
  return std::visit(Visitor{}, params);
}

DensityMatrix open_plane_target() {
  ComplexMatrix m = x_state(0.7113, 0.0564, 0.0564, 0.1760, 0.2800);
  m *= Complex{1.0 / m.trace().real()};
  return DensityMatrix(m);
}

double degrees_to_radians(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

}  // namespace qsens
