#include "qsens/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qsens/error.hpp"

namespace qsens {

namespace {

void check_dim(std::size_t dim) {
  if (dim == 0 || dim > kMaxDim) {
    throw Error(Errc::DimensionMismatch,
                "matrix dimension " + std::to_string(dim) + " outside 1.." +
                    std::to_string(kMaxDim));
  }
}

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::DimensionMismatch, std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
}

void require_hermitian(const ComplexMatrix& m, double tol) {
  const double err = m.hermiticity_error();
  if (!(err <= tol)) {
    throw Error(Errc::NotHermitian, "max |m - m^dagger| = " + std::to_string(err));
  }
}

double off_diagonal_norm(const ComplexMatrix& a) {
  double sum = 0.0;
  for (std::size_t p = 0; p < a.dim(); ++p) {
    for (std::size_t q = 0; q < a.dim(); ++q) {
      if (p != q) sum += std::norm(a(p, q));
    }
  }
  return std::sqrt(sum);
}

// One complex Jacobi rotation annihilating a(p,q). The 2x2 rotation is a
// phase D = diag(1, e^{-i phi}) that makes a(p,q) real, followed by the
// classic real symmetric rotation.
void rotate(ComplexMatrix& a, ComplexMatrix* v, std::size_t p, std::size_t q) {
  const Complex g = a(p, q);
  const double mag = std::abs(g);
  const Complex phase = g / mag;
  const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Complex jpp = c;
  const Complex jpq = s;
  const Complex jqp = -s * std::conj(phase);
  const Complex jqq = c * std::conj(phase);

  const std::size_t n = a.dim();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = akp * jpp + akq * jqp;
    a(k, q) = akp * jpq + akq * jqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = a(p, p).real();
  a(q, q) = a(q, q).real();

  if (v != nullptr) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex vkp = (*v)(k, p);
      const Complex vkq = (*v)(k, q);
      (*v)(k, p) = vkp * jpp + vkq * jqp;
      (*v)(k, q) = vkp * jpq + vkq * jqq;
    }
  }
}

void sweep(ComplexMatrix& a, ComplexMatrix* v) {
  const std::size_t n = a.dim();
  for (std::size_t p = 0; p + 1 < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double mag = std::abs(a(p, q));
      if (mag == 0.0) continue;
      // Negligible against both diagonal entries: drop instead of rotating.
      const double app = std::abs(a(p, p).real());
      const double aqq = std::abs(a(q, q).real());
      if (app + 1e3 * mag == app && aqq + 1e3 * mag == aqq) {
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        continue;
      }
      rotate(a, v, p, q);
    }
  }
}

// Diagonalizes a in place; eigenvalues end up on the diagonal.
void jacobi(ComplexMatrix& a, ComplexMatrix* v) {
  const double scale = a.frobenius_norm();
  if (scale == 0.0) return;
  const double tol = kJacobiOffDiagonalTol * std::max(scale, 1.0);
  for (int s = 0; s < kJacobiMaxSweeps; ++s) {
    if (off_diagonal_norm(a) <= tol) {
      // Quadratic convergence: one more sweep drives the residual to rounding level.
      sweep(a, v);
      return;
    }
    sweep(a, v);
  }
  if (off_diagonal_norm(a) > tol) {
    throw Error(Errc::NoConvergence, "Jacobi exceeded " + std::to_string(kJacobiMaxSweeps) + " sweeps");
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim) { check_dim(dim); }

ComplexMatrix::ComplexMatrix(std::size_t dim, std::initializer_list<Complex> row_major) : dim_(dim) {
  check_dim(dim);
  if (row_major.size() != dim * dim) {
    throw Error(Errc::DimensionMismatch, "expected " + std::to_string(dim * dim) + " entries, got " +
                                             std::to_string(row_major.size()));
  }
  auto it = row_major.begin();
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) (*this)(i, j) = *it++;
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::projector(std::span<const Complex> v) {
  ComplexMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = v[i] * std::conj(v[j]);
  }
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix r(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) r(i, j) = std::conj((*this)(j, i));
  }
  return r;
}

ComplexMatrix ComplexMatrix::conjugate() const {
  ComplexMatrix r(*this);
  for (auto& z : r.data_) z = std::conj(z);
  return r;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& z : data_) s += std::norm(z);
  return std::sqrt(s);
}

double ComplexMatrix::hermiticity_error() const {
  double err = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j) {
      err = std::max(err, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    }
  }
  return err;
}

bool ComplexMatrix::approx_equal(const ComplexMatrix& other, double tol) const {
  if (dim_ != other.dim_) return false;
  for (std::size_t k = 0; k < data_.size(); ++k) {
    if (!(std::abs(data_[k] - other.data_[k]) <= tol)) return false;
  }
  return true;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& rhs) {
  require_same_dim(*this, rhs);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += rhs.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& rhs) {
  require_same_dim(*this, rhs);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= rhs.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& z : data_) z *= scale;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b);
  const std::size_t n = a.dim();
  ComplexMatrix r(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
    }
  }
  return r;
}

bool operator==(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.dim_ == b.dim_ && a.data_ == b.data_;
}

std::vector<Complex> HermitianSpectrum::eigenvector(std::size_t k) const {
  std::vector<Complex> v(dim());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = eigenvectors(i, k);
  return v;
}

ComplexMatrix HermitianSpectrum::reconstruct() const { return compose(eigenvalues); }

ComplexMatrix HermitianSpectrum::compose(std::span<const double> values) const {
  const std::size_t n = dim();
  ComplexMatrix r(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (values[k] == 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const Complex vik = values[k] * eigenvectors(i, k);
      for (std::size_t j = 0; j < n; ++j) r(i, j) += vik * std::conj(eigenvectors(j, k));
    }
  }
  return r;
}

HermitianSpectrum hermitian_eig(const ComplexMatrix& m, double hermiticity_tol) {
  require_hermitian(m, hermiticity_tol);
  const std::size_t n = m.dim();
  ComplexMatrix a = m;
  ComplexMatrix v = ComplexMatrix::identity(n);
  jacobi(a, &v);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x).real() > a(y, y).real(); });

  HermitianSpectrum spec{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    spec.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) spec.eigenvectors(i, k) = v(i, order[k]);
  }
  return spec;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m, double hermiticity_tol) {
  require_hermitian(m, hermiticity_tol);
  ComplexMatrix a = m;
  jacobi(a, nullptr);
  std::vector<double> ev(m.dim());
  for (std::size_t i = 0; i < ev.size(); ++i) ev[i] = a(i, i).real();
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::vector<double> clamp_psd_spectrum(std::span<const double> eigenvalues, double clamp_tol) {
  double largest = 0.0;
  for (double x : eigenvalues) largest = std::max(largest, std::abs(x));
  const double floor = kSpectrumNoiseFloor * largest;
  std::vector<double> out(eigenvalues.begin(), eigenvalues.end());
  for (double& x : out) {
    if (x < -clamp_tol) {
      throw Error(Errc::NotPSD, "eigenvalue " + std::to_string(x) + " below -" + std::to_string(clamp_tol));
    }
    if (x <= floor) x = 0.0;
  }
  return out;
}

ComplexMatrix sqrt_psd(const ComplexMatrix& m, double clamp_tol) {
  const HermitianSpectrum spec = hermitian_eig(m);
  std::vector<double> roots = clamp_psd_spectrum(spec.eigenvalues, clamp_tol);
  for (double& x : roots) x = std::sqrt(x);
  return spec.compose(roots);
}

double trace_norm(const ComplexMatrix& m, double hermiticity_tol) {
  double sum = 0.0;
  for (double x : hermitian_eigenvalues(m, hermiticity_tol)) sum += std::abs(x);
  return sum;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t n = a.dim() * b.dim();
  ComplexMatrix r(n);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < a.dim(); ++j) {
      for (std::size_t k = 0; k < b.dim(); ++k) {
        for (std::size_t l = 0; l < b.dim(); ++l) {
          r(i * b.dim() + k, j * b.dim() + l) = a(i, j) * b(k, l);
        }
      }
    }
  }
  return r;
}

ComplexMatrix pauli_y() {
  const Complex i{0.0, 1.0};
  return ComplexMatrix(2, {0.0, -i, i, 0.0});
}

}  // namespace qsens
