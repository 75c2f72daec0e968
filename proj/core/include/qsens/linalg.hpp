#pragma once

// Dense complex linear algebra for the 2x2 and 4x4 operators of two-qubit
// state analysis. Matrices are small value types with inline storage.

#include <array>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace qsens {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDim = 4;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  /// Zero matrix of the given dimension (1..kMaxDim).
  explicit ComplexMatrix(std::size_t dim);
  /// Row-major entries; the list must hold exactly dim*dim values.
  ComplexMatrix(std::size_t dim, std::initializer_list<Complex> row_major);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const double> diag);
  /// |v><v| for a column vector v.
  static ComplexMatrix projector(std::span<const Complex> v);

  std::size_t dim() const noexcept { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) noexcept {
    return data_[row * kMaxDim + col];
  }
  const Complex& operator()(std::size_t row, std::size_t col) const noexcept {
    return data_[row * kMaxDim + col];
  }

  ComplexMatrix adjoint() const;
  ComplexMatrix conjugate() const;
  Complex trace() const;

  /// Largest absolute entry.
  double max_abs() const;
  double frobenius_norm() const;
  /// max |m - m^dagger| over entries.
  double hermiticity_error() const;

  /// Exact on dimension, entrywise max-norm tolerance on values.
  bool approx_equal(const ComplexMatrix& other, double tol) const;

  ComplexMatrix& operator+=(const ComplexMatrix& rhs);
  ComplexMatrix& operator-=(const ComplexMatrix& rhs);
  ComplexMatrix& operator*=(Complex scale);

  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
  friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
  friend ComplexMatrix operator*(ComplexMatrix m, Complex s) { return m *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

  friend bool operator==(const ComplexMatrix& a, const ComplexMatrix& b);

 private:
  std::size_t dim_ = 0;
  std::array<Complex, kMaxDim * kMaxDim> data_{};
};

/// Eigenvalues sorted descending; column k of `eigenvectors` pairs with
/// eigenvalues[k].
struct HermitianSpectrum {
  std::vector<double> eigenvalues;
  ComplexMatrix eigenvectors;

  std::size_t dim() const noexcept { return eigenvalues.size(); }
  std::vector<Complex> eigenvector(std::size_t k) const;
  /// sum_k lambda_k v_k v_k^dagger
  ComplexMatrix reconstruct() const;
  /// sum_k g(lambda_k) v_k v_k^dagger
  template <class Fn>
  ComplexMatrix apply(Fn&& g) const {
    std::vector<double> mapped(eigenvalues.size());
    for (std::size_t k = 0; k < mapped.size(); ++k) mapped[k] = g(eigenvalues[k]);
    return compose(mapped);
  }
  ComplexMatrix compose(std::span<const double> values) const;
};

inline constexpr double kDefaultHermiticityTol = 1e-10;
inline constexpr double kDefaultClampTol = 1e-9;
inline constexpr int kJacobiMaxSweeps = 100;
inline constexpr double kJacobiOffDiagonalTol = 1e-13;

/// Cyclic complex Jacobi eigensolver. Throws NotHermitian or NoConvergence.
HermitianSpectrum hermitian_eig(const ComplexMatrix& m,
                                double hermiticity_tol = kDefaultHermiticityTol);

/// Eigenvalues only (descending); skips eigenvector accumulation.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m,
                                          double hermiticity_tol = kDefaultHermiticityTol);

/// Relative level below which an eigenvalue of a PSD matrix is treated as
/// rounding noise around zero. Jacobi's backward error on 4x4 inputs sits a
/// couple of orders below this.
inline constexpr double kSpectrumNoiseFloor = 1e-14;

/// Maps a PSD spectrum to clean non-negative values: entries below
/// -clamp_tol throw NotPSD; entries in [-clamp_tol, floor] become zero, where
/// floor = kSpectrumNoiseFloor * max|lambda|.
std::vector<double> clamp_psd_spectrum(std::span<const double> eigenvalues,
                                       double clamp_tol = kDefaultClampTol);

/// Principal square root of a PSD matrix.
ComplexMatrix sqrt_psd(const ComplexMatrix& m, double clamp_tol = kDefaultClampTol);

/// sum_i |lambda_i| for Hermitian m.
double trace_norm(const ComplexMatrix& m, double hermiticity_tol = kDefaultHermiticityTol);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix pauli_y();

}  // namespace qsens
