#include "qsens/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "qsens/error.hpp"
#include "qsens/measures.hpp"

namespace qsens {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

double smallest_nonzero(const std::vector<double>& ev) {
  double m = std::numeric_limits<double>::infinity();
  for (double x : ev) {
    if (x > kRankCutoff) m = std::min(m, x);
  }
  return m;
}

bool is_fidelity_type(Measure m) { return m == Measure::AmplitudeFidelity || m == Measure::Fidelity; }

// k x k matrix with entries left_a^dagger g right_b.
ComplexMatrix compress(const ComplexMatrix& g, const std::vector<std::vector<Complex>>& left,
                       const std::vector<std::vector<Complex>>& right) {
  ComplexMatrix w(left.size());
  for (std::size_t a = 0; a < left.size(); ++a) {
    for (std::size_t b = 0; b < right.size(); ++b) {
      Complex s = 0.0;
      for (std::size_t i = 0; i < g.dim(); ++i) {
        for (std::size_t j = 0; j < g.dim(); ++j) s += std::conj(left[a][i]) * g(i, j) * right[b][j];
      }
      w(a, b) = s;
    }
  }
  return w;
}

std::vector<Complex> mat_vec(const ComplexMatrix& m, const std::vector<Complex>& v) {
  std::vector<Complex> out(m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) out[i] += m(i, j) * v[j];
  }
  return out;
}

// a^-1 b by Gauss-Jordan with partial pivoting.
ComplexMatrix solve(ComplexMatrix a, ComplexMatrix b) {
  const std::size_t n = a.dim();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    }
    if (std::abs(a(piv, col)) < 1e-10) {
      throw Error(Errc::NoConvergence, "zero eigenvalue of rho rho~ is defective; no first-order zero-mode weights");
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(col, j), a(piv, j));
      std::swap(b(col, j), b(piv, j));
    }
    const Complex inv = 1.0 / a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) *= inv;
      b(col, j) *= inv;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col) == Complex{}) continue;
      const Complex f = a(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        b(r, j) -= f * b(col, j);
      }
    }
  }
  return b;
}

// Eigenvalues of a small general complex matrix: characteristic polynomial by
// Faddeev-LeVerrier, roots by Durand-Kerner.
std::vector<Complex> general_eigenvalues(const ComplexMatrix& m) {
  const std::size_t n = m.dim();
  std::vector<Complex> coeff(n + 1);  // monic, coeff[k] multiplies x^(n-k)
  coeff[0] = 1.0;
  ComplexMatrix acc = ComplexMatrix::identity(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const ComplexMatrix am = m * acc;
    coeff[k] = -am.trace() / static_cast<double>(k);
    acc = am + ComplexMatrix::identity(n) * coeff[k];
  }
  auto poly = [&](Complex x) {
    Complex y = 0.0;
    for (const Complex& c : coeff) y = y * x + c;
    return y;
  };
  const double scale = 1.0 + m.max_abs() * static_cast<double>(n);
  std::vector<Complex> roots(n);
  for (std::size_t k = 0; k < n; ++k) roots[k] = scale * std::pow(Complex{0.4, 0.9}, static_cast<double>(k));
  for (int it = 0; it < 500; ++it) {
    double moved = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) denom *= roots[k] - roots[j];
      }
      if (denom == Complex{}) denom = 1e-300;
      const Complex step = poly(roots[k]) / denom;
      roots[k] -= step;
      moved = std::max(moved, std::abs(step));
    }
    if (moved <= 1e-15 * scale) break;
  }
  return roots;
}

// Eigenvectors for the `count` smallest eigenvalues of a PSD matrix.
std::vector<std::vector<Complex>> smallest_eigenvectors(const ComplexMatrix& m, std::size_t count) {
  const ComplexMatrix sym = (m + m.adjoint()) * Complex{0.5};
  const HermitianSpectrum spec = hermitian_eig(sym);
  std::vector<std::vector<Complex>> out;
  for (std::size_t k = spec.dim() - count; k < spec.dim(); ++k) out.push_back(spec.eigenvector(k));
  return out;
}

}  // namespace

std::string_view to_string(Measure m) noexcept {
  switch (m) {
    case Measure::AmplitudeFidelity: return "amplitude_fidelity";
    case Measure::Fidelity: return "fidelity";
    case Measure::TraceDistance: return "trace_distance";
    case Measure::LinearEntropy: return "linear_entropy";
    case Measure::VonNeumannEntropy: return "von_neumann_entropy";
    case Measure::Concurrence: return "concurrence";
    case Measure::Tangle: return "tangle";
  }
  return "unknown";
}

RankInfo rank_info(const DensityMatrix& rho) {
  RankInfo info;
  for (double x : rho.eigenvalues()) {
    if (x > kRankCutoff) {
      ++info.n_nonzero;
    } else {
      ++info.n_zero;
    }
  }
  return info;
}

double SensitivityExpansion::evaluate(double eps) const {
  double v = constant + coeff_eps * eps + coeff_eps2 * eps * eps;
  if (coeff_eps_log_eps != 0.0 && eps > 0.0) v += coeff_eps_log_eps * eps * std::log(eps);
  for (double w : zero_mode_weights) {
    v -= zero_mode_scale * std::sqrt(std::max(0.0, w * eps * (1.0 - eps) + eps * eps / 16.0));
  }
  return v;
}

SensitivityExpansion expand_amplitude_fidelity(const DensityMatrix& rho) {
  const double n = static_cast<double>(rho.dim());
  SensitivityExpansion e;
  e.measure = Measure::AmplitudeFidelity;
  e.rank = rank_info(rho);
  e.constant = 1.0;
  e.coeff_eps = -(0.5 - static_cast<double>(e.rank.n_nonzero) / (2.0 * n));
  double second = 0.0;
  double bound = 1.0;
  for (double lambda : rho.eigenvalues()) {
    if (lambda <= kRankCutoff) continue;
    const double ratio = (1.0 - n * lambda) / (n * lambda);
    second += lambda / 8.0 * ratio * ratio;
    const double gap = std::abs(1.0 - n * lambda);
    if (gap > 0.0) bound = std::min(bound, n * lambda / gap);
  }
  e.coeff_eps2 = -second;
  e.validity_bound = bound;
  return e;
}

SensitivityExpansion expand_trace_distance(const DensityMatrix& rho) {
  const double n = static_cast<double>(rho.dim());
  SensitivityExpansion e;
  e.measure = Measure::TraceDistance;
  e.rank = rank_info(rho);
  double sum = 0.0;
  for (double lambda : rho.eigenvalues()) sum += std::abs(lambda - 1.0 / n);
  e.coeff_eps = 0.5 * sum;
  return e;
}

SensitivityExpansion expand_linear_entropy(const DensityMatrix& rho) {
  const double headroom = 1.0 - linear_entropy(rho);
  SensitivityExpansion e;
  e.measure = Measure::LinearEntropy;
  e.rank = rank_info(rho);
  e.coeff_eps = 2.0 * headroom;
  e.coeff_eps2 = -headroom;
  return e;
}

SensitivityExpansion expand_von_neumann(const DensityMatrix& rho) {
  const double n = static_cast<double>(rho.dim());
  SensitivityExpansion e;
  e.measure = Measure::VonNeumannEntropy;
  e.rank = rank_info(rho);
  const double nonzero = static_cast<double>(e.rank.n_nonzero);
  const double zero = static_cast<double>(e.rank.n_zero);
  double log_sum = 0.0;
  for (double lambda : rho.eigenvalues()) {
    if (lambda > kRankCutoff) log_sum += std::log(lambda);
  }
  e.coeff_eps_log_eps = -zero / n;
  e.coeff_eps = 1.0 - von_neumann_entropy(rho) - nonzero / n + zero / n * std::log(n) - log_sum / n;
  e.validity_bound = std::min(1.0, n * smallest_nonzero(rho.eigenvalues()));
  return e;
}

// Eigenvalues lambda_i of A = rho rho~ are those of R = sqrt(rho) rho~ sqrt(rho).
// For R u = lambda u with lambda > 0, A has right eigenvector sqrt(rho) u and
// left eigenvector rho~ sqrt(rho) u, normalized so that l^dagger r = lambda.
// Depolarizing moves A by (eps/4)(rho + rho~) - 2 eps A at first order, so the
// shift of lambda within a degenerate block comes from the Hermitian matrix
// u_a^dagger rho u_b + w_a^dagger w_b with w = rho~ sqrt(rho) u / sqrt(lambda).
// Zero modes use the biorthogonal kernels of A and A^dagger.
SensitivityExpansion expand_concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw Error(Errc::DimensionMismatch, "concurrence expansion needs a two-qubit state");
  const double c = concurrence(rho);
  if (!(c > 0.0)) throw Error(Errc::NotEntangled, "C(rho) = 0; depolarizing keeps it separable");

  const HermitianSpectrum rho_spec = hermitian_eig(rho.matrix());
  std::vector<double> roots(4);
  for (std::size_t k = 0; k < 4; ++k) {
    const double lambda = std::max(rho_spec.eigenvalues[k], 0.0);
    roots[k] = lambda > kRankCutoff ? std::sqrt(lambda) : 0.0;
  }
  const ComplexMatrix sqrt_rho = rho_spec.compose(roots);
  const ComplexMatrix flipped = spin_flip(rho);
  const ComplexMatrix perturbation = rho.matrix() + flipped;

  ComplexMatrix r = sqrt_rho * flipped * sqrt_rho;
  r = (r + r.adjoint()) * Complex{0.5};
  const HermitianSpectrum r_spec = hermitian_eig(r);
  const std::vector<double> lambdas = clamp_psd_spectrum(r_spec.eigenvalues);

  SensitivityExpansion e;
  e.measure = Measure::Concurrence;
  e.rank = rank_info(rho);

  const ComplexMatrix lift = flipped * sqrt_rho;
  std::vector<double> shift(4, 0.0);
  std::vector<std::size_t> nonzero;
  for (std::size_t k = 0; k < 4; ++k) {
    if (lambdas[k] > kRankCutoff) nonzero.push_back(k);
  }
  for (std::size_t start = 0; start < nonzero.size();) {
    std::size_t stop = start + 1;
    const double head = lambdas[nonzero[start]];
    while (stop < nonzero.size() && std::abs(lambdas[nonzero[stop]] - head) <= 1e-8 * head) ++stop;
    std::vector<std::vector<Complex>> block, lifted;
    for (std::size_t k = start; k < stop; ++k) {
      block.push_back(r_spec.eigenvector(nonzero[k]));
      std::vector<Complex> w = mat_vec(lift, block.back());
      for (auto& z : w) z /= std::sqrt(lambdas[nonzero[k]]);
      lifted.push_back(std::move(w));
    }
    const ComplexMatrix ident = ComplexMatrix::identity(4);
    const ComplexMatrix w = compress(rho.matrix(), block, block) + compress(ident, lifted, lifted);
    const std::vector<double> values = hermitian_eigenvalues((w + w.adjoint()) * Complex{0.5});
    for (std::size_t k = start; k < stop; ++k) shift[nonzero[k]] = values[k - start];
    start = stop;
  }

  double bracket = 0.0;
  for (std::size_t idx = 0; idx < nonzero.size(); ++idx) {
    const std::size_t k = nonzero[idx];
    const double term = shift[k] / std::sqrt(lambdas[k]);
    bracket += (k == 0) ? term : -term;
  }
  e.constant = 0.0;
  e.coeff_eps = -c + bracket / 8.0;
  e.validity_bound = std::min(1.0, smallest_nonzero(lambdas));

  // First-order shifts of the zero eigenvalue: spectrum of
  // (L^dagger R)^-1 L^dagger (rho + rho~) R with R spanning ker A and L ker A^dagger.
  const std::size_t n_zero = 4 - nonzero.size();
  if (n_zero > 0) {
    const ComplexMatrix a_mat = rho.matrix() * flipped;
    const auto right = smallest_eigenvectors(a_mat.adjoint() * a_mat, n_zero);
    const auto left = smallest_eigenvectors(a_mat * a_mat.adjoint(), n_zero);
    const ComplexMatrix m = solve(compress(ComplexMatrix::identity(4), left, right),
                                  compress(perturbation, left, right));
    std::vector<double> values;
    for (const Complex& mu : general_eigenvalues(m)) values.push_back(std::max(mu.real(), 0.0));
    std::sort(values.begin(), values.end(), std::greater<>());
    for (double v : values) e.zero_mode_weights.push_back(v / 4.0);
  }

  e.vanishing_linear_term = n_zero == 0 && std::abs(e.coeff_eps) < 1e-10;
  return e;
}

SensitivityExpansion expand_tangle(const DensityMatrix& rho) {
  SensitivityExpansion e = expand_concurrence(rho);
  const double c = concurrence(rho);
  e.measure = Measure::Tangle;
  e.coeff_eps *= 2.0 * c;
  e.zero_mode_scale = 2.0 * c;
  return e;
}

SensitivityExpansion expand(Measure measure, const DensityMatrix& rho) {
  switch (measure) {
    case Measure::AmplitudeFidelity:
      return expand_amplitude_fidelity(rho);
    case Measure::Fidelity: {
      // F = f^2: (1 + a eps + b eps^2)^2 to second order.
      SensitivityExpansion e = expand_amplitude_fidelity(rho);
      const double a = e.coeff_eps;
      const double b = e.coeff_eps2;
      e.measure = Measure::Fidelity;
      e.coeff_eps = 2.0 * a;
      e.coeff_eps2 = a * a + 2.0 * b;
      return e;
    }
    case Measure::TraceDistance:
      return expand_trace_distance(rho);
    case Measure::LinearEntropy:
      return expand_linear_entropy(rho);
    case Measure::VonNeumannEntropy:
      return expand_von_neumann(rho);
    case Measure::Concurrence:
      return expand_concurrence(rho);
    case Measure::Tangle:
      return expand_tangle(rho);
  }
  throw Error(Errc::InvalidArgument, "unknown measure");
}

double exact_delta(Measure measure, const DensityMatrix& rho, double eps) {
  const DensityMatrix depolarized = depolarize(rho, eps);
  switch (measure) {
    case Measure::AmplitudeFidelity:
      return amplitude_fidelity(rho, depolarized);
    case Measure::Fidelity:
      return fidelity(rho, depolarized);
    case Measure::TraceDistance:
      return trace_distance(rho, depolarized);
    case Measure::LinearEntropy:
      return linear_entropy(depolarized) - linear_entropy(rho);
    case Measure::VonNeumannEntropy:
      return von_neumann_entropy(depolarized) - von_neumann_entropy(rho);
    case Measure::Concurrence:
      return concurrence(depolarized) - concurrence(rho);
    case Measure::Tangle:
      return tangle(depolarized) - tangle(rho);
  }
  throw Error(Errc::InvalidArgument, "unknown measure");
}

double exact_deviation(Measure measure, const DensityMatrix& rho, double eps) {
  const double v = exact_delta(measure, rho, eps);
  return is_fidelity_type(measure) ? std::abs(1.0 - v) : std::abs(v);
}

ScalingReport order_scaling_report(const DensityMatrix& rho, Measure measure, std::span<const double> eps_grid) {
  std::vector<double> grid(eps_grid.begin(), eps_grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.size() < 2 || !(grid.front() > 0.0) || grid.back() > 1.0) {
    throw Error(Errc::DegenerateGrid, "need at least two distinct eps values in (0, 1]");
  }

  ScalingReport report;
  report.measure = measure;
  std::vector<double> log_eps, log_dev, inv_log, ratio;
  for (double eps : grid) {
    const double dev = exact_deviation(measure, rho, eps);
    report.max_abs_deviation = std::max(report.max_abs_deviation, dev);
    if (dev <= kNoChangeLevel) continue;
    log_eps.push_back(std::log(eps));
    log_dev.push_back(std::log(dev));
    inv_log.push_back(std::log(1.0 / eps));
    ratio.push_back(dev / eps);
  }
  if (log_eps.size() < 2) {
    report.estimated_order = std::numeric_limits<double>::quiet_NaN();
    report.r_squared = 0.0;
    return report;
  }
  const LineFit order = fit_line(log_eps, log_dev);
  report.estimated_order = order.slope;
  report.r_squared = order.r_squared;

  // deviation / eps = a ln(1/eps) + b
  const LineFit log_term = fit_line(inv_log, ratio);
  report.flagged_log_term = log_term.slope > 0.05 * (std::abs(log_term.slope) + std::abs(log_term.intercept)) &&
                            log_term.r_squared >= 0.99;
  return report;
}

std::vector<double> geometric_grid(double eps_min, double eps_max, std::size_t points) {
  if (!(eps_min > 0.0) || !(eps_max > eps_min) || eps_max > 1.0 || points < 2) {
    throw Error(Errc::DegenerateGrid, "need 0 < eps_min < eps_max <= 1 and at least two points");
  }
  std::vector<double> grid(points);
  const double step = std::log(eps_min / eps_max) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = eps_max * std::exp(step * static_cast<double>(i));
  grid.back() = eps_min;
  return grid;
}

}  // namespace qsens
