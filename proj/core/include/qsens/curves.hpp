#pragma once

// Constant-fidelity contours and region areas in the (linear entropy, tangle)
// plane.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsens/measures.hpp"
#include "qsens/states.hpp"

namespace qsens {

struct PlaneCoords {
  double s_l = 0.0;
  double t = 0.0;
};

struct PlanePoint {
  double s_l = 0.0;
  double t = 0.0;
  /// Family parameters; empty for states not drawn from a family (tomography).
  std::optional<FamilyParams> source;
  double fidelity_with_target = 0.0;
};

/// (linear_entropy(rho), tangle(rho))
PlaneCoords plane_point(const DensityMatrix& rho);

struct BoundarySample {
  double r = 0.0;
  MemsBranch branch = MemsBranch::I;
  double s_l = 0.0;
  double t = 0.0;
};

/// MEMS curve for r on a uniform grid over [0, 1], ascending in r.
std::vector<BoundarySample> mems_boundary(std::size_t samples);

struct WernerSample {
  double eps = 0.0;
  double s_l = 0.0;
  double t = 0.0;
};

/// Plane points of rho1(eps, 22.5 deg) for eps on a uniform grid over [0, 1].
std::vector<WernerSample> werner_curve(std::size_t samples);

/// Piecewise-linear upper edge of the physical region, T_max(S_L).
class PhysicalBoundary {
 public:
  explicit PhysicalBoundary(std::size_t samples = 2048);
  /// 0 beyond the end of the MEMS curve (S_L > 8/9).
  double max_tangle(double s_l) const;

 private:
  std::vector<double> s_l_;  // ascending
  std::vector<double> t_;
};

enum class SweepFamily { Rho1Sweep, Rho2Sweep };

std::string_view to_string(SweepFamily f) noexcept;

struct ContourConfig {
  std::size_t sweep_points = 512;
  /// Subintervals per sweep line used to bracket roots before bisection.
  std::size_t bracket_samples = 64;
  double contour_tol = 1e-6;
  int max_bisection = 80;
  double dedup_distance = 1e-4;
  /// 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct Contour {
  std::string target_label;
  double fidelity_level = 0.0;
  SweepFamily family = SweepFamily::Rho1Sweep;
  std::vector<PlanePoint> points;
};

/// Root-solves F(target, family(params)) = level along sweep lines in both
/// parameter directions. An empty contour means the level is not attained.
/// Throws InvalidLevel unless level is in (0, 1].
Contour trace_contour(const DensityMatrix& target, SweepFamily family, double fidelity_level,
                      const ContourConfig& config = {}, const std::string& target_label = "target");

struct GridConfig {
  std::size_t raster = 400;
  std::size_t boundary_samples = 2048;
  /// Samples per parameter axis for each sweep family.
  std::size_t family_samples = 1000;
  /// 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
};

/// Family states of both sweeps on a dense parameter grid, with their raster
/// cells precomputed. Independent of the target, so it can be reused.
class FamilySamples {
 public:
  explicit FamilySamples(const GridConfig& grid = {});

  const GridConfig& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return cells_.size(); }
  /// Parameters of sample i: the rho1 grid first, then the rho2 grid.
  FamilyParams params(std::size_t i) const;
  /// Raster cell index (i_sl * raster + i_t) of each sample.
  const std::vector<std::uint32_t>& cells() const noexcept { return cells_; }
  /// Cells whose centre lies strictly below the MEMS boundary.
  const std::vector<bool>& physical() const noexcept { return physical_; }
  std::size_t physical_count() const noexcept { return physical_count_; }

 private:
  GridConfig grid_;
  std::vector<std::uint32_t> cells_;
  std::vector<bool> physical_;
  std::size_t physical_count_ = 0;
};

/// Fraction of physical raster cells reached by some sampled family state
/// with F(target, state) >= level. Throws InvalidLevel unless level in (0, 1].
double region_fraction(const DensityMatrix& target, double fidelity_level, const GridConfig& grid = {});
double region_fraction(const DensityMatrix& target, double fidelity_level, const FamilySamples& samples);

/// Same, for several levels in one pass over the samples.
std::vector<double> region_fractions(const DensityMatrix& target, const std::vector<double>& levels,
                                     const FamilySamples& samples);

}  // namespace qsens
