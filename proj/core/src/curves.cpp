#include "qsens/curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qsens/error.hpp"
#include "qsens/parallel.hpp"

namespace qsens {

namespace {

constexpr double kMaxTheta = std::numbers::pi / 8;  // 22.5 degrees

double grid_value(std::size_t i, std::size_t n, double hi) {
  return n <= 1 ? 0.0 : hi * static_cast<double>(i) / static_cast<double>(n - 1);
}

void require_level(double level) {
  if (!(level > 0.0 && level <= 1.0)) {
    throw Error(Errc::InvalidLevel, "fidelity level " + std::to_string(level) + " outside (0, 1]");
  }
}

// Parameters of a sweep family as (shape, eps): shape is theta for rho1 and r
// for rho2.
FamilyParams family_params(SweepFamily family, double shape, double eps) {
  if (family == SweepFamily::Rho1Sweep) return Rho1Params{eps, shape};
  return Rho2Params{eps, shape};
}

double shape_upper(SweepFamily family) { return family == SweepFamily::Rho1Sweep ? kMaxTheta : 1.0; }

class LineSolver {
 public:
  LineSolver(const FidelityEvaluator& fid, SweepFamily family, double level, const ContourConfig& cfg)
      : fid_(fid), family_(family), level_(level), cfg_(cfg) {}

  // Roots along one line; `fixed` is held constant and `along_eps` picks
  // which parameter varies.
  std::vector<PlanePoint> solve(double fixed, bool along_eps) const {
    const double hi = along_eps ? 1.0 : shape_upper(family_);
    const std::size_t n = cfg_.bracket_samples + 1;
    std::vector<double> xs(n), gs(n);
    for (std::size_t i = 0; i < n; ++i) {
      xs[i] = grid_value(i, n, hi);
      gs[i] = residual(fixed, xs[i], along_eps);
    }
    std::vector<PlanePoint> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(gs[i]) <= cfg_.contour_tol) {
        out.push_back(point(fixed, xs[i], along_eps));
        continue;
      }
      if (i + 1 < n && std::abs(gs[i + 1]) > cfg_.contour_tol && (gs[i] < 0.0) != (gs[i + 1] < 0.0)) {
        if (auto p = bisect(fixed, xs[i], xs[i + 1], gs[i], along_eps)) out.push_back(*p);
      }
    }
    return out;
  }

 private:
  FamilyParams params(double fixed, double x, bool along_eps) const {
    return along_eps ? family_params(family_, fixed, x) : family_params(family_, x, fixed);
  }

  double residual(double fixed, double x, bool along_eps) const {
    return fid_(make_state(params(fixed, x, along_eps))) - level_;
  }

  std::optional<PlanePoint> bisect(double fixed, double lo, double hi, double g_lo, bool along_eps) const {
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < cfg_.max_bisection; ++it) {
      mid = 0.5 * (lo + hi);
      const double g = residual(fixed, mid, along_eps);
      if (g == 0.0 || mid == lo || mid == hi) break;
      if ((g < 0.0) == (g_lo < 0.0)) {
        lo = mid;
        g_lo = g;
      } else {
        hi = mid;
      }
    }
    PlanePoint p = point(fixed, mid, along_eps);
    if (std::abs(p.fidelity_with_target - level_) > cfg_.contour_tol) return std::nullopt;
    return p;
  }

  PlanePoint point(double fixed, double x, bool along_eps) const {
    const FamilyParams fp = params(fixed, x, along_eps);
    const DensityMatrix rho = make_state(fp);
    const PlaneCoords c = plane_point(rho);
    return PlanePoint{c.s_l, c.t, fp, fid_(rho)};
  }

  const FidelityEvaluator& fid_;
  SweepFamily family_;
  double level_;
  const ContourConfig& cfg_;
};

}  // namespace

PlaneCoords plane_point(const DensityMatrix& rho) { return PlaneCoords{linear_entropy(rho), tangle(rho)}; }

std::vector<BoundarySample> mems_boundary(std::size_t samples) {
  if (samples < 2) throw Error(Errc::InvalidArgument, "mems_boundary needs at least 2 samples");
  std::vector<BoundarySample> out(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = grid_value(i, samples, 1.0);
    const PlaneCoords c = plane_point(mems(r));
    out[i] = BoundarySample{r, mems_branch(r), c.s_l, c.t};
  }
  return out;
}

std::vector<WernerSample> werner_curve(std::size_t samples) {
  if (samples < 2) throw Error(Errc::InvalidArgument, "werner_curve needs at least 2 samples");
  std::vector<WernerSample> out(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double eps = grid_value(i, samples, 1.0);
    const PlaneCoords c = plane_point(rho1(eps, kMaxTheta));
    out[i] = WernerSample{eps, c.s_l, c.t};
  }
  return out;
}

PhysicalBoundary::PhysicalBoundary(std::size_t samples) {
  auto boundary = mems_boundary(samples);
  std::sort(boundary.begin(), boundary.end(),
            [](const BoundarySample& a, const BoundarySample& b) { return a.s_l < b.s_l; });
  for (const auto& b : boundary) {
    s_l_.push_back(b.s_l);
    t_.push_back(b.t);
  }
}

double PhysicalBoundary::max_tangle(double s_l) const {
  if (s_l <= s_l_.front()) return t_.front();
  if (s_l >= s_l_.back()) return s_l == s_l_.back() ? t_.back() : 0.0;
  const auto it = std::upper_bound(s_l_.begin(), s_l_.end(), s_l);
  const std::size_t k = static_cast<std::size_t>(it - s_l_.begin());
  const double x0 = s_l_[k - 1], x1 = s_l_[k];
  if (x1 == x0) return std::max(t_[k - 1], t_[k]);
  const double w = (s_l - x0) / (x1 - x0);
  return (1.0 - w) * t_[k - 1] + w * t_[k];
}

std::string_view to_string(SweepFamily f) noexcept {
  return f == SweepFamily::Rho1Sweep ? "rho1" : "rho2";
}

Contour trace_contour(const DensityMatrix& target, SweepFamily family, double fidelity_level,
                      const ContourConfig& config, const std::string& target_label) {
  require_level(fidelity_level);
  if (config.sweep_points < 2 || config.bracket_samples < 1) {
    throw Error(Errc::InvalidArgument, "contour sweeps need at least 2 lines and 1 bracket interval");
  }
  const FidelityEvaluator fid(target);
  const LineSolver solver(fid, family, fidelity_level, config);

  // Lines of constant shape (bisect in eps), then lines of constant eps
  // (bisect in shape); results kept in line order.
  const std::size_t lines = config.sweep_points;
  std::vector<std::vector<PlanePoint>> per_line(2 * lines);
  parallel_for(2 * lines, config.threads, [&](std::size_t k) {
    if (k < lines) {
      per_line[k] = solver.solve(grid_value(k, lines, shape_upper(family)), true);
    } else {
      per_line[k] = solver.solve(grid_value(k - lines, lines, 1.0), false);
    }
  });

  Contour contour{target_label, fidelity_level, family, {}};
  const double d2 = config.dedup_distance * config.dedup_distance;
  for (const auto& line : per_line) {
    for (const auto& p : line) {
      const bool duplicate = std::any_of(contour.points.begin(), contour.points.end(), [&](const PlanePoint& q) {
        const double ds = p.s_l - q.s_l, dt = p.t - q.t;
        return ds * ds + dt * dt < d2;
      });
      if (!duplicate) contour.points.push_back(p);
    }
  }
  return contour;
}

FamilySamples::FamilySamples(const GridConfig& grid) : grid_(grid) {
  if (grid.raster < 1 || grid.family_samples < 2 || grid.boundary_samples < 2) {
    throw Error(Errc::InvalidArgument, "grid needs raster >= 1 and at least 2 samples per axis");
  }
  const std::size_t r = grid.raster;
  const PhysicalBoundary boundary(grid.boundary_samples);
  physical_.assign(r * r, false);
  for (std::size_t i = 0; i < r; ++i) {
    const double s_center = (static_cast<double>(i) + 0.5) / static_cast<double>(r);
    const double t_max = boundary.max_tangle(s_center);
    for (std::size_t j = 0; j < r; ++j) {
      const double t_center = (static_cast<double>(j) + 0.5) / static_cast<double>(r);
      if (t_center < t_max) {
        physical_[i * r + j] = true;
        ++physical_count_;
      }
    }
  }

  const std::size_t n = grid.family_samples;
  cells_.resize(2 * n * n);
  auto to_bin = [r](double x) {
    const auto b = static_cast<long long>(std::floor(x * static_cast<double>(r)));
    return static_cast<std::size_t>(std::clamp<long long>(b, 0, static_cast<long long>(r) - 1));
  };
  parallel_for(cells_.size(), grid.threads, [&](std::size_t k) {
    const PlaneCoords c = plane_point(make_state(params(k)));
    cells_[k] = static_cast<std::uint32_t>(to_bin(c.s_l) * r + to_bin(c.t));
  });
}

FamilyParams FamilySamples::params(std::size_t k) const {
  const std::size_t n = grid_.family_samples;
  const bool second = k >= n * n;
  const std::size_t local = second ? k - n * n : k;
  const double eps = grid_value(local / n, n, 1.0);
  if (!second) return Rho1Params{eps, grid_value(local % n, n, kMaxTheta)};
  return Rho2Params{eps, grid_value(local % n, n, 1.0)};
}

std::vector<double> region_fractions(const DensityMatrix& target, const std::vector<double>& levels,
                                     const FamilySamples& samples) {
  for (double level : levels) require_level(level);
  if (levels.empty()) return {};
  const FidelityEvaluator fid(target);
  const std::size_t cells = samples.physical().size();
  const std::size_t top = static_cast<std::size_t>(std::max_element(levels.begin(), levels.end()) - levels.begin());

  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(resolve_threads(samples.grid().threads), std::max<std::size_t>(1, samples.size())));
  // covered[w][level][cell]
  std::vector<std::vector<std::vector<char>>> covered(
      workers, std::vector<std::vector<char>>(levels.size(), std::vector<char>(cells, 0)));
  const std::size_t chunk = (samples.size() + workers - 1) / workers;
  parallel_for(workers, workers, [&](std::size_t w) {
    auto& mine = covered[w];
    const std::size_t end = std::min(samples.size(), (w + 1) * chunk);
    for (std::size_t k = w * chunk; k < end; ++k) {
      const std::uint32_t cell = samples.cells()[k];
      if (!samples.physical()[cell]) continue;
      // Covered at the highest level implies covered at every level.
      if (mine[top][cell]) continue;
      const double f = fid(make_state(samples.params(k)));
      for (std::size_t l = 0; l < levels.size(); ++l) {
        if (f >= levels[l]) mine[l][cell] = 1;
      }
    }
  });

  std::vector<double> out(levels.size());
  for (std::size_t l = 0; l < levels.size(); ++l) {
    std::size_t count = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (!samples.physical()[c]) continue;
      bool any = false;
      for (std::size_t w = 0; w < workers && !any; ++w) any = covered[w][l][c] != 0;
      if (any) ++count;
    }
    out[l] = samples.physical_count() == 0
                 ? 0.0
                 : static_cast<double>(count) / static_cast<double>(samples.physical_count());
  }
  return out;
}

double region_fraction(const DensityMatrix& target, double fidelity_level, const FamilySamples& samples) {
  return region_fractions(target, {fidelity_level}, samples).front();
}

double region_fraction(const DensityMatrix& target, double fidelity_level, const GridConfig& grid) {
  require_level(fidelity_level);
  return region_fraction(target, fidelity_level, FamilySamples(grid));
}

}  // namespace qsens
