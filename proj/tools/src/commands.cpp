#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qsens/error.hpp"
#include "qsens/measures.hpp"
#include "qsens/perturbation.hpp"
#include "qsens/tomo.hpp"
#include "qsens_cli/cli.hpp"

namespace qsens::cli {

namespace fs = std::filesystem;

std::string format_number(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

namespace {

[[noreturn]] void usage(const std::string& what) { throw Error(Errc::InvalidArgument, what); }

DensityMatrix single_state(const RunConfig& cfg) {
  if (cfg.json_input && !cfg.states.empty()) usage("give either a state spec or --json, not both");
  if (cfg.json_input) return read_density_matrix_json(*cfg.json_input);
  if (cfg.states.size() != 1) usage(cfg.command + " expects exactly one state");
  return parse_state(cfg.states.front(), cfg.angle_unit);
}

std::string state_label(const RunConfig& cfg) {
  return cfg.json_input ? "json:" + cfg.json_input->string() : cfg.states.front();
}

std::string level_tag(double level) { return format_number(level, 6); }

fs::path prepare_out_dir(const RunConfig& cfg) {
  const fs::path dir = cfg.out_dir.value_or(fs::path{"."});
  fs::create_directories(dir);
  return dir;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::InvalidArgument, "cannot write " + path.string());
  return f;
}

class CurveWriter {
 public:
  explicit CurveWriter(int precision) : precision_(precision) { buf_ << "curve_id,s_l,tangle,fidelity_level\n"; }

  void row(const std::string& id, double s_l, double t, std::optional<double> level) {
    buf_ << id << ',' << num(s_l) << ',' << num(t) << ',';
    if (level) buf_ << num(*level);
    buf_ << '\n';
    ++rows_;
  }

  void boundary_curves(std::size_t samples) {
    for (const auto& b : mems_boundary(samples)) row("mems_boundary", b.s_l, b.t, std::nullopt);
    for (const auto& w : werner_curve(samples)) row("werner", w.s_l, w.t, std::nullopt);
  }

  void contour(const std::string& prefix, const Contour& c) {
    const std::string id = prefix + std::string(to_string(c.family)) + "_" + level_tag(c.fidelity_level);
    for (const auto& p : c.points) row(id, p.s_l, p.t, c.fidelity_level);
  }

  std::size_t write(const fs::path& path) const {
    auto f = open_output(path);
    f << buf_.str();
    return rows_;
  }

 private:
  std::string num(double v) const { return format_number(v, precision_); }

  int precision_;
  std::ostringstream buf_;
  std::size_t rows_ = 0;
};

ContourConfig contour_config(const RunConfig& cfg) {
  ContourConfig c;
  c.sweep_points = cfg.sweep_points;
  c.threads = cfg.threads;
  return c;
}

std::vector<double> levels_or(const RunConfig& cfg, std::vector<double> fallback) {
  return cfg.levels.empty() ? fallback : cfg.levels;
}

void contours_for(CurveWriter& w, const DensityMatrix& target, const std::string& label, const std::string& prefix,
                  const std::vector<double>& levels, const RunConfig& cfg) {
  for (double level : levels) {
    for (SweepFamily fam : {SweepFamily::Rho1Sweep, SweepFamily::Rho2Sweep}) {
      w.contour(prefix, trace_contour(target, fam, level, contour_config(cfg), label));
    }
  }
}

void report_written(std::ostream& out, const fs::path& path, std::size_t rows) {
  out << "wrote " << path.string() << " (" << rows << " rows)\n";
}

CloudConfig cloud_config(const RunConfig& cfg, const std::string& label) {
  if (cfg.settings_variant != "hvdr") usage("unknown settings_variant '" + cfg.settings_variant + "' (only hvdr)");
  CloudConfig c;
  c.budget = cfg.budget;
  c.threshold = cfg.threshold;
  c.seed = cfg.seed;
  c.threads = cfg.threads;
  c.target_label = label;
  return c;
}

CloudResult run_cloud(const DensityMatrix& target, const RunConfig& cfg, const std::string& label) {
  const CloudConfig c = cloud_config(cfg, label);
  if (cfg.trials > 0) return monte_carlo_cloud(target, cfg.trials, c);
  return accumulate_cloud(target, cfg.accepted, cfg.max_trials, c);
}

std::size_t write_cloud(std::ostream& os, const CloudResult& cloud, int precision) {
  os << "trial,s_l,tangle,fidelity,seed\n";
  for (std::size_t i = 0; i < cloud.accepted_points.size(); ++i) {
    const PlanePoint& p = cloud.accepted_points[i];
    os << cloud.accepted_trials[i] << ',' << format_number(p.s_l, precision) << ','
       << format_number(p.t, precision) << ',' << format_number(p.fidelity_with_target, precision) << ','
       << cloud.trial_seeds[i] << '\n';
  }
  return cloud.accepted_points.size();
}

void figure1(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = prepare_out_dir(cfg);
  CurveWriter w(cfg.precision);
  w.boundary_curves(cfg.curve_samples);
  contours_for(w, phi_plus(), "phi-plus", "", levels_or(cfg, {0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95}), cfg);
  const fs::path path = dir / "fig1_curves.csv";
  report_written(out, path, w.write(path));
}

void figure2(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = prepare_out_dir(cfg);
  if (cfg.mems_targets.empty()) usage("figure 2 needs at least one MEMS target");
  const std::vector<double> levels = levels_or(cfg, {0.99});
  CurveWriter w(cfg.precision);
  w.boundary_curves(cfg.curve_samples);
  std::ostringstream summary;
  summary << "target,accepted,trials_run,threshold,budget,seed\n";
  for (double r : cfg.mems_targets) {
    const std::string label = "mems_r" + format_number(r, 6);
    const DensityMatrix target = mems(r);
    const PlaneCoords star = plane_point(target);
    w.row(label, star.s_l, star.t, std::nullopt);
    contours_for(w, target, label, label + "_", levels, cfg);

    const CloudResult cloud = run_cloud(target, cfg, label);
    const fs::path cloud_path = dir / ("fig2_cloud_" + label + ".csv");
    auto f = open_output(cloud_path);
    report_written(out, cloud_path, write_cloud(f, cloud, cfg.precision));
    summary << label << ',' << cloud.accepted_points.size() << ',' << cloud.trials_run << ','
            << format_number(cfg.threshold, cfg.precision) << ',' << cfg.budget << ',' << cfg.seed << '\n';
  }
  const fs::path path = dir / "fig2_curves.csv";
  report_written(out, path, w.write(path));
  const fs::path summary_path = dir / "fig2_summary.csv";
  open_output(summary_path) << summary.str();
  report_written(out, summary_path, cfg.mems_targets.size());
}

void figure3(const RunConfig& cfg, std::ostream& out) {
  const fs::path dir = prepare_out_dir(cfg);
  const std::vector<double> levels = levels_or(cfg, {0.9, 0.99});
  const DensityMatrix target = open_plane_target();
  const std::string label = "open-plane";

  CurveWriter w(cfg.precision);
  w.boundary_curves(cfg.curve_samples);
  const PlaneCoords star = plane_point(target);
  w.row("target", star.s_l, star.t, std::nullopt);
  contours_for(w, target, label, "", levels, cfg);
  const fs::path path = dir / "fig3_curves.csv";
  report_written(out, path, w.write(path));

  // The 0.9 area is always reported alongside whatever levels were asked for.
  std::set<double> area_levels(levels.begin(), levels.end());
  area_levels.insert(0.9);
  const std::vector<double> lv(area_levels.begin(), area_levels.end());
  GridConfig grid;
  grid.raster = cfg.raster;
  grid.family_samples = cfg.family_samples;
  grid.threads = cfg.threads;
  const std::vector<double> fractions = region_fractions(target, lv, FamilySamples(grid));

  std::ostringstream summary;
  summary << "target,fidelity_level,region_fraction\n";
  for (std::size_t i = 0; i < lv.size(); ++i) {
    summary << label << ',' << format_number(lv[i], cfg.precision) << ','
            << format_number(fractions[i], cfg.precision) << '\n';
    out << "region_fraction(" << level_tag(lv[i]) << ") = " << format_number(fractions[i], cfg.precision) << '\n';
  }
  const fs::path summary_path = dir / "fig3_summary.csv";
  open_output(summary_path) << summary.str();
  report_written(out, summary_path, lv.size());
}

}  // namespace

void cmd_measures(const RunConfig& cfg, std::ostream& out) {
  const DensityMatrix rho = single_state(cfg);
  const auto num = [&](double v) { return format_number(v, cfg.precision); };
  const MeasureReport m = measure_state(rho);

  std::string eig;
  for (double l : rho.eigenvalues()) eig += (eig.empty() ? "" : " ") + num(l);
  out << "state:               " << state_label(cfg) << '\n'
      << "dim:                 " << rho.dim() << '\n'
      << "purity:              " << num(purity(rho)) << '\n'
      << "linear_entropy:      " << num(m.linear_entropy) << '\n'
      << "von_neumann_entropy: " << num(m.von_neumann_entropy) << '\n';
  if (cfg.bits) out << "von_neumann_entropy_bits: " << num(m.von_neumann_entropy / std::log(2.0)) << '\n';
  if (rho.dim() == 4) {
    out << "concurrence:         " << num(m.concurrence) << '\n'
        << "tangle:              " << num(m.tangle) << '\n';
  }
  out << "eigenvalues:         " << eig << '\n';

  if (cfg.report_json) {
    nlohmann::json j;
    j["state"] = state_label(cfg);
    j["dim"] = rho.dim();
    j["purity"] = purity(rho);
    j["linear_entropy"] = m.linear_entropy;
    j["von_neumann_entropy"] = m.von_neumann_entropy;
    if (cfg.bits) j["von_neumann_entropy_bits"] = m.von_neumann_entropy / std::log(2.0);
    if (rho.dim() == 4) {
      j["concurrence"] = m.concurrence;
      j["tangle"] = m.tangle;
    }
    j["eigenvalues"] = rho.eigenvalues();
    open_output(*cfg.report_json) << j.dump(2) << '\n';
  }
}

void cmd_compare(const RunConfig& cfg, std::ostream& out) {
  std::vector<DensityMatrix> states;
  for (const auto& s : cfg.states) states.push_back(parse_state(s, cfg.angle_unit));
  if (cfg.json_input) states.push_back(read_density_matrix_json(*cfg.json_input));
  if (states.size() != 2) usage("compare expects exactly two states");
  const MeasureReport m = measure_pair(states[0], states[1]);
  out << "fidelity:           " << format_number(m.fidelity, cfg.precision) << '\n'
      << "amplitude_fidelity: " << format_number(m.amplitude_fidelity, cfg.precision) << '\n'
      << "trace_distance:     " << format_number(m.trace_distance, cfg.precision) << '\n';
}

void cmd_figure(const RunConfig& cfg, std::ostream& out) {
  switch (cfg.figure) {
    case 1: return figure1(cfg, out);
    case 2: return figure2(cfg, out);
    case 3: return figure3(cfg, out);
    default: usage("figure must be 1, 2 or 3");
  }
}

void cmd_sensitivity(const RunConfig& cfg, std::ostream& out) {
  if (!(cfg.eps_min > 0.0 && cfg.eps_min < cfg.eps_max && cfg.eps_max <= 1.0)) {
    usage("need 0 < eps_min < eps_max <= 1");
  }
  if (cfg.points < 2) usage("need at least two points");
  const DensityMatrix rho = single_state(cfg);
  const std::vector<double> grid = geometric_grid(cfg.eps_min, cfg.eps_max, cfg.points);
  const auto num = [&](double v) { return format_number(v, cfg.precision); };

  std::ostringstream csv;
  csv << "measure,estimated_order,r_squared,flagged_log_term,constant,coeff_eps,coeff_eps2,coeff_eps_log_eps,"
         "max_residual\n";
  std::vector<Measure> measures{Measure::AmplitudeFidelity, Measure::Fidelity, Measure::TraceDistance,
                                Measure::LinearEntropy, Measure::VonNeumannEntropy};
  if (rho.dim() == 4) {
    measures.push_back(Measure::Concurrence);
    measures.push_back(Measure::Tangle);
  }
  for (Measure m : measures) {
    const ScalingReport rep = order_scaling_report(rho, m, grid);
    csv << to_string(m) << ',' << num(rep.estimated_order) << ',' << num(rep.r_squared) << ','
        << (rep.flagged_log_term ? "true" : "false") << ',';
    std::optional<SensitivityExpansion> exp;
    try {
      exp = expand(m, rho);
    } catch (const Error& e) {
      if (e.code() != Errc::NotEntangled) throw;
    }
    if (exp) {
      double residual = 0.0;
      for (double eps : grid) residual = std::max(residual, std::abs(exact_delta(m, rho, eps) - exp->evaluate(eps)));
      csv << num(exp->constant) << ',' << num(exp->coeff_eps) << ',' << num(exp->coeff_eps2) << ','
          << num(exp->coeff_eps_log_eps) << ',' << num(residual) << '\n';
    } else {
      // No expansion for separable input; the order fit above still applies.
      csv << ",,,,\n";
    }
  }
  out << csv.str();
  if (cfg.out_dir) {
    fs::create_directories(*cfg.out_dir);
    open_output(*cfg.out_dir / "sensitivity.csv") << csv.str();
  }
}

void cmd_tomo(const RunConfig& cfg, std::ostream& out) {
  const DensityMatrix target = single_state(cfg);
  const std::string label = state_label(cfg);
  const CloudResult cloud = run_cloud(target, cfg, label);
  if (!cfg.out_dir) {
    write_cloud(out, cloud, cfg.precision);
    return;
  }
  const fs::path dir = prepare_out_dir(cfg);
  const fs::path path = dir / "tomo_cloud.csv";
  auto f = open_output(path);
  report_written(out, path, write_cloud(f, cloud, cfg.precision));
  out << "trials_run: " << cloud.trials_run << '\n';
}

}  // namespace qsens::cli
