// Copyright 2026 The shorsim Authors
// SPDX-License-Identifier: Apache-2.0

#include "shorsim/io/commands.hpp"

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <map>
#include <sstream>
#include <vector>

#include "shorsim/analysis.hpp"
#include "shorsim/io/csv.hpp"
#include "shorsim/io/svg.hpp"

namespace shorsim::io {

namespace {

using nlohmann::ordered_json;

// Operator series in emission order: component major, scope minor.
std::vector<obs::AdditiveOperatorSpec> all_specs() {
  std::vector<obs::AdditiveOperatorSpec> specs;
  for (const obs::Pauli alpha : {obs::Pauli::x, obs::Pauli::y, obs::Pauli::z})
    for (const obs::Scope scope :
         {obs::Scope::all, obs::Scope::r1, obs::Scope::r2})
      specs.push_back({alpha, scope, 0});
  return specs;
}

std::string layout_comment(const core::RegisterLayout& layout, int q,
                           core::Backend backend) {
  std::ostringstream out;
  out << "# layout: n=" << layout.n << " x=" << layout.x << " l1=" << layout.l1
      << " l2=" << layout.l2 << " q=" << q << " backend="
      << (backend == core::Backend::dense ? "dense" : "structured") << "\n";
  return out.str();
}

std::string noise_comment(const RunConfig& config, int samples) {
  std::ostringstream out;
  out << "# noise: lambda=" << format_double(config.lambda) << " components="
      << components_label(config.components) << " samples=" << samples
      << " seed=" << config.seed << " substeps=" << config.substeps
      << " omega_high_factor=" << format_double(config.omega_high_factor)
      << "\n";
  return out.str();
}

// Snapshots held at once, in amplitudes, against the configured cap.
void check_snapshot_budget(std::int64_t per_state, std::int64_t states,
                           std::int64_t mem_cap) {
  const std::int64_t required = per_state * states;
  if (required > mem_cap)
    throw MemoryCapError(std::size_t(required), std::size_t(mem_cap));
}

std::int64_t amplitudes_per_state(const core::RegisterLayout& layout,
                                  core::Backend backend) {
  return backend == core::Backend::dense
             ? layout.dense_dim()
             : layout.r1_dim() *
                   shor::multiplicative_order(layout.x, layout.n);
}

// Chooses the backend so that `states` concurrent snapshots fit the cap.
// An explicit choice is honored and then checked; automatic selection
// prefers dense and falls back to the structured table.
core::Backend resolve_backend(const RunConfig& config,
                              const core::RegisterLayout& layout,
                              std::int64_t states) {
  core::Backend backend;
  switch (config.backend) {
    case BackendChoice::dense: backend = core::Backend::dense; break;
    case BackendChoice::structured:
      backend = core::Backend::structured;
      break;
    default:
      backend = amplitudes_per_state(layout, core::Backend::dense) * states <=
                        config.mem_cap
                    ? core::Backend::dense
                    : core::Backend::structured;
  }
  check_snapshot_budget(amplitudes_per_state(layout, backend), states,
                        config.mem_cap);
  return backend;
}

std::vector<int> sorted_unique(std::vector<int> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::filesystem::path out_path(const RunConfig& config, const char* name) {
  return std::filesystem::path(config.out) / name;
}

ordered_json problem_json(const core::RegisterLayout& layout, int q) {
  ordered_json j;
  j["n"] = layout.n;
  j["x"] = layout.x;
  j["l1"] = layout.l1;
  j["l2"] = layout.l2;
  j["l"] = layout.total_qubits();
  j["q"] = q;
  return j;
}

std::string json_text(const ordered_json& j) { return j.dump(2) + "\n"; }

// Least squares line y = intercept + slope x with the coefficient of
// determination; a flat cloud counts as a perfect fit.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r_squared = 1.0;
};

LineFit fit_line(const std::vector<std::pair<double, double>>& points) {
  const double n = double(points.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  LineFit fit;
  const double denom = n * sxx - sx * sx;
  if (denom == 0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  for (const auto& [x, y] : points) {
    const double mean_y = sy / n;
    ss_res += (y - fit.intercept - fit.slope * x) *
              (y - fit.intercept - fit.slope * x);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  if (ss_tot > 0) fit.r_squared = 1.0 - ss_res / ss_tot;
  return fit;
}

}  // namespace

void cmd_trace(const RunConfig& config) {
  const auto layout = config_layout(config);
  const auto schedule = shor::build_schedule(layout);

  const auto capture_for = [&](core::Backend backend) {
    switch (config.capture) {
      case CapturePolicy::all: return shor::CaptureSet::everything();
      case CapturePolicy::boundaries:
        return shor::CaptureSet::boundaries(schedule);
      default:
        return backend == core::Backend::dense
                   ? shor::CaptureSet::everything()
                   : shor::CaptureSet::boundaries(schedule);
    }
  };
  const auto snapshots = [&](const shor::CaptureSet& capture) {
    return capture.all ? std::int64_t(schedule.q()) + 1
                       : std::int64_t(capture.indices.size());
  };

  core::Backend backend;
  switch (config.backend) {
    case BackendChoice::dense: backend = core::Backend::dense; break;
    case BackendChoice::structured:
      backend = core::Backend::structured;
      break;
    default:
      backend =
          amplitudes_per_state(layout, core::Backend::dense) *
                      (snapshots(capture_for(core::Backend::dense)) + 1) <=
                  config.mem_cap
              ? core::Backend::dense
              : core::Backend::structured;
  }
  const auto capture = capture_for(backend);
  check_snapshot_budget(amplitudes_per_state(layout, backend),
                        snapshots(capture) + 1, config.mem_cap);

  const auto run = shor::run_clean<double>(layout, backend, capture,
                                           std::size_t(config.mem_cap));
  const auto specs = all_specs();
  const auto records = obs::trace_fluctuations<double>(run, specs);

  std::ostringstream csv;
  csv << "# shorsim trace\n"
      << layout_comment(layout, schedule.q(), backend)
      << "step,phase,alpha,scope,fluct\n";
  for (const auto& record : records)
    csv << record.m << "," << phase_name(schedule, record.m) << ","
        << obs::pauli_label(record.spec.alpha) << ","
        << obs::scope_label(record.spec.scope) << ","
        << format_double(record.value) << "\n";
  write_text_file(out_path(config, "trace.csv"), csv.str());

  if (config.svg) {
    PlotSpec plot;
    plot.title = "Normalized operator fluctuations";
    plot.x_label = "computational step";
    plot.y_label = "fluctuation";
    for (const obs::Pauli alpha :
         {obs::Pauli::x, obs::Pauli::y, obs::Pauli::z}) {
      PlotSeries series;
      series.label = std::string("sigma_") + obs::pauli_label(alpha) +
                     " full register";
      for (const auto& record : records)
        if (record.spec.alpha == alpha &&
            record.spec.scope == obs::Scope::all)
          series.points.emplace_back(double(record.m), record.value);
      plot.series.push_back(std::move(series));
    }
    write_text_file(out_path(config, "trace.svg"), render_plot(plot));
  }
}

void cmd_spectrum(const RunConfig& config) {
  const auto layout = config_layout(config);
  const auto schedule = shor::build_schedule(layout);
  const int q = schedule.q();
  const std::int64_t order = shor::multiplicative_order(layout.x, layout.n);
  const auto backend = resolve_backend(config, layout, 2);

  const auto run = shor::run_clean<double>(layout, backend,
                                           shor::CaptureSet::at({q}),
                                           std::size_t(config.mem_cap));
  const auto& final_state = run.at(q);
  const auto dist = core::register1_distribution(final_state);

  const auto set = shor::success_set(layout, order);
  const double t_clean = shor::success_probability(final_state, set);

  std::vector<std::pair<std::int64_t, double>> spectrum(dist.size());
  for (std::int64_t cbar = 0; cbar < dist.size(); ++cbar)
    spectrum[cbar] = {cbar, dist[core::bit_reverse(cbar, layout.l1)]};

  std::ostringstream csv;
  csv << "# shorsim spectrum\n"
      << layout_comment(layout, q, backend) << "cbar,probability\n";
  for (const auto& [cbar, p] : spectrum)
    csv << cbar << "," << format_double(p) << "\n";
  write_text_file(out_path(config, "spectrum.csv"), csv.str());

  auto peaks = spectrum;
  std::sort(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  peaks.resize(std::min<std::size_t>(peaks.size(), 8));

  ordered_json summary = problem_json(layout, q);
  summary["order"] = order;
  summary["t_clean"] = t_clean;
  summary["success_set"] = ordered_json::array();
  for (const auto& entry : set.entries) {
    ordered_json e;
    e["cbar"] = entry.cbar;
    e["numerator"] = entry.numerator;
    e["denominator"] = entry.denominator;
    summary["success_set"].push_back(e);
  }
  summary["top_peaks"] = ordered_json::array();
  for (const auto& [cbar, p] : peaks) {
    ordered_json e;
    e["cbar"] = cbar;
    e["probability"] = p;
    summary["top_peaks"].push_back(e);
  }
  write_text_file(out_path(config, "spectrum_summary.json"),
                  json_text(summary));

  if (config.svg) {
    PlotSpec plot;
    plot.title = "Measurement spectrum";
    plot.x_label = "frequency index";
    plot.y_label = "probability";
    PlotSeries series;
    for (const auto& [cbar, p] : spectrum)
      series.points.emplace_back(double(cbar), p);
    plot.series.push_back(std::move(series));
    write_text_file(out_path(config, "spectrum.svg"), render_plot(plot));
  }
}

void cmd_noise_scan(const RunConfig& config) {
  const auto layout = config_layout(config);
  const auto schedule = shor::build_schedule(layout);
  const int q = schedule.q();
  for (const int m : config.scan_steps)
    if (m > q)
      throw ConfigError("scan step " + std::to_string(m) +
                        " is past the end of the run");
  const auto positions = sorted_unique(config.scan_steps);
  const std::int64_t n_positions =
      positions.empty() ? q + 1 : std::int64_t(positions.size());
  check_snapshot_budget(layout.dense_dim(),
                        n_positions + config.samples + 2, config.mem_cap);

  const auto noise_config = config_noise(config);
  const auto scan =
      analysis::step_noise_scan(layout, noise_config, positions, 0,
                                std::size_t(config.mem_cap));

  std::ostringstream csv;
  csv << "# shorsim noise-scan\n"
      << layout_comment(layout, q, core::Backend::dense)
      << noise_comment(config, config.samples)
      << "m,f,f_stderr,s,s_stderr,gamma,t,t_stderr,r_m\n";
  for (const auto& r : scan.reports) {
    csv << r.m << "," << format_double(r.f) << "," << format_double(r.f_sem)
        << "," << format_double(r.s) << "," << format_double(r.s_sem) << ","
        << format_double(r.gamma) << "," << format_double(r.t) << ","
        << format_double(r.t_sem) << ",";
    if (r.r_m.has_value()) csv << format_double(*r.r_m);
    csv << "\n";
  }
  write_text_file(out_path(config, "noise_scan.csv"), csv.str());

  ordered_json summary = problem_json(layout, q);
  summary["order"] = scan.order;
  summary["t_clean"] = scan.t_clean;
  summary["c_analytic"] = scan.c_analytic;
  summary["lambda"] = config.lambda;
  summary["components"] = components_label(config.components);
  summary["samples"] = config.samples;
  summary["seed"] = config.seed;
  int interior = 0;
  for (const auto& r : scan.reports)
    if (r.m >= 1) ++interior;
  if (interior == q) {
    const auto est =
        analysis::combined_success_estimate(scan.reports, scan.t_clean);
    summary["combined_success"] = ordered_json{{"product", est.product},
                                               {"exponential",
                                                est.exponential},
                                               {"factors", est.factors}};
  }
  write_text_file(out_path(config, "noise_scan_summary.json"),
                  json_text(summary));

  if (config.svg) {
    PlotSpec plot;
    plot.title = "One noisy step at position m";
    plot.x_label = "m";
    plot.y_label = "ensemble mean";
    PlotSeries f_series, t_series;
    f_series.label = "fidelity";
    t_series.label = "success / clean success";
    for (const auto& r : scan.reports) {
      f_series.points.emplace_back(double(r.m), r.f);
      t_series.points.emplace_back(double(r.m), r.t / scan.t_clean);
    }
    plot.series.push_back(std::move(f_series));
    plot.series.push_back(std::move(t_series));
    write_text_file(out_path(config, "noise_scan.svg"), render_plot(plot));
  }
}

void cmd_state_noise(const RunConfig& config) {
  const auto layout = config_layout(config);
  const auto schedule = shor::build_schedule(layout);
  const int q = schedule.q();
  std::vector<int> positions = config.sweep_steps;
  if (positions.empty())
    positions = {schedule.hadamard_end(), schedule.modexp_end()};
  for (const int m : positions)
    if (m > q)
      throw ConfigError("sweep step " + std::to_string(m) +
                        " is past the end of the run");
  positions = sorted_unique(positions);
  check_snapshot_budget(layout.dense_dim(),
                        std::int64_t(positions.size()) + 3, config.mem_cap);

  auto noise_config = config_noise(config);
  noise_config.n_nu = config.sweep_samples;
  const auto sweep = analysis::state_noise_sweep(
      layout, noise_config, positions, config.sweep_lambdas, 0,
      std::size_t(config.mem_cap));

  std::ostringstream csv;
  csv << "# shorsim state-noise\n"
      << layout_comment(layout, q, core::Backend::dense)
      << noise_comment(config, config.sweep_samples)
      << "m,component,lambda,f,f_stderr,t,t_stderr,r_m\n";
  for (const auto& row : sweep.rows) {
    csv << row.m << "," << noise::kAxisLabel[row.axis] << ","
        << format_double(row.lambda) << "," << format_double(row.f) << ","
        << format_double(row.f_sem) << "," << format_double(row.t) << ","
        << format_double(row.t_sem) << ",";
    if (row.r_m.has_value()) csv << format_double(*row.r_m);
    csv << "\n";
  }
  write_text_file(out_path(config, "state_noise.csv"), csv.str());

  ordered_json summary = problem_json(layout, q);
  summary["t_clean"] = sweep.t_clean;
  summary["c_analytic"] = sweep.c_analytic;
  summary["samples"] = config.sweep_samples;
  summary["seed"] = config.seed;
  summary["fits"] = ordered_json::array();
  for (const int m : positions) {
    for (int axis = 0; axis < 3; ++axis) {
      std::vector<std::pair<double, double>> f_t;
      std::vector<double> rates;
      for (const auto& row : sweep.rows) {
        if (row.m != m || row.axis != axis) continue;
        f_t.emplace_back(row.f, row.t);
        if (row.r_m.has_value()) rates.push_back(*row.r_m);
      }
      if (f_t.size() < 2) continue;
      const LineFit fit = fit_line(f_t);
      ordered_json entry;
      entry["m"] = m;
      entry["component"] = std::string(1, noise::kAxisLabel[axis]);
      entry["slope"] = fit.slope;
      entry["intercept"] = fit.intercept;
      entry["r_squared"] = fit.r_squared;
      if (!rates.empty()) {
        const auto [lo, hi] = std::minmax_element(rates.begin(), rates.end());
        double mean = 0;
        for (const double r : rates) mean += r;
        mean /= double(rates.size());
        entry["r_m_mean"] = mean;
        entry["r_m_spread"] =
            mean == 0 ? 0.0 : (*hi - *lo) / std::abs(mean);
      }
      summary["fits"].push_back(entry);
    }
  }
  write_text_file(out_path(config, "state_noise_summary.json"),
                  json_text(summary));

  if (config.svg) {
    PlotSpec plot;
    plot.title = "Success against fidelity across couplings";
    plot.x_label = "fidelity";
    plot.y_label = "success probability";
    for (int axis = 0; axis < 3; ++axis) {
      PlotSeries series;
      series.label = std::string("component ") + noise::kAxisLabel[axis];
      series.markers = true;
      for (const auto& row : sweep.rows)
        if (row.m == positions.front() && row.axis == axis)
          series.points.emplace_back(row.f, row.t);
      if (!series.points.empty()) plot.series.push_back(std::move(series));
    }
    write_text_file(out_path(config, "state_noise.svg"), render_plot(plot));
  }
}

void cmd_scaling(const RunConfig& config) {
  struct RunRecord {
    core::RegisterLayout layout;
    int q = 0;
    std::int64_t order = 0;
    double t_clean = 0;
    double c_value = 0;
    std::map<std::pair<int, int>, double> fluct;  // (state, spec) -> value
  };
  static constexpr const char* kStateNames[4] = {"init", "ht", "me", "final"};
  const auto specs = all_specs();

  std::vector<RunRecord> runs;
  for (const auto& [n, x] : config.scaling_runs) {
    RunConfig one = config;
    one.n = n;
    one.x = x;
    one.l1 = 0;
    one.l2 = 0;
    RunRecord record;
    record.layout = config_layout(one);
    const auto schedule = shor::build_schedule(record.layout);
    record.q = schedule.q();
    record.order = shor::multiplicative_order(record.layout.x,
                                              record.layout.n);
    const auto backend = resolve_backend(one, record.layout, 5);
    const auto run = shor::run_clean<double>(
        record.layout, backend, shor::CaptureSet::boundaries(schedule),
        std::size_t(config.mem_cap));
    record.c_value = noise::analytic_autocorrelation(
        noise::frequency_grid(record.q, config.omega_high_factor));
    const auto set = shor::success_set(record.layout, record.order);
    record.t_clean = shor::success_probability(run.at(record.q), set);

    const int boundary_steps[4] = {0, schedule.hadamard_end(),
                                   schedule.modexp_end(), record.q};
    for (int state = 0; state < 4; ++state) {
      obs::StateMoments<double> moments(run.at(boundary_steps[state]));
      for (std::size_t s = 0; s < specs.size(); ++s)
        record.fluct[{state, int(s)}] = moments.fluct(specs[s]);
    }
    runs.push_back(std::move(record));
  }

  // The perturbative rate comparisons share one spectral constant so that
  // size is the only thing that varies.
  const auto smallest = std::min_element(
      runs.begin(), runs.end(), [](const RunRecord& a, const RunRecord& b) {
        return a.layout.total_qubits() < b.layout.total_qubits();
      });
  const double c_ref = smallest->c_value;

  std::ostringstream fluct_csv;
  fluct_csv << "# shorsim scaling\n"
            << "n,x,l1,l2,l,state,alpha,scope,fluct\n";
  for (const auto& run : runs)
    for (int state = 0; state < 4; ++state)
      for (std::size_t s = 0; s < specs.size(); ++s)
        fluct_csv << run.layout.n << "," << run.layout.x << ","
                  << run.layout.l1 << "," << run.layout.l2 << ","
                  << run.layout.total_qubits() << "," << kStateNames[state]
                  << "," << obs::pauli_label(specs[s].alpha) << ","
                  << obs::scope_label(specs[s].scope) << ","
                  << format_double(run.fluct.at({state, int(s)})) << "\n";
  write_text_file(out_path(config, "scaling_fluct.csv"), fluct_csv.str());

  std::ostringstream fits_csv;
  fits_csv << "# shorsim scaling fits\n"
           << "state,alpha,scope,p,classification,delta\n";
  ordered_json fits_json = ordered_json::array();
  bool afs_detected = false;
  for (int state = 0; state < 4; ++state) {
    for (std::size_t s = 0; s < specs.size(); ++s) {
      std::vector<std::pair<double, double>> points;
      for (const auto& run : runs)
        points.emplace_back(double(run.layout.total_qubits()),
                            run.fluct.at({state, int(s)}));
      std::sort(points.begin(), points.end());

      std::string p_text, delta_text, label;
      ordered_json entry;
      entry["state"] = kStateNames[state];
      entry["alpha"] = std::string(1, obs::pauli_label(specs[s].alpha));
      entry["scope"] = obs::scope_label(specs[s].scope);
      try {
        const auto fit = obs::estimate_p(points);
        label = obs::to_string(fit.classification);
        if (fit.p.has_value()) {
          p_text = format_double(*fit.p);
          entry["p"] = *fit.p;
        }
        afs_detected |= fit.classification == obs::Classification::afs;
      } catch (const std::invalid_argument&) {
        label = "undetermined";
      }
      entry["classification"] = label;
      if (specs[s].scope == obs::Scope::all) {
        std::vector<std::pair<double, double>> gammas;
        bool positive = true;
        for (const auto& [l, fluct] : points) {
          const double gamma =
              config.lambda * config.lambda * l * l * c_ref * fluct;
          positive &= gamma > 0;
          gammas.emplace_back(l, gamma);
        }
        if (positive && gammas.size() >= 2) {
          const auto fragility = analysis::fragility_fit(gammas);
          delta_text = format_double(fragility.delta);
          entry["delta"] = fragility.delta;
        }
      }
      fits_csv << kStateNames[state] << ","
               << obs::pauli_label(specs[s].alpha) << ","
               << obs::scope_label(specs[s].scope) << "," << p_text << ","
               << label << "," << delta_text << "\n";
      fits_json.push_back(entry);
    }
  }
  write_text_file(out_path(config, "scaling_fits.csv"), fits_csv.str());

  ordered_json summary;
  summary["c_ref"] = c_ref;
  summary["lambda"] = config.lambda;
  summary["runs"] = ordered_json::array();
  for (const auto& run : runs) {
    ordered_json entry = problem_json(run.layout, run.q);
    entry["order"] = run.order;
    entry["t_clean"] = run.t_clean;
    entry["c_analytic"] = run.c_value;
    summary["runs"].push_back(entry);
  }
  summary["fits"] = fits_json;
  summary["afs_detected"] = afs_detected;
  write_text_file(out_path(config, "scaling_summary.json"),
                  json_text(summary));
}

void run_command(std::string_view name, const RunConfig& config) {
  if (name == "trace") return cmd_trace(config);
  if (name == "spectrum") return cmd_spectrum(config);
  if (name == "noise-scan") return cmd_noise_scan(config);
  if (name == "state-noise") return cmd_state_noise(config);
  if (name == "scaling") return cmd_scaling(config);
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

}  // namespace shorsim::io
