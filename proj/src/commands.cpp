#include "swarmkin/commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "swarmkin/analytic_oracle.hpp"
#include "swarmkin/estimators.hpp"
#include "swarmkin/hierarchy_pde.hpp"
#include "swarmkin/io.hpp"
#include "swarmkin/master_oracle.hpp"
#include "swarmkin/particle_sim.hpp"

namespace swarmkin {

using nlohmann::json;

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(); }

json metrics_json(const ComparisonMetrics& m) {
  return {{"l1", number_or_null(m.l1)}, {"linf", number_or_null(m.linf)}, {"chi2", number_or_null(m.chi2)}, {"dof", m.dof}};
}

std::vector<double> uniform_reference(int size) { return std::vector<double>(static_cast<std::size_t>(size), 1.0); }

// ---------------------------------------------------------------------------

void run_simulate(const ExperimentConfig& cfg, OutputDir& out, json& m) {
  const DynamicsConfig dyn = cfg.dynamics();
  const EnsembleResult r = ensemble_marginals(dyn, cfg.n_runs, cfg.master_seed, cfg.bins);
  const auto f1 = r.one_particle.density();
  const auto f2 = r.two_particle.density();

  out.write("one_particle.csv", [&](std::ostream& os) { write_density_1d(os, f1); });
  out.write("two_particle.csv", [&](std::ostream& os) { write_density_2d(os, f2, cfg.bins); });
  out.write("runs.csv", [&](std::ostream& os) {
    os << "run,iterations,stop_reason,order_parameter\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
      os << i << ',' << r.runs[i].iterations << ',' << to_string(r.runs[i].stop_reason) << ','
         << format_double(r.runs[i].order_parameter) << '\n';
    }
  });

  std::uint64_t min_it = UINT64_MAX, max_it = 0;
  double sum_it = 0.0;
  for (const auto& d : r.runs) {
    min_it = std::min(min_it, d.iterations);
    max_it = std::max(max_it, d.iterations);
    sum_it += static_cast<double>(d.iterations);
  }
  m["diagnostics"] = {{"runs", r.runs.size()},
                      {"max_iteration_hits", r.max_iteration_hits},
                      {"iterations_min", min_it},
                      {"iterations_max", max_it},
                      {"iterations_mean", sum_it / static_cast<double>(r.runs.size())},
                      {"runs_file", "runs.csv"}};

  const auto iso = compare(r.one_particle, uniform_reference(cfg.bins));
  const double crit = chi2_critical(iso.dof, 0.99);
  const auto corr = compare(r.two_particle, m_density_reference(cfg.gamma, cfg.bins));
  const auto deficiency = chaos_deficiency(f2, f1);
  m["metrics"] = {
      {"one_particle_vs_uniform", metrics_json(iso)},
      {"one_particle_chi2_critical_99", crit},
      {"one_particle_isotropic_99", iso.chi2 <= crit},
      {"two_particle_vs_m_density", metrics_json(corr)},
      {"circular_std_of_difference", number_or_null(circular_std_of_difference(f2, cfg.bins))},
      {"chaos_deficiency", {{"l1", deficiency.l1}, {"linf", deficiency.linf}}},
  };
}

void run_oracle(const ExperimentConfig& cfg, OutputDir& out, json& m) {
  const auto p = CorrelationParams::from_gamma(cfg.gamma);
  out.write("m_density.csv", [&](std::ostream& os) {
    os << "theta,m_density\n";
    for (int i = 0; i < cfg.grid_points; ++i) {
      const double t = kTwoPi * i / cfg.grid_points;
      os << format_double(t) << ',' << format_double(m_density(t, p)) << '\n';
    }
  });
  out.write("m_fourier.csv", [&](std::ostream& os) {
    os << "n,value\n";
    for (int n = -cfg.n_max; n <= cfg.n_max; ++n) os << n << ',' << format_double(m_fourier(n, p)) << '\n';
  });
  FourierMarginal fkm1 = isotropic_marginal(cfg.n_max);
  for (int level = 2; level < cfg.marginal_order; ++level) fkm1 = recursion_level(fkm1, p);
  const FourierMarginal fk = recursion_level(fkm1, p);
  const std::string name = "fourier_k" + std::to_string(cfg.marginal_order) + ".csv";
  out.write(name, [&](std::ostream& os) { write_fourier_csv(os, fk); });
  m["metrics"] = {{"sigma", p.sigma},
                  {"sigma_bar", p.sigma_bar},
                  {"m_density_0", m_density(0.0, p)},
                  {"m_fourier_1", m_fourier(1, p)},
                  {"hierarchy_residual", cl_hierarchy_residual_fourier(fk, fkm1, p)}};
}

void run_hierarchy(const ExperimentConfig& cfg, OutputDir& out, json& m) {
  const double sigma = kTwoPi * cfg.gamma;
  if (cfg.kind == DynamicsKind::CL) {
    const int k = cfg.pde_modes;
    const auto side = static_cast<std::size_t>(2 * k + 1);
    std::vector<std::complex<double>> f1(static_cast<std::size_t>(4 * k + 1), 0.0), f2(side * side, 0.0);
    f1[static_cast<std::size_t>(2 * k)] = 1.0;
    f2[static_cast<std::size_t>(k) * side + static_cast<std::size_t>(k)] = 1.0;
    ClPairSolver solver(sigma, k, f1, f2);
    const auto p = CorrelationParams(sigma);
    // ℓ¹ norm of the coefficient error against the truncated stationary series bounds the sup error
    auto error = [&] {
      double e = 0.0;
      for (int a = -k; a <= k; ++a)
        for (int b = -k; b <= k; ++b)
          e += std::abs(solver.coefficient(a, b) - (a + b == 0 ? m_fourier(a, p) : 0.0));
      return e;
    };
    std::vector<std::pair<double, double>> series{{0.0, error()}};
    const auto steps = static_cast<long>(std::ceil(cfg.t_end / cfg.dt - 1e-12));
    for (long s = 0; s < steps; ++s) {
      solver.advance(cfg.t_end / static_cast<double>(steps));
      series.emplace_back(solver.time(), error());
    }
    out.write("f2_error.csv", [&](std::ostream& os) {
      os << "t,linf_bound\n";
      for (const auto& [t, e] : series) os << format_double(t) << ',' << format_double(e) << '\n';
    });
    const GridField grid = solver.to_grid(cfg.grid_points);
    out.write("f2.csv", [&](std::ostream& os) { write_grid_csv(os, grid); });
    m["metrics"] = {{"final_linf_bound", series.back().second}, {"t_end", solver.time()}, {"modes", k}};
    return;
  }
  PdeParams p;
  p.sigma = sigma;
  p.tau = cfg.gamma_prime ? kTwoPi * *cfg.gamma_prime : 0.0;
  GridField f(1, cfg.grid_points);
  for (int i = 0; i < f.n_points; ++i) f(i) = 1.0 + 0.5 * std::cos(f.node(i));
  std::vector<std::array<double, 3>> series;
  auto energy = [](const GridField& g) {
    double e = 0.0;
    for (const double v : g.values) e += v * v;
    return e / static_cast<double>(g.size());
  };
  series.push_back({0.0, f.mean(), energy(f)});
  double t = 0.0;
  bool degenerate = false;
  while (t < cfg.t_end - 1e-15) {
    p.dt = std::min({cfg.dt, cfg.t_end - t, 0.9 * bdg_diffusion_max_dt(f, p)});
    DiffusionStep s = bdg_nonlinear_diffusion_step(f, p);
    degenerate = s.degenerate_time_scale;
    f = std::move(s.field);
    t += p.dt;
    series.push_back({t, f.mean(), energy(f)});
    if (degenerate) break;
  }
  out.write("f1_series.csv", [&](std::ostream& os) {
    os << "t,mass,energy\n";
    for (const auto& r : series) os << format_double(r[0]) << ',' << format_double(r[1]) << ',' << format_double(r[2]) << '\n';
  });
  out.write("f1.csv", [&](std::ostream& os) { write_grid_csv(os, f); });
  m["metrics"] = {{"steps", series.size() - 1}, {"degenerate_time_scale", degenerate}, {"final_mass", f.mean()}};
}

void run_master(const ExperimentConfig& cfg, OutputDir& out, json& m) {
  const DynamicsConfig dyn = cfg.dynamics();
  const MasterOperator op = make_master_operator(dyn, cfg.master_points);
  const MasterField f0(cfg.n_particles, cfg.master_points, 1.0);
  const auto run = integrate_master([&](const MasterField& f) { return apply(op, f); }, f0, cfg.dt, cfg.t_end);
  const MasterField rhs = apply(op, run.field);

  out.write("master_field.csv", [&](std::ostream& os) { write_master_csv(os, run.field); });
  const std::array<int, 1> one{0};
  out.write("marginal_1.csv", [&](std::ostream& os) { write_grid_csv(os, marginalize(run.field, one)); });
  if (cfg.n_particles == 3) {
    const std::array<int, 2> two{0, 1};
    out.write("marginal_2.csv", [&](std::ostream& os) { write_grid_csv(os, marginalize(run.field, two)); });
  }
  json bbgky = json::object();
  for (int k = 1; k < cfg.n_particles; ++k) {
    if (op.kind != DynamicsKind::CL && k > 1) break;
    bbgky["k" + std::to_string(k)] = bbgky_consistency(run.field, op, k);
  }
  m["diagnostics"] = {{"steps", run.steps}, {"max_mass_drift", run.max_mass_drift}};
  m["metrics"] = {{"stationarity_residual", rhs.field.max_abs()}, {"bbgky_residual", bbgky}};
}

void run_compare(const ExperimentConfig& cfg, OutputDir& out, json& m) {
  if (cfg.histogram_file.empty()) throw std::invalid_argument("compare requires histogram_file");
  const DensityTable emp = read_density_file(cfg.histogram_file);
  std::vector<double> ref;
  if (cfg.reference == "uniform") {
    ref = uniform_reference(static_cast<int>(emp.values.size()));
  } else if (cfg.reference == "m_density") {
    if (emp.dims != 2) throw std::invalid_argument("reference m_density needs a 2D histogram");
    ref = m_density_reference(cfg.gamma, emp.n_bins);
  } else {
    const DensityTable r = read_density_file(cfg.reference_file);
    if (r.dims != emp.dims || r.n_bins != emp.n_bins)
      throw std::invalid_argument("reference_file has a different shape from histogram_file");
    ref = r.values;
  }
  const auto metrics = compare_densities(emp.values, ref);
  json result = {{"l1", metrics.l1}, {"linf", metrics.linf}, {"dims", emp.dims}, {"n_bins", emp.n_bins}};
  if (emp.dims == 2) {
    result["circular_std_of_difference"] = number_or_null(circular_std_of_difference(emp.values, emp.n_bins));
  }
  out.write("metrics.json", [&](std::ostream& os) { os << result.dump(2) << '\n'; });
  m["metrics"] = result;
}

}  // namespace

std::vector<double> m_density_reference(double gamma, int n_bins) {
  const auto p = CorrelationParams::from_gamma(gamma);
  std::vector<double> ref(static_cast<std::size_t>(n_bins) * n_bins);
  for (int i = 0; i < n_bins; ++i)
    for (int j = 0; j < n_bins; ++j)
      ref[static_cast<std::size_t>(i) * n_bins + j] = m_density(kTwoPi * (i - j) / n_bins, p);
  return ref;
}

RunManifest run_command(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  json& m = manifest.json;
  m["artifact_version"] = kArtifactVersion;
  m["command"] = std::string(to_string(cfg.command));
  json echo = json::object();
  for (const auto& [k, v] : config_entries(cfg)) echo[k] = v;
  m["config"] = echo;
  m["error"] = nullptr;

  std::unique_ptr<OutputDir> out;
  try {
    out = std::make_unique<OutputDir>(cfg.output_dir);
    switch (cfg.command) {
      case Command::Simulate: run_simulate(cfg, *out, m); break;
      case Command::Oracle: run_oracle(cfg, *out, m); break;
      case Command::Hierarchy: run_hierarchy(cfg, *out, m); break;
      case Command::Master: run_master(cfg, *out, m); break;
      case Command::Compare: run_compare(cfg, *out, m); break;
    }
  } catch (const std::exception& e) {
    if (out) out->rollback();
    m["error"] = e.what();
  }
  m["files"] = out ? out->files() : std::vector<std::string>{};
  m["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out) {
    try {
      out->write("manifest.json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });
    } catch (const std::exception& e) {
      if (m["error"].is_null()) m["error"] = std::string("manifest: ") + e.what();
    }
  }
  return manifest;
}

}  // namespace swarmkin
