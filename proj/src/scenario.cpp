#include "dnls/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dnls/report_io.hpp"

namespace dnls {

namespace {

std::vector<SpectralParameter> spectral_list(const ScenarioConfig& cfg) {
  std::vector<SpectralParameter> sps;
  for (size_t i = 0; i < cfg.taus.size(); ++i) {
    const int branch = cfg.branches.empty() ? +1 : cfg.branches[i];
    sps.emplace_back(cfg.taus[i], branch);
  }
  return sps;
}

std::string tau_tag(double tau) {
  std::string s = fmt_double(tau);
  std::replace(s.begin(), s.end(), '-', 'm');
  std::replace(s.begin(), s.end(), '.', 'p');
  return s;
}

std::filesystem::path ensure_out_dir(const ScenarioConfig& cfg) {
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

int trace_kernel_size(const ScenarioConfig& cfg) { return std::min(cfg.grid_N, 512); }

Trajectory run_flow(const ScenarioConfig& cfg, const FieldPair& pair,
                    const std::vector<SpectralParameter>& probes) {
  EvolveOptions opts;
  opts.snapshot_stride = cfg.snapshot_stride;
  opts.probe_taus = probes;
  if (cfg.flow == ScenarioConfig::Flow::dnls) return dnls_evolve(pair, cfg.T, cfg.dt, opts);
  return akappa_evolve(pair, SpectralParameter(cfg.generator_tau), cfg.T, cfg.dt, opts);
}

bool enabled(const ScenarioConfig& cfg, const std::string& check) {
  return std::find(cfg.checks.begin(), cfg.checks.end(), check) != cfg.checks.end();
}

cdouble a_of_pair(const FieldPair& pair, const SpectralParameter& sp) {
  FixedPointOptions fp;
  fp.tol = 0.0;
  const DiagonalGreens dg = greens_fixed_point(pair, sp, fp);
  return a_from_density(rho_density(dg, pair));
}

}  // namespace

ScenarioConfig apply_overrides(ScenarioConfig cfg, const ScenarioOverrides& o) {
  if (o.tau) {
    cfg.taus = {*o.tau, *o.tau * 4.0};  // keep a distinct second parameter
    cfg.generator_tau = *o.tau;
  }
  if (o.amplitude) cfg.profile.amplitude = *o.amplitude;
  if (o.dt) cfg.dt = *o.dt;
  if (o.out) cfg.out_dir = *o.out;
  if (o.flow) {
    if (*o.flow == "dnls") cfg.flow = ScenarioConfig::Flow::dnls;
    else if (*o.flow == "akappa") cfg.flow = ScenarioConfig::Flow::akappa;
    else if (*o.flow == "none") cfg.flow = ScenarioConfig::Flow::none;
    else throw std::runtime_error("unknown flow override '" + *o.flow + "'");
  }
  cfg.validate();
  return cfg;
}

int run_greens(const ScenarioConfig& cfg, const std::string& method) {
  const auto dir = ensure_out_dir(cfg);
  const auto grid = make_grid(cfg.grid_L, cfg.grid_N);
  const FieldPair pair = sample_profile(cfg.profile, grid);
  for (const auto& sp : spectral_list(cfg)) {
    DiagonalGreens dg;
    if (method == "fixed_point") dg = greens_fixed_point(pair, sp);
    else if (method == "dense") dg = greens_dense_oracle(pair, sp, trace_kernel_size(cfg));
    else if (method == "jost") dg = greens_jost(pair, sp);
    else throw std::runtime_error("unknown greens method '" + method + "'");
    write_triple_csv((dir / ("greens_tau" + tau_tag(sp.tau()) + ".csv")).string(), dg);
  }
  return 0;
}

int run_invariants(const ScenarioConfig& cfg) {
  const auto dir = ensure_out_dir(cfg);
  const auto grid = make_grid(cfg.grid_L, cfg.grid_N);
  const FieldPair pair = sample_profile(cfg.profile, grid);
  const ConservedSet cons = conserved_polynomials(pair);

  nlohmann::json j;
  j["config_hash"] = config_hash(cfg.canonical);
  j["mass"] = {cons.mass.real(), cons.mass.imag()};
  j["hamiltonian"] = {cons.hamiltonian.real(), cons.hamiltonian.imag()};
  j["energy"] = {cons.energy.real(), cons.energy.imag()};
  j["a_values"] = nlohmann::json::array();
  for (const auto& sp : spectral_list(cfg)) {
    FixedPointOptions fp;
    fp.tol = 0.0;
    const DiagonalGreens dg = greens_fixed_point(pair, sp, fp);
    const cdouble a_density = a_from_density(rho_density(dg, pair));
    const TraceKernel kern = TraceKernel::build(pair, sp, trace_kernel_size(cfg));
    const cdouble a_logdet = a_trace_logdet(kern);
    const TraceSeries series = a_trace_series(kern, 8);
    nlohmann::json row;
    row["tau"] = sp.tau();
    row["a_density"] = {a_density.real(), a_density.imag()};
    row["a_logdet"] = {a_logdet.real(), a_logdet.imag()};
    row["a_series"] = {series.value.real(), series.value.imag()};
    row["term_magnitudes"] = nlohmann::json::array();
    for (const auto& t : series.terms) row["term_magnitudes"].push_back(std::abs(t));
    j["a_values"].push_back(row);
  }

  const auto& sps = spectral_list(cfg);
  const FieldPair dirpair =
      sample_profile(ProfileSpec::make_gaussian(1.0, 1.3, 0.35), grid);
  const GradientCheck gc = functional_derivative_check(pair, sps[0], dirpair.q, 1e-5);
  j["gradient"] = {{"err_q", gc.err_q}, {"err_r", gc.err_r}};
  const cdouble br = poisson_bracket_a(pair, sps[0], sps[1]);
  j["poisson_bracket"] = {br.real(), br.imag()};

  std::ofstream out(dir / "invariants.json");
  out << j.dump(2) << "\n";

  if (l2_norm(pair.q) > 0.0) {
    const AsymptoticsTable table = asymptotic_compare(pair, {8.0, 16.0, 32.0, 64.0});
    write_asymptotics_csv((dir / "asymptotics.csv").string(), table);
  }
  return 0;
}

int run_evolve(const ScenarioConfig& cfg) {
  if (cfg.flow == ScenarioConfig::Flow::none)
    throw std::runtime_error("evolve: config enables no flow");
  const auto dir = ensure_out_dir(cfg);
  const auto grid = make_grid(cfg.grid_L, cfg.grid_N);
  const FieldPair pair = sample_profile(cfg.profile, grid);
  const Trajectory traj = run_flow(cfg, pair, spectral_list(cfg));
  write_trajectory_csv((dir / "trajectory.csv").string(), traj);
  return 0;
}

int run_verify(const ScenarioConfig& cfg) {
  const auto dir = ensure_out_dir(cfg);
  const auto grid = make_grid(cfg.grid_L, cfg.grid_N);
  const FieldPair pair = sample_profile(cfg.profile, grid);
  const auto sps = spectral_list(cfg);
  const bool zero_data = l2_norm(pair.q) == 0.0;
  VerificationReport rep;

  if (enabled(cfg, "identity")) {
    VerificationReport ids = identity_suite(pair, sps[0], sps[1], cfg.tolerances);
    for (const auto& r : ids.rows) rep.rows.push_back(r);
  }

  if (enabled(cfg, "a_consistency")) {
    for (const auto& sp : sps) {
      FixedPointOptions fp;
      fp.tol = 0.0;
      const DiagonalGreens dg = greens_fixed_point(pair, sp, fp);
      const cdouble a_density = a_from_density(rho_density(dg, pair));
      const TraceKernel kern = TraceKernel::build(pair, sp, trace_kernel_size(cfg));
      const cdouble a_logdet = a_trace_logdet(kern);
      const double scale = std::max(std::abs(a_density), 1e-3);
      rep.add("a_consistency_tau" + tau_tag(sp.tau()), std::abs(a_density - a_logdet) / scale,
              cfg.tolerances.at("a_consistency"));
    }
  }

  if (enabled(cfg, "gradient")) {
    if (zero_data) {
      rep.add("gradient_q", 0.0, cfg.tolerances.at("gradient"));
      rep.add("gradient_r", 0.0, cfg.tolerances.at("gradient"));
    } else {
      const FieldPair dirpair =
          sample_profile(ProfileSpec::make_gaussian(1.0, 1.3, 0.35), grid);
      const GradientCheck gc = functional_derivative_check(pair, sps[0], dirpair.q, 1e-5);
      rep.add("gradient_q", gc.err_q, cfg.tolerances.at("gradient"));
      rep.add("gradient_r", gc.err_r, cfg.tolerances.at("gradient"));
    }
  }

  if (enabled(cfg, "bracket")) {
    const cdouble br = poisson_bracket_a(pair, sps[0], sps[1]);
    const cdouble a0 = a_of_pair(pair, sps[0]);
    const cdouble a1 = a_of_pair(pair, sps[1]);
    const double scale = std::max({std::abs(a0), std::abs(a1), 1e-3});
    rep.add("bracket", std::abs(br) / scale, cfg.tolerances.at("bracket"));
  }

  if (enabled(cfg, "branch_parity")) {
    const DiagonalGreens d1 = greens_fixed_point(pair, sps[0]);
    const DiagonalGreens d2 = greens_fixed_point(pair, sps[0].flipped());
    double res = std::max({sup_diff(d1.gamma, d2.gamma), sup_diff(d1.h12, d2.h12),
                           sup_diff(d1.h21, d2.h21)});
    if (!zero_data) {
      res = std::max(res, sup_diff(rho_density(d1, pair), rho_density(d2, pair)));
      res = std::max(res, sup_diff(flux_dnls(pair, d1).j, flux_dnls(pair, d2).j));
    }
    rep.add("branch_parity", res, cfg.tolerances.at("branch_parity"));
  }

  if (enabled(cfg, "gauge_im_gamma")) {
    const DiagonalGreens d1 = greens_fixed_point(pair, sps[0]);
    double im = 0.0;
    for (const auto& v : d1.gamma.values()) im = std::max(im, std::abs(v.imag()));
    rep.add("gauge_im_gamma", im, cfg.tolerances.at("gauge_im_gamma"));
  }

  const bool want_flow = enabled(cfg, "flow_conservation") || enabled(cfg, "continuity");
  if (want_flow && cfg.flow != ScenarioConfig::Flow::none) {
    const Trajectory traj = run_flow(cfg, pair, sps);
    write_trajectory_csv((dir / "trajectory.csv").string(), traj);

    if (enabled(cfg, "flow_conservation")) {
      const auto& first = traj.snaps.front().conserved;
      double dm = 0.0, dh = 0.0, da = 0.0, dg = 0.0;
      for (const auto& s : traj.snaps) {
        dm = std::max(dm, std::abs(s.conserved.mass - first.mass));
        dh = std::max(dh, std::abs(s.conserved.hamiltonian - first.hamiltonian));
        for (size_t k = 0; k < s.conserved.a_values.size(); ++k)
          da = std::max(da, std::abs(s.conserved.a_values[k].second -
                                     first.a_values[k].second) /
                                std::max(std::abs(first.a_values[k].second), 1e-300));
        dg = std::max(dg, s.gauge_dev);
      }
      rep.add("mass_drift", dm / std::max(std::abs(first.mass), 1e-300),
              cfg.tolerances.at("mass_drift"));
      rep.add("hamiltonian_drift", dh / std::max(std::abs(first.hamiltonian), 1e-300),
              cfg.tolerances.at("hamiltonian_drift"));
      rep.add("a_drift", da, cfg.tolerances.at("a_drift"));
      if (cfg.flow == ScenarioConfig::Flow::dnls)
        rep.add("gauge_drift", dg, cfg.tolerances.at("gauge_drift"));
    }

    if (enabled(cfg, "continuity")) {
      if (cfg.flow == ScenarioConfig::Flow::dnls) {
        const ContinuityResult c = continuity_residual(traj, FluxKind::dnls_flux, sps[0]);
        const double worst =
            c.l2_residuals.empty()
                ? 0.0
                : *std::max_element(c.l2_residuals.begin(), c.l2_residuals.end());
        rep.add("continuity_dnls", worst, cfg.tolerances.at("continuity"));
      } else {
        for (const FluxKind kind : {FluxKind::a_flux, FluxKind::gamma_flux}) {
          SpectralParameter probe =
              (sps[0].tau() == cfg.generator_tau) ? sps[1] : sps[0];
          const ContinuityResult c = continuity_residual(traj, kind, probe);
          const double worst =
              c.l2_residuals.empty()
                  ? 0.0
                  : *std::max_element(c.l2_residuals.begin(), c.l2_residuals.end());
          rep.add(kind == FluxKind::a_flux ? "continuity_a" : "continuity_gamma", worst,
                  cfg.tolerances.at("continuity"));
        }
      }
    }
  }

  write_report_json((dir / "report.json").string(), config_hash(cfg.canonical), rep);
  for (const auto& r : rep.rows)
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " residual=" << r.residual
              << " tol=" << r.tolerance << "\n";
  return rep.all_pass() ? 0 : 1;
}

int run_sweep(const ScenarioConfig& cfg) {
  const auto dir = ensure_out_dir(cfg);
  const auto grid = make_grid(cfg.grid_L, cfg.grid_N);
  std::vector<ProfileSpec> family;
  for (double a : cfg.sweep_amplitudes) {
    ProfileSpec spec = cfg.profile;
    spec.amplitude = a;
    family.push_back(spec);
  }
  const SweepTable table = estimate_sweep(family, cfg.sweep_taus, cfg.sweep_s, grid);
  write_sweep_csv((dir / "sweep.csv").string(), table);
  return 0;
}

}  // namespace dnls
