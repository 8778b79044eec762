#include "dnls/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dnls {

namespace {

const cdouble kI(0.0, 1.0);

DiagonalGreens tight_fixed_point(const FieldPair& pair, const SpectralParameter& sp) {
  FixedPointOptions opts;
  opts.tol = 0.0;
  return greens_fixed_point(pair, sp, opts);
}

cdouble a_of(const FieldPair& pair, const SpectralParameter& sp) {
  DiagonalGreens dg = tight_fixed_point(pair, sp);
  return a_from_density(rho_density(dg, pair));
}

}  // namespace

FluxRecord flux_dnls(const FieldPair& pair, const DiagonalGreens& dg) {
  const double tau = dg.sp.tau();
  const ComplexField rho = rho_density(dg, pair);
  const ComplexField qp = spectral_derivative(pair.q);
  const ComplexField rp = spectral_derivative(pair.r);
  const ComplexField qr = pair.q * pair.r;
  const ComplexField two_plus = add_scalar(dg.gamma, 2.0);

  const int n = dg.gamma.size();
  std::vector<cdouble> j(n);
  for (int i = 0; i < n; ++i) {
    j[i] = kI * (qp[i] * dg.h21[i] - rp[i] * dg.h12[i]) / two_plus[i] - tau * qr[i] +
           2.0 * kI * tau * rho[i] - qr[i] * rho[i];
  }
  FluxRecord rec;
  rec.kind = FluxKind::dnls_flux;
  rec.j = ComplexField(dg.gamma.grid(), std::move(j));
  rec.tau_probe = tau;
  return rec;
}

FluxRecord flux_a(const DiagonalGreens& dg_probe, const DiagonalGreens& dg_gen) {
  if (dg_probe.sp.tau() == dg_gen.sp.tau())
    throw std::invalid_argument("flux_a: coincident probe and generator parameters");
  const cdouble k2 = dg_gen.sp.kappa2();    // kappa^2 (generator)
  const cdouble v2 = dg_probe.sp.kappa2();  // varkappa^2 (probe)
  const cdouble theta_h = k2 / (k2 - v2);   // Theta / (kappa varkappa), real
  const cdouble xi = v2 * k2 / (k2 - v2);

  const int n = dg_probe.gamma.size();
  std::vector<cdouble> j(n);
  for (int i = 0; i < n; ++i) {
    const cdouble den = 2.0 + dg_probe.gamma[i];
    const cdouble cross =
        dg_gen.h12[i] * dg_probe.h21[i] + dg_probe.h12[i] * dg_gen.h21[i];
    j[i] = -theta_h * cross / den - 0.5 * xi * dg_gen.gamma[i];
  }
  FluxRecord rec;
  rec.kind = FluxKind::a_flux;
  rec.j = ComplexField(dg_probe.gamma.grid(), std::move(j));
  rec.tau_probe = dg_probe.sp.tau();
  rec.tau_generator = dg_gen.sp.tau();
  rec.theta = dg_probe.sp.kappa() * dg_gen.sp.kappa2() * dg_gen.sp.kappa() / (k2 - v2);
  rec.xi = xi;
  return rec;
}

FluxRecord flux_gamma(const DiagonalGreens& dg_probe, const DiagonalGreens& dg_gen) {
  if (dg_probe.sp.tau() == dg_gen.sp.tau())
    throw std::invalid_argument("flux_gamma: coincident probe and generator parameters");
  const cdouble k = dg_gen.sp.kappa();
  const cdouble v = dg_probe.sp.kappa();
  const cdouble k2 = dg_gen.sp.kappa2();
  const cdouble v2 = dg_probe.sp.kappa2();
  const cdouble dk2 = (k2 - v2) * (k2 - v2);
  const cdouble c_cross = -k2 * k * (k2 + v2) / dk2;  // times g12(k)g21(v)+g21(k)g12(v)
  const cdouble c_gam = -k2 * k2 * v / dk2;

  const ComplexField g12k = dg_gen.g12();
  const ComplexField g21k = dg_gen.g21();
  const ComplexField g12v = dg_probe.g12();
  const ComplexField g21v = dg_probe.g21();

  const int n = dg_probe.gamma.size();
  std::vector<cdouble> j(n);
  for (int i = 0; i < n; ++i) {
    const cdouble cross = g12k[i] * g21v[i] + g21k[i] * g12v[i];
    const cdouble gg = (dg_gen.gamma[i] + 1.0) * (dg_probe.gamma[i] + 1.0);
    j[i] = c_cross * cross + c_gam * gg;
  }
  FluxRecord rec;
  rec.kind = FluxKind::gamma_flux;
  rec.j = ComplexField(dg_probe.gamma.grid(), std::move(j));
  rec.tau_probe = dg_probe.sp.tau();
  rec.tau_generator = dg_gen.sp.tau();
  return rec;
}

ComplexField gamma_law_density(const FieldPair& pair, const DiagonalGreens& dg_probe) {
  const cdouble v = dg_probe.sp.kappa();
  const ComplexField g12 = dg_probe.g12();
  const ComplexField g21 = dg_probe.g21();
  const int n = dg_probe.gamma.size();
  std::vector<cdouble> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = 2.0 * kI * v * dg_probe.gamma[i] - (pair.q[i] * g21[i] + pair.r[i] * g12[i]);
  return ComplexField(dg_probe.gamma.grid(), std::move(out));
}

ContinuityResult continuity_residual(const Trajectory& traj, FluxKind kind,
                                     const SpectralParameter& probe) {
  const bool need_dnls = kind == FluxKind::dnls_flux;
  if (need_dnls != (traj.flow == FlowKind::dnls))
    throw std::invalid_argument("continuity_residual: flux kind does not match the flow");
  if (!need_dnls && !traj.generator)
    throw std::invalid_argument("continuity_residual: trajectory lacks its generator");
  if (traj.snaps.size() < 3)
    throw std::invalid_argument("continuity_residual: need at least three snapshots");

  FixedPointOptions fp;
  fp.tol = 1e-14;
  auto density_of = [&](const FieldPair& p, const DiagonalGreens& dg) {
    return (kind == FluxKind::gamma_flux) ? gamma_law_density(p, dg) : rho_density(dg, p);
  };

  std::vector<DiagonalGreens> triples;
  std::vector<ComplexField> densities;
  for (const auto& s : traj.snaps) {
    triples.push_back(greens_fixed_point(s.pair, probe, fp));
    densities.push_back(density_of(s.pair, triples.back()));
  }

  ContinuityResult out;
  for (size_t i = 1; i + 1 < traj.snaps.size(); ++i) {
    const double dt2 = traj.snaps[i + 1].t - traj.snaps[i - 1].t;
    FluxRecord flux;
    if (kind == FluxKind::dnls_flux) {
      flux = flux_dnls(traj.snaps[i].pair, triples[i]);
    } else {
      DiagonalGreens dg_gen = greens_fixed_point(traj.snaps[i].pair, *traj.generator, fp);
      flux = (kind == FluxKind::a_flux) ? flux_a(triples[i], dg_gen)
                                        : flux_gamma(triples[i], dg_gen);
    }
    const ComplexField res =
        (1.0 / dt2) * (densities[i + 1] - densities[i - 1]) + spectral_derivative(flux.j);
    out.times.push_back(traj.snaps[i].t);
    out.l2_residuals.push_back(l2_norm(res));
  }
  const cdouble first = integrate(densities.front());
  const cdouble last = integrate(densities.back());
  out.integral_drift = std::abs(last - first) / std::max(std::abs(first), 1e-300);
  return out;
}

void VerificationReport::add(const std::string& name, double residual, double tolerance) {
  rows.push_back(CheckRow{name, residual, tolerance, residual <= tolerance});
}

bool VerificationReport::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

const ToleranceMap& default_tolerances() {
  static const ToleranceMap tol = {
      {"quadratic_id", 1e-6},  {"rho_id", 1e-6},        {"g12_id", 1e-6},
      {"g21_id", 1e-6},        {"symmetry_gamma", 1e-8}, {"symmetry_g", 1e-8},
      {"two_param", 1e-6},     {"series_remainder", 1e-6}, {"dadtau", 1e-6},
      {"method_equivalence", 1e-6},
      {"a_consistency", 1e-7},
      {"gradient", 1e-6},
      {"bracket", 1e-8},
      {"branch_parity", 1e-12},
      {"gauge_im_gamma", 1e-8},
      {"mass_drift", 1e-10},
      {"hamiltonian_drift", 1e-8},
      {"a_drift", 1e-6},
      {"gauge_drift", 1e-10},
      {"continuity", 1e-4},
  };
  return tol;
}

namespace {

double tol_for(const ToleranceMap& tol, const std::string& name) {
  auto it = tol.find(name);
  if (it == tol.end())
    throw std::invalid_argument("tolerance map gap: no tolerance for check '" + name + "'");
  return it->second;
}

// d/dtau of A at sp by second-order finite differences, staying in |tau| >= 1.
cdouble a_dtau_fd(const FieldPair& pair, const SpectralParameter& sp) {
  const double tau = sp.tau();
  const double delta = 1e-3 * std::abs(tau);
  if (std::abs(tau) - delta >= 1.0) {
    SpectralParameter up(tau + delta, sp.branch());
    SpectralParameter dn(tau - delta, sp.branch());
    return (a_of(pair, up) - a_of(pair, dn)) / (2.0 * delta);
  }
  const double out = (tau > 0.0) ? delta : -delta;
  const cdouble f0 = a_of(pair, sp);
  const cdouble f1 = a_of(pair, SpectralParameter(tau + out, sp.branch()));
  const cdouble f2 = a_of(pair, SpectralParameter(tau + 2.0 * out, sp.branch()));
  return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * out);
}

void identity_rows(VerificationReport& rep, const FieldPair& pair, const SpectralParameter& sp,
                   const std::string& suffix, const ToleranceMap& tol) {
  const double tau = sp.tau();
  const DiagonalGreens dg = tight_fixed_point(pair, sp);
  const ComplexField gp1 = add_scalar(dg.gamma, 1.0);

  // gamma + gamma^2/2 + 2 g12 g21, with 2 g12 g21 = (2i/tau) h12 h21
  const ComplexField quad = dg.gamma + cdouble(0.5) * (dg.gamma * dg.gamma) +
                            cdouble(0.0, 2.0 / tau) * (dg.h12 * dg.h21);
  rep.add("quadratic_id" + suffix, sup_norm(quad), tol_for(tol, "quadratic_id"));

  const ComplexField rho_id =
      spectral_derivative(dg.gamma) - 2.0 * (pair.q * dg.h21 - pair.r * dg.h12);
  rep.add("rho_id" + suffix, sup_norm(rho_id), tol_for(tol, "rho_id"));

  const ComplexField g12_id = spectral_derivative(dg.h12) + (2.0 * tau) * dg.h12 -
                              cdouble(0.0, tau) * (pair.q * gp1);
  rep.add("g12_id" + suffix, sup_norm(g12_id), tol_for(tol, "g12_id"));

  const ComplexField g21_id = spectral_derivative(dg.h21) - (2.0 * tau) * dg.h21 +
                              cdouble(0.0, tau) * (pair.r * gp1);
  rep.add("g21_id" + suffix, sup_norm(g21_id), tol_for(tol, "g21_id"));

  // gamma(kappa) = conj gamma(-conj kappa), g12(kappa) = -conj g21(-conj kappa)
  const DiagonalGreens nc = tight_fixed_point(pair, sp.neg_conj());
  rep.add("symmetry_gamma" + suffix, sup_diff(dg.gamma, conj(nc.gamma)),
          tol_for(tol, "symmetry_gamma"));
  const ComplexField g12 = dg.g12();
  const ComplexField g21nc = nc.g21();
  rep.add("symmetry_g" + suffix, sup_diff(g12, cdouble(-1.0) * conj(g21nc)),
          tol_for(tol, "symmetry_g"));

  // series-remainder decomposition of gamma^{[>=4]}
  const SeriesTerms st = series_terms(pair, sp);
  const ComplexField g21f = dg.g21();
  const ComplexField lhs = dg.gamma - st.gamma_2;
  const ComplexField rhs = cdouble(-0.5) * (dg.gamma * dg.gamma) -
                           2.0 * ((g12 - st.g12_1) * g21f) -
                           2.0 * (st.g12_1 * (g21f - st.g21_1));
  rep.add("series_remainder" + suffix, sup_diff(lhs, rhs), tol_for(tol, "series_remainder"));

  // dA/dtau = integral gamma dx - (1/2tau) integral q h21 + r h12 dx
  const cdouble fd = a_dtau_fd(pair, sp);
  const cdouble closed =
      integrate(dg.gamma) - integrate(pair.q * dg.h21 + pair.r * dg.h12) / (2.0 * tau);
  rep.add("dadtau" + suffix, std::abs(fd - closed), tol_for(tol, "dadtau"));
}

}  // namespace

VerificationReport identity_suite(const FieldPair& pair, const SpectralParameter& sp_a,
                                  const SpectralParameter& sp_b, const ToleranceMap& tol) {
  if (sp_a.tau() == sp_b.tau())
    throw std::invalid_argument("identity_suite: parameters must differ");
  VerificationReport rep;
  identity_rows(rep, pair, sp_a, "_a", tol);
  identity_rows(rep, pair, sp_b, "_b", tol);

  // two-parameter identity; kappa = sp_a, varkappa = sp_b
  const DiagonalGreens da = tight_fixed_point(pair, sp_a);
  const DiagonalGreens db = tight_fixed_point(pair, sp_b);
  const cdouble k2 = sp_a.kappa2();
  const cdouble v2 = sp_b.kappa2();
  const cdouble k = sp_a.kappa();
  const cdouble v = sp_b.kappa();
  const ComplexField g12a = da.g12(), g21a = da.g21();
  const ComplexField g12b = db.g12(), g21b = db.g21();
  const ComplexField lhs = ((k2 - v2) / k2) * (spectral_derivative(g12a) * g21b +
                                               spectral_derivative(g21a) * g12b);
  const ComplexField rhs =
      spectral_derivative(g12a * g21b + g21a * g12b) +
      (v / (2.0 * k)) *
          spectral_derivative(add_scalar(da.gamma, 1.0) * add_scalar(db.gamma, 1.0));
  rep.add("two_param", sup_diff(lhs, rhs), tol_for(tol, "two_param"));
  return rep;
}

double SweepTable::max_over_median(const std::string& estimate) const {
  std::vector<double> ratios;
  for (const auto& r : rows)
    if (r.valid && r.estimate == estimate) ratios.push_back(r.ratio);
  if (ratios.empty()) return 0.0;
  std::sort(ratios.begin(), ratios.end());
  const double median = ratios[ratios.size() / 2];
  return ratios.back() / std::max(median, 1e-300);
}

std::vector<std::string> SweepTable::estimate_ids() const {
  std::vector<std::string> ids;
  for (const auto& r : rows)
    if (std::find(ids.begin(), ids.end(), r.estimate) == ids.end()) ids.push_back(r.estimate);
  return ids;
}

SweepTable estimate_sweep(const std::vector<ProfileSpec>& family,
                          const std::vector<double>& taus, double s, const GridPtr& grid) {
  if (!(s > 0.0 && s < 0.5))
    throw std::invalid_argument("estimate_sweep: s must lie in (0, 1/2)");
  SweepTable table;
  const SpectralParameter unit(1.0);
  for (const auto& spec : family) {
    const FieldPair pair = sample_profile(spec, grid);
    const double qn = l2_norm(pair.q);
    for (double tau : taus) {
      const SpectralParameter sp(tau);
      const double km = std::sqrt(std::abs(tau));   // |kappa|
      const double km2 = std::abs(tau);             // |kappa|^2
      auto push = [&](const std::string& id, double lhs, double rhs) {
        SweepRow row;
        row.estimate = id;
        row.amplitude = spec.amplitude;
        row.tau = tau;
        row.lhs = lhs;
        row.rhs = rhs;
        row.valid = rhs > 0.0 && std::isfinite(lhs / rhs);
        row.ratio = row.valid ? lhs / rhs : 0.0;
        table.rows.push_back(row);
      };
      if (qn == 0.0) {
        for (const char* id : {"g12_Hs", "g12_LO", "rho_Hs", "rho_Linfty", "rho_L1", "rho_LO",
                               "ET_Sob", "ET1_Sob", "HS_log", "HS_basic", "remark3_interp"})
          push(id, 0.0, 0.0);  // degenerate 0/0 rows, marked invalid
        continue;
      }

      const DiagonalGreens dg = tight_fixed_point(pair, sp);
      const SeriesTerms st = series_terms(pair, sp);
      const ComboRatio cr = combo_ratio(dg, pair);
      const ComplexField g12 = dg.g12(), g21 = dg.g21();
      const double q_low = sobolev_norm(pair.q, s - 0.5, sp);

      push("g12_Hs",
           sobolev_norm(g12, s + 0.5, sp) + sobolev_norm(g21, s + 0.5, sp),
           km * q_low);
      push("g12_LO",
           sobolev_norm(g12 - st.g12_1, s + 0.5, sp) +
               sobolev_norm(g21 - st.g21_1, s + 0.5, sp),
           km * q_low * qn * qn);
      push("rho_Hs", sobolev_norm(dg.gamma, s + 0.5, sp),
           std::pow(km, 2.0 - 2.0 * s) * q_low * q_low);
      push("rho_Linfty", sup_norm(dg.gamma), std::pow(km, 2.0 - 4.0 * s) * q_low * q_low);
      push("rho_L1", l1_norm(dg.gamma),
           km2 * std::pow(sobolev_norm(pair.q, -1.0, sp), 2) +
               std::pow(km, -2.0 * (4.0 * s - 1.0)) * std::pow(q_low, 4));
      push("rho_LO", l1_norm(dg.gamma - st.gamma_2),
           std::pow(km, -2.0 * (4.0 * s - 1.0)) * std::pow(q_low, 4));
      push("ET_Sob",
           km2 * sobolev_norm(cr.ratio12, s - 0.5, unit) +
               sobolev_norm(cr.ratio12, s + 0.5, unit),
           km * sobolev_norm(pair.q, s - 0.5, unit));
      push("ET1_Sob",
           km2 * sobolev_norm(cr.remainder12_geq3, s - 0.5, unit) +
               sobolev_norm(cr.remainder12_geq3, s + 0.5, unit),
           km * sobolev_norm(pair.q, s - 0.5, unit) * qn * qn);

      const HsNorms hs = hs_norm_lambda(pair, sp, s);
      push("HS_log", hs.hs_half, qn);
      push("HS_basic", hs.hs_s, km * q_low);
      push("remark3_interp", std::abs(integrate(st.gamma_2)),
           km2 * std::pow(sobolev_norm(pair.q, -0.5, sp), 2));
    }
  }
  return table;
}

}  // namespace dnls
