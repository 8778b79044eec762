#include "dnls/flows.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace dnls {

namespace {

const cdouble kI(0.0, 1.0);

ConservedSet snapshot_conserved(const FieldPair& pair,
                                const std::vector<SpectralParameter>& probes) {
  ConservedSet c = conserved_polynomials(pair);
  for (const auto& sp : probes) {
    FixedPointOptions opts;
    opts.tol = 0.0;
    DiagonalGreens dg = greens_fixed_point(pair, sp, opts);
    c.a_values.emplace_back(sp, a_from_density(rho_density(dg, pair)));
  }
  return c;
}

void record_snapshot(Trajectory& traj, double t, const FieldPair& pair,
                     const EvolveOptions& opts) {
  Snapshot s;
  s.t = t;
  s.pair = pair;
  s.gauge_dev = gauge_deviation(pair);
  if (opts.record_conserved) s.conserved = snapshot_conserved(pair, opts.probe_taus);
  traj.snaps.push_back(std::move(s));
}

}  // namespace

PairDerivative dnls_rhs(const FieldPair& pair) {
  const ComplexField& q = pair.q;
  const ComplexField& r = pair.r;
  PairDerivative d;
  d.dq = kI * spectral_derivative(spectral_derivative(q)) +
         spectral_derivative(dealias_two_thirds(q * q * r));
  d.dr = -kI * spectral_derivative(spectral_derivative(r)) +
         spectral_derivative(dealias_two_thirds(q * r * r));
  return d;
}

PairDerivative akappa_rhs(const FieldPair& pair, const SpectralParameter& sp,
                          const DiagonalGreens* warm, DiagonalGreens* triple_out) {
  FixedPointOptions opts;
  opts.warm_start = warm;
  DiagonalGreens dg = greens_fixed_point(pair, sp, opts);
  PairDerivative d;
  d.dq = cdouble(-1.0) * spectral_derivative(dg.h12);
  d.dr = cdouble(-1.0) * spectral_derivative(dg.h21);
  if (triple_out) *triple_out = std::move(dg);
  return d;
}

Trajectory dnls_evolve(const FieldPair& pair, double T, double dt, const EvolveOptions& opts) {
  if (!(T > 0.0) || !(dt > 0.0)) throw std::invalid_argument("dnls_evolve: need T > 0, dt > 0");
  const auto& grid = pair.q.grid();

  // nonlinear parts only; i q'' / -i r'' are the removed linear phases
  auto nl = [](const ComplexField& q, const ComplexField& r) {
    PairDerivative d;
    d.dq = spectral_derivative(dealias_two_thirds(q * q * r));
    d.dr = spectral_derivative(dealias_two_thirds(q * r * r));
    return d;
  };
  auto phase_q = [&](const ComplexField& f, double s) {
    return apply_multiplier(f, [s](double xi) {
      const double a = -xi * xi * s;
      return cdouble(std::cos(a), std::sin(a));
    });
  };
  auto phase_r = [&](const ComplexField& f, double s) {
    return apply_multiplier(f, [s](double xi) {
      const double a = xi * xi * s;
      return cdouble(std::cos(a), std::sin(a));
    });
  };

  Trajectory traj;
  traj.flow = FlowKind::dnls;
  traj.dt = dt;
  traj.stride = opts.snapshot_stride;

  ComplexField q = pair.q, r = pair.r;
  const double sup0 = sup_norm(q);
  record_snapshot(traj, 0.0, pair, opts);

  const int steps = static_cast<int>(std::llround(T / dt));
  for (int n = 1; n <= steps; ++n) {
    const double hd = 0.5 * dt;
    PairDerivative k1 = nl(q, r);
    ComplexField q2 = phase_q(q + hd * k1.dq, hd);
    ComplexField r2 = phase_r(r + hd * k1.dr, hd);
    PairDerivative k2 = nl(q2, r2);
    ComplexField q3 = phase_q(q, hd) + hd * k2.dq;
    ComplexField r3 = phase_r(r, hd) + hd * k2.dr;
    PairDerivative k3 = nl(q3, r3);
    ComplexField q4 = phase_q(q, dt) + dt * phase_q(k3.dq, hd);
    ComplexField r4 = phase_r(r, dt) + dt * phase_r(k3.dr, hd);
    PairDerivative k4 = nl(q4, r4);

    q = phase_q(q, dt) + (dt / 6.0) * (phase_q(k1.dq, dt) +
                                       2.0 * phase_q(k2.dq + k3.dq, hd) + k4.dq);
    r = phase_r(r, dt) + (dt / 6.0) * (phase_r(k1.dr, dt) +
                                       2.0 * phase_r(k2.dr + k3.dr, hd) + k4.dr);

    if (sup_norm(q) > opts.blowup_factor * std::max(sup0, 1e-300))
      throw std::runtime_error("dnls_evolve: blow-up guard tripped at t = " +
                               std::to_string(n * dt));
    if (n % opts.snapshot_stride == 0 || n == steps) {
      FieldPair p = make_pair(q, r);
      p.gauge_flag = pair.gauge_flag;
      record_snapshot(traj, n * dt, p, opts);
    }
  }
  (void)grid;
  return traj;
}

Trajectory akappa_evolve(const FieldPair& pair, const SpectralParameter& sp, double T,
                         double dt, const EvolveOptions& opts) {
  if (!(T > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("akappa_evolve: need T > 0, dt > 0");

  Trajectory traj;
  traj.flow = FlowKind::a_kappa;
  traj.generator = sp;
  traj.dt = dt;
  traj.stride = opts.snapshot_stride;

  ComplexField q = pair.q, r = pair.r;
  const double sup0 = sup_norm(q);
  record_snapshot(traj, 0.0, pair, opts);

  DiagonalGreens warm;
  bool have_warm = false;
  auto rhs = [&](const ComplexField& qq, const ComplexField& rr) {
    FieldPair p = make_pair(qq, rr);
    DiagonalGreens triple;
    PairDerivative d = akappa_rhs(p, sp, have_warm ? &warm : nullptr, &triple);
    warm = std::move(triple);
    have_warm = true;
    return d;
  };

  const int steps = static_cast<int>(std::llround(T / dt));
  for (int n = 1; n <= steps; ++n) {
    PairDerivative k1 = rhs(q, r);
    PairDerivative k2 = rhs(q + (0.5 * dt) * k1.dq, r + (0.5 * dt) * k1.dr);
    PairDerivative k3 = rhs(q + (0.5 * dt) * k2.dq, r + (0.5 * dt) * k2.dr);
    PairDerivative k4 = rhs(q + dt * k3.dq, r + dt * k3.dr);
    q = q + (dt / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    r = r + (dt / 6.0) * (k1.dr + 2.0 * k2.dr + 2.0 * k3.dr + k4.dr);

    if (sup_norm(q) > opts.blowup_factor * std::max(sup0, 1e-300))
      throw std::runtime_error("akappa_evolve: blow-up guard tripped at t = " +
                               std::to_string(n * dt));
    if (n % opts.snapshot_stride == 0 || n == steps)
      record_snapshot(traj, n * dt, make_pair(q, r), opts);
  }
  return traj;
}

namespace {

std::vector<ComplexField> random_smooth_fields(const GridPtr& grid, int n_fields,
                                               unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> un(-1.0, 1.0);
  const double L = grid->half_length;
  std::vector<ComplexField> out;
  for (int f = 0; f < n_fields; ++f) {
    std::vector<cdouble> vals(grid->size);
    std::vector<cdouble> coef(7);
    for (auto& c : coef) c = cdouble(un(gen), un(gen));
    for (int j = 0; j < grid->size; ++j) {
      const double x = grid->x[j];
      const double env = std::exp(-std::pow(4.0 * x / L, 2));
      cdouble acc(0.0, 0.0);
      for (int m = 0; m < static_cast<int>(coef.size()); ++m) {
        const double ph = M_PI * m * x / L;
        acc += coef[m] * cdouble(std::cos(ph), std::sin(ph));
      }
      vals[j] = env * acc;
    }
    out.emplace_back(grid, std::move(vals));
  }
  return out;
}

struct Mat2Field {
  ComplexField m11, m12, m21, m22;
};

}  // namespace

double lax_residual(const FieldPair& pair, FlowKind flow, const SpectralParameter& probe,
                    const SpectralParameter* generator, int n_fields, unsigned seed) {
  const auto& grid = pair.q.grid();
  const double tau_p = probe.tau();
  const cdouble vk = probe.kappa();   // varkappa of the probed Lax operator
  const cdouble vk2 = probe.kappa2();
  const ComplexField& q = pair.q;
  const ComplexField& r = pair.r;
  const ComplexField qp = spectral_derivative(q);
  const ComplexField rp = spectral_derivative(r);

  PairDerivative dpair;
  Mat2Field p;
  if (flow == FlowKind::dnls) {
    dpair = dnls_rhs(pair);
    const cdouble vk3 = vk2 * vk;
    const cdouble vk4 = vk2 * vk2;
    const ComplexField qr = q * r;
    p.m11 = add_scalar(-kI * vk2 * qr, -2.0 * kI * vk4);
    p.m22 = cdouble(-1.0) * p.m11;
    p.m12 = 2.0 * vk3 * q + kI * vk * qp + vk * (q * q * r);
    p.m21 = 2.0 * vk3 * r - kI * vk * rp + vk * (q * r * r);
  } else {
    if (!generator) throw std::invalid_argument("lax_residual: A flow needs a generator");
    if (generator->tau() == probe.tau())
      throw std::invalid_argument("lax_residual: coincident probe and generator parameters");
    DiagonalGreens dg;
    dpair = akappa_rhs(pair, *generator, nullptr, &dg);
    const cdouble k = generator->kappa();
    const cdouble k2 = generator->kappa2();
    const cdouble theta = vk * k2 * k / (k2 - vk2);
    const cdouble xi = vk2 * k2 / (k2 - vk2);
    const ComplexField gp1 = add_scalar(dg.gamma, 1.0);
    p.m11 = (-0.5 * xi) * gp1;
    p.m22 = (0.5 * xi) * gp1;
    p.m12 = (-theta) * dg.g12();
    p.m21 = (-theta) * dg.g21();
  }

  auto apply_l = [&](const ComplexField& f1, const ComplexField& f2) {
    return std::pair<ComplexField, ComplexField>(
        spectral_derivative(f1) + tau_p * f1 - vk * (q * f2),
        spectral_derivative(f2) - tau_p * f2 - vk * (r * f1));
  };

  double worst = 0.0;
  for (const auto& phi1 : random_smooth_fields(grid, n_fields, seed)) {
    // two-component test field: reuse phi for both slots with a twist
    const ComplexField phi2 = kI * conj(phi1);
    auto [l1, l2] = apply_l(phi1, phi2);
    const ComplexField pl1 = p.m11 * l1 + p.m12 * l2;
    const ComplexField pl2 = p.m21 * l1 + p.m22 * l2;
    const ComplexField pphi1 = p.m11 * phi1 + p.m12 * phi2;
    const ComplexField pphi2 = p.m21 * phi1 + p.m22 * phi2;
    auto [lp1, lp2] = apply_l(pphi1, pphi2);
    const ComplexField dl1 = (-vk) * (dpair.dq * phi2);
    const ComplexField dl2 = (-vk) * (dpair.dr * phi1);
    const ComplexField res1 = dl1 - (pl1 - lp1);
    const ComplexField res2 = dl2 - (pl2 - lp2);
    const double n1 = l2_norm(res1), n2 = l2_norm(res2);
    const double d1 = l2_norm(phi1), d2 = l2_norm(phi2);
    worst = std::max(worst, std::sqrt(n1 * n1 + n2 * n2) / std::sqrt(d1 * d1 + d2 * d2));
  }
  return worst;
}

std::vector<DynamicsRow> greens_dynamics_check(const Trajectory& traj,
                                               const SpectralParameter& probe) {
  if (traj.snaps.size() < 3)
    throw std::invalid_argument("greens_dynamics_check: need at least three snapshots");
  const cdouble vk2 = probe.kappa2();
  FixedPointOptions fp;
  fp.tol = 1e-14;

  std::vector<DiagonalGreens> triples;
  triples.reserve(traj.snaps.size());
  for (const auto& s : traj.snaps) triples.push_back(greens_fixed_point(s.pair, probe, fp));

  const bool aflow = traj.flow == FlowKind::a_kappa;
  if (aflow && !traj.generator)
    throw std::invalid_argument("greens_dynamics_check: trajectory lacks its generator");

  std::vector<DynamicsRow> rows;
  for (size_t i = 1; i + 1 < traj.snaps.size(); ++i) {
    const double dt2 = traj.snaps[i + 1].t - traj.snaps[i - 1].t;
    const auto& mid = traj.snaps[i];
    const auto& dg = triples[i];
    const ComplexField dh12 = (1.0 / dt2) * (triples[i + 1].h12 - triples[i - 1].h12);
    const ComplexField dh21 = (1.0 / dt2) * (triples[i + 1].h21 - triples[i - 1].h21);
    const ComplexField dgam = (1.0 / dt2) * (triples[i + 1].gamma - triples[i - 1].gamma);

    ComplexField rhs12, rhs21, rhsg;
    const ComplexField gp1 = add_scalar(dg.gamma, 1.0);
    if (!aflow) {
      const ComplexField& q = mid.pair.q;
      const ComplexField& r = mid.pair.r;
      const ComplexField qr = q * r;
      const ComplexField qp = spectral_derivative(q);
      const ComplexField rp = spectral_derivative(r);
      const cdouble vk4 = vk2 * vk2;
      // coefficient -2(2 i vk^4 + i vk^2 q r), and the h-scaled source terms
      const ComplexField coef = add_scalar(2.0 * kI * vk2 * qr, 4.0 * kI * vk4);
      rhs12 = cdouble(-1.0) * (coef * dg.h12) -
              (2.0 * vk2 * (vk2 * q) + kI * vk2 * qp + vk2 * (q * q * r)) * gp1;
      rhs21 = coef * dg.h21 + (2.0 * vk2 * (vk2 * r) - kI * vk2 * rp + vk2 * (q * r * r)) * gp1;
      const ComplexField gpx = spectral_derivative(dg.gamma);
      rhsg = 2.0 * vk2 * gpx + 2.0 * kI * (qp * dg.h21 + rp * dg.h12) + qr * gpx;
    } else {
      const SpectralParameter& gen = *traj.generator;
      const cdouble k2 = gen.kappa2();
      const cdouble xi_coef = vk2 * k2 / (k2 - vk2);  // Xi
      const cdouble theta_h = k2 / (k2 - vk2);        // Theta/(kappa*varkappa)
      DiagonalGreens gen_triple = greens_fixed_point(mid.pair, gen, fp);
      const ComplexField gk1 = add_scalar(gen_triple.gamma, 1.0);
      rhs12 = xi_coef * (gen_triple.h12 * gp1 - dg.h12 * gk1);
      rhs21 = xi_coef * (dg.h21 * gk1 - gen_triple.h21 * gp1);
      rhsg = (-2.0 * theta_h) * (gen_triple.h12 * dg.h21 - gen_triple.h21 * dg.h12);
    }
    DynamicsRow row;
    row.t = mid.t;
    row.res_h12 = sup_diff(dh12, rhs12);
    row.res_h21 = sup_diff(dh21, rhs21);
    row.res_gamma = sup_diff(dgam, rhsg);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dnls
