#include "dnls/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <stdexcept>

namespace dnls {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

const cdouble kI(0.0, 1.0);

GridPtr small_grid(const FieldPair& p, int n_small) {
  const auto& g = p.q.grid();
  if (n_small == g->size) return g;
  return make_grid(g->half_length, n_small);
}

// Exact one-loop frequency integral for tr K: the eta-integral of
// m+(eta+zeta) m-(eta) done in closed form, so no UV truncation occurs.
cdouble tr1_analytic(const FieldPair& pair, const SpectralParameter& sp) {
  const auto& g = pair.q.grid();
  const int n = g->size;
  const auto& fq = pair.q.spectrum();
  const auto& fr = pair.r.spectrum();
  const double tau = sp.tau();
  const cdouble k2 = sp.kappa2();
  cdouble acc(0.0, 0.0);
  for (int k = 0; k < n; ++k) {
    const double zeta = g->xi[k];
    const int neg = (n - k) % n;
    acc += fq[k] * fr[neg] / cdouble(2.0 * tau, zeta);
  }
  return -static_cast<double>(sp.sign()) * k2 * (g->spacing / n) * acc;
}

// Residue of prod_{j != skip} 1/(p - p_j).
cdouble residue_at(const std::array<cdouble, 4>& p, int skip, cdouble at) {
  cdouble prod(1.0, 0.0);
  for (int j = 0; j < 4; ++j) {
    if (j == skip) continue;
    prod *= at - p[j];
  }
  return 1.0 / prod;
}

// Closed-form J(s1, s2, s3) = (1/2pi) int deta m+(eta+s1) m-(eta+s2) m+(eta+s3) m-(eta).
cdouble loop4(double s1, double s2, double s3, double tau) {
  const std::array<cdouble, 4> p = {cdouble(-s1, tau), cdouble(-s2, -tau), cdouble(-s3, tau),
                                    cdouble(0.0, -tau)};
  const int a = (tau > 0.0) ? 0 : 1;  // indices of the two upper-half poles
  const int b = (tau > 0.0) ? 2 : 3;
  if (std::abs(p[a] - p[b]) < 1e-9) {
    // confluent double pole
    const int c = (tau > 0.0) ? 1 : 0;
    const int d = (tau > 0.0) ? 3 : 2;
    const cdouble da = p[a] - p[c], db = p[a] - p[d];
    return kI * (-1.0 / (da * da * db) - 1.0 / (da * db * db));
  }
  return kI * (residue_at(p, a, p[a]) + residue_at(p, b, p[b]));
}

// tr K^2 with the loop integral analytic; the three difference frequencies are
// lattice sums over the (rapidly decaying) spectra of q and r.
cdouble tr2_analytic(const FieldPair& pair, const SpectralParameter& sp, double rel_cut) {
  const auto& g = pair.q.grid();
  const int n = g->size;
  const int half = n / 2;
  const auto& fq = pair.q.spectrum();
  const auto& fr = pair.r.spectrum();
  const double tau = sp.tau();
  const double dxi = M_PI / g->half_length;

  double qmax = 0.0, rmax = 0.0;
  for (int k = 0; k < n; ++k) {
    qmax = std::max(qmax, std::abs(fq[k]));
    rmax = std::max(rmax, std::abs(fr[k]));
  }
  const double qcut = rel_cut * qmax, rcut = rel_cut * rmax;
  std::vector<int> qk, rk;  // signed mode numbers carrying weight
  for (int k = -half + 1; k < half; ++k) {
    const int idx = (k + n) % n;
    if (std::abs(fq[idx]) > qcut) qk.push_back(k);
    if (std::abs(fr[idx]) > rcut) rk.push_back(k);
  }

  cdouble acc(0.0, 0.0);
  for (int k1 : qk) {
    const cdouble f1 = fq[(k1 + n) % n];
    for (int k3 : qk) {
      const cdouble f13 = f1 * fq[(k3 + n) % n];
      if (std::abs(f13) * rmax * rmax < qcut * rcut) continue;
      for (int k2 : rk) {
        const int k4 = -k1 - k2 - k3;
        if (k4 <= -half || k4 >= half) continue;
        const cdouble f24 = fr[(k2 + n) % n] * fr[(k4 + n) % n];
        const double s3 = dxi * k3;
        const double s2 = dxi * (k2 + k3);
        const double s1 = dxi * (k1 + k2 + k3);
        acc += f13 * f24 * loop4(s1, s2, s3, tau);
      }
    }
  }
  const cdouble k2c = sp.kappa2();
  const double h = g->spacing;
  const double pref = (h * h * h * h) / (8.0 * g->half_length * g->half_length * g->half_length);
  return k2c * k2c * pref * acc;
}

double power_iteration_radius(const MatrixXcd& k) {
  std::mt19937 gen(12345);
  std::normal_distribution<double> nd;
  VectorXcd v(k.rows());
  for (int i = 0; i < v.size(); ++i) v(i) = cdouble(nd(gen), nd(gen));
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 40; ++it) {
    VectorXcd w = k * v;
    lam = w.norm();
    if (lam == 0.0) return 0.0;
    v = w / lam;
  }
  return lam;
}

cdouble log_det_lu(const MatrixXcd& m) {
  Eigen::PartialPivLU<MatrixXcd> lu(m);
  cdouble acc(0.0, 0.0);
  const auto& d = lu.matrixLU().diagonal();
  for (int i = 0; i < d.size(); ++i) acc += std::log(d(i));
  if (lu.permutationP().determinant() < 0) acc += cdouble(0.0, M_PI);
  return acc;
}

}  // namespace

ConservedSet conserved_polynomials(const FieldPair& pair) {
  const ComplexField& q = pair.q;
  const ComplexField& r = pair.r;
  const ComplexField qp = spectral_derivative(q);
  const ComplexField rp = spectral_derivative(r);
  const ComplexField qr = q * r;

  ConservedSet c;
  c.mass = integrate(qr);
  c.hamiltonian = integrate(cdouble(0.0, -1.0) * (q * rp) + cdouble(0.5) * (qr * qr));
  c.energy = integrate(qp * rp + cdouble(0.0, -1.5) * (q * qr * rp) +
                       cdouble(0.5) * (qr * qr * qr));
  return c;
}

ComplexField rho_density(const DiagonalGreens& dg, const FieldPair& pair) {
  const int n = dg.gamma.size();
  std::vector<cdouble> out(n);
  for (int i = 0; i < n; ++i) {
    const cdouble den = 2.0 + dg.gamma[i];
    if (std::abs(den) < 0.5)
      throw std::runtime_error("rho_density: |2+gamma| dropped below 0.5");
    out[i] = -(pair.q[i] * dg.h21[i] + pair.r[i] * dg.h12[i]) / den;
  }
  return ComplexField(dg.gamma.grid(), std::move(out));
}

cdouble a_from_density(const ComplexField& rho) { return integrate(rho); }

TraceKernel TraceKernel::build(const FieldPair& pair_in, const SpectralParameter& sp,
                               int n_small) {
  GridPtr g = small_grid(pair_in, n_small);
  FieldPair pair = pair_in;
  if (g != pair_in.q.grid()) {
    pair = make_pair(resample(pair_in.q, g), resample(pair_in.r, g));
    pair.gauge_flag = pair_in.gauge_flag;
  }
  const int n = g->size;
  const double tau = sp.tau();
  const cdouble k2 = sp.kappa2();

  // circulant resolvents (d + tau)^{-1}, (d - tau)^{-1}
  auto circ = [&](double sign_tau) {
    std::vector<cdouble> diag(n);
    for (int k = 0; k < n; ++k) diag[k] = 1.0 / cdouble(sign_tau * tau, g->xi[k]);
    std::vector<cdouble> col = ifft(diag);
    MatrixXcd c(n, n);
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) c(j, l) = col[(j - l + n) % n];
    return c;
  };
  MatrixXcd cp = circ(+1.0);
  MatrixXcd cm = circ(-1.0);
  VectorXcd qv(n), rv(n);
  for (int i = 0; i < n; ++i) {
    qv(i) = pair.q[i];
    rv(i) = pair.r[i];
  }

  TraceKernel kern;
  kern.sp_ = sp;
  kern.k_ = k2 * (cp * qv.asDiagonal()) * (cm * rv.asDiagonal());
  kern.radius_ = power_iteration_radius(kern.k_);
  kern.tr1_disc_ = kern.k_.trace();
  kern.tr2_disc_ = (kern.k_.array() * kern.k_.transpose().array()).sum();
  kern.tr1_exact_ = tr1_analytic(pair, sp);
  kern.tr2_exact_ = tr2_analytic(pair, sp, 1e-11);
  return kern;
}

TraceSeries a_trace_series(const TraceKernel& kern, int m_max) {
  if (m_max < 1) throw std::invalid_argument("a_trace_series: m_max must be >= 1");
  if (kern.spectral_radius_estimate() >= 1.0)
    throw std::runtime_error("a_trace_series: non-convergent series, spectral radius " +
                             std::to_string(kern.spectral_radius_estimate()));
  const double sgn = kern.sp().sign();
  std::vector<cdouble> tr(m_max + 1);
  tr[1] = kern.tr_m1_exact();
  if (m_max >= 2) tr[2] = kern.tr_m2_exact();
  if (m_max >= 3) {
    const int pmax = (m_max + 1) / 2;
    std::vector<MatrixXcd> pow(pmax + 1);
    pow[1] = kern.matrix();
    for (int j = 2; j <= pmax; ++j) pow[j] = pow[j - 1] * kern.matrix();
    for (int m = 3; m <= m_max; ++m) {
      const int a = m / 2, b = m - m / 2;
      tr[m] = (pow[a].array() * pow[b].transpose().array()).sum();
    }
  }
  TraceSeries s;
  s.terms.resize(m_max);
  s.partial_sums.resize(m_max);
  cdouble acc(0.0, 0.0);
  for (int m = 1; m <= m_max; ++m) {
    s.terms[m - 1] = -sgn / static_cast<double>(m) * tr[m];
    acc += s.terms[m - 1];
    s.partial_sums[m - 1] = acc;
  }
  s.value = acc;
  return s;
}

cdouble a_trace_logdet(const TraceKernel& kern) {
  const int n = kern.size();
  const MatrixXcd eye = MatrixXcd::Identity(n, n);
  // amplitude homotopy theta^2 K keeps the log branch continuous from 0
  cdouble prev(0.0, 0.0);
  cdouble val(0.0, 0.0);
  for (double theta : {0.25, 0.5, 0.75, 1.0}) {
    cdouble raw = log_det_lu(eye - (theta * theta) * kern.matrix());
    const double turns = std::round((prev.imag() - raw.imag()) / (2.0 * M_PI));
    val = raw + cdouble(0.0, 2.0 * M_PI * turns);
    prev = val;
  }
  const cdouble d1 = kern.tr_m1_exact() - kern.tr_m1_discrete();
  const cdouble d2 = kern.tr_m2_exact() - kern.tr_m2_discrete();
  return static_cast<double>(kern.sp().sign()) * (val - d1 - 0.5 * d2);
}

namespace {

cdouble a_via_density(const FieldPair& pair, const SpectralParameter& sp) {
  FixedPointOptions opts;
  opts.tol = 0.0;  // iterate to stagnation: A enters finite differences
  DiagonalGreens dg = greens_fixed_point(pair, sp, opts);
  return a_from_density(rho_density(dg, pair));
}

}  // namespace

GradientCheck functional_derivative_check(const FieldPair& pair, const SpectralParameter& sp,
                                          const ComplexField& direction, double eps) {
  if (eps < 1e-7 || eps > 1e-3)
    throw std::invalid_argument("functional_derivative_check: eps outside [1e-7, 1e-3]");
  FixedPointOptions opts;
  opts.tol = 0.0;
  DiagonalGreens dg = greens_fixed_point(pair, sp, opts);

  auto perturb_q = [&](double s) {
    FieldPair p = make_pair(pair.q + cdouble(s, 0.0) * direction, pair.r);
    return a_via_density(p, sp);
  };
  auto perturb_r = [&](double s) {
    FieldPair p = make_pair(pair.q, pair.r + cdouble(s, 0.0) * direction);
    return a_via_density(p, sp);
  };

  const cdouble fd_q = (perturb_q(eps) - perturb_q(-eps)) / (2.0 * eps);
  const cdouble fd_r = (perturb_r(eps) - perturb_r(-eps)) / (2.0 * eps);
  const cdouble exact_q = integrate(direction * (cdouble(-1.0) * dg.h21));
  const cdouble exact_r = integrate(direction * (cdouble(-1.0) * dg.h12));

  GradientCheck out;
  const double scale_q = std::max(std::abs(exact_q), 1e-300);
  const double scale_r = std::max(std::abs(exact_r), 1e-300);
  out.err_q = std::abs(fd_q - exact_q) / scale_q;
  out.err_r = std::abs(fd_r - exact_r) / scale_r;
  return out;
}

cdouble poisson_bracket_a(const FieldPair& pair, const SpectralParameter& sp_a,
                          const SpectralParameter& sp_b) {
  if (sp_a.tau() == sp_b.tau())
    throw std::invalid_argument("poisson_bracket_a: coincident spectral parameters");
  FixedPointOptions opts;
  opts.tol = 0.0;
  DiagonalGreens da = greens_fixed_point(pair, sp_a, opts);
  DiagonalGreens db = greens_fixed_point(pair, sp_b, opts);
  return integrate(da.h12 * spectral_derivative(db.h21) +
                   da.h21 * spectral_derivative(db.h12));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(std::max(y[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

AsymptoticsTable asymptotic_compare(const FieldPair& pair, const std::vector<double>& taus) {
  for (size_t i = 1; i < taus.size(); ++i)
    if (taus[i] <= taus[i - 1])
      throw std::invalid_argument("asymptotic_compare: tau list must be increasing");
  if (!taus.empty() && std::abs(taus.front()) < 4.0)
    throw std::invalid_argument("asymptotic_compare: |tau| must be >= 4");

  const ConservedSet c = conserved_polynomials(pair);
  const ComplexField& q = pair.q;
  const ComplexField& r = pair.r;
  const ComplexField qp = spectral_derivative(q);
  const ComplexField rp = spectral_derivative(r);
  const ComplexField qpp = spectral_derivative(qp);
  const ComplexField rpp = spectral_derivative(rp);
  const ComplexField qr = q * r;

  AsymptoticsTable t;
  for (double tau : taus) {
    SpectralParameter sp(tau);
    FixedPointOptions opts;
    opts.tol = 0.0;
    DiagonalGreens dg = greens_fixed_point(pair, sp, opts);
    const cdouble a = a_from_density(rho_density(dg, pair));

    AsymptoticsRow row;
    row.tau = tau;
    const cdouble t1 = -kI * 0.5 * c.mass;
    const cdouble t2 = c.hamiltonian / (4.0 * tau);
    const cdouble t3 = kI * c.energy / (8.0 * tau * tau);
    row.rem1 = std::abs(a - t1);
    row.rem2 = std::abs(a - t1 - t2);
    row.rem3 = std::abs(a - t1 - t2 - t3);

    // gamma = i qr/(2tau) + (i q r' - i q'r - 1.5 (qr)^2) / (4 tau^2) + O(tau^-3),
    // the tau^-2 coefficient as dictated by the gradient expansions through
    // gamma' = 2(q h21 - r h12)
    const ComplexField gamma_exp =
        (kI / (2.0 * tau)) * qr +
        (1.0 / (4.0 * tau * tau)) * (kI * (q * rp) - kI * (qp * r) - cdouble(1.5) * (qr * qr));
    row.rem_gamma = sup_diff(dg.gamma, gamma_exp);

    // -kappa g21 = -h21 expansion (and the mirror for -h12)
    const ComplexField kg21_exp =
        cdouble(0.0, -0.5) * r +
        (1.0 / (2.0 * tau)) * (cdouble(0.0, -0.5) * rp + cdouble(0.5) * (q * r * r)) +
        (1.0 / (4.0 * tau * tau)) *
            (cdouble(0.0, -0.5) * rpp + cdouble(1.5) * (qr * rp) +
             cdouble(0.0, 0.75) * (q * qr * r * r));
    const ComplexField kg12_exp =
        cdouble(0.0, -0.5) * q +
        (1.0 / (2.0 * tau)) * (cdouble(0.0, 0.5) * qp + cdouble(0.5) * (q * qr)) +
        (1.0 / (4.0 * tau * tau)) *
            (cdouble(0.0, -0.5) * qpp - cdouble(1.5) * (q * qp * r) +
             cdouble(0.0, 0.75) * (q * qr * qr));
    row.rem_kg21 = sup_diff(cdouble(-1.0) * dg.h21, kg21_exp);
    row.rem_kg12 = sup_diff(cdouble(-1.0) * dg.h12, kg12_exp);
    t.rows.push_back(row);
  }

  std::vector<double> xs(taus.begin(), taus.end());
  auto col = [&](auto member) {
    std::vector<double> v;
    for (const auto& r0 : t.rows) v.push_back(r0.*member);
    return v;
  };
  t.slope1 = loglog_slope(xs, col(&AsymptoticsRow::rem1));
  t.slope2 = loglog_slope(xs, col(&AsymptoticsRow::rem2));
  t.slope3 = loglog_slope(xs, col(&AsymptoticsRow::rem3));
  t.slope_gamma = loglog_slope(xs, col(&AsymptoticsRow::rem_gamma));
  t.slope_kg12 = loglog_slope(xs, col(&AsymptoticsRow::rem_kg12));
  t.slope_kg21 = loglog_slope(xs, col(&AsymptoticsRow::rem_kg21));
  return t;
}

HsNorms hs_norm_lambda(const FieldPair& pair, const SpectralParameter& sp, double s) {
  if (!(s > 0.0 && s < 0.5))
    throw std::invalid_argument("hs_norm_lambda: s must lie in (0, 1/2)");
  const auto& g = pair.q.grid();
  const int n = g->size;
  const int half = n / 2;
  const auto& fq = pair.q.spectrum();
  const double tau = sp.tau();
  const double tau2 = tau * tau;

  std::vector<double> w_half(n), w_s(n), w_m(n);
  for (int k = 0; k < n; ++k) {
    const double a2 = tau2 + g->xi[k] * g->xi[k];
    w_half[k] = std::pow(a2, -0.5);
    w_s[k] = std::pow(a2, s - 0.5);
    w_m[k] = std::pow(a2, -0.5);
  }
  std::vector<double> q2(n);
  for (int k = 0; k < n; ++k) q2[k] = std::norm(fq[k]);

  double acc_half = 0.0, acc_s = 0.0;
  for (int k = 0; k < n; ++k) {
    const int kk = (k < half) ? k : k - n;
    for (int l = 0; l < n; ++l) {
      const int ll = (l < half) ? l : l - n;
      const int d = kk - ll;
      if (d <= -half || d >= half) continue;  // spectrum vanishes beyond Nyquist
      const double c = q2[(d + n) % n] * w_m[l];
      acc_half += c * w_half[k];
      acc_s += c * w_s[k];
    }
  }
  const double pref = std::abs(tau) / static_cast<double>(n) / n;
  HsNorms out;
  out.hs_half = std::sqrt(pref * acc_half);
  out.hs_s = std::sqrt(pref * acc_s);
  return out;
}

}  // namespace dnls
