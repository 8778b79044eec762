#include "dnls/greens.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dnls {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

constexpr double kSmallDataThreshold = 0.5;

cdouble mult_plus(double two_tau, double xi) { return 1.0 / cdouble(two_tau, xi); }
cdouble mult_minus(double two_tau, double xi) { return 1.0 / cdouble(two_tau, -xi); }

// ---------------------------------------------------------------------------
// RK4 marches for the one-sided resolvents and the Jost rays.
//
// Sources and coefficients are sampled on a fine grid of M points (spacing
// 2L/M); the march steps over every second fine point so RK4 midpoints are
// exact samples. Marching runs in the decaying direction of the homogeneous
// mode, so the schemes are unconditionally stable here.
// ---------------------------------------------------------------------------

// y' = a*y + s(x), y = 0 at the upstream domain end. Returns y on the
// stepping grid (M/2 points, fine indices 0, 2, 4, ...).
std::vector<cdouble> march_linear(const std::vector<cdouble>& src_fine, double a, double L) {
  const int m = static_cast<int>(src_fine.size());
  const int steps = m / 2;
  const double h = 2.0 * L / steps;
  std::vector<cdouble> y(steps, cdouble(0.0, 0.0));
  auto f = [&](int idx, cdouble v) { return a * v + src_fine[((idx % m) + m) % m]; };
  if (a < 0.0) {
    cdouble v(0.0, 0.0);
    y[0] = v;
    for (int i = 0; i + 1 < steps; ++i) {
      const int b = 2 * i;
      const cdouble k1 = f(b, v);
      const cdouble k2 = f(b + 1, v + 0.5 * h * k1);
      const cdouble k3 = f(b + 1, v + 0.5 * h * k2);
      const cdouble k4 = f(b + 2, v + h * k3);
      v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      y[i + 1] = v;
    }
  } else {
    cdouble v(0.0, 0.0);  // value at x = +L
    for (int i = steps - 1; i >= 0; --i) {
      const int b = 2 * (i + 1);
      const cdouble k1 = f(b, v);
      const cdouble k2 = f(b - 1, v - 0.5 * h * k1);
      const cdouble k3 = f(b - 1, v - 0.5 * h * k2);
      const cdouble k4 = f(b - 2, v - h * k3);
      v -= h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      y[i] = v;
    }
  }
  return y;
}

// (2tau + d)^{-1} src and (2tau - d)^{-1} src by marching.
std::vector<cdouble> resolvent_plus_march(const std::vector<cdouble>& src_fine, double tau,
                                          double L) {
  return march_linear(src_fine, -2.0 * tau, L);
}

std::vector<cdouble> resolvent_minus_march(std::vector<cdouble> src_fine, double tau, double L) {
  for (auto& v : src_fine) v = -v;
  return march_linear(src_fine, 2.0 * tau, L);
}

struct Vec2 {
  cdouble a, b;
};
Vec2 operator+(Vec2 x, Vec2 y) { return {x.a + y.a, x.b + y.b}; }
Vec2 operator*(cdouble s, Vec2 x) { return {s * x.a, s * x.b}; }

// Homogeneous 2x2 march y' = [[d1, kq],[kr, d2]] y with constant diagonal.
// dir = +1 marches from -L forward, dir = -1 from +L backward.
std::vector<Vec2> march_ray(const std::vector<cdouble>& kq_fine,
                            const std::vector<cdouble>& kr_fine, cdouble d1, cdouble d2,
                            Vec2 start, int dir, double L) {
  const int m = static_cast<int>(kq_fine.size());
  const int steps = m / 2;
  const double h = 2.0 * L / steps;
  std::vector<Vec2> y(steps, Vec2{0.0, 0.0});
  auto f = [&](int idx, Vec2 v) {
    const int i = ((idx % m) + m) % m;
    return Vec2{d1 * v.a + kq_fine[i] * v.b, kr_fine[i] * v.a + d2 * v.b};
  };
  auto step = [&](int base, int sgn, Vec2 v) {
    const double s = sgn * h;
    const Vec2 k1 = f(base, v);
    const Vec2 k2 = f(base + sgn, v + (0.5 * s) * k1);
    const Vec2 k3 = f(base + sgn, v + (0.5 * s) * k2);
    const Vec2 k4 = f(base + 2 * sgn, v + s * k3);
    return v + (s / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  if (dir > 0) {
    Vec2 v = start;
    y[0] = v;
    for (int i = 0; i + 1 < steps; ++i) {
      v = step(2 * i, +1, v);
      y[i + 1] = v;
    }
  } else {
    Vec2 v = start;  // value at x = +L
    for (int i = steps - 1; i >= 0; --i) {
      v = step(2 * (i + 1), -1, v);
      y[i] = v;
    }
  }
  return y;
}

int refine_for(double spacing, double target) {
  int s = 1;
  while (spacing / s > target) s *= 2;
  return s;
}

// Circulant matrix of a Fourier multiplier on the grid.
MatrixXcd circulant_from_multiplier(const Grid& g, const std::function<cdouble(double)>& m) {
  const int n = g.size;
  std::vector<cdouble> diag(n);
  for (int k = 0; k < n; ++k) diag[k] = m(g.xi[k]);
  std::vector<cdouble> col = ifft(diag);
  MatrixXcd c(n, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) c(j, l) = col[(j - l + n) % n];
  return c;
}

FieldPair downsample_pair(const FieldPair& p, const GridPtr& target) {
  FieldPair out = make_pair(resample(p.q, target), resample(p.r, target));
  out.gauge_flag = p.gauge_flag;
  return out;
}

}  // namespace

ComplexField DiagonalGreens::g12() const { return (1.0 / sp.kappa()) * h12; }
ComplexField DiagonalGreens::g21() const { return (1.0 / sp.kappa()) * h21; }

DiagonalGreens greens_fixed_point(const FieldPair& pair, const SpectralParameter& sp,
                                  const FixedPointOptions& opts) {
  const double qn = l2_norm(pair.q);
  if (qn > kSmallDataThreshold)
    throw std::runtime_error("greens_fixed_point: contraction failure, ||q||_L2 = " +
                             std::to_string(qn) + " exceeds the small-data threshold 0.5");
  const auto& grid = pair.q.grid();
  const double tau = sp.tau();
  const double two_tau = 2.0 * tau;
  const cdouble kappa2 = sp.kappa2();
  const cdouble minus_two_i_over_tau(0.0, -2.0 / tau);

  DiagonalGreens dg;
  dg.sp = sp;
  dg.method = "fixed_point";
  if (opts.warm_start) {
    dg.gamma = opts.warm_start->gamma;
    dg.h12 = opts.warm_start->h12;
    dg.h21 = opts.warm_start->h21;
  } else {
    dg.gamma = ComplexField(grid);
    dg.h12 = ComplexField(grid);
    dg.h21 = ComplexField(grid);
  }

  double prev_change = std::numeric_limits<double>::infinity();
  int stalled = 0;
  const double tol = opts.tol;
  for (int it = 1; it <= opts.max_iter; ++it) {
    ComplexField one_plus_gamma = add_scalar(dg.gamma, 1.0);
    ComplexField h12_new =
        cdouble(-1.0) * apply_multiplier(kappa2 * (pair.q * one_plus_gamma),
                                         [two_tau](double xi) { return mult_plus(two_tau, xi); });
    ComplexField h21_new =
        cdouble(-1.0) * apply_multiplier(kappa2 * (pair.r * one_plus_gamma),
                                         [two_tau](double xi) { return mult_minus(two_tau, xi); });
    ComplexField gamma_new = minus_two_i_over_tau * (h12_new * h21_new) -
                             cdouble(0.5) * (dg.gamma * dg.gamma);

    const double change = std::max({sup_diff(gamma_new, dg.gamma), sup_diff(h12_new, dg.h12),
                                    sup_diff(h21_new, dg.h21)});
    dg.gamma = std::move(gamma_new);
    dg.h12 = std::move(h12_new);
    dg.h21 = std::move(h21_new);
    dg.iterations = it;

    const double g_sup = sup_norm(dg.gamma);
    if (g_sup > 10.0 || !std::isfinite(g_sup))
      throw std::runtime_error(
          "greens_fixed_point: divergence, iterate sup-norm of gamma grew to " +
          std::to_string(g_sup));
    if (tol > 0.0 && change <= tol) break;
    if (tol <= 0.0) {
      // iterate to stagnation of the sup-norm change
      if (change < 1e-15 * std::max(1.0, g_sup)) break;
      if (change >= prev_change && ++stalled >= 2) break;
      if (change < prev_change) stalled = 0;
    }
    prev_change = change;
    if (it == opts.max_iter)
      throw std::runtime_error("greens_fixed_point: max_iter = " + std::to_string(opts.max_iter) +
                               " exceeded, last sup-change = " + std::to_string(change));
  }

  ComplexField residual =
      spectral_derivative(dg.gamma) - 2.0 * (pair.q * dg.h21 - pair.r * dg.h12);
  dg.rho_id_residual = sup_norm(residual);
  return dg;
}

DiagonalGreens greens_dense_oracle(const FieldPair& pair_in, const SpectralParameter& sp,
                                   int n_small) {
  if (n_small > 1024)
    throw std::invalid_argument("greens_dense_oracle: n_small capped at 1024 (O(N^3) cost)");
  const auto& grid_in = pair_in.q.grid();
  GridPtr grid =
      (n_small == grid_in->size) ? grid_in : make_grid(grid_in->half_length, n_small);
  const FieldPair pair = (grid == grid_in) ? pair_in : downsample_pair(pair_in, grid);

  const int n = grid->size;
  const double L = grid->half_length;
  const double h = grid->spacing;
  const double tau = sp.tau();
  const cdouble kappa = sp.kappa();
  const double sgn = sp.sign();

  // Dense discretization M = [[D + tau, -kappa q], [-kappa r, D - tau]] in the
  // sample basis, D the spectral differentiation matrix (circulant).
  MatrixXcd cp = circulant_from_multiplier(*grid, [tau](double xi) {
    return 1.0 / cdouble(tau, xi);
  });
  MatrixXcd cm = circulant_from_multiplier(*grid, [tau](double xi) {
    return 1.0 / cdouble(-tau, xi);
  });
  MatrixXcd d = circulant_from_multiplier(*grid, [](double xi) { return cdouble(0.0, xi); });

  VectorXcd qv(n), rv(n);
  for (int i = 0; i < n; ++i) {
    qv(i) = pair.q[i];
    rv(i) = pair.r[i];
  }

  MatrixXcd m(2 * n, 2 * n);
  m.setZero();
  m.block(0, 0, n, n) = d + tau * MatrixXcd::Identity(n, n);
  m.block(n, n, n, n) = d - tau * MatrixXcd::Identity(n, n);
  m.block(0, n, n, n) = (-kappa * qv).asDiagonal();
  m.block(n, 0, n, n) = (-kappa * rv).asDiagonal();

  Eigen::PartialPivLU<MatrixXcd> lu(m);
  MatrixXcd minv = lu.inverse();
  {
    VectorXcd probe = VectorXcd::Random(2 * n);
    const double res = (m * (minv * probe) - probe).norm() / probe.norm();
    if (!(res < 1e-8))
      throw std::runtime_error("greens_dense_oracle: singular discretized operator, residual " +
                               std::to_string(res));
  }

  // Neumann-series telescoping: the raw diagonal of the inverse converges only
  // like 1/xi_max across the kernel jump, so orders 0..3 are removed exactly in
  // the discrete model and re-added from quadrature-exact marches below.
  MatrixXcd p1_12 = cp * qv.asDiagonal() * cm;    // (M0inv V M0inv)_{12} / (-kappa)
  MatrixXcd p1_21 = cm * rv.asDiagonal() * cp;
  MatrixXcd p2_11 = p1_12 * rv.asDiagonal() * cp; // (M0inv (V M0inv)^2)_{11} / kappa^2
  MatrixXcd p2_22 = p1_21 * qv.asDiagonal() * cm;
  const cdouble k2 = kappa * kappa;
  const cdouble k3 = k2 * kappa;

  std::vector<cdouble> z_gamma(n), z12(n), z21(n);
  for (int i = 0; i < n; ++i) {
    // diag of P3 blocks contracted without forming them
    cdouble p3_12 = 0.0, p3_21 = 0.0;
    for (int j = 0; j < n; ++j) {
      p3_12 += p2_11(i, j) * qv(j) * cm(j, i);
      p3_21 += p2_22(i, j) * rv(j) * cp(j, i);
    }
    const cdouble z11 = minv(i, i) - cp(i, i) - k2 * p2_11(i, i);
    const cdouble z22 = minv(n + i, n + i) - cm(i, i) - k2 * p2_22(i, i);
    z_gamma[i] = sgn * (z11 - z22) / h;
    z12[i] = sgn * (minv(i, n + i) - kappa * p1_12(i, i) - k3 * p3_12) / h;
    z21[i] = sgn * (minv(n + i, i) - kappa * p1_21(i, i) - k3 * p3_21) / h;
  }

  // Continuum low-order terms by one-sided exponential marches (independent of
  // the Fourier-multiplier pipeline).
  const int s_sub = refine_for(h, 0.005);
  const int fine = 8 * s_sub;
  std::vector<cdouble> qf = upsampled_values(pair.q, fine);
  std::vector<cdouble> rf = upsampled_values(pair.r, fine);
  std::vector<cdouble> u4 = resolvent_plus_march(qf, tau, L);    // on 4*s_sub grid
  std::vector<cdouble> w4 = resolvent_minus_march(rf, tau, L);
  const int m4 = static_cast<int>(u4.size());
  std::vector<cdouble> src_p(m4), src_s(m4);
  for (int i = 0; i < m4; ++i) {
    const cdouble qi = qf[2 * i], ri = rf[2 * i];
    src_p[i] = qi * w4[i] * u4[i];
    src_s[i] = ri * u4[i] * w4[i];
  }
  std::vector<cdouble> p2g = resolvent_plus_march(src_p, tau, L);   // on 2*s_sub grid
  std::vector<cdouble> s2g = resolvent_minus_march(src_s, tau, L);

  const int stride4 = m4 / n;
  const int stride2 = static_cast<int>(p2g.size()) / n;
  std::vector<cdouble> gv(n), h12v(n), h21v(n);
  for (int i = 0; i < n; ++i) {
    const cdouble u = u4[i * stride4];
    const cdouble w = w4[i * stride4];
    const cdouble pp = p2g[i * stride2];
    const cdouble ss = s2g[i * stride2];
    const cdouble g12_1 = -kappa * u;
    const cdouble g21_1 = -kappa * w;
    const cdouble g12_3 = 2.0 * k3 * pp;
    const cdouble g21_3 = 2.0 * k3 * ss;
    const cdouble gamma_2 = -2.0 * k2 * u * w;
    const cdouble g12 = g12_1 + g12_3 + z12[i];
    const cdouble g21 = g21_1 + g21_3 + z21[i];
    gv[i] = gamma_2 + z_gamma[i];
    h12v[i] = kappa * g12;
    h21v[i] = kappa * g21;
  }

  DiagonalGreens dg;
  dg.sp = sp;
  dg.method = "dense_oracle";
  dg.gamma = ComplexField(grid, std::move(gv));
  dg.h12 = ComplexField(grid, std::move(h12v));
  dg.h21 = ComplexField(grid, std::move(h21v));
  return dg;
}

DiagonalGreens greens_jost(const FieldPair& pair, const SpectralParameter& sp,
                           const JostOptions& opts) {
  const auto& grid = pair.q.grid();
  const int n = grid->size;
  const double L = grid->half_length;
  const double tau = sp.tau();
  const cdouble kappa = sp.kappa();
  const double sgn = sp.sign();

  const int s_sub = refine_for(grid->spacing, opts.target_step);
  const int fine = 2 * s_sub;
  std::vector<cdouble> kq = upsampled_values(pair.q, fine);
  std::vector<cdouble> kr = upsampled_values(pair.r, fine);
  for (auto& v : kq) v *= kappa;
  for (auto& v : kr) v *= kappa;

  // Factored rays: psi+ = e^{-|tau| x} u decays at +inf, psi- = e^{+|tau| x} v
  // decays at -inf; the exponentials cancel in every product used below.
  std::vector<Vec2> u, v;
  if (tau > 0.0) {
    u = march_ray(kq, kr, 0.0, 2.0 * tau, Vec2{1.0, 0.0}, -1, L);
    v = march_ray(kq, kr, -2.0 * tau, 0.0, Vec2{0.0, 1.0}, +1, L);
  } else {
    u = march_ray(kq, kr, -2.0 * tau, 0.0, Vec2{0.0, 1.0}, -1, L);
    v = march_ray(kq, kr, 0.0, 2.0 * tau, Vec2{1.0, 0.0}, +1, L);
  }

  const int stride = static_cast<int>(u.size()) / n;
  std::vector<cdouble> gv(n), h12v(n), h21v(n);
  cdouble w_mid(0.0, 0.0);
  double w_min = std::numeric_limits<double>::infinity();
  double w_drift = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vec2 ui = u[i * stride];
    const Vec2 vi = v[i * stride];
    const cdouble w = ui.a * vi.b - ui.b * vi.a;
    w_min = std::min(w_min, std::abs(w));
    if (i == n / 2) w_mid = w;
    gv[i] = sgn * (ui.a * vi.b + ui.b * vi.a) / w - 1.0;
    h12v[i] = kappa * (-sgn * ui.a * vi.a / w);
    h21v[i] = kappa * (sgn * ui.b * vi.b / w);
  }
  for (int i = 0; i < n; ++i) {
    const Vec2 ui = u[i * stride];
    const Vec2 vi = v[i * stride];
    w_drift = std::max(w_drift, std::abs(ui.a * vi.b - ui.b * vi.a - w_mid));
  }
  if (!(w_min >= opts.wronskian_min))
    throw std::runtime_error("greens_jost: Wronskian magnitude " + std::to_string(w_min) +
                             " below threshold (decay matching failed)");

  DiagonalGreens dg;
  dg.sp = sp;
  dg.method = "jost";
  dg.gamma = ComplexField(grid, std::move(gv));
  dg.h12 = ComplexField(grid, std::move(h12v));
  dg.h21 = ComplexField(grid, std::move(h21v));
  dg.wronskian = w_mid;
  dg.wronskian_drift = w_drift;
  return dg;
}

SeriesTerms series_terms(const FieldPair& pair, const SpectralParameter& sp) {
  const double two_tau = 2.0 * sp.tau();
  const cdouble kappa = sp.kappa();
  auto rp = [two_tau](const ComplexField& f) {
    return apply_multiplier(f, [two_tau](double xi) { return mult_plus(two_tau, xi); });
  };
  auto rm = [two_tau](const ComplexField& f) {
    return apply_multiplier(f, [two_tau](double xi) { return mult_minus(two_tau, xi); });
  };
  const ComplexField kq = kappa * pair.q;
  const ComplexField kr = kappa * pair.r;
  const ComplexField u = rp(kq);
  const ComplexField w = rm(kr);

  SeriesTerms t;
  t.g12_1 = cdouble(-1.0) * u;
  t.g21_1 = cdouble(-1.0) * w;
  t.g12_3 = 2.0 * rp(kq * w * u);
  t.g21_3 = 2.0 * rm(kr * u * w);
  t.gamma_2 = cdouble(-2.0) * (u * w);
  t.gamma_4 = 2.0 * (u * t.g21_3) + 2.0 * (t.g12_3 * w) - 2.0 * (u * w * u * w);
  return t;
}

ComboRatio combo_ratio(const DiagonalGreens& dg, const FieldPair& pair) {
  const ComplexField two_plus = add_scalar(dg.gamma, 2.0);
  double min_den = std::numeric_limits<double>::infinity();
  for (const auto& v : two_plus.values()) min_den = std::min(min_den, std::abs(v));
  if (min_den < 0.5)
    throw std::runtime_error("combo_ratio: |2+gamma| dropped to " + std::to_string(min_den) +
                             ", small-data regime violated");

  const int n = dg.gamma.size();
  const ComplexField g12 = dg.g12();
  const ComplexField g21 = dg.g21();
  const SeriesTerms t = series_terms(pair, dg.sp);

  std::vector<cdouble> r12(n), r21(n), rem(n);
  for (int i = 0; i < n; ++i) {
    r12[i] = g12[i] / two_plus[i];
    r21[i] = g21[i] / two_plus[i];
    const cdouble g12_geq3 = g12[i] - t.g12_1[i];
    rem[i] = 0.5 * g12_geq3 - g12[i] * dg.gamma[i] / (2.0 * two_plus[i]);
  }
  ComboRatio out;
  out.ratio12 = ComplexField(dg.gamma.grid(), std::move(r12));
  out.ratio21 = ComplexField(dg.gamma.grid(), std::move(r21));
  out.remainder12_geq3 = ComplexField(dg.gamma.grid(), std::move(rem));
  return out;
}

double triple_distance(const DiagonalGreens& a, const DiagonalGreens& b) {
  const DiagonalGreens& fine = (a.gamma.size() >= b.gamma.size()) ? a : b;
  const DiagonalGreens& coarse = (a.gamma.size() >= b.gamma.size()) ? b : a;
  const int nf = fine.gamma.size(), nc = coarse.gamma.size();
  if (nf % nc != 0 ||
      fine.gamma.grid()->half_length != coarse.gamma.grid()->half_length)
    throw std::invalid_argument("triple_distance: grids do not nest");
  const int stride = nf / nc;
  double m = 0.0;
  for (int i = 0; i < nc; ++i) {
    m = std::max(m, std::abs(fine.gamma[i * stride] - coarse.gamma[i]));
    m = std::max(m, std::abs(fine.h12[i * stride] - coarse.h12[i]));
    m = std::max(m, std::abs(fine.h21[i * stride] - coarse.h21[i]));
  }
  return m;
}

}  // namespace dnls
