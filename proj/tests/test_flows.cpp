#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dnls/flows.hpp"

using namespace dnls;

namespace {

GridPtr grid512() {
  static GridPtr g = make_grid(40.0, 512);
  return g;
}

const cdouble kI(0.0, 1.0);

}  // namespace

TEST_CASE("dnls rhs") {
  auto g = grid512();
  FieldPair zero = sample_profile(ProfileSpec::make_zero(), g);
  PairDerivative dz = dnls_rhs(zero);
  CHECK(sup_norm(dz.dq) == 0.0);
  CHECK(sup_norm(dz.dr) == 0.0);

  // with the gauge the q-equation reduces to i q'' - (|q|^2 q)'
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1, 1.0, 0.0, 0.2), g);
  PairDerivative d = dnls_rhs(pair);
  std::vector<cdouble> m(g->size);
  for (int j = 0; j < g->size; ++j) m[j] = std::norm(pair.q[j]) * pair.q[j];
  ComplexField reduced = kI * spectral_derivative(spectral_derivative(pair.q)) -
                         spectral_derivative(dealias_two_thirds(ComplexField(g, std::move(m))));
  CHECK(sup_diff(d.dq, reduced) <= 1e-12);
  // and the r-equation is the conjugate partner
  CHECK(sup_diff(d.dr, cdouble(-1.0) * conj(d.dq)) <= 1e-12);

  // single small mode: dq/dt ~ -i xi0^2 q
  const double xi0 = g->xi[3];
  std::vector<cdouble> v(g->size);
  for (int j = 0; j < g->size; ++j) v[j] = 1e-4 * std::exp(cdouble(0.0, xi0 * g->x[j]));
  FieldPair mode = gauge_pair(ComplexField(g, std::move(v)));
  PairDerivative dm = dnls_rhs(mode);
  CHECK(sup_diff(dm.dq, cdouble(0.0, -xi0 * xi0) * mode.q) <= 10.0 * 1e-12);
}

TEST_CASE("dnls evolution conserves M, H, E and A") {
  auto g = grid512();
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  EvolveOptions opts;
  opts.snapshot_stride = 25;
  opts.probe_taus = {SpectralParameter(4.0), SpectralParameter(-4.0)};
  Trajectory tr = dnls_evolve(pair, 0.2, 1e-3, opts);
  REQUIRE(tr.snaps.size() >= 3);

  const auto& c0 = tr.snaps.front().conserved;
  for (const auto& s : tr.snaps) {
    CHECK(std::abs(s.conserved.mass - c0.mass) <= 1e-10 * std::abs(c0.mass));
    CHECK(std::abs(s.conserved.hamiltonian - c0.hamiltonian) <=
          1e-8 * std::abs(c0.hamiltonian));
    CHECK(std::abs(s.conserved.energy - c0.energy) <= 1e-8 * std::abs(c0.energy));
    for (size_t k = 0; k < s.conserved.a_values.size(); ++k)
      CHECK(std::abs(s.conserved.a_values[k].second - c0.a_values[k].second) <=
            1e-6 * std::abs(c0.a_values[k].second));
    CHECK(s.gauge_dev <= 1e-10);
  }
}

TEST_CASE("linear regime follows the free multiplier") {
  auto g = grid512();
  const double a = 0.05;
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(a), g);
  EvolveOptions opts;
  opts.snapshot_stride = 1 << 20;  // endpoints only
  opts.record_conserved = false;
  const double T = 0.5;
  Trajectory tr = dnls_evolve(pair, T, 1e-3, opts);
  ComplexField free_q = apply_multiplier(pair.q, [T](double xi) {
    const double ph = -xi * xi * T;
    return cdouble(std::cos(ph), std::sin(ph));
  });
  CHECK(sup_diff(tr.snaps.back().pair.q, free_q) <= 10.0 * a * a * a);
}

TEST_CASE("dnls integrator is fourth order") {
  auto g = grid512();
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  EvolveOptions opts;
  opts.snapshot_stride = 1 << 20;
  opts.record_conserved = false;
  const double T = 0.1;
  auto terminal = [&](double dt) { return dnls_evolve(pair, T, dt, opts).snaps.back().pair.q; };
  ComplexField ref = terminal(1.25e-4);
  const double e1 = sup_diff(terminal(2e-3), ref);
  const double e2 = sup_diff(terminal(1e-3), ref);
  CHECK(e1 / e2 >= 12.0);
  CHECK(e1 / e2 <= 20.0);
}

TEST_CASE("akappa rhs and flow invariants") {
  auto g = grid512();
  FieldPair zero = sample_profile(ProfileSpec::make_zero(), g);
  PairDerivative dz = akappa_rhs(zero, SpectralParameter(2.0));
  CHECK(sup_norm(dz.dq) == 0.0);

  // leading order: dq/dt ~ ((2tau+d)^{-1} kappa^2 q)'
  const double tau = 2.0;
  FieldPair small = sample_profile(ProfileSpec::make_gaussian(0.02), g);
  PairDerivative d = akappa_rhs(small, SpectralParameter(tau));
  ComplexField lead = spectral_derivative(apply_multiplier(
      SpectralParameter(tau).kappa2() * small.q,
      [tau](double xi) { return 1.0 / cdouble(2.0 * tau, xi); }));
  const double cubic = std::pow(0.02, 3);
  CHECK(sup_diff(d.dq, lead) <= 100.0 * cubic);

  // d/dt of the mass vanishes along the flow
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  PairDerivative dd = akappa_rhs(pair, SpectralParameter(2.0));
  CHECK(std::abs(integrate(dd.dq * pair.r + pair.q * dd.dr)) <= 1e-8);
}

TEST_CASE("akappa evolution conserves the A family and reports gauge drift") {
  auto g = grid512();
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  EvolveOptions opts;
  opts.snapshot_stride = 20;
  opts.probe_taus = {SpectralParameter(8.0), SpectralParameter(2.0)};
  Trajectory tr = akappa_evolve(pair, SpectralParameter(2.0), 0.1, 1e-3, opts);
  const auto& c0 = tr.snaps.front().conserved;
  double gauge_dev = 0.0;
  for (const auto& s : tr.snaps) {
    CHECK(std::abs(s.conserved.mass - c0.mass) <= 1e-8 * std::abs(c0.mass));
    for (size_t k = 0; k < s.conserved.a_values.size(); ++k)
      CHECK(std::abs(s.conserved.a_values[k].second - c0.a_values[k].second) <=
            1e-6 * std::abs(c0.a_values[k].second));
    gauge_dev = std::max(gauge_dev, s.gauge_dev);
  }
  // the A(kappa) flow moves (q, r) off the gauge slice; the deviation is
  // reported, not asserted away
  CHECK(gauge_dev < 1.0);
  MESSAGE("akappa gauge deviation over T=0.1: ", gauge_dev);
}

TEST_CASE("lax residuals are weakly zero") {
  auto g = grid512();
  FieldPair zero = sample_profile(ProfileSpec::make_zero(), g);
  CHECK(lax_residual(zero, FlowKind::dnls, SpectralParameter(4.0), nullptr, 4, 1) <= 1e-12);

  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  CHECK(lax_residual(pair, FlowKind::dnls, SpectralParameter(4.0), nullptr, 8, 42) <= 1e-6);
  SpectralParameter gen(2.0), probe(8.0);
  CHECK(lax_residual(pair, FlowKind::a_kappa, probe, &gen, 8, 43) <= 1e-6);
  CHECK_THROWS_AS(lax_residual(pair, FlowKind::a_kappa, probe, nullptr, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(lax_residual(pair, FlowKind::a_kappa, gen, &gen, 2, 1),
                  std::invalid_argument);
}

TEST_CASE("evolution equations of the triple hold along both flows") {
  auto g = grid512();
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  EvolveOptions opts;
  opts.snapshot_stride = 1;
  opts.record_conserved = false;

  Trajectory dn = dnls_evolve(pair, 0.01, 1e-3, opts);
  for (const auto& row : greens_dynamics_check(dn, SpectralParameter(4.0))) {
    CHECK(row.res_h12 <= 1e-5);
    CHECK(row.res_h21 <= 1e-5);
    CHECK(row.res_gamma <= 1e-5);
  }

  Trajectory ak = akappa_evolve(pair, SpectralParameter(2.0), 0.01, 1e-3, opts);
  for (const auto& row : greens_dynamics_check(ak, SpectralParameter(8.0))) {
    CHECK(row.res_h12 <= 1e-5);
    CHECK(row.res_h21 <= 1e-5);
    CHECK(row.res_gamma <= 1e-5);
  }
}

TEST_CASE("zero data stays zero under both flows") {
  auto g = grid512();
  FieldPair zero = sample_profile(ProfileSpec::make_zero(), g);
  EvolveOptions opts;
  opts.snapshot_stride = 5;
  opts.record_conserved = false;
  Trajectory a = dnls_evolve(zero, 0.01, 1e-3, opts);
  CHECK(sup_norm(a.snaps.back().pair.q) == 0.0);
  Trajectory b = akappa_evolve(zero, SpectralParameter(2.0), 0.01, 1e-3, opts);
  CHECK(sup_norm(b.snaps.back().pair.q) == 0.0);
}
