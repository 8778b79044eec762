#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dnls/verify.hpp"

using namespace dnls;

namespace {

GridPtr grid512() {
  static GridPtr g = make_grid(40.0, 512);
  return g;
}

DiagonalGreens tight(const FieldPair& p, const SpectralParameter& sp) {
  FixedPointOptions o;
  o.tol = 0.0;
  return greens_fixed_point(p, sp, o);
}

double worst(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

}  // namespace

TEST_CASE("fluxes on zero data") {
  auto g = grid512();
  FieldPair zero = sample_profile(ProfileSpec::make_zero(), g);
  DiagonalGreens dp = tight(zero, SpectralParameter(8.0));
  DiagonalGreens dg = tight(zero, SpectralParameter(2.0));

  CHECK(sup_norm(flux_dnls(zero, dp).j) == 0.0);
  CHECK(sup_norm(flux_a(dp, dg).j) == 0.0);
  CHECK(sup_norm(gamma_law_density(zero, dp)) == 0.0);

  // j_gamma degenerates to a constant whose derivative vanishes
  FluxRecord jg = flux_gamma(dp, dg);
  CHECK(sup_norm(spectral_derivative(jg.j)) <= 1e-12);

  CHECK_THROWS_AS(flux_a(dp, dp), std::invalid_argument);
  CHECK_THROWS_AS(flux_gamma(dg, dg), std::invalid_argument);
}

TEST_CASE("theta prefactor algebra under parameter exchange") {
  auto g = grid512();
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  DiagonalGreens dp = tight(pair, SpectralParameter(8.0));
  DiagonalGreens dg = tight(pair, SpectralParameter(2.0));
  FluxRecord a = flux_a(dp, dg);
  FluxRecord b = flux_a(dg, dp);  // kappa <-> varkappa
  // Theta = vk k^3/(k^2 - vk^2): the exchange multiplies it by -vk^2/k^2
  const cdouble k2 = SpectralParameter(2.0).kappa2();
  const cdouble v2 = SpectralParameter(8.0).kappa2();
  CHECK(std::abs(b.theta - (-v2 / k2) * a.theta) <= 1e-13 * std::abs(b.theta));
}

TEST_CASE("fluxes are branch invariant where the parity predicts it") {
  auto g = grid512();
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  SpectralParameter probe(8.0), gen(2.0);
  DiagonalGreens dp = tight(pair, probe);
  DiagonalGreens dpf = tight(pair, probe.flipped());
  DiagonalGreens dgn = tight(pair, gen);
  DiagonalGreens dgf = tight(pair, gen.flipped());

  CHECK(sup_diff(flux_dnls(pair, dp).j, flux_dnls(pair, dpf).j) <= 1e-12);
  CHECK(sup_diff(flux_a(dp, dgn).j, flux_a(dpf, dgn).j) <= 1e-12);
  CHECK(sup_diff(flux_a(dp, dgn).j, flux_a(dp, dgf).j) <= 1e-12);
  // j_gamma: even in the generator branch, odd in the probe branch
  CHECK(sup_diff(flux_gamma(dp, dgn).j, flux_gamma(dp, dgf).j) <= 1e-12);
  CHECK(sup_diff(flux_gamma(dp, dgn).j, cdouble(-1.0) * flux_gamma(dpf, dgn).j) <= 1e-12);
}

TEST_CASE("continuity residuals shrink at second order in the stride") {
  auto g = grid512();
  FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  EvolveOptions opts;
  opts.snapshot_stride = 1;
  opts.record_conserved = false;

  SUBCASE("dnls flux") {
    Trajectory t1 = dnls_evolve(pair, 0.02, 1e-3, opts);
    Trajectory t2 = dnls_evolve(pair, 0.02, 5e-4, opts);
    ContinuityResult c1 = continuity_residual(t1, FluxKind::dnls_flux, SpectralParameter(4.0));
    ContinuityResult c2 = continuity_residual(t2, FluxKind::dnls_flux, SpectralParameter(4.0));
    CHECK(worst(c1.l2_residuals) <= 1e-4);
    const double ratio = worst(c1.l2_residuals) / worst(c2.l2_residuals);
    CHECK(std::abs(ratio - 4.0) <= 0.5);
    CHECK(c1.integral_drift <= 1e-7);
    CHECK_THROWS_AS(continuity_residual(t1, FluxKind::a_flux, SpectralParameter(4.0)),
                    std::invalid_argument);
  }

  SUBCASE("akappa fluxes") {
    Trajectory t1 = akappa_evolve(pair, SpectralParameter(2.0), 0.02, 1e-3, opts);
    Trajectory t2 = akappa_evolve(pair, SpectralParameter(2.0), 0.02, 5e-4, opts);
    for (FluxKind kind : {FluxKind::a_flux, FluxKind::gamma_flux}) {
      ContinuityResult c1 = continuity_residual(t1, kind, SpectralParameter(8.0));
      ContinuityResult c2 = continuity_residual(t2, kind, SpectralParameter(8.0));
      CHECK(worst(c1.l2_residuals) <= 1e-4);
      const double ratio = worst(c1.l2_residuals) / worst(c2.l2_residuals);
      CHECK(std::abs(ratio - 4.0) <= 0.5);
    }
    CHECK_THROWS_AS(continuity_residual(t1, FluxKind::dnls_flux, SpectralParameter(8.0)),
                    std::invalid_argument);
  }
}

TEST_CASE("identity suite") {
  auto g = grid512();
  SUBCASE("zero data gives all-zero residuals") {
    FieldPair zero = sample_profile(ProfileSpec::make_zero(), g);
    VerificationReport rep = identity_suite(zero, SpectralParameter(2.0), SpectralParameter(8.0));
    CHECK(rep.all_pass());
    for (const auto& r : rep.rows) CHECK(r.residual <= 1e-12);
  }
  SUBCASE("gaussian data passes the default tolerances") {
    FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
    VerificationReport rep = identity_suite(pair, SpectralParameter(2.0), SpectralParameter(8.0));
    CHECK(rep.all_pass());
    CHECK(rep.rows.size() == 17);
  }
  SUBCASE("coincident parameters rejected, tolerance gaps reported") {
    FieldPair pair = sample_profile(ProfileSpec::make_gaussian(0.1), g);
    CHECK_THROWS_AS(identity_suite(pair, SpectralParameter(2.0), SpectralParameter(2.0)),
                    std::invalid_argument);
    ToleranceMap missing;
    CHECK_THROWS_WITH_AS(identity_suite(pair, SpectralParameter(2.0), SpectralParameter(8.0),
                                        missing),
                         doctest::Contains("tolerance map gap"), std::invalid_argument);
  }
}

TEST_CASE("truncation sensitivity is measurable when L shrinks") {
  // the whole-line/periodic surrogate mismatch (fixed point vs the decaying
  // boundary-value rays) grows monotonically with the boundary tail
  std::vector<double> tails, dists;
  for (double L : {2.2, 2.6, 3.0}) {
    auto gs = make_grid(L, 256);
    FieldPair p = sample_profile(ProfileSpec::make_gaussian(0.1), gs);
    DiagonalGreens fp = tight(p, SpectralParameter(2.0));
    DiagonalGreens jo = greens_jost(p, SpectralParameter(2.0));
    tails.push_back(p.tail_magnitude);
    dists.push_back(triple_distance(fp, jo));
  }
  CHECK(dists[0] > dists[1]);
  CHECK(dists[1] > dists[2]);
  const double slope = loglog_slope(tails, dists);
  CHECK(slope > 0.3);  // measured ~0.65; the effect is visible, not hidden
}

TEST_CASE("estimate sweep") {
  auto g = make_grid(40.0, 256);
  std::vector<ProfileSpec> family = {ProfileSpec::make_zero(),
                                     ProfileSpec::make_gaussian(0.05),
                                     ProfileSpec::make_gaussian(0.1)};
  SweepTable table = estimate_sweep(family, {1.0, 4.0, 16.0}, 0.25, g);

  for (const auto& id : table.estimate_ids()) {
    double mm = table.max_over_median(id);
    CHECK(std::isfinite(mm));
    if (id != "remark3_interp") CHECK(mm <= 10.0);
  }
  int invalid = 0, valid = 0;
  for (const auto& r : table.rows) {
    if (!r.valid) {
      ++invalid;  // the zero-profile rows are the degenerate 0/0 cells
      CHECK(r.amplitude == 0.0);
    } else {
      ++valid;
      CHECK(std::isfinite(r.ratio));
      CHECK(r.ratio > 0.0);
    }
  }
  CHECK(invalid == 3 * 11);
  CHECK(valid == 2 * 3 * 11);
  CHECK_THROWS_AS(estimate_sweep(family, {4.0}, 0.6, g), std::invalid_argument);
}
