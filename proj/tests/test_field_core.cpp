#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dnls/field.hpp"

using namespace dnls;

namespace {

ComplexField random_field(const GridPtr& g, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd;
  std::vector<cdouble> v(g->size);
  for (auto& x : v) x = cdouble(nd(gen), nd(gen));
  return ComplexField(g, std::move(v));
}

}  // namespace

TEST_CASE("grid construction and rejection") {
  CHECK_THROWS_AS(make_grid(40.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(40.0, 1000), std::invalid_argument);  // not a power of two
  CHECK_THROWS_AS(make_grid(-1.0, 1024), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0.0, 1024), std::invalid_argument);

  auto g = make_grid(40.0, 1024);
  CHECK(g->spacing == doctest::Approx(0.078125).epsilon(1e-15));
  double ximax = 0.0;
  for (double xi : g->xi) ximax = std::max(ximax, std::abs(xi));
  CHECK(ximax == doctest::Approx(M_PI * 512 / 40.0).epsilon(1e-14));
  CHECK(g->x.front() == -40.0);
  CHECK(g->x[512] == 0.0);
}

TEST_CASE("fft round trip") {
  auto g = make_grid(20.0, 128);
  ComplexField f = random_field(g, 7);
  ComplexField back = ComplexField::from_spectrum(g, f.spectrum());
  CHECK(sup_diff(f, back) <= 1e-13 * sup_norm(f));
}

TEST_CASE("profile sampling") {
  auto g = make_grid(40.0, 1024);

  FieldPair zero = sample_profile(ProfileSpec::make_zero(), g);
  CHECK(sup_norm(zero.q) == 0.0);
  CHECK(sup_norm(zero.r) == 0.0);
  CHECK(zero.gauge_flag);

  FieldPair gp = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  CHECK(std::abs(gp.q[512] - cdouble(0.1, 0.0)) < 1e-15);
  CHECK(std::abs(gp.r[512] - cdouble(-0.1, 0.0)) < 1e-15);
  CHECK(gp.gauge_flag);
  CHECK(gp.tail_magnitude < 1e-200);

  // ||q||_L2^2 = a^2 sqrt(pi/2) for a gaussian of unit width
  const double n2 = l2_norm(gp.q) * l2_norm(gp.q);
  CHECK(n2 == doctest::Approx(0.01 * std::sqrt(M_PI / 2.0)).epsilon(1e-12));
}

TEST_CASE("spectral derivative") {
  auto g = make_grid(40.0, 1024);

  ComplexField ones(g, std::vector<cdouble>(g->size, 1.0));
  CHECK(sup_norm(spectral_derivative(ones)) < 1e-13);

  // single grid mode
  const double xi0 = g->xi[3];
  std::vector<cdouble> v(g->size);
  for (int j = 0; j < g->size; ++j)
    v[j] = std::exp(cdouble(0.0, xi0 * g->x[j]));
  ComplexField mode(g, std::move(v));
  ComplexField dm = spectral_derivative(mode);
  CHECK(sup_diff(dm, cdouble(0.0, xi0) * mode) < 1e-12);

  // gaussian against the closed-form derivative
  FieldPair gp = sample_profile(ProfileSpec::make_gaussian(1.0), g);
  ComplexField dq = spectral_derivative(gp.q);
  std::vector<cdouble> exact(g->size);
  for (int j = 0; j < g->size; ++j)
    exact[j] = -2.0 * g->x[j] * std::exp(-g->x[j] * g->x[j]);
  CHECK(sup_diff(dq, ComplexField(g, std::move(exact))) <= 1e-10);
}

TEST_CASE("resolvent multiplier") {
  auto g = make_grid(40.0, 512);
  CHECK_THROWS_AS(resolvent_apply(ComplexField(g), 0.0), std::invalid_argument);

  ComplexField zero(g);
  CHECK(sup_norm(resolvent_apply(zero, 4.0)) == 0.0);

  ComplexField ones(g, std::vector<cdouble>(g->size, 1.0));
  ComplexField r = resolvent_apply(ones, 4.0);
  CHECK(sup_diff(r, cdouble(0.25) * ones) < 1e-14);

  const double xi0 = g->xi[5];
  std::vector<cdouble> v(g->size);
  for (int j = 0; j < g->size; ++j) v[j] = std::exp(cdouble(0.0, xi0 * g->x[j]));
  ComplexField mode(g, std::move(v));
  ComplexField rm = resolvent_apply(mode, 4.0);
  CHECK(sup_diff(rm, (1.0 / cdouble(4.0, xi0)) * mode) < 1e-13);

  // (c + d/dx) o resolvent = identity
  ComplexField f = random_field(g, 3);
  ComplexField rf = resolvent_apply(f, -3.0);
  ComplexField back = spectral_derivative(rf) + (-3.0) * rf;
  CHECK(sup_diff(back, f) <= 1e-12 * std::max(1.0, sup_norm(f)));
}

TEST_CASE("inner product and norms") {
  auto g = make_grid(40.0, 512);
  ComplexField f = random_field(g, 11);
  ComplexField h = random_field(g, 12);

  CHECK(std::abs(l2_inner(f, h) - std::conj(l2_inner(h, f))) < 1e-12);
  CHECK(l2_inner(f, f).real() >= 0.0);
  CHECK(std::abs(l2_inner(f, f).imag()) < 1e-14 * l2_inner(f, f).real());

  // orthogonal grid modes
  std::vector<cdouble> m1(g->size), m2(g->size);
  for (int j = 0; j < g->size; ++j) {
    m1[j] = std::exp(cdouble(0.0, g->xi[2] * g->x[j]));
    m2[j] = std::exp(cdouble(0.0, g->xi[9] * g->x[j]));
  }
  CHECK(std::abs(l2_inner(ComplexField(g, m1), ComplexField(g, m2))) < 1e-12);

  auto g2 = make_grid(40.0, 256);
  CHECK_THROWS(l2_inner(f, ComplexField(g2)));
}

TEST_CASE("sobolev norm") {
  auto g = make_grid(40.0, 1024);
  SpectralParameter sp(4.0);
  CHECK(sobolev_norm(ComplexField(g), 0.3, sp) == 0.0);
  CHECK_THROWS_AS(sobolev_norm(ComplexField(g), 1.5, sp), std::invalid_argument);

  FieldPair gp = sample_profile(ProfileSpec::make_gaussian(0.1), g);
  // sigma = 0 equals the L2 norm for any tau
  for (double tau : {1.0, 4.0, -16.0}) {
    CHECK(sobolev_norm(gp.q, 0.0, SpectralParameter(tau)) ==
          doctest::Approx(l2_norm(gp.q)).epsilon(1e-13));
  }

  // doubled resolution agrees (independent quadrature of the same integral)
  auto g2 = make_grid(40.0, 2048);
  FieldPair gp2 = sample_profile(ProfileSpec::make_gaussian(0.1), g2);
  const double a = sobolev_norm(gp.q, -0.25, sp);
  const double b = sobolev_norm(gp2.q, -0.25, sp);
  CHECK(std::abs(a - b) <= 1e-8);
}

TEST_CASE("rescale preserves the L2 norm") {
  auto g = make_grid(40.0, 512);
  FieldPair gp = sample_profile(ProfileSpec::make_gaussian(0.1), g);

  FieldPair same = rescale_field(gp, 1.0);
  CHECK(sup_diff(same.q, gp.q) == 0.0);

  FieldPair zero = rescale_field(sample_profile(ProfileSpec::make_zero(), g), 2.0);
  CHECK(sup_norm(zero.q) == 0.0);

  FieldPair half = rescale_field(gp, 2.0);
  CHECK(l2_norm(half.q) == doctest::Approx(l2_norm(gp.q)).epsilon(1e-8));
  CHECK_THROWS_AS(rescale_field(gp, -1.0), std::invalid_argument);
}

TEST_CASE("spectral parameter") {
  CHECK_THROWS_AS(SpectralParameter(0.5), std::invalid_argument);
  for (double tau : {2.0, -8.0}) {
    for (int b : {+1, -1}) {
      SpectralParameter sp(tau, b);
      // i kappa^2 = tau exactly
      CHECK((cdouble(0.0, 1.0) * sp.kappa2()).real() == tau);
      CHECK((cdouble(0.0, 1.0) * sp.kappa2()).imag() == 0.0);
      // kappa * kappa reproduces kappa2 to rounding
      CHECK(std::abs(sp.kappa() * sp.kappa() - sp.kappa2()) < 1e-14 * std::abs(tau));
      CHECK(std::abs(sp.flipped().kappa() + sp.kappa()) == 0.0);
      CHECK(std::abs(sp.neg_conj().kappa() + std::conj(sp.kappa())) < 1e-15);
    }
  }
}

TEST_CASE("gauge bookkeeping") {
  auto g = make_grid(40.0, 256);
  FieldPair gp = sample_profile(ProfileSpec::make_gaussian(0.1, 1.0, 0.0, 0.3), g);
  CHECK(gp.gauge_flag);
  CHECK(gauge_deviation(gp) < 1e-15);

  FieldPair ungauged = make_pair(gp.q, gp.q);
  CHECK(!ungauged.gauge_flag);
}
