#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "dnls/fft.hpp"
#include "dnls/grid.hpp"
#include "dnls/spectral_parameter.hpp"

namespace dnls {

/// Complex samples of a function on a periodic grid, with a lazily computed
/// spectrum cache. The spectrum is the raw unnormalized DFT of the samples
/// (continuum normalization factors live in the norm/quadrature helpers).
class ComplexField {
 public:
  ComplexField() = default;
  explicit ComplexField(GridPtr grid);
  ComplexField(GridPtr grid, std::vector<cdouble> values);

  static ComplexField from_spectrum(GridPtr grid, std::vector<cdouble> spectrum);

  const GridPtr& grid() const { return grid_; }
  int size() const { return grid_ ? grid_->size : 0; }
  const std::vector<cdouble>& values() const { return values_; }
  const std::vector<cdouble>& spectrum() const;
  cdouble operator[](int i) const { return values_[i]; }

  void set_values(std::vector<cdouble> values);

 private:
  GridPtr grid_;
  std::vector<cdouble> values_;
  mutable std::vector<cdouble> spectrum_;
  mutable bool spectrum_valid_ = false;
};

// Pointwise arithmetic; operands must share a grid.
ComplexField operator+(const ComplexField& a, const ComplexField& b);
ComplexField operator-(const ComplexField& a, const ComplexField& b);
ComplexField operator*(const ComplexField& a, const ComplexField& b);
ComplexField operator*(cdouble s, const ComplexField& a);
ComplexField operator*(double s, const ComplexField& a);
ComplexField conj(const ComplexField& a);
ComplexField add_scalar(const ComplexField& a, cdouble s);

/// Spectral derivative: multiplier i*xi.
ComplexField spectral_derivative(const ComplexField& f);

/// (c + d/dx)^{-1} as the Fourier multiplier 1/(c + i*xi); rejects c = 0.
ComplexField resolvent_apply(const ComplexField& f, double c);

/// General diagonal Fourier multiplier m(xi).
ComplexField apply_multiplier(const ComplexField& f, const std::function<cdouble(double)>& m);

/// Zeroes modes with |k| > N/3 (2/3 dealiasing rule).
ComplexField dealias_two_thirds(const ComplexField& f);

double sup_norm(const ComplexField& f);
double sup_diff(const ComplexField& a, const ComplexField& b);

/// h * sum f_j  (spectrally accurate quadrature for smooth periodic f).
cdouble integrate(const ComplexField& f);
/// <f,g> = integral of conj(f)*g.
cdouble l2_inner(const ComplexField& f, const ComplexField& g);
double l2_norm(const ComplexField& f);

/// ||f||_{H^sigma_kappa}: integral of (4*tau^2 + xi^2)^sigma |fhat|^2 dxi,
/// square-rooted. sigma must lie in [-1, 1].
double sobolev_norm(const ComplexField& f, double sigma, const SpectralParameter& sp);

double l1_norm(const ComplexField& f);

/// Spectral antiderivative with zero mean; the mean of f is dropped.
ComplexField antiderivative_zero_mean(const ComplexField& f);

/// Trigonometric resampling onto a grid with the same L and a different N.
ComplexField resample(const ComplexField& f, const GridPtr& target);

/// Values of f upsampled by an integer factor (zero-padded spectrum).
std::vector<cdouble> upsampled_values(const ComplexField& f, int factor);

/// The pair (q, r); gauge_flag records that r was built as -conj(q).
struct FieldPair {
  ComplexField q;
  ComplexField r;
  bool gauge_flag = false;
  double tail_magnitude = 0.0;  // max(|q| at the two domain ends)
};

FieldPair make_pair(ComplexField q, ComplexField r);
FieldPair gauge_pair(ComplexField q);
/// max |r + conj(q)| over the grid.
double gauge_deviation(const FieldPair& p);

struct ProfileSpec {
  enum class Kind { zero, gaussian, sech, file };
  Kind kind = Kind::zero;
  double amplitude = 0.0;
  double width = 1.0;
  double center = 0.0;
  double chirp = 0.0;     // quadratic phase exp(i c x^2)
  double velocity = 0.0;  // linear phase exp(i v x)
  std::string path;

  static ProfileSpec make_gaussian(double a, double w = 1.0, double x0 = 0.0, double c = 0.0,
                                   double v = 0.0);
  static ProfileSpec make_sech(double a, double w = 1.0, double x0 = 0.0);
  static ProfileSpec make_zero();
  static ProfileSpec make_file(std::string path);
};

/// Samples a profile; r = -conj(q). The file variant reads a two-column
/// (Re, Im) CSV with exactly N rows.
FieldPair sample_profile(const ProfileSpec& spec, const GridPtr& grid);

/// q_lambda(x) = lambda^(1/2) q(lambda x), resampled on the same grid.
FieldPair rescale_field(const FieldPair& p, double lambda);

}  // namespace dnls
