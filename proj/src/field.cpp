#include "dnls/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace dnls {

namespace {

void require_same_grid(const ComplexField& a, const ComplexField& b, const char* op) {
  if (!same_grid(a.grid(), b.grid()))
    throw std::invalid_argument(std::string(op) + ": grid mismatch");
}

ComplexField zip(const ComplexField& a, const ComplexField& b, const char* op,
                 const std::function<cdouble(cdouble, cdouble)>& fn) {
  require_same_grid(a, b, op);
  std::vector<cdouble> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = fn(a[i], b[i]);
  return ComplexField(a.grid(), std::move(out));
}

}  // namespace

ComplexField::ComplexField(GridPtr grid)
    : grid_(std::move(grid)), values_(grid_ ? grid_->size : 0, cdouble(0.0, 0.0)) {}

ComplexField::ComplexField(GridPtr grid, std::vector<cdouble> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_ || static_cast<int>(values_.size()) != grid_->size)
    throw std::invalid_argument("ComplexField: value count does not match grid size");
}

ComplexField ComplexField::from_spectrum(GridPtr grid, std::vector<cdouble> spectrum) {
  if (!grid || static_cast<int>(spectrum.size()) != grid->size)
    throw std::invalid_argument("ComplexField::from_spectrum: size mismatch");
  ComplexField f(grid, ifft(spectrum));
  f.spectrum_ = std::move(spectrum);
  f.spectrum_valid_ = true;
  return f;
}

const std::vector<cdouble>& ComplexField::spectrum() const {
  if (!spectrum_valid_) {
    spectrum_ = fft(values_);
    spectrum_valid_ = true;
  }
  return spectrum_;
}

void ComplexField::set_values(std::vector<cdouble> values) {
  if (static_cast<int>(values.size()) != size())
    throw std::invalid_argument("ComplexField::set_values: size mismatch");
  values_ = std::move(values);
  spectrum_valid_ = false;
}

ComplexField operator+(const ComplexField& a, const ComplexField& b) {
  return zip(a, b, "operator+", [](cdouble x, cdouble y) { return x + y; });
}

ComplexField operator-(const ComplexField& a, const ComplexField& b) {
  return zip(a, b, "operator-", [](cdouble x, cdouble y) { return x - y; });
}

ComplexField operator*(const ComplexField& a, const ComplexField& b) {
  return zip(a, b, "operator*", [](cdouble x, cdouble y) { return x * y; });
}

ComplexField operator*(cdouble s, const ComplexField& a) {
  std::vector<cdouble> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return ComplexField(a.grid(), std::move(out));
}

ComplexField operator*(double s, const ComplexField& a) { return cdouble(s, 0.0) * a; }

ComplexField conj(const ComplexField& a) {
  std::vector<cdouble> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = std::conj(a[i]);
  return ComplexField(a.grid(), std::move(out));
}

ComplexField add_scalar(const ComplexField& a, cdouble s) {
  std::vector<cdouble> out(a.size());
  for (int i = 0; i < a.size(); ++i) out[i] = a[i] + s;
  return ComplexField(a.grid(), std::move(out));
}

ComplexField apply_multiplier(const ComplexField& f, const std::function<cdouble(double)>& m) {
  const auto& g = f.grid();
  std::vector<cdouble> spec = f.spectrum();
  for (int k = 0; k < f.size(); ++k) spec[k] *= m(g->xi[k]);
  return ComplexField::from_spectrum(g, std::move(spec));
}

ComplexField spectral_derivative(const ComplexField& f) {
  return apply_multiplier(f, [](double xi) { return cdouble(0.0, xi); });
}

ComplexField resolvent_apply(const ComplexField& f, double c) {
  if (c == 0.0)
    throw std::invalid_argument("resolvent_apply: c = 0 makes the multiplier singular at xi = 0");
  return apply_multiplier(f, [c](double xi) { return 1.0 / cdouble(c, xi); });
}

ComplexField dealias_two_thirds(const ComplexField& f) {
  const auto& g = f.grid();
  const int n = f.size();
  std::vector<cdouble> spec = f.spectrum();
  const int kmax = n / 3;
  for (int j = 0; j < n; ++j) {
    const int k = (j < n / 2) ? j : j - n;
    if (std::abs(k) > kmax) spec[j] = 0.0;
  }
  return ComplexField::from_spectrum(g, std::move(spec));
}

double sup_norm(const ComplexField& f) {
  double m = 0.0;
  for (const auto& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

double sup_diff(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a, b, "sup_diff");
  double m = 0.0;
  for (int i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

cdouble integrate(const ComplexField& f) {
  cdouble s(0.0, 0.0);
  for (const auto& v : f.values()) s += v;
  return f.grid()->spacing * s;
}

cdouble l2_inner(const ComplexField& f, const ComplexField& g) {
  require_same_grid(f, g, "l2_inner");
  cdouble s(0.0, 0.0);
  for (int i = 0; i < f.size(); ++i) s += std::conj(f[i]) * g[i];
  return f.grid()->spacing * s;
}

double l2_norm(const ComplexField& f) { return std::sqrt(std::abs(l2_inner(f, f))); }

double sobolev_norm(const ComplexField& f, double sigma, const SpectralParameter& sp) {
  if (sigma < -1.0 || sigma > 1.0)
    throw std::invalid_argument("sobolev_norm: sigma must lie in [-1, 1]");
  const auto& g = f.grid();
  const auto& spec = f.spectrum();
  const double tau2 = sp.tau() * sp.tau();
  // |qhat(xi_k)|^2 d(xi) summed = (h/N) * sum |DFT_k|^2 * weight
  double acc = 0.0;
  for (int k = 0; k < f.size(); ++k) {
    const double w = std::pow(4.0 * tau2 + g->xi[k] * g->xi[k], sigma);
    acc += w * std::norm(spec[k]);
  }
  return std::sqrt(acc * g->spacing / g->size);
}

double l1_norm(const ComplexField& f) {
  double s = 0.0;
  for (const auto& v : f.values()) s += std::abs(v);
  return f.grid()->spacing * s;
}

ComplexField antiderivative_zero_mean(const ComplexField& f) {
  return apply_multiplier(f, [](double xi) {
    return xi == 0.0 ? cdouble(0.0, 0.0) : 1.0 / cdouble(0.0, xi);
  });
}

ComplexField resample(const ComplexField& f, const GridPtr& target) {
  const auto& g = f.grid();
  if (g->half_length != target->half_length)
    throw std::invalid_argument("resample: target grid must share the half length");
  if (g->size == target->size) return ComplexField(target, f.values());
  const int n = g->size, m = target->size;
  const auto& spec = f.spectrum();
  std::vector<cdouble> out(m, cdouble(0.0, 0.0));
  const int keep = std::min(n, m) / 2;
  const double scale = static_cast<double>(m) / n;
  // Copy modes k in (-keep, keep); the unpaired Nyquist slot of the smaller
  // grid is dropped (negligible for resolved fields).
  for (int k = -keep + 1; k < keep; ++k) {
    const int src = (k + n) % n;
    const int dst = (k + m) % m;
    out[dst] = scale * spec[src];
  }
  return ComplexField::from_spectrum(target, std::move(out));
}

std::vector<cdouble> upsampled_values(const ComplexField& f, int factor) {
  if (factor < 1) throw std::invalid_argument("upsampled_values: factor must be >= 1");
  if (factor == 1) return f.values();
  const int n = f.size();
  const int m = n * factor;
  const auto& spec = f.spectrum();
  std::vector<cdouble> pad(m, cdouble(0.0, 0.0));
  for (int k = -n / 2 + 1; k < n / 2; ++k) {
    const int src = (k + n) % n;
    const int dst = (k + m) % m;
    pad[dst] = static_cast<double>(factor) * spec[src];
  }
  return ifft(pad);
}

FieldPair make_pair(ComplexField q, ComplexField r) {
  require_same_grid(q, r, "make_pair");
  FieldPair p;
  const int n = q.size();
  double dev = 0.0;
  for (int i = 0; i < n; ++i) dev = std::max(dev, std::abs(r[i] + std::conj(q[i])));
  p.tail_magnitude = std::max(std::abs(q[0]), std::abs(q[n - 1]));
  p.gauge_flag = dev <= 1e-14 * std::max(1e-300, sup_norm(q));
  p.q = std::move(q);
  p.r = std::move(r);
  return p;
}

FieldPair gauge_pair(ComplexField q) {
  ComplexField r = cdouble(-1.0, 0.0) * conj(q);
  FieldPair p = make_pair(std::move(q), std::move(r));
  p.gauge_flag = true;
  return p;
}

double gauge_deviation(const FieldPair& p) {
  double dev = 0.0;
  for (int i = 0; i < p.q.size(); ++i) dev = std::max(dev, std::abs(p.r[i] + std::conj(p.q[i])));
  return dev;
}

ProfileSpec ProfileSpec::make_gaussian(double a, double w, double x0, double c, double v) {
  ProfileSpec s;
  s.kind = Kind::gaussian;
  s.amplitude = a;
  s.width = w;
  s.center = x0;
  s.chirp = c;
  s.velocity = v;
  return s;
}

ProfileSpec ProfileSpec::make_sech(double a, double w, double x0) {
  ProfileSpec s;
  s.kind = Kind::sech;
  s.amplitude = a;
  s.width = w;
  s.center = x0;
  return s;
}

ProfileSpec ProfileSpec::make_zero() { return ProfileSpec{}; }

ProfileSpec ProfileSpec::make_file(std::string path) {
  ProfileSpec s;
  s.kind = Kind::file;
  s.path = std::move(path);
  return s;
}

namespace {

std::vector<cdouble> read_profile_csv(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("profile file missing or unreadable: " + path);
  std::vector<cdouble> vals;
  vals.reserve(n);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double re = 0.0, im = 0.0;
    if (!(ss >> re >> im))
      throw std::runtime_error("profile file " + path + ": malformed row '" + line + "'");
    vals.emplace_back(re, im);
  }
  if (static_cast<int>(vals.size()) != n)
    throw std::runtime_error("profile file " + path + ": expected " + std::to_string(n) +
                             " rows, got " + std::to_string(vals.size()));
  return vals;
}

}  // namespace

FieldPair sample_profile(const ProfileSpec& spec, const GridPtr& grid) {
  std::vector<cdouble> q(grid->size, cdouble(0.0, 0.0));
  switch (spec.kind) {
    case ProfileSpec::Kind::zero:
      break;
    case ProfileSpec::Kind::gaussian:
      for (int j = 0; j < grid->size; ++j) {
        const double x = grid->x[j];
        const double s = (x - spec.center) / spec.width;
        q[j] = spec.amplitude * std::exp(cdouble(-s * s, spec.chirp * x * x + spec.velocity * x));
      }
      break;
    case ProfileSpec::Kind::sech:
      for (int j = 0; j < grid->size; ++j) {
        const double s = (grid->x[j] - spec.center) / spec.width;
        q[j] = spec.amplitude / std::cosh(s);
      }
      break;
    case ProfileSpec::Kind::file:
      q = read_profile_csv(spec.path, grid->size);
      break;
  }
  return gauge_pair(ComplexField(grid, std::move(q)));
}

FieldPair rescale_field(const FieldPair& p, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("rescale_field: lambda must be positive");
  if (lambda == 1.0) return p;
  const auto& g = p.q.grid();
  const int n = g->size;
  const double root = std::sqrt(lambda);
  // Evaluate the trigonometric interpolant of q at lambda*x_j; points mapped
  // outside [-L, L) read as tail zeros rather than periodic wraps.
  auto eval = [&](const ComplexField& f) {
    const auto& spec = f.spectrum();
    std::vector<cdouble> out(n, cdouble(0.0, 0.0));
    for (int j = 0; j < n; ++j) {
      const double y = lambda * g->x[j];
      if (y < -g->half_length || y >= g->half_length) continue;
      cdouble acc(0.0, 0.0);
      for (int k = 0; k < n; ++k) {
        // spectrum index k corresponds to samples starting at x_0 = -L
        const double phase = g->xi[k] * (y + g->half_length);
        acc += spec[k] * cdouble(std::cos(phase), std::sin(phase));
      }
      out[j] = root * acc / static_cast<double>(n);
    }
    return ComplexField(g, std::move(out));
  };
  FieldPair out = make_pair(eval(p.q), eval(p.r));
  out.gauge_flag = p.gauge_flag;
  return out;
}

}  // namespace dnls
