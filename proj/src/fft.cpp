#include "dnls/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>

namespace dnls {
namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// Plans are created once per transform length and reused; fftw_execute_dft on
// caller buffers is thread-safe, the planner is not.
PlanPair& plans_for(int n) {
  static std::map<int, PlanPair> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cdouble> a(n), b(n);
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  PlanPair p;
  p.forward = fftw_plan_dft_1d(n, pa, pb, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_1d(n, pa, pb, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(n, p).first->second;
}

}  // namespace

std::vector<cdouble> fft(const std::vector<cdouble>& in) {
  if (in.empty()) throw std::invalid_argument("fft: empty input");
  const int n = static_cast<int>(in.size());
  std::vector<cdouble> out(n);
  auto& p = plans_for(n);
  fftw_execute_dft(p.forward,
                   reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<cdouble> ifft(const std::vector<cdouble>& in) {
  if (in.empty()) throw std::invalid_argument("ifft: empty input");
  const int n = static_cast<int>(in.size());
  std::vector<cdouble> out(n);
  auto& p = plans_for(n);
  fftw_execute_dft(p.backward,
                   reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double s = 1.0 / n;
  for (auto& v : out) v *= s;
  return out;
}

}  // namespace dnls
