#include "wavepack/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace wp {

namespace {
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft::Fft(int n1, int n2) {
  total_ = n2 > 0 ? n1 * n2 : n1;
  std::vector<cplx> a(total_), b(total_);
  auto* pa = reinterpret_cast<fftw_complex*>(a.data());
  auto* pb = reinterpret_cast<fftw_complex*>(b.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  if (n2 > 0) {
    fwd_ = fftw_plan_dft_2d(n1, n2, pa, pb, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_2d(n1, n2, pa, pb, FFTW_BACKWARD, flags);
  } else {
    fwd_ = fftw_plan_dft_1d(n1, pa, pb, FFTW_FORWARD, flags);
    bwd_ = fftw_plan_dft_1d(n1, pa, pb, FFTW_BACKWARD, flags);
  }
  if (!fwd_ || !bwd_) throw std::runtime_error("fftw plan creation failed");
}

Fft::~Fft() {
  std::lock_guard<std::mutex> lk(plan_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
}

void Fft::forward(const cplx* in, cplx* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(fwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
  const double s = 1.0 / total_;
  for (int i = 0; i < total_; ++i) out[i] *= s;
}

void Fft::backward(const cplx* in, cplx* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(bwd_),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

const Fft& fft_plan(int n1, int n2) {
  static std::map<std::pair<int, int>, std::unique_ptr<Fft>> cache;
  std::lock_guard<std::mutex> lk(plan_mutex());
  auto key = std::make_pair(n1, n2);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Fft>(n1, n2)).first;
  return *it->second;
}

std::vector<cplx> fft2_forward(const std::vector<cplx>& f, int n) {
  std::vector<cplx> out(f.size());
  fft_plan(n, n).forward(f.data(), out.data());
  return out;
}

std::vector<cplx> fft2_backward(const std::vector<cplx>& F, int n) {
  std::vector<cplx> out(F.size());
  fft_plan(n, n).backward(F.data(), out.data());
  return out;
}

}  // namespace wp
