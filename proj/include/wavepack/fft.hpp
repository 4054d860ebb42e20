#ifndef WAVEPACK_FFT_HPP
#define WAVEPACK_FFT_HPP

#include <complex>
#include <vector>

namespace wp {

using cplx = std::complex<double>;

// Thin wrapper over cached FFTW plans. Plans use FFTW_ESTIMATE so the
// algorithm choice, and therefore the rounding, is identical on every run.
//
// forward:  F[k] = (1/N) sum_x f[x] e^{-2 pi i k.x/N}
// backward: f[x] = sum_k F[k] e^{+2 pi i k.x/N}
class Fft {
 public:
  // rank 1 (n2 == 0) or rank 2 row-major n1 x n2
  Fft(int n1, int n2);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  void forward(const cplx* in, cplx* out) const;
  void backward(const cplx* in, cplx* out) const;
  int size() const { return total_; }

 private:
  void* fwd_ = nullptr;
  void* bwd_ = nullptr;
  int total_ = 0;
};

// Shared plan for a given shape, created once under a lock.
const Fft& fft_plan(int n1, int n2 = 0);

std::vector<cplx> fft2_forward(const std::vector<cplx>& f, int n);
std::vector<cplx> fft2_backward(const std::vector<cplx>& F, int n);

}  // namespace wp

#endif
