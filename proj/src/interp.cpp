#include "wavepack/interp.hpp"

#include <cmath>

namespace wp {

namespace {
void prefilter_hat(std::vector<cplx>& hat, int n) {
  std::vector<double> sym(n);
  for (int i = 0; i < n; ++i) sym[i] = (4.0 + 2.0 * std::cos(2.0 * M_PI * i / n)) / 6.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hat[static_cast<std::size_t>(i) * n + j] /= sym[i] * sym[j];
}
}  // namespace

std::vector<cplx> bspline_prefilter(const cplx* f, int n) {
  const std::size_t P = static_cast<std::size_t>(n) * n;
  const Fft& F = fft_plan(n, n);
  std::vector<cplx> hat(P), out(P);
  F.forward(f, hat.data());
  prefilter_hat(hat, n);
  F.backward(hat.data(), out.data());
  return out;
}

std::vector<double> bspline_prefilter(const double* f, int n) {
  const std::size_t P = static_cast<std::size_t>(n) * n;
  std::vector<cplx> z(f, f + P);
  auto c = bspline_prefilter(z.data(), n);
  std::vector<double> out(P);
  for (std::size_t i = 0; i < P; ++i) out[i] = c[i].real();
  return out;
}

}  // namespace wp
