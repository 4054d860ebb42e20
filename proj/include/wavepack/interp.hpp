#ifndef WAVEPACK_INTERP_HPP
#define WAVEPACK_INTERP_HPP

#include <cmath>
#include <vector>

#include "wavepack/fft.hpp"

namespace wp {

// Uniform cubic B-spline weights at fractional offset t in [0,1) for nodes
// -1, 0, 1, 2, and their t-derivatives.
inline void bspline_weights(double t, double w[4], double dw[4]) {
  double s = 1.0 - t, t2 = t * t, t3 = t2 * t;
  w[0] = s * s * s / 6.0;
  w[1] = (3.0 * t3 - 6.0 * t2 + 4.0) / 6.0;
  w[2] = (-3.0 * t3 + 3.0 * t2 + 3.0 * t + 1.0) / 6.0;
  w[3] = t3 / 6.0;
  dw[0] = -0.5 * s * s;
  dw[1] = 1.5 * t2 - 2.0 * t;
  dw[2] = -1.5 * t2 + t + 0.5;
  dw[3] = 0.5 * t2;
}

// Cubic Lagrange weights for nodes -1, 0, 1, 2.
inline void lagrange4_weights(double t, double w[4]) {
  w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
  w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
  w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
  w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
}

// Periodic bicubic B-spline interpolant of an n x n sampled function on a
// square of side len. Interpolates the samples exactly and is C^2.
template <class T>
class PeriodicSpline2 {
 public:
  PeriodicSpline2() = default;
  PeriodicSpline2(const T* samples, int n, double len) { build(samples, n, len); }

  void build(const T* samples, int n, double len);
  // build directly from spline coefficients (already prefiltered)
  void set_coefficients(std::vector<T> coef, int n, double len) {
    coef_ = std::move(coef);
    n_ = n;
    len_ = len;
  }

  T value(double x1, double x2) const {
    T g1, g2;
    return eval(x1, x2, g1, g2, false);
  }
  T value_grad(double x1, double x2, T& g1, T& g2) const { return eval(x1, x2, g1, g2, true); }

  int n() const { return n_; }
  bool empty() const { return coef_.empty(); }
  const std::vector<T>& coefficients() const { return coef_; }

 private:
  T eval(double x1, double x2, T& g1, T& g2, bool grad) const {
    const double h = len_ / n_;
    double u1 = x1 / h, u2 = x2 / h;
    double f1 = std::floor(u1), f2 = std::floor(u2);
    double t1 = u1 - f1, t2 = u2 - f2;
    long i0 = static_cast<long>(f1), j0 = static_cast<long>(f2);
    double w1[4], d1[4], w2[4], d2[4];
    bspline_weights(t1, w1, d1);
    bspline_weights(t2, w2, d2);
    int jj[4];
    for (int b = 0; b < 4; ++b) jj[b] = wrap(j0 - 1 + b);
    T v{}, a1{}, a2{};
    for (int a = 0; a < 4; ++a) {
      const T* row = coef_.data() + static_cast<std::size_t>(wrap(i0 - 1 + a)) * n_;
      T r{}, rd{};
      for (int b = 0; b < 4; ++b) {
        r += w2[b] * row[jj[b]];
        if (grad) rd += d2[b] * row[jj[b]];
      }
      v += w1[a] * r;
      if (grad) {
        a1 += d1[a] * r;
        a2 += w1[a] * rd;
      }
    }
    if (grad) {
      g1 = a1 / h;
      g2 = a2 / h;
    }
    return v;
  }
  int wrap(long i) const {
    long r = i % n_;
    return static_cast<int>(r < 0 ? r + n_ : r);
  }

  std::vector<T> coef_;
  int n_ = 0;
  double len_ = 0.0;
};

// B-spline prefilter of periodic samples: returns coefficients c with
// sum_m c_m B(j - m) = f_j in both axes.
std::vector<double> bspline_prefilter(const double* f, int n);
std::vector<cplx> bspline_prefilter(const cplx* f, int n);

template <class T>
void PeriodicSpline2<T>::build(const T* samples, int n, double len) {
  coef_ = bspline_prefilter(samples, n);
  n_ = n;
  len_ = len;
}

}  // namespace wp

#endif
