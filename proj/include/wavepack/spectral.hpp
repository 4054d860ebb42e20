#ifndef WAVEPACK_SPECTRAL_HPP
#define WAVEPACK_SPECTRAL_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavepack/fft.hpp"

namespace wp {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StencilError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Periodic square of side domain_len sampled at n x n points, times
// t0, t0 + dt, ..., t0 + (nt-1) dt.
struct GridSpec {
  int n = 256;
  double domain_len = kTwoPi;
  int nt = 129;
  double dt = 1.0 / 128.0;
  double t0 = 0.0;

  void validate() const;
  double dx() const { return domain_len / n; }
  double time(int k) const { return t0 + k * dt; }
  double t_end() const { return t0 + (nt - 1) * dt; }
  std::size_t points() const { return static_cast<std::size_t>(n) * n; }
  // spacing of the dual lattice
  double dual_unit() const { return kTwoPi / domain_len; }
};

// Grid on [t0, t0 + span] with nt slices.
GridSpec make_grid(int n, int nt, double span = 1.0, double t0 = 0.0);

using Slice = std::vector<cplx>;

// Complex field, slice-major: data[(k * n + i) * n + j] is time k, x1 index i,
// x2 index j.
struct SpacetimeField {
  GridSpec grid;
  std::vector<cplx> data;

  SpacetimeField() = default;
  explicit SpacetimeField(const GridSpec& g);

  cplx* slice(int k) { return data.data() + static_cast<std::size_t>(k) * grid.points(); }
  const cplx* slice(int k) const { return data.data() + static_cast<std::size_t>(k) * grid.points(); }
  Slice slice_copy(int k) const;
  void set_slice(int k, const Slice& s);
  // throws DomainError on NaN or Inf
  void check_finite() const;
};

// signed integer frequency of FFT index i (Nyquist maps to -n/2)
inline int freq_index(int i, int n) { return i < n / 2 ? i : i - n; }

bool is_dyadic(double v);
// largest power of two not exceeding v (v >= 1)
int dyadic_floor(double v);

// Littlewood-Paley profile: smooth, 1 on [0,1], 0 on [2, inf).
double lp_cutoff(double r);
// smooth step, 0 for s <= 0, 1 for s >= 1, with step(s) + step(1 - s) = 1
double smooth_step(double s);
// Block multiplier s_lam: lp_cutoff(r) for lam = 1, else
// lp_cutoff(r / lam) - lp_cutoff(2 r / lam), supported in [lam/2, 2 lam].
double lp_block(double r, double lam);
// Low-pass multiplier of P_{<mu} = sum over blocks below mu.
double lp_low(double r, double mu);

enum class LpKind { spatial, spacetime };

// P_lam f. Spatial kind acts per slice; spacetime kind uses the DFT over the
// stored slices with time frequencies 2 pi m / (nt dt).
SpacetimeField lp_project(const SpacetimeField& f, double lam, LpKind kind);

// Fourier multiplier m(k1, k2) on one slice (k in physical units).
Slice apply_multiplier(const Slice& f, int n, double len,
                       const std::function<double(double, double)>& m);
Slice lp_project_slice(const Slice& f, int n, double len, double lam);

// d1 derivatives in x1 and d2 in x2, spectrally. Odd derivatives drop the
// Nyquist mode.
Slice spectral_derivative(const Slice& f, int n, double len, int d1, int d2);
// Trigonometric resampling of an n x n slice to m x m. Modes that do not fit
// on the target grid are dropped, so downsampling is a sharp low-pass.
Slice resample_slice(const Slice& f, int n, int m);

// All of grad and Hessian from a single forward transform.
struct SliceDerivs {
  Slice d1, d2, d11, d12, d22;
};
SliceDerivs spectral_derivs(const Slice& f, int n, double len, bool second = true);

// Discrete norms. Spatial L2 carries the cell area (len/n)^2, so a unit
// constant has norm len. H^s uses weights (1 + |k|^2)^s on the dual lattice.
double l2_norm(const cplx* f, int n, double len);
double l2_norm(const Slice& f, int n, double len);
double hs_norm(const Slice& f, int n, double len, double s);
double inner_re(const Slice& a, const Slice& b, int n, double len);
// Time integrals use the trapezoid rule over the stored slices.
double spacetime_l2(const SpacetimeField& f);
double linf_l2(const SpacetimeField& f);
double l1_l2(const SpacetimeField& f);

// Time derivative by finite differences of the given order (2 or 4) with
// one-sided stencils of the same order at the ends.
SpacetimeField time_derivative(const SpacetimeField& f, int order = 4);

// sup over slices of (|u|_{H^s}^2 + |d_t u|_{H^{s-1}}^2)^{1/2}
double energy_norm(const SpacetimeField& u, double s);
// Same norm of a single data pair.
double data_norm(const Slice& u, const Slice& ut, int n, double len, double s);

struct NormReport {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  bool pass = false;
  std::string anchor;
};

// ratio = value / bound for bound > 0; pass iff ratio <= tol.
NormReport make_report(const std::string& name, double value, double bound,
                       double tol = 1.0, const std::string& anchor = "");

}  // namespace wp

#endif
