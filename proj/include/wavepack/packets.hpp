#ifndef WAVEPACK_PACKETS_HPP
#define WAVEPACK_PACKETS_HPP

#include <array>
#include <string>
#include <vector>

#include "wavepack/rays.hpp"

namespace wp {

// Radial squared window: rho(r/lam) - rho(2r/lam) with rho = 1 on [0,1],
// 0 on [1.4, inf). Supported in (lam/2, 1.4 lam), identically 1 on the core
// [0.7 lam, lam]. For lam = 1 it is rho(r).
double radial_sq(double r, double lam);
// Number of directions at frequency lam: 4 ceil(sqrt(lam)).
int direction_count(double lam);
// Angular squared window of direction nu out of M (angle in radians).
double angular_sq(double angle, int nu, int M);
// rho(r) + sum over dyadic lam >= 2 up to lam_max of sum_nu |h_lam^nu|^2.
double partition_sum(double xi1, double xi2, double lam_max);

// One direction's window and lattice. The window is stored on the box of
// integer frequencies xi_c + zeta, zeta in [lo, lo + N) per axis; the lattice
// is x = (L i / N1, L j / N2).
struct PacketWindow {
  double angle = 0.0;
  double omega[2] = {1, 0};
  int xc[2] = {0, 0};
  int lo[2] = {0, 0};
  int N[2] = {1, 1};
  // h[(a * N2) + b] at zeta = (lo1 + a, lo2 + b)
  std::vector<double> h;
  // lam / <omega, xi> on the same box (generator of the velocity packets)
  std::vector<double> vfac;
  double amp = 0.0;  // 1 / (L sqrt(N1 N2))
  std::size_t lattice_size() const { return static_cast<std::size_t>(N[0]) * N[1]; }
};

struct PacketFrame {
  double lam = 0.0;
  GridSpec grid;
  int M = 0;
  std::vector<PacketWindow> win;
  std::size_t num_tubes() const;
};

// Frame at frequency lam on the grid's spatial torus. Requires 16 <= lam <= n/4.
PacketFrame build_frame(double lam, const GridSpec& grid);
// Fourier restriction of f to the flat core 0.7 lam <= |xi| <= lam.
Slice restrict_to_core(const PacketFrame& fr, const Slice& f);
// Relative L2 mass of f outside [lo, hi] in |xi|.
double mass_outside(const Slice& f, int n, double len, double lo, double hi);

// Dense coefficients per direction: c[omega][i * N2 + j].
struct TubeCoefficients {
  double lam = 0.0;
  std::vector<std::vector<cplx>> c;
  // lattice shape (N1, N2) per direction
  std::vector<std::array<int, 2>> dims;
  double l2sq() const;
};

TubeCoefficients analyze(const PacketFrame& fr, const Slice& f);
Slice synthesize(const PacketFrame& fr, const TubeCoefficients& c);

struct Tube {
  int omega = 0;
  int i = 0, j = 0;
  int sign = 1;
  double x[2] = {0, 0};
  // root part sqrt((b.w)^2 + c(w,w)) of the symbol at (0, x_T, omega_T)
  double a0 = 1.0;
  SphereRay ray;
};
// Tube with its ray integrated over [0, t_max] for the symbol mollified at
// the dyadic floor of sqrt(lam).
Tube make_tube(const PacketFrame& fr, const MetricField& g, int omega, int i, int j, int sign,
               double t_max, double dt_ray = 1.0 / 256.0);
// Same with a prepared symbol (its sign is used); avoids re-mollifying per tube.
Tube make_tube(const PacketFrame& fr, const HalfWaveSymbol& sym, int omega, int i, int j,
               double t_max, double dt_ray = 1.0 / 256.0);

enum class Generator { phi, psi };
// Exact evaluation of the transported packet at a point: u_T (phi) or v_T
// (psi, including the 1/a(0, x_T, omega_T) factor).
cplx packet_value(const PacketFrame& fr, const Tube& T, double t, double y1, double y2,
                  Generator gen = Generator::phi);
// The same on the full grid (direct Fourier sum, no tables).
Slice evolve_packet(const PacketFrame& fr, const Tube& T, double t, Generator gen = Generator::phi);

// lam |<dx, omega>| + lam^{1/2} |dx ^ omega| with the torus-minimal dx.
double tube_distance(const PacketFrame& fr, const Tube& a, const Tube& b);
// sup over sampled times and over the rectangle of b of
// lam^{-3/4} |u_a| <d(a,b)>^N
double packet_tube_overlap(const PacketFrame& fr, const Tube& a, const Tube& b, int N,
                           const std::vector<double>& times, int samples = 9);

struct ParametrixOptions {
  double drop_rel = 1e-6;     // coefficients below drop_rel * max are dropped
  double footprint_tol = 1e-5;  // table cutoff relative to the packet peak
  int oversample = 16;
  double dt_ray = 1.0 / 64.0;
  bool exact = false;         // direct Fourier sums instead of tables
};

struct ParametrixCoeffs {
  // index 0: + sign, 1: - sign
  std::array<TubeCoefficients, 2> u, v;
  double l2sq() const;
};

struct ParametrixResult {
  std::vector<double> times;
  std::vector<Slice> fields;
  ParametrixCoeffs coeffs;
  double coeff_l2sq = 0.0;      // |<phi_T,u0>|^2 + lam^-2 |<phi_T,u1>|^2 summed over T
  double data_normsq = 0.0;     // |u0|^2_{L2} + |u1|^2_{H^-1}
  double dropped_rel = 0.0;     // dropped share of the amplitude l2 mass
  double data_mismatch = 0.0;   // |w(0) - u0| / |u0|
  double velocity_mismatch = 0.0;  // |d_t w(0) - u1| / |u1|, one-sided difference
  std::size_t tubes_used = 0;
};

// Wave packet parametrix for data (u0, u1) localized at the frame frequency.
ParametrixResult parametrix_evolve(const PacketFrame& fr, const Slice& u0, const Slice& u1,
                                   const MetricField& g, const std::vector<double>& times,
                                   const ParametrixOptions& opt = {});

// Evolves a given coefficient set: sum over T and signs of
// u[s]_T u_T^s(t) + v[s]_T v_T^s(t). Only fields, coefficient norms, tubes_used
// and dropped_rel are filled; data mismatches are left at zero.
ParametrixResult parametrix_from_coefficients(const PacketFrame& fr, const ParametrixCoeffs& c,
                                              const MetricField& g, const std::vector<double>& times,
                                              const ParametrixOptions& opt = {});
// Coefficients with zero v amplitudes and u amplitudes alpha/2 for both
// signs on the listed (omega, i, j) tubes, so that w(0) = sum alpha_T phi_T.
ParametrixCoeffs sparse_coefficients(const PacketFrame& fr, const std::vector<std::array<int, 3>>& tubes,
                                     const std::vector<cplx>& alpha);

// Columns sign, omega_idx, lattice_i, lattice_j, re, im, v_re, v_im; re/im is
// the u amplitude, v_re/v_im the velocity amplitude. Zero rows are skipped.
void write_coefficients_csv(const std::string& path, const ParametrixCoeffs& c);

}  // namespace wp

#endif
