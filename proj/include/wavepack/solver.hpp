#ifndef WAVEPACK_SOLVER_HPP
#define WAVEPACK_SOLVER_HPP

#include <array>
#include <vector>

#include "wavepack/metric.hpp"

namespace wp {

// Raised when dt_solver * max speed / dx exceeds 0.5.
struct CflError : DomainError {
  CflError(const std::string& what, double required) : DomainError(what), required_dt(required) {}
  double required_dt;
};

// Output of a run on the grid `out`: u[c] and ut[c] per component, slice k at
// out.time(k). Reversed runs start from data at out.t_end().
struct SolverRun {
  GridSpec out;
  double dt_solver = 0.0;
  double cfl = 0.0;
  bool reversed = false;
  std::vector<SpacetimeField> u, ut;
  // wave maps: the constant the data was perturbed from (zero for linear runs)
  std::array<double, 3> base = {0, 0, 0};
  // wave maps: sup_x ||u| - 1| per output slice
  std::vector<double> drift;
};

// Largest dt allowed by the CFL rule at ratio 0.5, reduced so that it divides
// the output spacing.
double solver_dt(const MetricField& g, const GridSpec& out);
// sup over the output slab of |b| + sqrt(max eigenvalue of c)
double max_wave_speed(const MetricField& g, const GridSpec& out);

// u_tt = -2 b.grad u_t + c(grad, grad) u + F, spectral in x, Lawson RK4 in t
// around the flat propagator. F (optional) lives on `out` and is interpolated
// in time. dt_solver <= 0 picks solver_dt.
SolverRun solve_linear(const MetricField& g, const Slice& u0, const Slice& u1, const SpacetimeField* F,
                       const GridSpec& out, double dt_solver = 0.0, bool reverse = false);

struct WaveMapOptions {
  double dt_solver = 0.0;
  bool renormalize = false;  // u <- u/|u| after every step
};
// Box u = -u Q(u, u) for u with values in the unit sphere of R^3.
SolverRun solve_wavemap_sphere(const MetricField& g, const std::array<Slice, 3>& u0,
                               const std::array<Slice, 3>& u1, const GridSpec& out,
                               const WaveMapOptions& opt = {});

// Small data for the wave-map demo: u0 = (p + eps f)/|p + eps f| with
// p = (0, 0, 1) and u1 = eps * tangent projection of a second field; f, g are
// random trigonometric polynomials of degree <= 4 with unit sup.
void wavemap_data(int n, double len, double eps, std::uint64_t seed, std::array<Slice, 3>& u0,
                  std::array<Slice, 3>& u1);

// t -> sqrt(sum_c |u_c - base_c|^2_{H^s} + |u_t,c|^2_{H^{s-1}})
std::vector<double> energy_trace(const SolverRun& run, double s);
// int |u_t|^2 + c(grad u, grad u) dx per output slice (component 0)
std::vector<double> quadratic_energy(const SolverRun& run, const MetricField& g);

}  // namespace wp

#endif
