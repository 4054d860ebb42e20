#ifndef WAVEPACK_EIKONAL_HPP
#define WAVEPACK_EIKONAL_HPP

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "wavepack/interp.hpp"
#include "wavepack/rays.hpp"

namespace wp {

struct CausticError : std::runtime_error {
  CausticError(const std::string& w, double t) : std::runtime_error(w), time(t) {}
  double time;
};
struct DegenerateFoliationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FrameDegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The 16 default directions: integer vectors close to angle 2 pi k / 16.
// Integer directions keep every leaf periodic on the torus.
std::array<int, 2> canonical_direction(int k);

struct EikonalOptions {
  // rays are launched on an m x m grid; 0 means n / 4
  int ray_grid = 0;
  // RK4 steps per time slice
  int substeps = 1;
};

// Optical function Phi = <x, theta> + rem(t, x) with rem periodic. The
// foliation coordinates describe the leaf {Phi = h} at time t as the graph
// x_theta = psi(t, x', h), x = x' theta_perp + x_theta theta.
struct Foliation {
  GridSpec grid;
  int e[2] = {1, 0};
  double theta[2] = {1, 0};
  double theta_perp[2] = {0, 1};
  int sign = 1;
  HalfWaveSymbol sym;
  // nt slices of n x n remainder values
  std::vector<double> rem;

  // populated by foliation_coords
  int n_h = 0, n_xp = 0;
  std::vector<double> h_values;
  // psi[(k * n_h + l) * n_xp + q], x' = q * xp_period / n_xp
  std::vector<double> psi;

  explicit Foliation(const HalfWaveSymbol& s) : sym(s) {}

  // leaves repeat when h shifts by this amount
  double h_period() const;
  // length of one leaf period in x'
  double xp_period() const;
  const double* rem_slice(int k) const { return rem.data() + static_cast<std::size_t>(k) * grid.points(); }
  double phi(int k, int i, int j) const;
};

Foliation solve_eikonal(const HalfWaveSymbol& sym, std::array<int, 2> e, const GridSpec& grid,
                        const EikonalOptions& opt = {});

// Pointwise derivatives of Phi on slice k.
struct PhiSlice {
  std::vector<double> phit, p1, p2;
};
PhiSlice phi_derivs(const Foliation& f, int k);

struct EikonalReport {
  double residual = 0.0;     // sup |d_t Phi + a(d_x Phi)|
  double hess = 0.0;         // sup Frobenius norm of the spacetime Hessian
  double null_grad = 0.0;    // sup |G(dPhi, dPhi)|
  double min_dtheta = 0.0;   // inf d_theta Phi
};
EikonalReport eikonal_diagnostics(const Foliation& f);

struct FoliationBounds {
  double psi_t_sup = 0.0, psi_xp_sup = 0.0;
  double roundtrip = 0.0;  // sup |Phi(t, x', psi) - h|
};
// Fills psi on n_h leaves evenly spaced over one h period.
FoliationBounds foliation_coords(Foliation& f, int n_h = 8, int n_xp = 0);
// x_theta on leaf h at slice k for the given x' values (Newton on a spline of rem).
std::vector<double> leaf_graph(const Foliation& f, int k, double h, const std::vector<double>& xp);

// Null frame on one slice. Vectors are (t, x1, x2) components, one array per
// component.
struct NullFrameSlice {
  std::array<std::vector<double>, 3> L, Lbar, E;
  PhiSlice dphi;
  MetricSlice m;
};
NullFrameSlice null_frame_slice(const Foliation& f, int k);

struct FrameIdentities {
  double gLL = 0, gLE = 0, gLLbar = 0, gLbarE = 0, gEE = 0, gLbarLbar = 0;
  double dphiL = 0, dphiE = 0;
  double angle_defect = 0;  // angle between L and d_t + a_xi . d_x
};
// sup over the slab of each defect
FrameIdentities frame_identities(const Foliation& f, int slice_stride = 1);

// Lower-index metric g = -G^{-1} at one point.
void lower_metric(const MetricSlice& m, std::size_t p, double g[3][3]);

// Components of an integrand on slice k; the integrand is the sum of
// squared moduli of the components.
using ComponentProvider = std::function<std::vector<Slice>(int k)>;

// Integral of the integrand over the leaf {Phi = h} for t in the slab with
// the induced Euclidean measure. band > 0 averages over h' in [h-band, h+band].
double surface_integral(const Foliation& f, const ComponentProvider& field, double h,
                        double band = 0.0, int n_xp = 0);

void write_leaf_csv(const std::string& path, const Foliation& f, double h, int slice_stride = 8);

}  // namespace wp

#endif
