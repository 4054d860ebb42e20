#ifndef WAVEPACK_RAYS_HPP
#define WAVEPACK_RAYS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "wavepack/metric.hpp"

namespace wp {

struct FlowDegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RayState {
  double t = 0.0;
  double x[2] = {0, 0};
  double xi[2] = {0, 0};
};

// Samples of (x_t, xi_t) along x' = a_xi, xi' = -a_x. Positions are not
// wrapped to the torus.
struct Bicharacteristic {
  int sign = 1;
  std::vector<RayState> samples;
  // cubic Lagrange interpolation between samples
  RayState at(double t) const;
};

struct SphereState {
  double t = 0.0;
  double x[2] = {0, 0};
  double w[2] = {1, 0};
  // rotation with Theta w(t) = w(0)
  double th[2][2] = {{1, 0}, {0, 1}};
};

struct SphereRay {
  int sign = 1;
  double lam = 0.0;
  std::vector<SphereState> samples;
  SphereState at(double t) const;
};

// Fixed-step RK4 from t0 to t1 (either direction); the step is the largest
// h <= dt_ray that divides the interval evenly.
Bicharacteristic flow(const HalfWaveSymbol& sym, const double x0[2], const double xi0[2], double t0,
                      double t1, double dt_ray);
// endpoint only, no sample storage
RayState flow_end(const HalfWaveSymbol& sym, const double x0[2], const double xi0[2], double t0,
                  double t1, double dt_ray);

// Unit-covector flow w' = -a_x + <w, a_x> w with the rotation frame
// Theta' = -Theta (w a_x^T - a_x w^T); w is renormalized after every step.
SphereRay sphere_flow(const HalfWaveSymbol& sym, const double x0[2], const double w0[2], double t0,
                      double t1, double dt_ray, double lam = 0.0);

struct JacobianProbe {
  Eigen::Matrix4d J;
  // operator norms of the 2x2 blocks d x/d x0, d x/d xi0, d xi/d x0, d xi/d xi0
  double xx = 0, xxi = 0, xix = 0, xixi = 0;
};
// Central finite-difference Jacobian of (x_t, xi_t) with respect to (x0, xi0).
JacobianProbe jacobian_probe(const HalfWaveSymbol& sym, const double x0[2], const double xi0[2],
                             double t, double h_fd, double dt_ray = 1.0 / 256.0);

void write_rays_csv(const std::string& path, const std::vector<Bicharacteristic>& rays);
void write_sphere_rays_csv(const std::string& path, const std::vector<SphereRay>& rays);

}  // namespace wp

#endif
