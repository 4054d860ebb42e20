#include "wavepack/rays.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "wavepack/interp.hpp"

namespace wp {

namespace {

int step_count(double t0, double t1, double dt_ray) {
  if (!(dt_ray > 0.0)) throw DomainError("flow: dt_ray must be positive");
  double span = std::abs(t1 - t0);
  return std::max(0, static_cast<int>(std::ceil(span / dt_ray - 1e-9)));
}

// y = (x1, x2, xi1, xi2)
void ham_rhs(const HalfWaveSymbol& sym, double t, const double y[4], double f[4]) {
  double ax[2], axi[2];
  sym.grad(t, y[0], y[1], y[2], y[3], ax, axi);
  f[0] = axi[0];
  f[1] = axi[1];
  f[2] = -ax[0];
  f[3] = -ax[1];
}

void rk4_ham(const HalfWaveSymbol& sym, double t, double h, double y[4]) {
  double k1[4], k2[4], k3[4], k4[4], z[4];
  ham_rhs(sym, t, y, k1);
  for (int i = 0; i < 4; ++i) z[i] = y[i] + 0.5 * h * k1[i];
  ham_rhs(sym, t + 0.5 * h, z, k2);
  for (int i = 0; i < 4; ++i) z[i] = y[i] + 0.5 * h * k2[i];
  ham_rhs(sym, t + 0.5 * h, z, k3);
  for (int i = 0; i < 4; ++i) z[i] = y[i] + h * k3[i];
  ham_rhs(sym, t + h, z, k4);
  for (int i = 0; i < 4; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

template <class S, class F>
S lagrange_at(const std::vector<S>& v, double t, F blend) {
  if (v.empty()) throw DomainError("ray: no samples");
  if (v.size() == 1) return v[0];
  double t0 = v.front().t, h = v[1].t - v[0].t;
  double u = (t - t0) / h;
  long last = static_cast<long>(v.size()) - 1;
  if (u < -1e-9 || u > last + 1e-9) throw DomainError("ray: time outside integrated span");
  long i = static_cast<long>(std::floor(u + 1e-12));
  double fr = u - i;
  if (std::abs(fr) < 1e-12 || i >= last) return v[std::min(i, last)];
  if (v.size() < 4) {
    return blend({&v[i], &v[i + 1]}, {1.0 - fr, fr}, t);
  }
  long b = std::clamp(i - 1, 0L, last - 3);
  double w[4];
  lagrange4_weights(u - b - 1, w);
  return blend({&v[b], &v[b + 1], &v[b + 2], &v[b + 3]}, {w[0], w[1], w[2], w[3]}, t);
}

}  // namespace

RayState Bicharacteristic::at(double t) const {
  return lagrange_at(samples, t,
                     [](std::initializer_list<const RayState*> s, std::initializer_list<double> w, double t) {
                       RayState r;
                       r.t = t;
                       r.x[0] = r.x[1] = r.xi[0] = r.xi[1] = 0.0;
                       auto wi = w.begin();
                       for (const RayState* p : s) {
                         double c = *wi++;
                         for (int j = 0; j < 2; ++j) {
                           r.x[j] += c * p->x[j];
                           r.xi[j] += c * p->xi[j];
                         }
                       }
                       return r;
                     });
}

SphereState SphereRay::at(double t) const {
  return lagrange_at(samples, t,
                     [](std::initializer_list<const SphereState*> s, std::initializer_list<double> w, double t) {
                       SphereState r;
                       r.t = t;
                       r.x[0] = r.x[1] = r.w[0] = r.w[1] = 0.0;
                       r.th[0][0] = r.th[0][1] = r.th[1][0] = r.th[1][1] = 0.0;
                       auto wi = w.begin();
                       for (const SphereState* p : s) {
                         double c = *wi++;
                         for (int j = 0; j < 2; ++j) {
                           r.x[j] += c * p->x[j];
                           r.w[j] += c * p->w[j];
                           for (int k = 0; k < 2; ++k) r.th[j][k] += c * p->th[j][k];
                         }
                       }
                       double nw = std::hypot(r.w[0], r.w[1]);
                       r.w[0] /= nw;
                       r.w[1] /= nw;
                       double ang = std::atan2(r.th[1][0] - r.th[0][1], r.th[0][0] + r.th[1][1]);
                       r.th[0][0] = r.th[1][1] = std::cos(ang);
                       r.th[1][0] = std::sin(ang);
                       r.th[0][1] = -std::sin(ang);
                       return r;
                     });
}

Bicharacteristic flow(const HalfWaveSymbol& sym, const double x0[2], const double xi0[2], double t0,
                      double t1, double dt_ray) {
  double n0 = std::hypot(xi0[0], xi0[1]);
  if (!(n0 > 0.0)) throw DomainError("flow: xi0 = 0");
  int N = step_count(t0, t1, dt_ray);
  double h = N > 0 ? (t1 - t0) / N : 0.0;
  Bicharacteristic b;
  b.sign = sym.sign();
  double y[4] = {x0[0], x0[1], xi0[0], xi0[1]};
  b.samples.reserve(N + 1);
  auto push = [&](double t) {
    RayState s;
    s.t = t;
    s.x[0] = y[0];
    s.x[1] = y[1];
    s.xi[0] = y[2];
    s.xi[1] = y[3];
    b.samples.push_back(s);
  };
  push(t0);
  for (int k = 0; k < N; ++k) {
    rk4_ham(sym, t0 + k * h, h, y);
    if (!(std::hypot(y[2], y[3]) >= 1e-8 * n0)) throw FlowDegeneracyError("flow: xi collapsed");
    push(k + 1 == N ? t1 : t0 + (k + 1) * h);
  }
  return b;
}

RayState flow_end(const HalfWaveSymbol& sym, const double x0[2], const double xi0[2], double t0,
                  double t1, double dt_ray) {
  double n0 = std::hypot(xi0[0], xi0[1]);
  if (!(n0 > 0.0)) throw DomainError("flow: xi0 = 0");
  int N = step_count(t0, t1, dt_ray);
  double h = N > 0 ? (t1 - t0) / N : 0.0;
  double y[4] = {x0[0], x0[1], xi0[0], xi0[1]};
  for (int k = 0; k < N; ++k) {
    rk4_ham(sym, t0 + k * h, h, y);
    if (!(std::hypot(y[2], y[3]) >= 1e-8 * n0)) throw FlowDegeneracyError("flow: xi collapsed");
  }
  RayState s;
  s.t = t1;
  s.x[0] = y[0];
  s.x[1] = y[1];
  s.xi[0] = y[2];
  s.xi[1] = y[3];
  return s;
}

namespace {

// y = (x1, x2, w1, w2, th00, th01, th10, th11)
void sphere_rhs(const HalfWaveSymbol& sym, double t, const double y[8], double f[8]) {
  double ax[2], axi[2];
  double nw = std::hypot(y[2], y[3]);
  double w0 = y[2] / nw, w1 = y[3] / nw;
  sym.grad(t, y[0], y[1], w0, w1, ax, axi);
  f[0] = axi[0];
  f[1] = axi[1];
  double pr = w0 * ax[0] + w1 * ax[1];
  f[2] = -ax[0] + pr * w0;
  f[3] = -ax[1] + pr * w1;
  // K = w a_x^T - a_x w^T is antisymmetric with K01 = w0 ax1 - ax0 w1
  double k01 = w0 * ax[1] - ax[0] * w1;
  // Theta' = -Theta K, K = [[0, k01], [-k01, 0]]
  f[4] = y[5] * k01;
  f[5] = -y[4] * k01;
  f[6] = y[7] * k01;
  f[7] = -y[6] * k01;
}

}  // namespace

SphereRay sphere_flow(const HalfWaveSymbol& sym, const double x0[2], const double w0[2], double t0,
                      double t1, double dt_ray, double lam) {
  double nw0 = std::hypot(w0[0], w0[1]);
  if (std::abs(nw0 - 1.0) > 1e-10) throw DomainError("sphere_flow: omega0 must be a unit covector");
  int N = step_count(t0, t1, dt_ray);
  double h = N > 0 ? (t1 - t0) / N : 0.0;
  SphereRay r;
  r.sign = sym.sign();
  r.lam = lam;
  double y[8] = {x0[0], x0[1], w0[0], w0[1], 1, 0, 0, 1};
  auto push = [&](double t) {
    SphereState s;
    s.t = t;
    s.x[0] = y[0];
    s.x[1] = y[1];
    s.w[0] = y[2];
    s.w[1] = y[3];
    s.th[0][0] = y[4];
    s.th[0][1] = y[5];
    s.th[1][0] = y[6];
    s.th[1][1] = y[7];
    r.samples.push_back(s);
  };
  r.samples.reserve(N + 1);
  push(t0);
  for (int k = 0; k < N; ++k) {
    double t = t0 + k * h;
    double k1[8], k2[8], k3[8], k4[8], z[8];
    sphere_rhs(sym, t, y, k1);
    for (int i = 0; i < 8; ++i) z[i] = y[i] + 0.5 * h * k1[i];
    sphere_rhs(sym, t + 0.5 * h, z, k2);
    for (int i = 0; i < 8; ++i) z[i] = y[i] + 0.5 * h * k2[i];
    sphere_rhs(sym, t + 0.5 * h, z, k3);
    for (int i = 0; i < 8; ++i) z[i] = y[i] + h * k3[i];
    sphere_rhs(sym, t + h, z, k4);
    for (int i = 0; i < 8; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    double nw = std::hypot(y[2], y[3]);
    if (!(nw > 1e-8)) throw FlowDegeneracyError("sphere_flow: omega collapsed");
    y[2] /= nw;
    y[3] /= nw;
    // project Theta back onto the rotation group
    double ang = std::atan2(y[6] - y[5], y[4] + y[7]);
    y[4] = y[7] = std::cos(ang);
    y[6] = std::sin(ang);
    y[5] = -std::sin(ang);
    push(k + 1 == N ? t1 : t0 + (k + 1) * h);
  }
  return r;
}

JacobianProbe jacobian_probe(const HalfWaveSymbol& sym, const double x0[2], const double xi0[2],
                             double t, double h_fd, double dt_ray) {
  if (!(h_fd >= 1e-6 && h_fd <= 1e-3)) throw DomainError("jacobian_probe: h_fd must lie in [1e-6, 1e-3]");
  JacobianProbe p;
  for (int c = 0; c < 4; ++c) {
    double a[4] = {x0[0], x0[1], xi0[0], xi0[1]};
    double b[4] = {x0[0], x0[1], xi0[0], xi0[1]};
    a[c] += h_fd;
    b[c] -= h_fd;
    RayState ra = flow_end(sym, a, a + 2, 0.0, t, dt_ray);
    RayState rb = flow_end(sym, b, b + 2, 0.0, t, dt_ray);
    double fa[4] = {ra.x[0], ra.x[1], ra.xi[0], ra.xi[1]};
    double fb[4] = {rb.x[0], rb.x[1], rb.xi[0], rb.xi[1]};
    for (int r = 0; r < 4; ++r) p.J(r, c) = (fa[r] - fb[r]) / (2.0 * h_fd);
  }
  auto opnorm = [&](int r, int c) {
    Eigen::Matrix2d B = p.J.block<2, 2>(r, c);
    return Eigen::JacobiSVD<Eigen::Matrix2d>(B).singularValues()(0);
  };
  p.xx = opnorm(0, 0);
  p.xxi = opnorm(0, 2);
  p.xix = opnorm(2, 0);
  p.xixi = opnorm(2, 2);
  return p;
}

void write_rays_csv(const std::string& path, const std::vector<Bicharacteristic>& rays) {
  std::ofstream o(path);
  if (!o) throw std::runtime_error("write_rays_csv: cannot open " + path);
  o << "ray,t,x1,x2,xi1,xi2\n";
  char buf[256];
  for (std::size_t r = 0; r < rays.size(); ++r)
    for (const auto& s : rays[r].samples) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", r, s.t, s.x[0], s.x[1],
                    s.xi[0], s.xi[1]);
      o << buf;
    }
}

void write_sphere_rays_csv(const std::string& path, const std::vector<SphereRay>& rays) {
  std::ofstream o(path);
  if (!o) throw std::runtime_error("write_sphere_rays_csv: cannot open " + path);
  o << "ray,t,x1,x2,w1,w2,th11,th12,th21,th22\n";
  char buf[400];
  for (std::size_t r = 0; r < rays.size(); ++r)
    for (const auto& s : rays[r].samples) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r,
                    s.t, s.x[0], s.x[1], s.w[0], s.w[1], s.th[0][0], s.th[0][1], s.th[1][0],
                    s.th[1][1]);
      o << buf;
    }
}

}  // namespace wp
