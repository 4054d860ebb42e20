#include "wavepack/eikonal.hpp"

#include <algorithm>
#include <cmath>

#include "wavepack/parallel.hpp"

namespace wp {

std::array<int, 2> canonical_direction(int k) {
  static const int base[8][2] = {{1, 0}, {5, 2}, {1, 1}, {2, 5}, {0, 1}, {-2, 5}, {-1, 1}, {-5, 2}};
  k = ((k % 16) + 16) % 16;
  int s = k < 8 ? 1 : -1;
  return {s * base[k % 8][0], s * base[k % 8][1]};
}

double Foliation::h_period() const { return grid.domain_len / std::hypot(e[0], e[1]); }
double Foliation::xp_period() const { return grid.domain_len * std::hypot(e[0], e[1]); }

double Foliation::phi(int k, int i, int j) const {
  const double dx = grid.dx();
  return (i * theta[0] + j * theta[1]) * dx + rem_slice(k)[static_cast<std::size_t>(i) * grid.n + j];
}

namespace {

int gcd(int a, int b) {
  a = std::abs(a);
  b = std::abs(b);
  while (b) {
    int t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Zero-padded spectral upsampling from m x m samples to B-spline
// coefficients on the n x n grid.
std::vector<double> upsample_spline_coef(const std::vector<double>& f, int m, int n) {
  const std::size_t Pm = static_cast<std::size_t>(m) * m, Pn = static_cast<std::size_t>(n) * n;
  std::vector<cplx> z(f.begin(), f.end()), hat(Pm), big(Pn, 0.0), out(Pn);
  fft_plan(m, m).forward(z.data(), hat.data());
  std::vector<double> sym(n);
  for (int i = 0; i < n; ++i) sym[i] = (4.0 + 2.0 * std::cos(kTwoPi * i / n)) / 6.0;
  for (int i = 0; i < m; ++i) {
    int fi = freq_index(i, m);
    if (2 * std::abs(fi) == m) continue;
    int bi = (fi + n) % n;
    for (int j = 0; j < m; ++j) {
      int fj = freq_index(j, m);
      if (2 * std::abs(fj) == m) continue;
      int bj = (fj + n) % n;
      big[static_cast<std::size_t>(bi) * n + bj] = hat[static_cast<std::size_t>(i) * m + j] / (sym[bi] * sym[bj]);
    }
  }
  fft_plan(n, n).backward(big.data(), out.data());
  std::vector<double> r(Pn);
  for (std::size_t p = 0; p < Pn; ++p) r[p] = out[p].real();
  return r;
}

// min over the m grid of det(I + grad D)
double min_jacobian(const std::vector<double>& d1, const std::vector<double>& d2, int m, double len) {
  Slice a(d1.begin(), d1.end()), b(d2.begin(), d2.end());
  SliceDerivs g1 = spectral_derivs(a, m, len, false), g2 = spectral_derivs(b, m, len, false);
  double mn = 1e300;
  for (std::size_t p = 0; p < a.size(); ++p) {
    double det = (1.0 + g1.d1[p].real()) * (1.0 + g2.d2[p].real()) - g1.d2[p].real() * g2.d1[p].real();
    mn = std::min(mn, det);
  }
  return mn;
}

}  // namespace

Foliation solve_eikonal(const HalfWaveSymbol& sym, std::array<int, 2> e, const GridSpec& grid,
                        const EikonalOptions& opt) {
  grid.validate();
  if (e[0] == 0 && e[1] == 0) throw DomainError("solve_eikonal: zero direction");
  if (gcd(e[0], e[1]) != 1) throw DomainError("solve_eikonal: direction must be a primitive integer vector");
  const int n = grid.n;
  const int m = opt.ray_grid > 0 ? opt.ray_grid : n / 4;
  if (m > n || (m & (m - 1)) != 0 || m < 8) throw DomainError("solve_eikonal: ray grid must be a power of two in [8, n]");
  Foliation f(sym);
  f.grid = grid;
  f.e[0] = e[0];
  f.e[1] = e[1];
  double ne = std::hypot(e[0], e[1]);
  f.theta[0] = e[0] / ne;
  f.theta[1] = e[1] / ne;
  f.theta_perp[0] = -f.theta[1];
  f.theta_perp[1] = f.theta[0];
  f.sign = sym.sign();
  const std::size_t P = grid.points(), Pm = static_cast<std::size_t>(m) * m;
  f.rem.assign(P * grid.nt, 0.0);

  const double L = grid.domain_len, hm = L / m, hn = L / n;
  std::vector<RayState> ray(Pm);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      RayState& r = ray[static_cast<std::size_t>(i) * m + j];
      r.t = grid.t0;
      r.x[0] = i * hm;
      r.x[1] = j * hm;
      r.xi[0] = f.theta[0];
      r.xi[1] = f.theta[1];
    }
  const double dt_ray = grid.dt / std::max(1, opt.substeps);
  std::vector<double> d1(Pm), d2(Pm);
  for (int k = 1; k < grid.nt; ++k) {
    const double ta = grid.time(k - 1), tb = grid.time(k);
    parallel_for(Pm, [&](std::size_t p) { ray[p] = flow_end(sym, ray[p].x, ray[p].xi, ta, tb, dt_ray); });
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        std::size_t p = static_cast<std::size_t>(i) * m + j;
        d1[p] = ray[p].x[0] - i * hm;
        d2[p] = ray[p].x[1] - j * hm;
      }
    double mj = min_jacobian(d1, d2, m, L);
    if (!(mj > 0.5)) throw CausticError("solve_eikonal: characteristic map degenerates", tb);
    PeriodicSpline2<double> s1, s2;
    s1.set_coefficients(upsample_spline_coef(d1, m, n), n, L);
    s2.set_coefficients(upsample_spline_coef(d2, m, n), n, L);
    double* rem = f.rem.data() + static_cast<std::size_t>(k) * P;
    std::vector<int> fail(n, 0);
    parallel_for(n, [&](std::size_t ii) {
      int i = static_cast<int>(ii);
      for (int j = 0; j < n; ++j) {
        double x1 = i * hn, x2 = j * hn;
        double y1 = x1 - s1.value(x1, x2), y2 = x2 - s2.value(x1, x2);
        double D1 = 0, D2 = 0;
        int it = 0;
        for (; it < 50; ++it) {
          D1 = s1.value(y1, y2);
          D2 = s2.value(y1, y2);
          double z1 = x1 - D1, z2 = x2 - D2;
          double ch = std::hypot(z1 - y1, z2 - y2);
          y1 = z1;
          y2 = z2;
          if (ch <= 1e-15 * L) break;
        }
        if (it == 50) fail[i] = 1;
        D1 = s1.value(y1, y2);
        D2 = s2.value(y1, y2);
        rem[static_cast<std::size_t>(i) * n + j] = -(D1 * f.theta[0] + D2 * f.theta[1]);
      }
    });
    if (*std::max_element(fail.begin(), fail.end()))
      throw CausticError("solve_eikonal: characteristic map inversion did not converge", tb);
  }
  return f;
}

namespace {

// 4th-order (2nd if nt < 5) time derivative of rem at slice k
std::vector<double> rem_dt(const Foliation& f, int k) {
  const GridSpec& g = f.grid;
  const int nt = g.nt;
  const std::size_t P = g.points();
  std::vector<double> out(P, 0.0);
  auto acc = [&](int s, double c) {
    const double* r = f.rem_slice(s);
    for (std::size_t p = 0; p < P; ++p) out[p] += c * r[p];
  };
  if (nt >= 5) {
    const double c = 1.0 / (12.0 * g.dt);
    if (k >= 2 && k <= nt - 3) {
      acc(k - 2, c);
      acc(k - 1, -8 * c);
      acc(k + 1, 8 * c);
      acc(k + 2, -c);
    } else {
      static const double w0[5] = {-25, 48, -36, 16, -3};
      static const double w1[5] = {-3, -10, 18, -6, 1};
      const double* w = (k == 0 || k == nt - 1) ? w0 : w1;
      bool tail = k >= nt - 2;
      for (int q = 0; q < 5; ++q) acc(tail ? nt - 1 - q : q, (tail ? -c : c) * w[q]);
    }
  } else {
    const double c = 1.0 / (2.0 * g.dt);
    if (k == 0) {
      acc(0, -3 * c);
      acc(1, 4 * c);
      acc(2, -c);
    } else if (k == nt - 1) {
      acc(nt - 1, 3 * c);
      acc(nt - 2, -4 * c);
      acc(nt - 3, c);
    } else {
      acc(k + 1, c);
      acc(k - 1, -c);
    }
  }
  return out;
}

std::vector<double> rem_dtt(const Foliation& f, int k) {
  const GridSpec& g = f.grid;
  const int nt = g.nt;
  const std::size_t P = g.points();
  std::vector<double> out(P, 0.0);
  auto acc = [&](int s, double c) {
    const double* r = f.rem_slice(s);
    for (std::size_t p = 0; p < P; ++p) out[p] += c * r[p];
  };
  const double c = 1.0 / (g.dt * g.dt);
  if (nt == 3) {
    acc(0, c);
    acc(1, -2 * c);
    acc(2, c);
  } else if (k == 0) {
    acc(0, 2 * c);
    acc(1, -5 * c);
    acc(2, 4 * c);
    acc(3, -c);
  } else if (k == nt - 1) {
    acc(nt - 1, 2 * c);
    acc(nt - 2, -5 * c);
    acc(nt - 3, 4 * c);
    acc(nt - 4, -c);
  } else {
    acc(k + 1, c);
    acc(k, -2 * c);
    acc(k - 1, c);
  }
  return out;
}

Slice to_slice(const double* r, std::size_t P) { return Slice(r, r + P); }

MetricCoeffs coeffs_at(const MetricSlice& m, std::size_t p) {
  MetricCoeffs c;
  c.b[0] = m.b1[p];
  c.b[1] = m.b2[p];
  c.c[0] = m.c11[p];
  c.c[1] = m.c12[p];
  c.c[2] = m.c22[p];
  return c;
}

}  // namespace

PhiSlice phi_derivs(const Foliation& f, int k) {
  const GridSpec& g = f.grid;
  const std::size_t P = g.points();
  PhiSlice s;
  s.phit = rem_dt(f, k);
  SliceDerivs d = spectral_derivs(to_slice(f.rem_slice(k), P), g.n, g.domain_len, false);
  s.p1.resize(P);
  s.p2.resize(P);
  for (std::size_t p = 0; p < P; ++p) {
    s.p1[p] = f.theta[0] + d.d1[p].real();
    s.p2[p] = f.theta[1] + d.d2[p].real();
  }
  return s;
}

EikonalReport eikonal_diagnostics(const Foliation& f) {
  const GridSpec& g = f.grid;
  const std::size_t P = g.points();
  std::vector<EikonalReport> per(g.nt);
  parallel_for(g.nt, [&](std::size_t kk) {
    int k = static_cast<int>(kk);
    std::vector<double> rt = rem_dt(f, k), rtt = rem_dtt(f, k);
    SliceDerivs d = spectral_derivs(to_slice(f.rem_slice(k), P), g.n, g.domain_len, true);
    Slice rts(rt.begin(), rt.end());
    SliceDerivs dt_ = spectral_derivs(rts, g.n, g.domain_len, false);
    MetricSlice m = f.sym.metric().slice(g.time(k), g.n);
    EikonalReport r;
    r.min_dtheta = 1e300;
    for (std::size_t p = 0; p < P; ++p) {
      double p1 = f.theta[0] + d.d1[p].real(), p2 = f.theta[1] + d.d2[p].real();
      MetricCoeffs c = coeffs_at(m, p);
      double a = HalfWaveSymbol::eval_coeffs(c, f.sign, p1, p2);
      r.residual = std::max(r.residual, std::abs(rt[p] + a));
      double G = rt[p] * rt[p] + 2.0 * rt[p] * (c.b[0] * p1 + c.b[1] * p2) -
                 (c.c[0] * p1 * p1 + 2.0 * c.c[1] * p1 * p2 + c.c[2] * p2 * p2);
      r.null_grad = std::max(r.null_grad, std::abs(G));
      double h11 = d.d11[p].real(), h12 = d.d12[p].real(), h22 = d.d22[p].real();
      double ht1 = dt_.d1[p].real(), ht2 = dt_.d2[p].real();
      double fro = std::sqrt(rtt[p] * rtt[p] + 2 * ht1 * ht1 + 2 * ht2 * ht2 + h11 * h11 + 2 * h12 * h12 + h22 * h22);
      r.hess = std::max(r.hess, fro);
      r.min_dtheta = std::min(r.min_dtheta, p1 * f.theta[0] + p2 * f.theta[1]);
    }
    per[k] = r;
  });
  EikonalReport out;
  out.min_dtheta = 1e300;
  for (const auto& r : per) {
    out.residual = std::max(out.residual, r.residual);
    out.null_grad = std::max(out.null_grad, r.null_grad);
    out.hess = std::max(out.hess, r.hess);
    out.min_dtheta = std::min(out.min_dtheta, r.min_dtheta);
  }
  return out;
}

namespace {

int default_nxp(const Foliation& f) {
  double want = f.grid.n * std::hypot(f.e[0], f.e[1]);
  int q = 16;
  while (q < want - 1e-9) q *= 2;
  return q;
}

PeriodicSpline2<double> rem_spline(const Foliation& f, int k) {
  return PeriodicSpline2<double>(f.rem_slice(k), f.grid.n, f.grid.domain_len);
}

// Solve s + rem(x' theta_perp + s theta) = h for s.
double solve_leaf(const Foliation& f, const PeriodicSpline2<double>& sp, double xp, double h) {
  double s = h;
  for (int it = 0; it < 60; ++it) {
    double x1 = xp * f.theta_perp[0] + s * f.theta[0];
    double x2 = xp * f.theta_perp[1] + s * f.theta[1];
    double g1, g2;
    double r = sp.value_grad(x1, x2, g1, g2);
    double F = s + r - h;
    double dF = 1.0 + g1 * f.theta[0] + g2 * f.theta[1];
    if (!(dF >= 0.5)) throw DegenerateFoliationError("foliation: d_theta Phi below 1/2");
    double ds = F / dF;
    s -= ds;
    if (std::abs(ds) <= 1e-15 * (1.0 + std::abs(s))) return s;
  }
  throw DegenerateFoliationError("foliation: leaf root finder did not converge");
}

}  // namespace

std::vector<double> leaf_graph(const Foliation& f, int k, double h, const std::vector<double>& xp) {
  auto sp = rem_spline(f, k);
  std::vector<double> s(xp.size());
  for (std::size_t q = 0; q < xp.size(); ++q) s[q] = solve_leaf(f, sp, xp[q], h);
  return s;
}

FoliationBounds foliation_coords(Foliation& f, int n_h, int n_xp) {
  EikonalReport rep = eikonal_diagnostics(f);
  if (!(rep.min_dtheta >= 0.5)) throw DegenerateFoliationError("foliation_coords: d_theta Phi below 1/2");
  const GridSpec& g = f.grid;
  f.n_h = n_h;
  f.n_xp = n_xp > 0 ? n_xp : default_nxp(f);
  const double Hp = f.h_period(), Xp = f.xp_period();
  f.h_values.resize(n_h);
  for (int l = 0; l < n_h; ++l) f.h_values[l] = l * Hp / n_h;
  std::vector<double> xp(f.n_xp);
  for (int q = 0; q < f.n_xp; ++q) xp[q] = q * Xp / f.n_xp;
  f.psi.assign(static_cast<std::size_t>(g.nt) * n_h * f.n_xp, 0.0);
  std::vector<double> rt(g.nt, 0.0);
  parallel_for(g.nt, [&](std::size_t kk) {
    int k = static_cast<int>(kk);
    auto sp = rem_spline(f, k);
    double worst = 0.0;
    for (int l = 0; l < n_h; ++l) {
      double* row = f.psi.data() + (static_cast<std::size_t>(k) * n_h + l) * f.n_xp;
      for (int q = 0; q < f.n_xp; ++q) {
        double s = solve_leaf(f, sp, xp[q], f.h_values[l]);
        row[q] = s;
        double x1 = xp[q] * f.theta_perp[0] + s * f.theta[0];
        double x2 = xp[q] * f.theta_perp[1] + s * f.theta[1];
        worst = std::max(worst, std::abs(s + sp.value(x1, x2) - f.h_values[l]));
      }
    }
    rt[k] = worst;
  });
  FoliationBounds b;
  b.roundtrip = *std::max_element(rt.begin(), rt.end());
  const int nx = f.n_xp;
  const Fft& F = fft_plan(nx);
  std::vector<cplx> a(nx), ah(nx);
  for (int k = 0; k < g.nt; ++k) {
    for (int l = 0; l < n_h; ++l) {
      const double* row = f.psi.data() + (static_cast<std::size_t>(k) * n_h + l) * nx;
      for (int q = 0; q < nx; ++q) a[q] = row[q];
      F.forward(a.data(), ah.data());
      for (int q = 0; q < nx; ++q) {
        int fq = freq_index(q, nx);
        ah[q] *= (2 * std::abs(fq) == nx) ? cplx(0) : cplx(0, fq * kTwoPi / Xp);
      }
      F.backward(ah.data(), a.data());
      for (int q = 0; q < nx; ++q) b.psi_xp_sup = std::max(b.psi_xp_sup, std::abs(a[q].real()));
      if (g.nt >= 3) {
        int k0 = k == 0 ? 0 : (k == g.nt - 1 ? k - 2 : k - 1);
        const double* r0 = f.psi.data() + (static_cast<std::size_t>(k0) * n_h + l) * nx;
        const double* r2 = f.psi.data() + (static_cast<std::size_t>(k0 + 2) * n_h + l) * nx;
        const double* r1 = f.psi.data() + (static_cast<std::size_t>(k0 + 1) * n_h + l) * nx;
        for (int q = 0; q < nx; ++q) {
          double d;
          if (k == 0) d = (-3 * r0[q] + 4 * r1[q] - r2[q]) / (2 * g.dt);
          else if (k == g.nt - 1) d = (3 * r2[q] - 4 * r1[q] + r0[q]) / (2 * g.dt);
          else d = (r2[q] - r0[q]) / (2 * g.dt);
          b.psi_t_sup = std::max(b.psi_t_sup, std::abs(d));
        }
      }
    }
  }
  return b;
}

}  // namespace wp
