#include "wavepack/packets.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "packet_eval.hpp"
#include "wavepack/parallel.hpp"

namespace wp {

namespace {

double rho(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 1.4) return 0.0;
  return 1.0 - smooth_step((x - 1.0) / 0.4);
}

int fft_size(int m) {
  for (int q = std::max(1, m);; ++q) {
    int r = q;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return q;
  }
}

double wrap_sym(double d, double L) {
  d = std::fmod(d, L);
  if (d >= 0.5 * L) d -= L;
  if (d < -0.5 * L) d += L;
  return d;
}

}  // namespace

double radial_sq(double r, double lam) {
  if (lam <= 1.0) return rho(r);
  return rho(r / lam) - rho(2.0 * r / lam);
}

int direction_count(double lam) { return 4 * static_cast<int>(std::ceil(std::sqrt(lam) - 1e-12)); }

double angular_sq(double angle, int nu, int M) {
  double s = M * angle / kTwoPi - nu;
  s = std::fmod(s, static_cast<double>(M));
  if (s > 0.5 * M) s -= M;
  if (s <= -0.5 * M) s += M;
  s = std::abs(s);
  return s < 1.0 ? 1.0 - smooth_step(s) : 0.0;
}

double partition_sum(double xi1, double xi2, double lam_max) {
  double r = std::hypot(xi1, xi2);
  double total = rho(r);
  if (r == 0.0) return total;
  double ang = std::atan2(xi2, xi1);
  for (double lam = 2.0; lam <= lam_max; lam *= 2.0) {
    double rs = radial_sq(r, lam);
    if (rs == 0.0) continue;
    int M = direction_count(lam);
    double as = 0.0;
    for (int nu = 0; nu < M; ++nu) as += angular_sq(ang, nu, M);
    total += rs * as;
  }
  return total;
}

std::size_t PacketFrame::num_tubes() const {
  std::size_t s = 0;
  for (const auto& w : win) s += w.lattice_size();
  return s;
}

PacketFrame build_frame(double lam, const GridSpec& grid) {
  grid.validate();
  if (!is_dyadic(lam)) throw DomainError("build_frame: lam must be dyadic");
  const double du = grid.dual_unit();
  if (lam < 16.0 || lam > (grid.n / 4) * du)
    throw ResolutionError("build_frame: need 16 <= lam <= n/4");
  PacketFrame fr;
  fr.lam = lam;
  fr.grid = grid;
  fr.M = direction_count(lam);
  const int K = static_cast<int>(std::ceil(1.4 * lam / du)) + 1;
  fr.win.resize(fr.M);
  parallel_for(fr.M, [&](std::size_t nu) {
    PacketWindow& w = fr.win[nu];
    w.angle = kTwoPi * static_cast<double>(nu) / fr.M;
    w.omega[0] = std::cos(w.angle);
    w.omega[1] = std::sin(w.angle);
    int mn[2] = {1 << 30, 1 << 30}, mx[2] = {-(1 << 30), -(1 << 30)};
    std::vector<std::array<int, 2>> pts;
    std::vector<double> vals;
    for (int k1 = -K; k1 <= K; ++k1)
      for (int k2 = -K; k2 <= K; ++k2) {
        double x1 = k1 * du, x2 = k2 * du;
        double r = std::hypot(x1, x2);
        if (r == 0.0) continue;
        double rs = radial_sq(r, lam);
        if (rs <= 0.0) continue;
        double as = angular_sq(std::atan2(x2, x1), static_cast<int>(nu), fr.M);
        if (as <= 0.0) continue;
        pts.push_back({k1, k2});
        vals.push_back(std::sqrt(rs * as));
        mn[0] = std::min(mn[0], k1);
        mn[1] = std::min(mn[1], k2);
        mx[0] = std::max(mx[0], k1);
        mx[1] = std::max(mx[1], k2);
      }
    for (int a = 0; a < 2; ++a) {
      w.xc[a] = static_cast<int>(std::lround(0.5 * (mn[a] + mx[a])));
      w.lo[a] = mn[a] - w.xc[a];
      w.N[a] = fft_size(mx[a] - mn[a] + 1);
    }
    w.h.assign(w.lattice_size(), 0.0);
    w.vfac.assign(w.lattice_size(), 0.0);
    for (std::size_t q = 0; q < pts.size(); ++q) {
      int a = pts[q][0] - w.xc[0] - w.lo[0], b = pts[q][1] - w.xc[1] - w.lo[1];
      std::size_t idx = static_cast<std::size_t>(a) * w.N[1] + b;
      w.h[idx] = vals[q];
      double pr = du * (pts[q][0] * w.omega[0] + pts[q][1] * w.omega[1]);
      w.vfac[idx] = lam / pr;
    }
    w.amp = 1.0 / (grid.domain_len * std::sqrt(static_cast<double>(w.lattice_size())));
  });
  return fr;
}

double mass_outside(const Slice& f, int n, double len, double lo, double hi) {
  Slice F(f.size());
  fft_plan(n, n).forward(f.data(), F.data());
  const double du = kTwoPi / len;
  double out = 0.0, tot = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double r = du * std::hypot(freq_index(i, n), freq_index(j, n));
      double e = std::norm(F[static_cast<std::size_t>(i) * n + j]);
      tot += e;
      if (r < lo || r > hi) out += e;
    }
  return tot > 0.0 ? std::sqrt(out / tot) : 0.0;
}

Slice restrict_to_core(const PacketFrame& fr, const Slice& f) {
  const double lo = 0.7 * fr.lam, hi = fr.lam;
  return apply_multiplier(f, fr.grid.n, fr.grid.domain_len, [lo, hi](double a, double b) {
    double r = std::hypot(a, b);
    return (r >= lo && r <= hi) ? 1.0 : 0.0;
  });
}

double TubeCoefficients::l2sq() const {
  std::vector<double> per(c.size());
  for (std::size_t w = 0; w < c.size(); ++w) {
    std::vector<double> a(c[w].size());
    for (std::size_t q = 0; q < a.size(); ++q) a[q] = std::norm(c[w][q]);
    per[w] = pairwise_sum(a.data(), a.size());
  }
  return pairwise_sum(per.data(), per.size());
}

TubeCoefficients analyze(const PacketFrame& fr, const Slice& f) {
  const int n = fr.grid.n;
  const double L = fr.grid.domain_len;
  Slice F(f.size());
  fft_plan(n, n).forward(f.data(), F.data());
  TubeCoefficients tc;
  tc.lam = fr.lam;
  tc.c.resize(fr.win.size());
  for (const auto& w : fr.win) tc.dims.push_back({w.N[0], w.N[1]});
  parallel_for(fr.win.size(), [&](std::size_t nu) {
    const PacketWindow& w = fr.win[nu];
    const int N1 = w.N[0], N2 = w.N[1];
    std::vector<cplx> g(w.lattice_size(), 0.0), out(w.lattice_size());
    for (int a = 0; a < N1; ++a)
      for (int b = 0; b < N2; ++b) {
        double hv = w.h[static_cast<std::size_t>(a) * N2 + b];
        if (hv == 0.0) continue;
        int z1 = w.lo[0] + a, z2 = w.lo[1] + b;
        int k1 = w.xc[0] + z1, k2 = w.xc[1] + z2;
        cplx Fv = F[static_cast<std::size_t>((k1 % n + n) % n) * n + (k2 % n + n) % n];
        g[static_cast<std::size_t>((z1 % N1 + N1) % N1) * N2 + (z2 % N2 + N2) % N2] = hv * Fv;
      }
    fft_plan(N1, N2).backward(g.data(), out.data());
    const double s = w.amp * L * L;
    for (int i = 0; i < N1; ++i)
      for (int j = 0; j < N2; ++j) {
        double ph = kTwoPi * (static_cast<double>(w.xc[0]) * i / N1 + static_cast<double>(w.xc[1]) * j / N2);
        out[static_cast<std::size_t>(i) * N2 + j] *= s * std::exp(cplx(0, ph));
      }
    tc.c[nu] = std::move(out);
  });
  return tc;
}

Slice synthesize(const PacketFrame& fr, const TubeCoefficients& tc) {
  if (tc.c.size() != fr.win.size()) throw DomainError("synthesize: coefficient layout does not match the frame");
  const int n = fr.grid.n;
  std::vector<std::vector<cplx>> spec(fr.win.size());
  parallel_for(fr.win.size(), [&](std::size_t nu) {
    const PacketWindow& w = fr.win[nu];
    const int N1 = w.N[0], N2 = w.N[1];
    if (tc.c[nu].size() != w.lattice_size()) throw DomainError("synthesize: lattice size mismatch");
    std::vector<cplx> a(w.lattice_size()), ah(w.lattice_size());
    for (int i = 0; i < N1; ++i)
      for (int j = 0; j < N2; ++j) {
        double ph = kTwoPi * (static_cast<double>(w.xc[0]) * i / N1 + static_cast<double>(w.xc[1]) * j / N2);
        a[static_cast<std::size_t>(i) * N2 + j] = tc.c[nu][static_cast<std::size_t>(i) * N2 + j] * std::exp(cplx(0, -ph));
      }
    fft_plan(N1, N2).forward(a.data(), ah.data());
    spec[nu] = std::move(ah);
  });
  Slice F(static_cast<std::size_t>(n) * n, 0.0), out(F.size());
  for (std::size_t nu = 0; nu < fr.win.size(); ++nu) {
    const PacketWindow& w = fr.win[nu];
    const int N1 = w.N[0], N2 = w.N[1];
    const double s = w.amp * N1 * N2;
    for (int a = 0; a < N1; ++a)
      for (int b = 0; b < N2; ++b) {
        double hv = w.h[static_cast<std::size_t>(a) * N2 + b];
        if (hv == 0.0) continue;
        int z1 = w.lo[0] + a, z2 = w.lo[1] + b;
        int k1 = w.xc[0] + z1, k2 = w.xc[1] + z2;
        F[static_cast<std::size_t>((k1 % n + n) % n) * n + (k2 % n + n) % n] +=
            s * hv * spec[nu][static_cast<std::size_t>((z1 % N1 + N1) % N1) * N2 + (z2 % N2 + N2) % N2];
      }
  }
  fft_plan(n, n).backward(F.data(), out.data());
  return out;
}

Tube make_tube(const PacketFrame& fr, const HalfWaveSymbol& sym, int omega, int i, int j,
               double t_max, double dt_ray) {
  if (omega < 0 || omega >= static_cast<int>(fr.win.size())) throw DomainError("make_tube: bad direction index");
  const PacketWindow& w = fr.win[omega];
  if (i < 0 || j < 0 || i >= w.N[0] || j >= w.N[1]) throw DomainError("make_tube: bad lattice index");
  Tube T;
  T.omega = omega;
  T.i = i;
  T.j = j;
  T.sign = sym.sign();
  const double L = fr.grid.domain_len;
  T.x[0] = L * i / w.N[0];
  T.x[1] = L * j / w.N[1];
  MetricCoeffs m = sym.metric().at(0.0, T.x[0], T.x[1]);
  T.a0 = 0.5 * std::abs(HalfWaveSymbol::eval_coeffs(m, 1, w.omega[0], w.omega[1]) -
                        HalfWaveSymbol::eval_coeffs(m, -1, w.omega[0], w.omega[1]));
  T.ray = sphere_flow(sym, T.x, w.omega, 0.0, t_max, dt_ray, fr.lam);
  return T;
}

Tube make_tube(const PacketFrame& fr, const MetricField& g, int omega, int i, int j, int sign,
               double t_max, double dt_ray) {
  HalfWaveSymbol sym(g, sign >= 0 ? 1 : -1, dyadic_floor(std::sqrt(fr.lam)));
  return make_tube(fr, sym, omega, i, j, t_max, dt_ray);
}

namespace detail {

// z = Theta (y - x_T(t)) with the torus-minimal displacement
void local_coords(const PacketFrame& fr, const SphereState& s, double y1, double y2, double z[2]) {
  const double L = fr.grid.domain_len;
  double d1 = wrap_sym(y1 - s.x[0], L), d2 = wrap_sym(y2 - s.x[1], L);
  z[0] = s.th[0][0] * d1 + s.th[0][1] * d2;
  z[1] = s.th[1][0] * d1 + s.th[1][1] * d2;
}

cplx window_sum(const PacketFrame& fr, const PacketWindow& w, const double z[2], Generator gen,
                std::vector<cplx>& e1, std::vector<cplx>& e2) {
  const double du = fr.grid.dual_unit();
  const int N1 = w.N[0], N2 = w.N[1];
  e1.resize(N1);
  e2.resize(N2);
  cplx s1 = std::exp(cplx(0, du * z[0])), s2 = std::exp(cplx(0, du * z[1]));
  cplx c1 = std::exp(cplx(0, du * w.lo[0] * z[0])), c2 = std::exp(cplx(0, du * w.lo[1] * z[1]));
  // direct exponentials every 16 steps keep the recurrence error small
  for (int a = 0; a < N1; ++a) {
    if (a % 16 == 0) c1 = std::exp(cplx(0, du * (w.lo[0] + a) * z[0]));
    e1[a] = c1;
    c1 *= s1;
  }
  for (int b = 0; b < N2; ++b) {
    if (b % 16 == 0) c2 = std::exp(cplx(0, du * (w.lo[1] + b) * z[1]));
    e2[b] = c2;
    c2 *= s2;
  }
  cplx total = 0.0;
  for (int a = 0; a < N1; ++a) {
    const double* hr = w.h.data() + static_cast<std::size_t>(a) * N2;
    const double* vr = w.vfac.data() + static_cast<std::size_t>(a) * N2;
    cplx row = 0.0;
    if (gen == Generator::phi) {
      for (int b = 0; b < N2; ++b)
        if (hr[b] != 0.0) row += hr[b] * e2[b];
    } else {
      for (int b = 0; b < N2; ++b)
        if (hr[b] != 0.0) row += hr[b] * vr[b] * e2[b];
    }
    total += e1[a] * row;
  }
  total *= std::exp(cplx(0, du * (w.xc[0] * z[0] + w.xc[1] * z[1])));
  if (gen == Generator::psi) total *= cplx(0, 1);
  return w.amp * total;
}

}  // namespace detail

using detail::local_coords;
using detail::window_sum;

cplx packet_value(const PacketFrame& fr, const Tube& T, double t, double y1, double y2, Generator gen) {
  if (T.ray.samples.empty()) throw DomainError("packet_value: tube ray not integrated");
  SphereState s = T.ray.at(t);
  double z[2];
  local_coords(fr, s, y1, y2, z);
  std::vector<cplx> e1, e2;
  cplx v = window_sum(fr, fr.win[T.omega], z, gen, e1, e2);
  return gen == Generator::psi ? v / T.a0 : v;
}

Slice evolve_packet(const PacketFrame& fr, const Tube& T, double t, Generator gen) {
  if (T.ray.samples.empty()) throw DomainError("evolve_packet: tube ray not integrated");
  const int n = fr.grid.n;
  const double h = fr.grid.dx();
  SphereState s = T.ray.at(t);
  Slice out(static_cast<std::size_t>(n) * n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<cplx> e1, e2;
    for (int j = 0; j < n; ++j) {
      double z[2];
      local_coords(fr, s, static_cast<double>(i) * h, j * h, z);
      cplx v = window_sum(fr, fr.win[T.omega], z, gen, e1, e2);
      out[i * n + j] = gen == Generator::psi ? v / T.a0 : v;
    }
  });
  return out;
}

double tube_distance(const PacketFrame& fr, const Tube& a, const Tube& b) {
  if (a.omega != b.omega) throw DomainError("tube_distance: tubes have different directions");
  const PacketWindow& w = fr.win[a.omega];
  const double L = fr.grid.domain_len;
  double d1 = wrap_sym(a.x[0] - b.x[0], L), d2 = wrap_sym(a.x[1] - b.x[1], L);
  double along = d1 * w.omega[0] + d2 * w.omega[1];
  double cross = d1 * w.omega[1] - d2 * w.omega[0];
  return fr.lam * std::abs(along) + std::sqrt(fr.lam) * std::abs(cross);
}

double packet_tube_overlap(const PacketFrame& fr, const Tube& a, const Tube& b, int N,
                           const std::vector<double>& times, int samples) {
  double d = tube_distance(fr, a, b);
  double sup = 0.0;
  const double lam = fr.lam;
  for (double t : times) {
    SphereState sb = b.ray.at(t);
    for (int p = 0; p < samples; ++p)
      for (int q = 0; q < samples; ++q) {
        double s1 = samples > 1 ? -1.0 + 2.0 * p / (samples - 1) : 0.0;
        double s2 = samples > 1 ? -1.0 + 2.0 * q / (samples - 1) : 0.0;
        double y1 = sb.x[0] + s1 * sb.w[0] / lam - s2 * sb.w[1] / std::sqrt(lam);
        double y2 = sb.x[1] + s1 * sb.w[1] / lam + s2 * sb.w[0] / std::sqrt(lam);
        sup = std::max(sup, std::abs(packet_value(fr, a, t, y1, y2)));
      }
  }
  return std::pow(lam, -0.75) * sup * std::pow(1.0 + d * d, 0.5 * N);
}

}  // namespace wp
