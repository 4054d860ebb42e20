#include "wavepack/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "wavepack/fft.hpp"
#include "wavepack/parallel.hpp"

namespace wp {

double max_wave_speed(const MetricField& g, const GridSpec& out) {
  if (g.flat()) return 1.0;
  const int n = out.n;
  std::vector<double> per(out.nt);
  parallel_for(out.nt, [&](std::size_t k) {
    MetricSlice s = g.slice(out.time(static_cast<int>(k)), n);
    double m = 0.0;
    for (std::size_t p = 0; p < s.b1.size(); ++p) {
      double hb = 0.5 * (s.c11[p] + s.c22[p]), hd = 0.5 * (s.c11[p] - s.c22[p]);
      double ev = hb + std::sqrt(hd * hd + s.c12[p] * s.c12[p]);
      m = std::max(m, std::hypot(s.b1[p], s.b2[p]) + std::sqrt(std::max(ev, 0.0)));
    }
    per[k] = m;
  });
  return *std::max_element(per.begin(), per.end());
}

double solver_dt(const MetricField& g, const GridSpec& out) {
  const double dt = 0.5 * out.dx() / max_wave_speed(g, out);
  const double steps = std::ceil(out.dt / dt - 1e-12);
  return out.dt / steps;
}

namespace {

// Fourier-side state and operators for one run.
class Stepper {
 public:
  Stepper(const MetricField& g, const GridSpec& out, int ncomp)
      : g_(g), n_(out.n), len_(out.domain_len), ncomp_(ncomp), plan_(fft_plan(out.n, out.n)) {
    const std::size_t P = static_cast<std::size_t>(n_) * n_;
    k1_.resize(P);
    k2_.resize(P);
    om_.resize(P);
    const double du = kTwoPi / len_;
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        std::size_t p = static_cast<std::size_t>(i) * n_ + j;
        k1_[p] = du * freq_index(i, n_);
        k2_[p] = du * freq_index(j, n_);
        om_[p] = std::hypot(k1_[p], k2_[p]);
      }
    // first derivatives drop the Nyquist mode
    d1_[0].resize(P);
    d1_[1].resize(P);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) {
        std::size_t p = static_cast<std::size_t>(i) * n_ + j;
        d1_[0][p] = i == n_ / 2 ? 0.0 : k1_[p];
        d1_[1][p] = j == n_ / 2 ? 0.0 : k2_[p];
      }
    buf_.resize(P);
  }

  struct Prop {
    std::vector<double> c, s_over, ws;
  };
  Prop prop(double h) const {
    Prop E;
    const std::size_t P = om_.size();
    E.c.resize(P);
    E.s_over.resize(P);
    E.ws.resize(P);
    for (std::size_t p = 0; p < P; ++p) {
      double w = om_[p];
      E.c[p] = std::cos(w * h);
      E.s_over[p] = w == 0.0 ? h : std::sin(w * h) / w;
      E.ws[p] = w * std::sin(w * h);
    }
    return E;
  }
  static void apply(const Prop& E, std::vector<cplx>& U, std::vector<cplx>& V) {
    for (std::size_t p = 0; p < U.size(); ++p) {
      cplx u = U[p], v = V[p];
      U[p] = E.c[p] * u + E.s_over[p] * v;
      V[p] = -E.ws[p] * u + E.c[p] * v;
    }
  }

  void to_phys(const std::vector<cplx>& F, Slice& f) const { plan_.backward(F.data(), f.data()); }
  void deriv(const std::vector<cplx>& F, int a, int b, Slice& f) {
    // a, b in {-1, 0, 1}: -1 means none
    const std::size_t P = F.size();
    for (std::size_t p = 0; p < P; ++p) {
      cplx m = 1.0;
      if (a >= 0 && b >= 0) {
        if (a == b)
          m = -(a == 0 ? k1_[p] * k1_[p] : k2_[p] * k2_[p]);
        else
          m = -d1_[0][p] * d1_[1][p];
      } else if (a >= 0) {
        m = cplx(0.0, d1_[a][p]);
      }
      buf_[p] = m * F[p];
    }
    plan_.backward(buf_.data(), f.data());
  }
  void to_spec(const Slice& f, std::vector<cplx>& F) const { plan_.forward(f.data(), F.data()); }

  const MetricSlice& metric_at(double t) {
    for (auto& e : mcache_)
      if (e.first == t) return e.second;
    if (mcache_.size() >= 3) mcache_.erase(mcache_.begin());
    mcache_.emplace_back(t, g_.slice(t, n_));
    return mcache_.back().second;
  }

  const MetricField& g_;
  int n_;
  double len_;
  int ncomp_;
  const Fft& plan_;
  std::vector<double> k1_, k2_, om_;
  std::vector<double> d1_[2];
  std::vector<cplx> buf_;
  std::vector<std::pair<double, MetricSlice>> mcache_;
};

using State = std::vector<std::vector<cplx>>;  // [2*c] = U_c, [2*c+1] = V_c

// The non-flat part of the right-hand side in Fourier space.
using Rhs = std::function<void(double, const State&, State&)>;

State axpy(const State& X, double a, const State& K) {
  State Y = X;
  for (std::size_t q = 0; q < Y.size(); ++q)
    for (std::size_t p = 0; p < Y[q].size(); ++p) Y[q][p] += a * K[q][p];
  return Y;
}

void apply_all(const Stepper::Prop& E, State& S) {
  for (std::size_t c = 0; c + 1 < S.size(); c += 2) Stepper::apply(E, S[c], S[c + 1]);
}

// One Lawson RK4 step of size h; E(h) = E(h/2)^2 keeps one propagator pair.
void lawson_step(double t, double h, State& S, const Stepper::Prop& E2, const Rhs& rhs) {
  State k1, k2, k3, k4;
  rhs(t, S, k1);
  State S2 = axpy(S, 0.5 * h, k1);
  apply_all(E2, S2);
  rhs(t + 0.5 * h, S2, k2);
  State Sh = S;
  apply_all(E2, Sh);
  State S3 = axpy(Sh, 0.5 * h, k2);
  rhs(t + 0.5 * h, S3, k3);
  State S4 = axpy(Sh, h, k3);
  apply_all(E2, S4);
  rhs(t + h, S4, k4);
  apply_all(E2, k1);
  for (std::size_t q = 0; q < S.size(); ++q)
    for (std::size_t p = 0; p < S[q].size(); ++p)
      Sh[q][p] += (h / 6.0) * (k1[q][p] + 2.0 * (k2[q][p] + k3[q][p]));
  apply_all(E2, Sh);
  for (std::size_t q = 0; q < S.size(); ++q)
    for (std::size_t p = 0; p < S[q].size(); ++p) S[q][p] = Sh[q][p] + (h / 6.0) * k4[q][p];
}

double mass_above(const Slice& f, int n, double len, double r0) {
  Slice F(f.size());
  fft_plan(n, n).forward(f.data(), F.data());
  const double du = kTwoPi / len;
  double out = 0.0, tot = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double e = std::norm(F[static_cast<std::size_t>(i) * n + j]);
      tot += e;
      if (du * std::hypot(freq_index(i, n), freq_index(j, n)) > r0) out += e;
    }
  return tot > 0.0 ? std::sqrt(out / tot) : 0.0;
}

struct Schedule {
  double h = 0.0;
  int substeps = 1;
  double cfl = 0.0;
};

Schedule schedule(const MetricField& g, const GridSpec& out, double dt_solver) {
  const double speed = max_wave_speed(g, out);
  const double dmax = 0.5 * out.dx() / speed;
  Schedule s;
  if (dt_solver <= 0.0) dt_solver = dmax;
  if (dt_solver > dmax * (1.0 + 1e-12))
    throw CflError("solver: dt_solver violates CFL 0.5; required dt <= " + std::to_string(dmax), dmax);
  s.substeps = static_cast<int>(std::ceil(out.dt / dt_solver - 1e-9));
  s.h = out.dt / s.substeps;
  s.cfl = s.h * speed / out.dx();
  return s;
}

// Runs the Lawson integrator and records slices; `nonflat` says whether the
// rhs must be evaluated at all.
SolverRun integrate(const MetricField& g, const GridSpec& out, double dt_solver, bool reverse, int ncomp,
                    const std::vector<const Slice*>& data, Stepper& st, const Rhs& rhs,
                    const std::function<void(State&)>& post = {}) {
  out.validate();
  Schedule sc = schedule(g, out, dt_solver);
  SolverRun run;
  run.out = out;
  run.dt_solver = sc.h;
  run.cfl = sc.cfl;
  run.reversed = reverse;
  run.u.assign(ncomp, SpacetimeField(out));
  run.ut.assign(ncomp, SpacetimeField(out));
  const double h = reverse ? -sc.h : sc.h;
  const auto Eh2 = st.prop(0.5 * h);
  State S(2 * ncomp, std::vector<cplx>(out.points()));
  for (int c = 0; c < ncomp; ++c) {
    st.to_spec(*data[2 * c], S[2 * c]);
    st.to_spec(*data[2 * c + 1], S[2 * c + 1]);
  }
  int k = reverse ? out.nt - 1 : 0;
  for (int c = 0; c < ncomp; ++c) {
    run.u[c].set_slice(k, *data[2 * c]);
    run.ut[c].set_slice(k, *data[2 * c + 1]);
  }
  double t = out.time(k);
  Slice tmp(out.points());
  for (int rec = 1; rec < out.nt; ++rec) {
    for (int s = 0; s < sc.substeps; ++s) {
      lawson_step(t, h, S, Eh2, rhs);
      if (post) post(S);
      t += h;
    }
    k += reverse ? -1 : 1;
    t = out.time(k);
    for (int c = 0; c < ncomp; ++c) {
      st.to_phys(S[2 * c], tmp);
      run.u[c].set_slice(k, tmp);
      st.to_phys(S[2 * c + 1], tmp);
      run.ut[c].set_slice(k, tmp);
    }
  }
  for (auto& f : run.u) f.check_finite();
  return run;
}

// cubic Lagrange interpolation of F in time
void forcing_at(const SpacetimeField& F, double t, Slice& out) {
  const GridSpec& G = F.grid;
  const double s = (t - G.t0) / G.dt;
  int base = static_cast<int>(std::floor(s)) - 1;
  base = std::clamp(base, 0, std::max(0, G.nt - 4));
  const int m = std::min(4, G.nt);
  double w[4];
  for (int a = 0; a < m; ++a) {
    w[a] = 1.0;
    for (int b = 0; b < m; ++b)
      if (b != a) w[a] *= (s - (base + b)) / static_cast<double>(a - b);
  }
  std::fill(out.begin(), out.end(), cplx(0.0));
  for (int a = 0; a < m; ++a) {
    const cplx* src = F.slice(base + a);
    for (std::size_t p = 0; p < out.size(); ++p) out[p] += w[a] * src[p];
  }
}

}  // namespace

SolverRun solve_linear(const MetricField& g, const Slice& u0, const Slice& u1, const SpacetimeField* F,
                       const GridSpec& out, double dt_solver, bool reverse) {
  out.validate();
  const int n = out.n;
  const double L = out.domain_len;
  if (u0.size() != out.points() || u1.size() != out.points())
    throw DomainError("solve_linear: data size does not match the grid");
  if (F && (F->grid.n != n || F->grid.nt != out.nt))
    throw DomainError("solve_linear: forcing must live on the output grid");
  // products with the metric stay unaliased for data below Nyquist/2
  const double r0 = (n / 4) * (kTwoPi / L);
  if (mass_above(u0, n, L, r0) > 1e-10 || mass_above(u1, n, L, r0) > 1e-10)
    throw DomainError("solve_linear: data not band-limited below Nyquist/2");
  Stepper st(g, out, 1);
  const bool flat = g.flat();
  const std::size_t P = out.points();
  Slice v1(P), v2(P), u11(P), u12(P), u22(P), r(P), f(P);
  Rhs rhs = [&](double t, const State& S, State& K) {
    K.assign(2, std::vector<cplx>(P, 0.0));
    if (flat && !F) return;
    std::fill(r.begin(), r.end(), cplx(0.0));
    if (!flat) {
      const MetricSlice& m = st.metric_at(t);
      st.deriv(S[1], 0, -1, v1);
      st.deriv(S[1], 1, -1, v2);
      st.deriv(S[0], 0, 0, u11);
      st.deriv(S[0], 0, 1, u12);
      st.deriv(S[0], 1, 1, u22);
      for (std::size_t p = 0; p < P; ++p)
        r[p] = -2.0 * (m.b1[p] * v1[p] + m.b2[p] * v2[p]) + (m.c11[p] - 1.0) * u11[p] +
               2.0 * m.c12[p] * u12[p] + (m.c22[p] - 1.0) * u22[p];
    }
    if (F) {
      forcing_at(*F, t, f);
      for (std::size_t p = 0; p < P; ++p) r[p] += f[p];
    }
    st.to_spec(r, K[1]);
  };
  return integrate(g, out, dt_solver, reverse, 1, {&u0, &u1}, st, rhs);
}

SolverRun solve_wavemap_sphere(const MetricField& g, const std::array<Slice, 3>& u0,
                               const std::array<Slice, 3>& u1, const GridSpec& out,
                               const WaveMapOptions& opt) {
  out.validate();
  const std::size_t P = out.points();
  for (int c = 0; c < 3; ++c)
    if (u0[c].size() != P || u1[c].size() != P) throw DomainError("wavemap: data size does not match the grid");
  for (std::size_t p = 0; p < P; ++p) {
    double nn = 0.0, dot = 0.0;
    for (int c = 0; c < 3; ++c) {
      nn += std::norm(u0[c][p]);
      dot += u0[c][p].real() * u1[c][p].real() + u0[c][p].imag() * u1[c][p].imag();
    }
    if (std::abs(std::sqrt(nn) - 1.0) > 1e-12) throw DomainError("wavemap: |u0| != 1");
    if (std::abs(dot) > 1e-10) throw DomainError("wavemap: u1 not tangent to the sphere");
  }
  Stepper st(g, out, 3);
  const bool flat = g.flat();
  std::array<Slice, 3> u, v, ux, uy, vx, vy, uxx, uxy, uyy;
  for (int c = 0; c < 3; ++c)
    for (auto* a : {&u, &v, &ux, &uy, &vx, &vy, &uxx, &uxy, &uyy}) (*a)[c].assign(P, 0.0);
  Slice r(P);
  std::vector<double> Q(P);
  MetricSlice flat_slice;
  Rhs rhs = [&](double t, const State& S, State& K) {
    K.assign(6, std::vector<cplx>(P, 0.0));
    const MetricSlice& m = flat ? flat_slice : st.metric_at(t);
    for (int c = 0; c < 3; ++c) {
      st.to_phys(S[2 * c], u[c]);
      st.to_phys(S[2 * c + 1], v[c]);
      st.deriv(S[2 * c], 0, -1, ux[c]);
      st.deriv(S[2 * c], 1, -1, uy[c]);
      if (!flat) {
        st.deriv(S[2 * c + 1], 0, -1, vx[c]);
        st.deriv(S[2 * c + 1], 1, -1, vy[c]);
        st.deriv(S[2 * c], 0, 0, uxx[c]);
        st.deriv(S[2 * c], 0, 1, uxy[c]);
        st.deriv(S[2 * c], 1, 1, uyy[c]);
      }
    }
    for (std::size_t p = 0; p < P; ++p) {
      double b1 = flat ? 0.0 : m.b1[p], b2 = flat ? 0.0 : m.b2[p];
      double c11 = flat ? 1.0 : m.c11[p], c12 = flat ? 0.0 : m.c12[p], c22 = flat ? 1.0 : m.c22[p];
      double q = 0.0;
      for (int c = 0; c < 3; ++c) {
        double vt = v[c][p].real(), gx = ux[c][p].real(), gy = uy[c][p].real();
        q += vt * vt + 2.0 * vt * (b1 * gx + b2 * gy) - (c11 * gx * gx + 2.0 * c12 * gx * gy + c22 * gy * gy);
      }
      Q[p] = q;
    }
    for (int c = 0; c < 3; ++c) {
      for (std::size_t p = 0; p < P; ++p) {
        cplx val = -u[c][p] * Q[p];
        if (!flat)
          val += -2.0 * (m.b1[p] * vx[c][p] + m.b2[p] * vy[c][p]) + (m.c11[p] - 1.0) * uxx[c][p] +
                 2.0 * m.c12[p] * uxy[c][p] + (m.c22[p] - 1.0) * uyy[c][p];
        r[p] = val;
      }
      st.to_spec(r, K[2 * c + 1]);
    }
  };
  std::vector<const Slice*> data;
  for (int c = 0; c < 3; ++c) {
    data.push_back(&u0[c]);
    data.push_back(&u1[c]);
  }
  std::function<void(State&)> post;
  if (opt.renormalize) {
    post = [&](State& S) {
      for (int c = 0; c < 3; ++c) st.to_phys(S[2 * c], u[c]);
      for (std::size_t p = 0; p < P; ++p) {
        double nn = std::sqrt(std::norm(u[0][p]) + std::norm(u[1][p]) + std::norm(u[2][p]));
        for (int c = 0; c < 3; ++c) u[c][p] /= nn;
      }
      for (int c = 0; c < 3; ++c) st.to_spec(u[c], S[2 * c]);
    };
  }
  SolverRun run = integrate(g, out, opt.dt_solver, false, 3, data, st, rhs, post);
  run.base = {0.0, 0.0, 1.0};
  run.drift.resize(out.nt);
  for (int k = 0; k < out.nt; ++k) {
    double d = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      double nn = 0.0;
      for (int c = 0; c < 3; ++c) nn += std::norm(run.u[c].slice(k)[p]);
      d = std::max(d, std::abs(std::sqrt(nn) - 1.0));
    }
    run.drift[k] = d;
  }
  return run;
}

void wavemap_data(int n, double len, double eps, std::uint64_t seed, std::array<Slice, 3>& u0,
                  std::array<Slice, 3>& u1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  const int K = 4;
  auto field = [&]() {
    std::vector<std::array<double, 4>> terms;
    for (int a = -K; a <= K; ++a)
      for (int b = -K; b <= K; ++b) {
        if (a * a + b * b > K * K) continue;
        double sc = 1.0 / (1.0 + a * a + b * b);
        terms.push_back({static_cast<double>(a), static_cast<double>(b), sc * N01(rng), sc * N01(rng)});
      }
    std::vector<double> f(static_cast<std::size_t>(n) * n, 0.0);
    const double du = kTwoPi / len, h = len / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (const auto& t : terms) {
          double ph = du * (t[0] * i * h + t[1] * j * h);
          s += t[2] * std::cos(ph) + t[3] * std::sin(ph);
        }
        f[static_cast<std::size_t>(i) * n + j] = s;
      }
    double m = 0.0;
    for (double x : f) m = std::max(m, std::abs(x));
    for (double& x : f) x /= m;
    return f;
  };
  std::array<std::vector<double>, 3> f, q;
  for (int c = 0; c < 3; ++c) f[c] = field();
  for (int c = 0; c < 3; ++c) q[c] = field();
  const std::size_t P = static_cast<std::size_t>(n) * n;
  for (int c = 0; c < 3; ++c) {
    u0[c].assign(P, 0.0);
    u1[c].assign(P, 0.0);
  }
  for (std::size_t p = 0; p < P; ++p) {
    double w[3] = {eps * f[0][p], eps * f[1][p], 1.0 + eps * f[2][p]};
    double nn = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    for (double& x : w) x /= nn;
    double z[3] = {q[0][p], q[1][p], q[2][p]};
    double d = z[0] * w[0] + z[1] * w[1] + z[2] * w[2];
    for (int c = 0; c < 3; ++c) {
      u0[c][p] = w[c];
      u1[c][p] = eps * (z[c] - d * w[c]);
    }
  }
}

std::vector<double> energy_trace(const SolverRun& run, double s) {
  const GridSpec& G = run.out;
  std::vector<double> out(G.nt);
  parallel_for(G.nt, [&](std::size_t k) {
    double acc = 0.0;
    for (std::size_t c = 0; c < run.u.size(); ++c) {
      Slice a = run.u[c].slice_copy(static_cast<int>(k));
      for (auto& x : a) x -= run.base[c];
      double hu = hs_norm(a, G.n, G.domain_len, s);
      double hv = hs_norm(run.ut[c].slice_copy(static_cast<int>(k)), G.n, G.domain_len, s - 1.0);
      acc += hu * hu + hv * hv;
    }
    out[k] = std::sqrt(acc);
  });
  return out;
}

std::vector<double> quadratic_energy(const SolverRun& run, const MetricField& g) {
  const GridSpec& G = run.out;
  std::vector<double> out(G.nt);
  const double cell = G.dx() * G.dx();
  parallel_for(G.nt, [&](std::size_t k) {
    Slice u = run.u[0].slice_copy(static_cast<int>(k));
    Slice ux = spectral_derivative(u, G.n, G.domain_len, 1, 0);
    Slice uy = spectral_derivative(u, G.n, G.domain_len, 0, 1);
    const cplx* ut = run.ut[0].slice(static_cast<int>(k));
    MetricSlice m = g.slice(G.time(static_cast<int>(k)), G.n);
    std::vector<double> e(u.size());
    for (std::size_t p = 0; p < u.size(); ++p)
      e[p] = std::norm(ut[p]) + m.c11[p] * std::norm(ux[p]) + 2.0 * m.c12[p] * std::real(ux[p] * std::conj(uy[p])) +
             m.c22[p] * std::norm(uy[p]);
    out[k] = cell * pairwise_sum(e.data(), e.size());
  });
  return out;
}

}  // namespace wp
