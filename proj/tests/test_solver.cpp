#include <cmath>
#include <random>

#include "doctest.h"
#include "wavepack/solver.hpp"

using namespace wp;

namespace {

Slice trig_field(int n, std::uint64_t seed, int kmax) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  const double h = kTwoPi / n;
  Slice f(static_cast<std::size_t>(n) * n, 0.0);
  for (int a = -kmax; a <= kmax; ++a)
    for (int b = -kmax; b <= kmax; ++b) {
      const double c = N01(rng), s = N01(rng);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) f[i * n + j] += c * std::cos((a * i + b * j) * h) + s * std::sin((a * i + b * j) * h);
    }
  return f;
}

double max_diff(const cplx* a, const cplx* b, std::size_t P) {
  double m = 0;
  for (std::size_t p = 0; p < P; ++p) m = std::max(m, std::abs(a[p] - b[p]));
  return m;
}

double max_abs(const cplx* a, std::size_t P) {
  double m = 0;
  for (std::size_t p = 0; p < P; ++p) m = std::max(m, std::abs(a[p]));
  return m;
}

}  // namespace

TEST_CASE("flat plane wave is propagated exactly") {
  const GridSpec out = make_grid(32, 9, 1.0);
  MetricField flat = make_metric(MetricKind::minkowski, 0.0, 0, out);
  const double h = out.dx();
  Slice u0(out.points()), u1(out.points(), 0.0);
  for (int i = 0; i < 32; ++i)
    for (int j = 0; j < 32; ++j) u0[i * 32 + j] = std::cos((3 * i + 4 * j) * h);
  SolverRun r = solve_linear(flat, u0, u1, nullptr, out);
  CHECK(r.cfl <= 0.5);
  CHECK_FALSE(r.reversed);
  REQUIRE(r.u.size() == 1u);
  double err = 0;
  for (int k = 0; k < out.nt; ++k)
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j) {
        const double ex = std::cos((3 * i + 4 * j) * h) * std::cos(5 * out.time(k));
        err = std::max(err, std::abs(r.u[0].slice(k)[i * 32 + j] - ex));
        const double et = -5 * std::cos((3 * i + 4 * j) * h) * std::sin(5 * out.time(k));
        err = std::max(err, std::abs(r.ut[0].slice(k)[i * 32 + j] - et) / 5);
      }
  CHECK(err <= 1e-6);
  // conserved energy
  std::vector<double> E = quadratic_energy(r, flat);
  for (double e : E) CHECK(e == doctest::Approx(E[0]).epsilon(1e-10));
}

TEST_CASE("fourth-order convergence in time on a curved metric") {
  const GridSpec out = make_grid(64, 5, 0.5);
  MetricField g = make_metric(MetricKind::bump, 0.05, 1, out);
  const Slice u0 = trig_field(64, 1, 3), u1 = trig_field(64, 2, 3);
  const double d = out.dt;
  SolverRun ref = solve_linear(g, u0, u1, nullptr, out, d / 64);
  SolverRun a = solve_linear(g, u0, u1, nullptr, out, d / 4);
  SolverRun b = solve_linear(g, u0, u1, nullptr, out, d / 8);
  const int k = out.nt - 1;
  const double ea = max_diff(a.u[0].slice(k), ref.u[0].slice(k), out.points());
  const double eb = max_diff(b.u[0].slice(k), ref.u[0].slice(k), out.points());
  CHECK(ea / eb >= 14.0);
}

TEST_CASE("solution map is linear and time reversible") {
  const GridSpec out = make_grid(64, 9, 0.5);
  MetricField g = make_metric(MetricKind::bump, 0.05, 1, out);
  const Slice f0 = trig_field(64, 3, 4), f1 = trig_field(64, 4, 4), g0 = trig_field(64, 5, 4), g1 = trig_field(64, 6, 4);
  Slice s0(f0.size()), s1(f0.size());
  for (std::size_t p = 0; p < f0.size(); ++p) {
    s0[p] = 2.0 * f0[p] - cplx(0, 3) * g0[p];
    s1[p] = 2.0 * f1[p] - cplx(0, 3) * g1[p];
  }
  SolverRun rf = solve_linear(g, f0, f1, nullptr, out), rg = solve_linear(g, g0, g1, nullptr, out),
            rs = solve_linear(g, s0, s1, nullptr, out);
  const int k = out.nt - 1;
  Slice comb(f0.size());
  for (std::size_t p = 0; p < f0.size(); ++p) comb[p] = 2.0 * rf.u[0].slice(k)[p] - cplx(0, 3) * rg.u[0].slice(k)[p];
  CHECK(max_diff(comb.data(), rs.u[0].slice(k), f0.size()) <= 1e-10 * max_abs(comb.data(), f0.size()));

  // run backwards from the final state
  SolverRun back = solve_linear(g, rf.u[0].slice_copy(k), rf.ut[0].slice_copy(k), nullptr, out, 0.0, true);
  CHECK(back.reversed);
  CHECK(max_diff(back.u[0].slice(0), f0.data(), f0.size()) <= 1e-8 * max_abs(f0.data(), f0.size()));
  CHECK(max_diff(back.u[0].slice(k), rf.u[0].slice(k), f0.size()) == 0.0);
}

TEST_CASE("solver input errors") {
  const GridSpec out = make_grid(64, 5, 0.5);
  MetricField g = make_metric(MetricKind::bump, 0.05, 1, out);
  const Slice u0 = trig_field(64, 1, 2), u1(out.points(), 0.0);
  const double dmax = 0.5 * out.dx() / max_wave_speed(g, out);
  CHECK(solver_dt(g, out) <= dmax);
  CHECK(max_wave_speed(g, out) > 1.0);
  try {
    solve_linear(g, u0, u1, nullptr, out, 2 * dmax);
    FAIL("expected a CFL violation");
  } catch (const CflError& e) {
    CHECK(e.required_dt == doctest::Approx(dmax));
  }
  Slice rough = trig_field(64, 1, 20);
  CHECK_THROWS_AS(solve_linear(g, rough, u1, nullptr, out), DomainError);
  CHECK_THROWS_AS(solve_linear(g, Slice(10), u1, nullptr, out), DomainError);
  SpacetimeField F(make_grid(64, 3, 0.5));
  CHECK_THROWS_AS(solve_linear(g, u0, u1, &F, out), DomainError);
}

TEST_CASE("wave maps: constant maps, geodesics and constraint checks") {
  const GridSpec out = make_grid(64, 9, 1.0);
  MetricField g = make_metric(MetricKind::bump, 0.05, 1, out);
  const std::size_t P = out.points();
  std::array<Slice, 3> u0, u1;
  for (int c = 0; c < 3; ++c) {
    u0[c].assign(P, c == 2 ? 1.0 : 0.0);
    u1[c].assign(P, 0.0);
  }
  SolverRun still = solve_wavemap_sphere(g, u0, u1, out);
  for (int k = 0; k < out.nt; ++k) {
    CHECK(max_abs(still.u[0].slice(k), P) == 0.0);
    CHECK(std::abs(still.u[2].slice(k)[17] - 1.0) == 0.0);
  }
  for (double d : still.drift) CHECK(d == 0.0);

  // spatially constant data follows a great circle at unit speed (flat metric)
  MetricField flat = make_metric(MetricKind::minkowski, 0.0, 0, out);
  for (int c = 0; c < 3; ++c) {
    u0[c].assign(P, c == 0 ? 1.0 : 0.0);
    u1[c].assign(P, c == 1 ? 1.0 : 0.0);
  }
  SolverRun geo = solve_wavemap_sphere(flat, u0, u1, out);
  for (int k = 0; k < out.nt; ++k) {
    CHECK(std::abs(geo.u[0].slice(k)[5] - std::cos(out.time(k))) < 1e-6);
    CHECK(std::abs(geo.u[1].slice(k)[5] - std::sin(out.time(k))) < 1e-6);
  }

  std::array<Slice, 3> bad = u0;
  bad[0][3] = 1.1;
  CHECK_THROWS_AS(solve_wavemap_sphere(flat, bad, u1, out), DomainError);
  std::array<Slice, 3> normal = u1;
  normal[0][3] = 0.5;
  CHECK_THROWS_AS(solve_wavemap_sphere(flat, u0, normal, out), DomainError);
}

TEST_CASE("wave-map sphere drift shrinks at fourth order and vanishes with renormalization") {
  const GridSpec out = make_grid(64, 5, 0.25);
  MetricField g = make_metric(MetricKind::bump, 0.05, 1, out);
  std::array<Slice, 3> u0, u1;
  wavemap_data(64, kTwoPi, 0.05, 3, u0, u1);
  for (std::size_t p = 0; p < u0[0].size(); p += 97) {
    const double nn = std::norm(u0[0][p]) + std::norm(u0[1][p]) + std::norm(u0[2][p]);
    CHECK(nn == doctest::Approx(1.0).epsilon(1e-14));
  }
  const double d = out.dt;
  WaveMapOptions a, b, rn;
  a.dt_solver = d / 2;
  b.dt_solver = d / 4;
  rn.renormalize = true;
  const double da = solve_wavemap_sphere(g, u0, u1, out, a).drift.back();
  const double db = solve_wavemap_sphere(g, u0, u1, out, b).drift.back();
  CHECK(da > 0.0);
  CHECK(da / db >= 8.0);
  SolverRun r = solve_wavemap_sphere(g, u0, u1, out, rn);
  CHECK(r.drift.back() < 1e-14);
  CHECK(r.base[2] == 1.0);
  std::vector<double> tr = energy_trace(r, 1.25);
  REQUIRE(tr.size() == static_cast<std::size_t>(out.nt));
  CHECK(tr[0] > 0.0);
  CHECK(tr.back() < 4 * tr[0]);
}
