#include <cmath>
#include <random>

#include "doctest.h"
#include "wavepack/box.hpp"
#include "wavepack/metric.hpp"

using namespace wp;

namespace {

const GridSpec kGrid = make_grid(64, 33, 1.0);

MetricField bump(double eta = 0.05) { return make_metric(MetricKind::bump, eta, 1, kGrid); }

}  // namespace

TEST_CASE("metric kinds parse and print") {
  CHECK(parse_metric_kind("minkowski") == MetricKind::minkowski);
  CHECK(parse_metric_kind("bump") == MetricKind::bump);
  CHECK(parse_metric_kind("random_smooth") == MetricKind::random_smooth);
  CHECK(to_string(MetricKind::bump) == "bump");
  CHECK_THROWS(parse_metric_kind("schwarzschild"));
}

TEST_CASE("Minkowski metric is exactly flat") {
  MetricField g = make_metric(MetricKind::minkowski, 0.0, 0, kGrid);
  CHECK(g.flat());
  MetricCoeffs m = g.at(0.3, 1.0, 2.0);
  CHECK(m.b[0] == 0.0);
  CHECK(m.b[1] == 0.0);
  CHECK(m.c[0] == 1.0);
  CHECK(m.c[1] == 0.0);
  CHECK(m.c[2] == 1.0);
  NormReport r = verify_budget(g);
  CHECK(r.value == 0.0);
  CHECK(r.pass);
}

TEST_CASE("constructed metrics meet their budget") {
  for (MetricKind k : {MetricKind::bump, MetricKind::random_smooth}) {
    MetricField g = make_metric(k, 0.05, 1, kGrid);
    CHECK_FALSE(g.flat());
    const BudgetParts b = measure_budget(g);
    CHECK(b.total() <= 0.0025);
    CHECK(b.total() == doctest::Approx(0.9 * 0.0025).epsilon(1e-6));
    CHECK(verify_budget(g).pass);
    // spatial slices are uniformly space-like
    MetricSlice s = g.slice(0.5, 32);
    for (std::size_t p = 0; p < s.c11.size(); ++p) {
      const double tr = s.c11[p] + s.c22[p], det = s.c11[p] * s.c22[p] - s.c12[p] * s.c12[p];
      const double lmin = 0.5 * (tr - std::sqrt(std::max(0.0, tr * tr - 4 * det)));
      CHECK(lmin > 0.9);
    }
  }
}

TEST_CASE("budget check fails for an understated eta") {
  MetricField g = bump();
  MetricField lied(g.grid, g.kind, 0.001, g.seed, g.raw_terms());
  NormReport r = verify_budget(lied);
  CHECK_FALSE(r.pass);
  CHECK(r.value == doctest::Approx(measure_budget(g).total()));
}

TEST_CASE("random metric draw is deterministic") {
  MetricField a = make_metric(MetricKind::random_smooth, 0.05, 7, kGrid);
  MetricField b = make_metric(MetricKind::random_smooth, 0.05, 7, kGrid);
  MetricSlice sa = a.slice(0.25, 32), sb = b.slice(0.25, 32);
  CHECK(sa.b1 == sb.b1);
  CHECK(sa.c12 == sb.c12);
  MetricField c = make_metric(MetricKind::random_smooth, 0.05, 8, kGrid);
  CHECK(c.slice(0.25, 32).b1 != sa.b1);
}

TEST_CASE("spline sampling matches the exact synthesis on grid nodes") {
  MetricField g = bump();
  const double h = kGrid.dx();
  for (int i = 0; i < 64; i += 9)
    for (int j = 0; j < 64; j += 7) {
      const MetricCoeffs a = g.at(0.5, i * h, j * h), e = g.exact(0.5, i * h, j * h);
      CHECK(a.b[0] == doctest::Approx(e.b[0]).epsilon(1e-12));
      CHECK(a.c[1] == doctest::Approx(e.c[1]).epsilon(1e-12));
    }
  // off-grid: close to the exact value
  const MetricCoeffs a = g.at(0.37, 0.123, 4.56), e = g.exact(0.37, 0.123, 4.56);
  CHECK(std::abs(a.c[0] - e.c[0]) < 1e-6);
}

TEST_CASE("mollification is idempotent and converges") {
  MetricField g = bump();
  MetricField m8 = mollify_metric(g, 8);
  MetricField mm = mollify_metric(m8, 8);
  MetricSlice a = m8.slice(0.5, 32), b = mm.slice(0.5, 32);
  CHECK(a.c11 == b.c11);
  CHECK(m8.moll == 8.0);
  // a_{<mu} approaches a as mu grows
  double prev = 1e300;
  for (double mu : {1.0, 2.0, 4.0}) {
    HalfWaveSymbol s(g, 1), sm(g, 1, mu);
    double err = 0.0;
    for (int k = 0; k < 20; ++k) err = std::max(err, std::abs(s.eval(0.5, 0.3 * k, 0.2 * k, 3.0, 4.0) - sm.eval(0.5, 0.3 * k, 0.2 * k, 3.0, 4.0)));
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("half-wave symbol: flat values, homogeneity, sign split, factorization") {
  MetricField flat = make_metric(MetricKind::minkowski, 0.0, 0, kGrid);
  HalfWaveSymbol p0(flat, 1), m0(flat, -1);
  CHECK(p0.eval(0.1, 1, 2, 3, 4) == doctest::Approx(5.0));
  CHECK(m0.eval(0.1, 1, 2, 3, 4) == doctest::Approx(-5.0));
  double ax[2], axi[2];
  p0.grad(0.1, 1, 2, 3, 4, ax, axi);
  CHECK(ax[0] == 0.0);
  CHECK(axi[0] == doctest::Approx(0.6));
  CHECK(axi[1] == doctest::Approx(0.8));
  CHECK_THROWS_AS(p0.eval(0, 0, 0, 0, 0), DomainError);

  MetricField g = bump();
  HalfWaveSymbol ap(g, 1), am(g, -1);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0), X(0.0, kTwoPi), T(0.0, 1.0);
  for (int s = 0; s < 1000; ++s) {
    const double t = T(rng), x1 = X(rng), x2 = X(rng), k1 = 10 * U(rng), k2 = 10 * U(rng), tau = 10 * U(rng);
    const double a = ap.eval(t, x1, x2, k1, k2), b = am.eval(t, x1, x2, k1, k2);
    CHECK(ap.eval(t, x1, x2, 2 * k1, 2 * k2) == doctest::Approx(2 * a).epsilon(1e-12));
    CHECK(am.eval(t, x1, x2, -k1, -k2) == doctest::Approx(-a).epsilon(1e-12));
    const MetricCoeffs m = g.at(t, x1, x2);
    const double p = tau * tau + 2 * (m.b[0] * k1 + m.b[1] * k2) * tau -
                     (m.c[0] * k1 * k1 + 2 * m.c[1] * k1 * k2 + m.c[2] * k2 * k2);
    CHECK(std::abs((tau + a) * (tau + b) - p) <= 1e-12 * (k1 * k1 + k2 * k2 + tau * tau));
  }
}

TEST_CASE("half-wave gradients: Euler relation and finite differences") {
  MetricField g = bump();
  HalfWaveSymbol s(g, 1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> U(-1.0, 1.0), X(0.5, 5.5);
  const double h = 1e-4;
  for (int q = 0; q < 50; ++q) {
    const double t = 0.5, x1 = X(rng), x2 = X(rng), k1 = 5 * U(rng) + 6, k2 = 5 * U(rng);
    double ax[2], axi[2];
    const double a = s.grad(t, x1, x2, k1, k2, ax, axi);
    CHECK(axi[0] * k1 + axi[1] * k2 == doctest::Approx(a).epsilon(1e-10));
    const double fx1 = (s.eval(t, x1 + h, x2, k1, k2) - s.eval(t, x1 - h, x2, k1, k2)) / (2 * h);
    const double fk2 = (s.eval(t, x1, x2, k1, k2 + h) - s.eval(t, x1, x2, k1, k2 - h)) / (2 * h);
    CHECK(std::abs(fx1 - ax[0]) <= 1e-6 * std::max(1.0, std::abs(ax[0])) + 1e-8);
    CHECK(std::abs(fk2 - axi[1]) <= 1e-6 * std::max(1.0, std::abs(axi[1])));
  }
}

TEST_CASE("Box of fields quadratic in time is exact") {
  // Minkowski: Box (t^2 + sin x1) = 2 + sin x1
  GridSpec g = make_grid(32, 9, 1.0);
  MetricField flat = make_metric(MetricKind::minkowski, 0.0, 0, g);
  SpacetimeField u(g);
  const double h = g.dx();
  for (int k = 0; k < g.nt; ++k)
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j) u.slice(k)[i * 32 + j] = g.time(k) * g.time(k) + std::sin(i * h);
  std::vector<bool> flags;
  SpacetimeField B = apply_box(flat, u, 0.0, &flags);
  for (int k = 0; k < g.nt; ++k)
    for (int i = 0; i < 32; i += 5) CHECK(std::abs(B.slice(k)[i * 32 + 3] - (2.0 + std::sin(i * h))) < 1e-10);
  CHECK(flags.front());
  CHECK(flags.back());
  CHECK_FALSE(flags[4]);
  CHECK(box_one_sided(g, 0));
  CHECK_FALSE(box_one_sided(g, 4));
}

TEST_CASE("null form of t with itself is one in Minkowski") {
  GridSpec g = make_grid(16, 5, 1.0);
  MetricField flat = make_metric(MetricKind::minkowski, 0.0, 0, g);
  SpacetimeField u(g);
  for (int k = 0; k < g.nt; ++k)
    for (std::size_t p = 0; p < g.points(); ++p) u.slice(k)[p] = g.time(k);
  SpacetimeField Q = nullform_eval(flat, u, u, 0.0);
  for (auto v : Q.data) CHECK(std::abs(v - 1.0) < 1e-12);
}

TEST_CASE("block norm combines the two L2 parts") {
  GridSpec g = make_grid(64, 17, 1.0);
  MetricField m = make_metric(MetricKind::bump, 0.05, 1, g);
  SpacetimeField u(g);
  const double h = g.dx();
  for (int k = 0; k < g.nt; ++k)
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 64; ++j) u.slice(k)[i * 64 + j] = std::polar(1.0, 4 * i * h - 4 * g.time(k));
  const double lam = 4, d = 2, s = 0.5, th = 0.5;
  SliceProvider p = [&](int k) { return u.slice_copy(k); };
  BlockParts parts = block_parts_stream(m, g, p, dyadic_floor(std::sqrt(lam)));
  const double expect = std::sqrt(std::pow(lam, 2 * s) * std::pow(d, 2 * th) * parts.u_l2 * parts.u_l2 +
                                  std::pow(lam, 2 * s - 2) * std::pow(d, 2 * th - 2) * parts.box_l2 * parts.box_l2);
  CHECK(block_from_parts(parts, s, th, lam, d) == doctest::Approx(expect));
  CHECK(xnorm_block(m, u, s, th, lam, d) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(xnorm_block_stream(m, g, p, s, th, lam, d) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(parts.u_l2 == doctest::Approx(spacetime_l2(u)));
}
