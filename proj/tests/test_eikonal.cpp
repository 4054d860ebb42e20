#include <cmath>
#include <numeric>

#include "doctest.h"
#include "wavepack/eikonal.hpp"

using namespace wp;

namespace {

const GridSpec kGrid = make_grid(64, 17, 0.5);

}  // namespace

TEST_CASE("canonical directions are primitive and close to the uniform angles") {
  for (int k = 0; k < 16; ++k) {
    auto e = canonical_direction(k);
    CHECK(std::gcd(std::abs(e[0]), std::abs(e[1])) == 1);
    double d = std::atan2(e[1], e[0]) - kTwoPi * k / 16;
    d = std::remainder(d, kTwoPi);
    CHECK(std::abs(d) < 0.1);
    auto o = canonical_direction(k + 8);
    CHECK(o[0] == -e[0]);
    CHECK(o[1] == -e[1]);
  }
  CHECK(canonical_direction(0) == std::array<int, 2>{1, 0});
  CHECK(canonical_direction(-4) == canonical_direction(12));
}

TEST_CASE("flat optical function is a plane wave phase") {
  MetricField g = make_metric(MetricKind::minkowski, 0.0, 0, kGrid);
  HalfWaveSymbol a(g, 1);
  Foliation f = solve_eikonal(a, {2, 5}, kGrid);
  const double s = std::hypot(2.0, 5.0);
  CHECK(f.theta[0] == doctest::Approx(2 / s));
  CHECK(f.theta_perp[0] * f.theta[0] + f.theta_perp[1] * f.theta[1] == doctest::Approx(0.0));
  CHECK(f.h_period() == doctest::Approx(kTwoPi / s));
  CHECK(f.xp_period() == doctest::Approx(kTwoPi * s));
  const double h = kGrid.dx();
  for (int k = 0; k < kGrid.nt; k += 4)
    for (int i = 0; i < 64; i += 7)
      for (int j = 0; j < 64; j += 5)
        CHECK(std::abs(f.phi(k, i, j) - ((i * 2 + j * 5) * h / s - kGrid.time(k))) < 1e-10);
  EikonalReport r = eikonal_diagnostics(f);
  CHECK(r.residual < 1e-10);
  CHECK(r.hess < 1e-8);
  CHECK(r.null_grad < 1e-10);
  CHECK(r.min_dtheta == doctest::Approx(1.0));
}

TEST_CASE("flat leaf graph is the translated line") {
  MetricField g = make_metric(MetricKind::minkowski, 0.0, 0, kGrid);
  Foliation f = solve_eikonal(HalfWaveSymbol(g, 1), {1, 0}, kGrid);
  std::vector<double> xp{0.0, 1.0, 2.5};
  std::vector<double> xt = leaf_graph(f, 8, 0.7, xp);
  for (double v : xt) CHECK(v == doctest::Approx(0.7 + kGrid.time(8)).epsilon(1e-9));
  FoliationBounds b = foliation_coords(f, 4);
  CHECK(b.roundtrip < 1e-9);
  CHECK(b.psi_t_sup == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(b.psi_xp_sup < 1e-9);
}

TEST_CASE("Minkowski leaf area is sqrt(2) T times the leaf period") {
  MetricField g = make_metric(MetricKind::minkowski, 0.0, 0, kGrid);
  for (auto e : {std::array<int, 2>{1, 0}, std::array<int, 2>{1, 1}}) {
    Foliation f = solve_eikonal(HalfWaveSymbol(g, 1), e, kGrid);
    ComponentProvider one = [&](int) { return std::vector<Slice>{Slice(kGrid.points(), 1.0)}; };
    const double area = surface_integral(f, one, 0.3);
    CHECK(area == doctest::Approx(std::sqrt(2.0) * kGrid.t_end() * f.xp_period()).epsilon(1e-6));
    // averaging over a band of leaves does not change a constant integrand
    CHECK(surface_integral(f, one, 0.3, 0.1) == doctest::Approx(area).epsilon(1e-6));
  }
}

TEST_CASE("curved optical function solves the eikonal equation with a null frame") {
  MetricField g = make_metric(MetricKind::bump, 0.05, 1, kGrid);
  HalfWaveSymbol a(g, 1);
  Foliation f = solve_eikonal(a, canonical_direction(3), kGrid);
  EikonalReport r = eikonal_diagnostics(f);
  CHECK(r.residual < 1e-5);
  CHECK(r.null_grad < 1e-5);
  CHECK(r.hess < 0.5);
  CHECK(r.min_dtheta > 0.5);
  FrameIdentities id = frame_identities(f, 4);
  CHECK(id.gLL < 1e-5);
  CHECK(id.gLE < 1e-5);
  CHECK(std::abs(id.gLLbar) < 1e-5);
  CHECK(id.gLbarE < 1e-5);
  CHECK(id.gEE < 1e-5);
  CHECK(id.gLbarLbar < 1e-5);
  CHECK(id.dphiE < 1e-5);
  CHECK(id.angle_defect < 1e-4);
  FoliationBounds b = foliation_coords(f, 4);
  CHECK(b.roundtrip < 1e-8);
  CHECK(b.psi_t_sup < 1.5);
}

TEST_CASE("lower metric inverts the dual metric") {
  MetricField g = make_metric(MetricKind::bump, 0.05, 1, kGrid);
  MetricSlice m = g.slice(0.25, 64);
  for (std::size_t p : {std::size_t{0}, std::size_t{1234}}) {
    double lo[3][3], G[3][3];
    lower_metric(m, p, lo);
    MetricCoeffs c;
    c.b[0] = m.b1[p];
    c.b[1] = m.b2[p];
    c.c[0] = m.c11[p];
    c.c[1] = m.c12[p];
    c.c[2] = m.c22[p];
    MetricField::dual_matrix(c, G);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) {
        double v = 0;
        for (int q = 0; q < 3; ++q) v += lo[r][q] * G[q][s];
        CHECK(std::abs(v + (r == s ? 1.0 : 0.0)) < 1e-12);
      }
  }
}
