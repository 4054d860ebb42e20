#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"
#include "wavepack/fft.hpp"
#include "wavepack/packets.hpp"

using namespace wp;

namespace {

const GridSpec kGrid = make_grid(64, 9, 0.25);

Slice random_core_data(const PacketFrame& fr, std::uint64_t seed) {
  const int n = fr.grid.n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N01;
  Slice f(static_cast<std::size_t>(n) * n);
  for (auto& v : f) v = cplx(N01(rng), N01(rng));
  return restrict_to_core(fr, f);
}

double rel_l2(const Slice& a, const Slice& b) {
  double num = 0, den = 0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    num += std::norm(a[p] - b[p]);
    den += std::norm(b[p]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("radial and angular windows") {
  for (double lam : {16.0, 32.0}) {
    CHECK(radial_sq(0.7 * lam, lam) == doctest::Approx(1.0));
    CHECK(radial_sq(0.85 * lam, lam) == 1.0);
    CHECK(radial_sq(lam, lam) == doctest::Approx(1.0));
    CHECK(radial_sq(0.5 * lam, lam) == 0.0);
    CHECK(radial_sq(1.4 * lam, lam) == 0.0);
  }
  CHECK(direction_count(16) == 16);
  CHECK(direction_count(32) == 24);
  CHECK(direction_count(64) == 32);
  for (int M : {16, 24}) {
    for (double ang = -3.0; ang < 3.2; ang += 0.137) {
      double s = 0;
      for (int nu = 0; nu < M; ++nu) s += angular_sq(ang, nu, M);
      CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(angular_sq(kTwoPi * 3 / M, 3, M) == 1.0);
    CHECK(angular_sq(kTwoPi * 5 / M, 3, M) == 0.0);
  }
}

TEST_CASE("windows form a partition of unity") {
  for (double r : {0.0, 0.5, 1.3, 3.0, 10.0, 40.0, 100.0})
    for (double a : {0.0, 0.4, 2.0})
      CHECK(partition_sum(r * std::cos(a), r * std::sin(a), 128) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("frame is tight on the core annulus") {
  PacketFrame fr = build_frame(16, kGrid);
  CHECK(fr.M == 16);
  CHECK(fr.win.size() == 16u);
  std::size_t tubes = 0;
  for (const auto& w : fr.win) tubes += w.lattice_size();
  CHECK(fr.num_tubes() == tubes);
  Slice f = random_core_data(fr, 3);
  CHECK(mass_outside(f, 64, kTwoPi, 0.7 * 16, 16) < 1e-14);
  TubeCoefficients c = analyze(fr, f);
  CHECK(c.c.size() == 16u);
  CHECK(c.l2sq() == doctest::Approx(std::pow(l2_norm(f, 64, kTwoPi), 2)).epsilon(1e-12));
  CHECK(rel_l2(synthesize(fr, c), f) < 1e-12);
  CHECK_THROWS_AS(build_frame(32, kGrid), ResolutionError);
  CHECK_THROWS_AS(build_frame(8, kGrid), ResolutionError);
}

TEST_CASE("transported packet starts as the frame element and moves along its ray") {
  PacketFrame fr = build_frame(16, kGrid);
  MetricField flat = make_metric(MetricKind::minkowski, 0.0, 0, kGrid);
  const int omega = 2;
  Tube T = make_tube(fr, flat, omega, 1, 2, 1, 0.25);
  // unit coefficient on one tube
  TubeCoefficients c;
  c.lam = fr.lam;
  for (const auto& w : fr.win) {
    c.c.emplace_back(w.lattice_size(), 0.0);
    c.dims.push_back({w.N[0], w.N[1]});
  }
  c.c[omega][1 * fr.win[omega].N[1] + 2] = 1.0;
  Slice phi0 = synthesize(fr, c);
  Slice u0 = evolve_packet(fr, T, 0.0);
  CHECK(rel_l2(u0, phi0) < 1e-10);
  const double h = kGrid.dx();
  CHECK(std::abs(packet_value(fr, T, 0.0, 5 * h, 7 * h) - u0[5 * 64 + 7]) < 1e-12);
  // the peak travels with the ray (sign +1: along omega)
  Slice u1 = evolve_packet(fr, T, 0.25);
  std::size_t arg = 0;
  for (std::size_t p = 0; p < u1.size(); ++p)
    if (std::abs(u1[p]) > std::abs(u1[arg])) arg = p;
  const double px = (arg / 64) * h, py = (arg % 64) * h;
  const double ex = T.x[0] + 0.25 * fr.win[omega].omega[0], ey = T.x[1] + 0.25 * fr.win[omega].omega[1];
  CHECK(std::abs(std::remainder(px - ex, kTwoPi)) < 2 * h);
  CHECK(std::abs(std::remainder(py - ey, kTwoPi)) < 2 * h);
  // mass is preserved to leading order
  CHECK(l2_norm(u1, 64, kTwoPi) == doctest::Approx(l2_norm(u0, 64, kTwoPi)).epsilon(0.05));
}

TEST_CASE("tube distance is a symmetric quasi-metric") {
  PacketFrame fr = build_frame(16, kGrid);
  MetricField flat = make_metric(MetricKind::minkowski, 0.0, 0, kGrid);
  Tube a = make_tube(fr, flat, 0, 0, 0, 1, 0.0);
  Tube b = make_tube(fr, flat, 0, 1, 3, 1, 0.0);
  Tube c = make_tube(fr, flat, 1, 1, 3, 1, 0.0);
  CHECK(tube_distance(fr, a, a) == 0.0);
  CHECK(tube_distance(fr, a, b) == doctest::Approx(tube_distance(fr, b, a)));
  CHECK(tube_distance(fr, a, b) > 0.0);
  CHECK_THROWS_AS(tube_distance(fr, a, c), DomainError);
  // the overlap with itself is the normalized sup of the packet
  const double self = packet_tube_overlap(fr, a, a, 4, {0.0});
  // the tube centre is one of the sampled points
  CHECK(self >= std::pow(16.0, -0.75) * std::abs(packet_value(fr, a, 0.0, a.x[0], a.x[1])) - 1e-15);
  CHECK(self > 0.0);
  CHECK(packet_tube_overlap(fr, a, b, 0, {0.0}) <= self);
}

TEST_CASE("parametrix reproduces its data and sparse coefficients") {
  PacketFrame fr = build_frame(16, make_grid(128, 9, 0.25));
  MetricField g = make_metric(MetricKind::bump, 0.05, 1, fr.grid);
  Slice u0 = random_core_data(fr, 5);
  Slice u1(u0.size(), 0.0);
  ParametrixResult r = parametrix_evolve(fr, u0, u1, g, {0.0, 0.125});
  REQUIRE(r.fields.size() == 2u);
  // at t = 0 only the fourth-order table interpolation separates w from u0
  CHECK(r.data_mismatch < 1e-5);
  ParametrixOptions fine;
  fine.oversample = 64;
  ParametrixResult rf = parametrix_evolve(fr, u0, u1, g, {0.0}, fine);
  CHECK(rf.data_mismatch < r.data_mismatch / 50);
  CHECK(rel_l2(synthesize(fr, analyze(fr, u0)), u0) < 1e-12);
  CHECK(r.dropped_rel < 1e-4);
  CHECK(r.tubes_used > 0u);
  CHECK(rel_l2(r.fields[0], u0) == doctest::Approx(r.data_mismatch));
  CHECK(r.data_normsq == doctest::Approx(std::pow(l2_norm(u0, 128, kTwoPi), 2)));

  std::vector<std::array<int, 3>> tubes{{0, 1, 1}, {5, 2, 0}};
  std::vector<cplx> alpha{1.0, cplx(0.0, 2.0)};
  ParametrixCoeffs sc = sparse_coefficients(fr, tubes, alpha);
  CHECK(sc.l2sq() == doctest::Approx(2 * (0.25 + 1.0)));
  ParametrixResult s = parametrix_from_coefficients(fr, sc, g, {0.0});
  TubeCoefficients dense = analyze(fr, Slice(u0.size(), 0.0));
  dense.c[0][1 * fr.win[0].N[1] + 1] = 1.0;
  dense.c[5][2 * fr.win[5].N[1] + 0] = cplx(0.0, 2.0);
  CHECK(rel_l2(s.fields[0], synthesize(fr, dense)) < 1e-5);
  CHECK(s.tubes_used == 4u);
  {
    ParametrixOptions ex0;
    ex0.exact = true;
    ParametrixResult s0 = parametrix_from_coefficients(fr, sc, g, {0.0}, ex0);
    ParametrixOptions p64;
    p64.oversample = 64;
    ParametrixResult s64 = parametrix_from_coefficients(fr, sc, g, {0.0}, p64);
    CHECK(rel_l2(s0.fields[0], synthesize(fr, dense)) < 1e-12);
    CHECK(rel_l2(s64.fields[0], synthesize(fr, dense)) < 1e-7);
  }

  ParametrixOptions ex;
  ex.exact = true;
  ParametrixResult se = parametrix_from_coefficients(fr, sc, g, {0.125}, ex);
  ParametrixResult st = parametrix_from_coefficients(fr, sc, g, {0.125});
  CHECK(rel_l2(st.fields[0], se.fields[0]) < 1e-4);

  const std::string path = "test_packets_coeffs.csv";
  write_coefficients_csv(path, sc);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "sign,omega_idx,lattice_i,lattice_j,re,im,v_re,v_im");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 4);
  std::remove(path.c_str());
}
