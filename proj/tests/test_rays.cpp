#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "wavepack/rays.hpp"

using namespace wp;

namespace {

const GridSpec kGrid = make_grid(64, 33, 1.0);

MetricField flat_metric() { return make_metric(MetricKind::minkowski, 0.0, 0, kGrid); }
MetricField bump_metric() { return make_metric(MetricKind::bump, 0.05, 1, kGrid); }

// time-independent perturbation: only m = 0 terms
MetricField static_metric() {
  MetricField::Terms t;
  t[kB1].push_back({0, 1, 0, 0.02, 0.0});
  t[kC11].push_back({0, 0, 1, 0.0, 0.03});
  t[kC12].push_back({0, 1, 1, 0.01, 0.0});
  t[kC22].push_back({0, 1, -1, 0.0, -0.02});
  return metric_from_terms(kGrid, 0.05, t);
}

}  // namespace

TEST_CASE("flat rays are straight unit-speed lines") {
  MetricField g = flat_metric();
  for (int sign : {1, -1}) {
    HalfWaveSymbol a(g, sign);
    const double x0[2] = {1.0, 2.0}, xi0[2] = {3.0, -4.0};
    Bicharacteristic b = flow(a, x0, xi0, 0.0, 1.0, 1.0 / 64);
    CHECK(b.sign == sign);
    CHECK(b.samples.size() == 65);
    for (const RayState& s : b.samples) {
      CHECK(s.x[0] == doctest::Approx(1.0 + sign * 0.6 * s.t).epsilon(1e-13));
      CHECK(s.x[1] == doctest::Approx(2.0 - sign * 0.8 * s.t).epsilon(1e-13));
      CHECK(s.xi[0] == 3.0);
      CHECK(s.xi[1] == -4.0);
    }
    RayState mid = b.at(0.3);
    CHECK(mid.x[0] == doctest::Approx(1.0 + sign * 0.18).epsilon(1e-13));
  }
}

TEST_CASE("symbol is conserved for a time-independent metric") {
  MetricField g = static_metric();
  HalfWaveSymbol a(g, 1);
  const double x0[2] = {0.4, 5.0}, xi0[2] = {7.0, 2.0};
  const double a0 = a.eval(0.0, x0[0], x0[1], xi0[0], xi0[1]);
  Bicharacteristic b = flow(a, x0, xi0, 0.0, 2.0, 1.0 / 64);
  for (const RayState& s : b.samples) CHECK(std::abs(a.eval(s.t, s.x[0], s.x[1], s.xi[0], s.xi[1]) - a0) < 1e-9 * a0);
}

TEST_CASE("flow is positively homogeneous and time reversible") {
  MetricField g = bump_metric();
  HalfWaveSymbol a(g, 1);
  const double x0[2] = {2.0, 1.0}, xi0[2] = {0.6, 0.8}, xi2[2] = {6.0, 8.0};
  RayState r1 = flow_end(a, x0, xi0, 0.0, 1.0, 1.0 / 64);
  RayState r2 = flow_end(a, x0, xi2, 0.0, 1.0, 1.0 / 64);
  CHECK(std::abs(r1.x[0] - r2.x[0]) < 1e-12);
  CHECK(std::abs(r1.x[1] - r2.x[1]) < 1e-12);
  CHECK(std::abs(10 * r1.xi[0] - r2.xi[0]) < 1e-11);
  RayState back = flow_end(a, r1.x, r1.xi, 1.0, 0.0, 1.0 / 64);
  CHECK(std::abs(back.x[0] - x0[0]) < 1e-9);
  CHECK(std::abs(back.x[1] - x0[1]) < 1e-9);
  CHECK(std::abs(back.xi[0] - xi0[0]) < 1e-9);
  // flow_end agrees with the last sample of flow
  Bicharacteristic b = flow(a, x0, xi0, 0.0, 1.0, 1.0 / 64);
  CHECK(b.samples.back().x[0] == r1.x[0]);
  CHECK(b.samples.back().xi[1] == r1.xi[1]);
}

TEST_CASE("flow map is symplectic") {
  MetricField g = bump_metric();
  HalfWaveSymbol a(g, 1);
  const double x0[2] = {3.0, 3.0}, xi0[2] = {1.0, 0.5};
  JacobianProbe p = jacobian_probe(a, x0, xi0, 1.0, 1e-4);
  CHECK(std::abs(p.J.determinant() - 1.0) < 1e-5);
  Eigen::Matrix4d Jsym = Eigen::Matrix4d::Zero();
  Jsym.block<2, 2>(0, 2) = Eigen::Matrix2d::Identity();
  Jsym.block<2, 2>(2, 0) = -Eigen::Matrix2d::Identity();
  CHECK((p.J.transpose() * Jsym * p.J - Jsym).norm() < 1e-5);
  CHECK(p.xx > 0.5);
  CHECK(p.xixi > 0.5);
  // flat: x depends on xi only through its direction, xi is constant
  HalfWaveSymbol f(flat_metric(), 1);
  JacobianProbe q = jacobian_probe(f, x0, xi0, 1.0, 1e-4);
  CHECK(q.xix < 1e-9);
  CHECK(q.xixi == doctest::Approx(1.0));
  CHECK_THROWS_AS(jacobian_probe(f, x0, xi0, 1.0, 1e-2), DomainError);
}

TEST_CASE("sphere flow tracks the normalized bicharacteristic") {
  MetricField g = bump_metric();
  HalfWaveSymbol a(g, 1);
  const double x0[2] = {1.5, 4.0}, w0[2] = {std::cos(0.7), std::sin(0.7)};
  SphereRay s = sphere_flow(a, x0, w0, 0.0, 1.0, 1.0 / 64, 32.0);
  Bicharacteristic b = flow(a, x0, w0, 0.0, 1.0, 1.0 / 64);
  REQUIRE(s.samples.size() == b.samples.size());
  CHECK(s.lam == 32.0);
  for (std::size_t k = 0; k < s.samples.size(); ++k) {
    const SphereState& q = s.samples[k];
    const RayState& r = b.samples[k];
    const double nr = std::hypot(r.xi[0], r.xi[1]);
    CHECK(std::abs(q.x[0] - r.x[0]) < 1e-8);
    CHECK(std::abs(q.x[1] - r.x[1]) < 1e-8);
    CHECK(std::abs(q.w[0] - r.xi[0] / nr) < 1e-8);
    CHECK(std::hypot(q.w[0], q.w[1]) == doctest::Approx(1.0).epsilon(1e-14));
    // Theta stays a rotation
    const double det = q.th[0][0] * q.th[1][1] - q.th[0][1] * q.th[1][0];
    CHECK(det == doctest::Approx(1.0).epsilon(1e-13));
  }
  SphereState m = s.at(0.5);
  CHECK(std::hypot(m.w[0], m.w[1]) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("ray errors are typed") {
  HalfWaveSymbol a(flat_metric(), 1);
  const double x0[2] = {0, 0}, z[2] = {0, 0}, w[2] = {0.5, 0.5}, e[2] = {1, 0};
  CHECK_THROWS_AS(flow(a, x0, z, 0.0, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(flow_end(a, x0, z, 0.0, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(flow(a, x0, e, 0.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(sphere_flow(a, x0, w, 0.0, 1.0, 0.1), DomainError);
  Bicharacteristic b = flow(a, x0, e, 0.0, 1.0, 0.1);
  CHECK_THROWS_AS(b.at(1.5), DomainError);
}

TEST_CASE("ray CSV writers emit headers and one row per sample") {
  HalfWaveSymbol a(flat_metric(), 1);
  const double x0[2] = {0, 0}, e[2] = {1, 0};
  std::vector<Bicharacteristic> rays{flow(a, x0, e, 0.0, 1.0, 0.25)};
  const std::string path = "test_rays_out.csv";
  write_rays_csv(path, rays);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "ray,t,x1,x2,xi1,xi2");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
  std::remove(path.c_str());
  std::vector<SphereRay> sr{sphere_flow(a, x0, e, 0.0, 1.0, 0.25)};
  write_sphere_rays_csv(path, sr);
  std::ifstream in2(path);
  std::getline(in2, line);
  CHECK(line == "ray,t,x1,x2,w1,w2,th11,th12,th21,th22");
  std::remove(path.c_str());
  CHECK_THROWS(write_rays_csv("/nonexistent/dir/x.csv", rays));
}
