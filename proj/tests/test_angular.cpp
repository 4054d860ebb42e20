#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "doctest.h"
#include "wavepack/angular.hpp"

using namespace wp;

TEST_CASE("bump profile and its integral") {
  CHECK(bump(0.0) == doctest::Approx(315.0 / 256.0));
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.5) == 0.0);
  CHECK(bump(0.3) == bump(-0.3));
  CHECK(bump_cdf(-1.0) == 0.0);
  CHECK(bump_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bump_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  // cdf' = bump
  for (double x : {-0.8, -0.2, 0.4, 0.9}) {
    const double h = 1e-5;
    CHECK((bump_cdf(x + h) - bump_cdf(x - h)) / (2 * h) == doctest::Approx(bump(x)).epsilon(1e-8));
    CHECK(bump_cdf(x) + bump_cdf(-x) == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("dyadic intervals") {
  DyadicInterval I = make_dyadic_interval(0.375, 0.125);
  CHECK(I.k == 3);
  CHECK(I.level == 3);
  CHECK(I.a() == 0.375);
  CHECK(I.b() == 0.5);
  CHECK_THROWS_AS(make_dyadic_interval(0.1, 0.125), DomainError);
  CHECK_THROWS_AS(make_dyadic_interval(0.0, 0.5), DomainError);
  CHECK_THROWS_AS(make_dyadic_interval(0.0, 0.1), DomainError);
}

TEST_CASE("dyadic sequences walk away from omega with non-decreasing widths") {
  const DyadicInterval om{0, 4};
  auto R = dyadic_sequence(om, Direction::right, 3);
  REQUIRE(R.size() == 3u);
  CHECK(R[0] == DyadicInterval{1, 4});
  CHECK(R[1] == DyadicInterval{1, 3});
  CHECK(R[2] == DyadicInterval{1, 2});
  auto L = dyadic_sequence(om, Direction::left, 2);
  CHECK(L[0] == DyadicInterval{-1, 3});
  CHECK(L[1] == DyadicInterval{-2, 3});
  for (int lev = 3; lev <= 8; ++lev)
    for (std::int64_t k = 0; k < (std::int64_t(1) << lev); k += 3) {
      const DyadicInterval w{k, lev};
      DyadicInterval prev = w;
      for (const auto& J : dyadic_sequence(w, Direction::right, lev - 2)) {
        CHECK(J.a() == prev.b());
        CHECK(J.width() >= prev.width());
        CHECK(J.width() <= 2 * prev.width());
        prev = J;
      }
      prev = w;
      for (const auto& J : dyadic_sequence(w, Direction::left, lev - 2)) {
        CHECK(J.b() == prev.a());
        CHECK(J.width() >= prev.width());
        prev = J;
      }
    }
  CHECK_THROWS_AS(dyadic_sequence({0, 1}, Direction::right, 1), DomainError);
}

TEST_CASE("angular partition sums to one around the circle") {
  for (double alpha : {1.0 / 8, 1.0 / 16, 1.0 / 64, 1.0 / 256}) {
    const int lev = static_cast<int>(std::lround(-std::log2(alpha)));
    for (std::int64_t k : {std::int64_t{0}, std::int64_t{1}, (std::int64_t(1) << lev) - 1}) {
      AngularPartition P = build_partition({k, lev}, alpha);
      REQUIRE(P.pieces.size() >= 3u);
      CHECK(P.pieces[0].a == doctest::Approx(k * alpha));
      // pieces tile one turn
      double total = 0;
      for (std::size_t j = 0; j < P.pieces.size(); ++j) {
        total += P.pieces[j].alpha;
        CHECK(P.pieces[j].b - P.pieces[j].a == doctest::Approx(P.pieces[j].alpha));
        CHECK(P.pieces[j].k >= 1);
        CHECK(P.pieces[j].k <= 4);
        if (j + 1 < P.pieces.size()) CHECK(P.pieces[j + 1].a == doctest::Approx(P.pieces[j].b));
      }
      CHECK(total == doctest::Approx(1.0));
      for (int s = 0; s < 4096; ++s) {
        const double xi = (s + 0.5) / 4096;
        CHECK(std::abs(P.sum(xi) - 1.0) < 1e-10);
      }
      // omega's own piece is one at its centre
      CHECK(P.piece(0, (k + 0.5) * alpha) == doctest::Approx(1.0));
    }
  }
  CHECK_THROWS_AS(build_partition({0, 3}, 1.0 / 16), DomainError);
  CHECK_THROWS_AS(build_partition({0, 2}, 0.25), DomainError);
}

TEST_CASE("profiles are nonnegative and mollify the indicator") {
  for (int k = 1; k <= 4; ++k) {
    CHECK(profile_value(0.25, 0.375, k, 0.3125) == doctest::Approx(1.0));
    CHECK(profile_value(0.25, 0.375, k, 0.7) == 0.0);
    for (double xi = 0.0; xi < 1.0; xi += 0.01) CHECK(profile_value(0.25, 0.375, k, xi) >= 0.0);
    // invariance under a full turn
    CHECK(profile_value(0.25, 0.375, k, 0.26) == doctest::Approx(profile_value(0.25, 0.375, k, 1.26)));
  }
}

TEST_CASE("sector split adds back up to the input") {
  const int n = 32;
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N01;
  Slice f(n * n);
  for (auto& v : f) v = cplx(N01(rng), N01(rng));
  AngularPartition P = build_partition({1, 4}, 1.0 / 16);
  std::vector<Slice> parts = sector_split(f, n, kTwoPi, P, 8.0);
  REQUIRE(parts.size() == P.pieces.size());
  double err = 0;
  for (std::size_t p = 0; p < f.size(); ++p) {
    cplx s = 0;
    for (const auto& q : parts) s += q[p];
    err = std::max(err, std::abs(s - f[p]));
  }
  CHECK(err < 1e-12);

  const std::string path = "test_angular_partition.csv";
  write_partition_csv(path, P);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "j,a_j,b_j,alpha_j,k_j");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == static_cast<int>(P.pieces.size()));
  std::remove(path.c_str());
}
