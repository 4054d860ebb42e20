#ifndef WAVEPACK_ANGULAR_HPP
#define WAVEPACK_ANGULAR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wavepack/spectral.hpp"

namespace wp {

// The circle is R/Z; an angle phi in radians sits at phi / (2 pi).
//
// [k 2^-level, (k+1) 2^-level) on R. k is not reduced mod 2^level.
struct DyadicInterval {
  std::int64_t k = 0;
  int level = 0;
  double a() const { return std::ldexp(static_cast<double>(k), -level); }
  double b() const { return std::ldexp(static_cast<double>(k + 1), -level); }
  double width() const { return std::ldexp(1.0, -level); }
  bool operator==(const DyadicInterval& o) const { return k == o.k && level == o.level; }
};

// Interval of width w starting at a; DomainError unless w is a power of two
// <= 1/4 and a is a multiple of w.
DyadicInterval make_dyadic_interval(double a, double w);

enum class Direction { left, right };
// theta_1..theta_count moving away from omega: the sibling if theta_j is the
// child on the near side, else the parent's neighbour.
std::vector<DyadicInterval> dyadic_sequence(const DyadicInterval& omega, Direction dir, int count);

// Closed-form bump eta(x) = (315/256)(1 - x^2)^4 on (-1, 1) and its integral
// from -1.
double bump(double x);
double bump_cdf(double x);

// phi^{alpha,k}_theta of the uniform family: 1_theta mollified at scale
// h_k(xi), where (left, right) halves use (1/8, 1/16), (1/16, 1/8),
// (1/16, 1/16), (1/8, 1/8) times alpha for k = 1..4. xi is taken mod 1.
double profile_value(double a, double b, int k, double xi);

struct AngularPiece {
  double a = 0.0, b = 0.0;  // unwrapped endpoints, b - a = alpha
  double alpha = 0.0;
  int k = 4;                // profile index 1..4
  double h_left = 0.0, h_right = 0.0;
};

struct AngularPartition {
  DyadicInterval omega;
  double alpha_mu = 0.0;
  // pieces[0] is omega, then counter-clockwise (increasing) around the circle
  std::vector<AngularPiece> pieces;
  // value of piece j at circle point xi
  double piece(std::size_t j, double xi) const;
  double sum(double xi) const;
};

// Partition of unity around omega in Omega_{alpha_mu}; alpha_mu is a dyadic
// reciprocal in [1/256, 1/8].
AngularPartition build_partition(const DyadicInterval& omega, double alpha_mu);

// Fourier multipliers by each piece at angle(xi) / 2 pi; xi = 0 follows the
// direction (1, 0). The outputs add up to f.
std::vector<Slice> sector_split(const Slice& f, int n, double len, const AngularPartition& p, double lam);

// Columns j, a_j, b_j, alpha_j, k_j.
void write_partition_csv(const std::string& path, const AngularPartition& p);

}  // namespace wp

#endif
