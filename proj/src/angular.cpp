#include "wavepack/angular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "wavepack/fft.hpp"

namespace wp {

DyadicInterval make_dyadic_interval(double a, double w) {
  int e = 0;
  double m = std::frexp(w, &e);
  if (!(w > 0.0) || m != 0.5 || w > 0.25) throw DomainError("angular: width must be a power of two <= 1/4");
  DyadicInterval I;
  I.level = 1 - e;
  double k = std::ldexp(a, I.level);
  if (k != std::floor(k)) throw DomainError("angular: interval is not dyadic");
  I.k = static_cast<std::int64_t>(k);
  return I;
}

std::vector<DyadicInterval> dyadic_sequence(const DyadicInterval& omega, Direction dir, int count) {
  if (omega.level < 2) throw DomainError("dyadic_sequence: omega wider than 1/4");
  std::vector<DyadicInterval> out;
  DyadicInterval cur = omega;
  for (int j = 0; j < count; ++j) {
    DyadicInterval nx;
    const bool even = (cur.k % 2 + 2) % 2 == 0;
    if (dir == Direction::right) {
      if (even) {
        nx = {cur.k + 1, cur.level};
      } else {
        nx = {(cur.k - 1) / 2 + 1, cur.level - 1};
      }
    } else {
      if (!even) {
        nx = {cur.k - 1, cur.level};
      } else {
        // floor division for negative k
        std::int64_t parent = cur.k >= 0 ? cur.k / 2 : -((-cur.k + 1) / 2);
        nx = {parent - 1, cur.level - 1};
      }
    }
    out.push_back(nx);
    cur = nx;
  }
  return out;
}

double bump(double x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  double s = 1.0 - x * x;
  return (315.0 / 256.0) * s * s * s * s;
}

double bump_cdf(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  // antiderivative of (1 - x^2)^4 = x - 4x^3/3 + 6x^5/5 - 4x^7/7 + x^9/9
  const double x2 = x * x;
  const double p = x * (1.0 + x2 * (-4.0 / 3.0 + x2 * (6.0 / 5.0 + x2 * (-4.0 / 7.0 + x2 / 9.0))));
  return 0.5 + (315.0 / 256.0) * p;
}

namespace {

// 1_[a,b) mollified with scale hl on the left half and hr on the right half;
// xi is moved to the copy nearest the midpoint.
double mollified(double a, double b, double hl, double hr, double xi) {
  const double mid = 0.5 * (a + b);
  xi -= std::round(xi - mid);
  if (xi <= mid) return bump_cdf((xi - a) / hl) - bump_cdf((xi - b) / hl);
  return bump_cdf((xi - a) / hr) - bump_cdf((xi - b) / hr);
}

}  // namespace

double profile_value(double a, double b, int k, double xi) {
  const double al = b - a;
  static const double L[4] = {1.0 / 8, 1.0 / 16, 1.0 / 16, 1.0 / 8};
  static const double R[4] = {1.0 / 16, 1.0 / 8, 1.0 / 16, 1.0 / 8};
  if (k < 1 || k > 4) throw DomainError("profile_value: k must be 1..4");
  return mollified(a, b, L[k - 1] * al, R[k - 1] * al, xi);
}

double AngularPartition::piece(std::size_t j, double xi) const {
  const AngularPiece& p = pieces.at(j);
  return mollified(p.a, p.b, p.h_left, p.h_right, xi);
}

double AngularPartition::sum(double xi) const {
  double s = 0.0;
  for (std::size_t j = 0; j < pieces.size(); ++j) s += piece(j, xi);
  return s;
}

namespace {

// Fills [A, B) with aligned dyadic intervals whose widths change by at most a
// factor 2 between neighbours, including the fixed widths wl before A and wr
// after B. Fewest pieces; false if impossible.
bool fill_gap(double A, double B, double wl, double wr, double unit, std::vector<DyadicInterval>& out) {
  const long n = std::lround((B - A) / unit);
  if (n < 0) return false;
  if (n == 0) {
    out.clear();
    return wl <= 2.0 * wr && wr <= 2.0 * wl;
  }
  const int nlev = 7;  // widths unit * 2^e, e = 0..6
  const int INF = 1 << 29;
  // best[pos][e]: fewest pieces covering [A, A + pos unit) ending with width e
  std::vector<std::vector<int>> best(n + 1, std::vector<int>(nlev + 1, INF));
  std::vector<std::vector<int>> from(n + 1, std::vector<int>(nlev + 1, -1));
  auto width = [&](int e) { return unit * std::ldexp(1.0, e); };
  auto ok = [](double w1, double w2) { return w1 <= 2.0 * w2 * (1 + 1e-12) && w2 <= 2.0 * w1 * (1 + 1e-12); };
  // e = nlev marks the left boundary state
  best[0][nlev] = 0;
  for (long pos = 0; pos < n; ++pos)
    for (int pe = 0; pe <= nlev; ++pe) {
      if (best[pos][pe] >= INF) continue;
      const double wprev = pe == nlev ? wl : width(pe);
      for (int e = 0; e < nlev; ++e) {
        const long len = 1L << e;
        if (std::fmod(A / unit + pos, static_cast<double>(len)) != 0.0) continue;
        if (width(e) > 0.25 || pos + len > n || !ok(wprev, width(e))) continue;
        if (best[pos][pe] + 1 < best[pos + len][e]) {
          best[pos + len][e] = best[pos][pe] + 1;
          from[pos + len][e] = pe;
        }
      }
    }
  int be = -1;
  for (int e = 0; e < nlev; ++e)
    if (best[n][e] < INF && ok(width(e), wr) && (be < 0 || best[n][e] < best[n][be])) be = e;
  if (be < 0) return false;
  std::vector<DyadicInterval> rev;
  long pos = n;
  int e = be;
  while (pos > 0) {
    const long len = 1L << e;
    rev.push_back(make_dyadic_interval(A + (pos - len) * unit, width(e)));
    const int pe = from[pos][e];
    pos -= len;
    e = pe;
  }
  out.assign(rev.rbegin(), rev.rend());
  return true;
}

std::vector<DyadicInterval> children(const DyadicInterval& I) {
  return {{2 * I.k, I.level + 1}, {2 * I.k + 1, I.level + 1}};
}

}  // namespace

AngularPartition build_partition(const DyadicInterval& omega, double alpha_mu) {
  int e = 0;
  if (std::frexp(alpha_mu, &e) != 0.5 || alpha_mu > 0.125 || alpha_mu < 1.0 / 256.0)
    throw DomainError("build_partition: alpha_mu must be a dyadic in [1/256, 1/8]");
  if (omega.width() != alpha_mu) throw DomainError("build_partition: omega must have width alpha_mu");
  const double w0 = omega.width();
  // right and left sequences, cut at total length 1/2 - |omega|
  auto cut = [&](Direction d) {
    std::vector<DyadicInterval> s = dyadic_sequence(omega, d, 64), keep;
    double tot = 0.0;
    for (const auto& I : s) {
      if (tot + I.width() > 0.5 - w0 + 1e-15) break;
      tot += I.width();
      keep.push_back(I);
    }
    return keep;
  };
  std::vector<DyadicInterval> R = cut(Direction::right), Lft = cut(Direction::left);
  // gap from the end of the right run to the start of the left run, one turn later
  std::vector<DyadicInterval> mid;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const DyadicInterval& re = R.empty() ? omega : R.back();
    const DyadicInterval& le = Lft.empty() ? omega : Lft.back();
    const double A = re.b(), B = le.a() + 1.0;
    if (fill_gap(A, B, re.width(), le.width(), 1.0 / 256.0, mid)) break;
    // split the wider end interval and retry
    if (re.width() >= le.width() && !R.empty()) {
      auto ch = children(R.back());
      R.pop_back();
      R.insert(R.end(), ch.begin(), ch.end());
    } else if (!Lft.empty()) {
      auto ch = children(Lft.back());
      Lft.pop_back();
      Lft.push_back(ch[1]);
      Lft.push_back(ch[0]);
    } else {
      throw DomainError("build_partition: cannot close the partition");
    }
    if (attempt == 7) throw DomainError("build_partition: cannot close the partition");
  }
  std::vector<DyadicInterval> seq;
  seq.push_back(omega);
  seq.insert(seq.end(), R.begin(), R.end());
  seq.insert(seq.end(), mid.begin(), mid.end());
  for (auto it = Lft.rbegin(); it != Lft.rend(); ++it) seq.push_back({it->k + (std::int64_t(1) << it->level), it->level});

  AngularPartition P;
  P.omega = omega;
  P.alpha_mu = alpha_mu;
  const std::size_t M = seq.size();
  std::vector<double> hj(M);
  for (std::size_t j = 0; j < M; ++j) {
    const double a = seq[j].width(), b = seq[(j + 1) % M].width();
    hj[j] = std::min(a, b) / 8.0;  // alpha_j/8 if alpha_j <= alpha_{j+1}, else alpha_j/16
  }
  for (std::size_t j = 0; j < M; ++j) {
    AngularPiece p;
    p.a = seq[j].a();
    p.b = seq[j].b();
    p.alpha = seq[j].width();
    p.h_left = hj[(j + M - 1) % M];
    p.h_right = hj[j];
    const bool l8 = p.h_left > p.alpha / 12.0, r8 = p.h_right > p.alpha / 12.0;
    p.k = l8 && !r8 ? 1 : (!l8 && r8 ? 2 : (!l8 && !r8 ? 3 : 4));
    P.pieces.push_back(p);
  }
  return P;
}

std::vector<Slice> sector_split(const Slice& f, int n, double len, const AngularPartition& p, double lam) {
  (void)lam;
  if (f.size() != static_cast<std::size_t>(n) * n) throw DomainError("sector_split: size mismatch");
  Slice F(f.size());
  fft_plan(n, n).forward(f.data(), F.data());
  std::vector<Slice> out;
  Slice G(F.size()), g(F.size());
  for (std::size_t j = 0; j < p.pieces.size(); ++j) {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        const std::size_t q = static_cast<std::size_t>(i) * n + k;
        const int a = freq_index(i, n), b = freq_index(k, n);
        double s = (a == 0 && b == 0) ? 0.0 : std::atan2(static_cast<double>(b), static_cast<double>(a)) / kTwoPi;
        if (s < 0.0) s += 1.0;
        G[q] = F[q] * p.piece(j, s);
      }
    fft_plan(n, n).backward(G.data(), g.data());
    out.push_back(g);
  }
  (void)len;
  return out;
}

void write_partition_csv(const std::string& path, const AngularPartition& p) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.precision(17);
  os << "j,a_j,b_j,alpha_j,k_j\n";
  for (std::size_t j = 0; j < p.pieces.size(); ++j)
    os << j << ',' << p.pieces[j].a << ',' << p.pieces[j].b << ',' << p.pieces[j].alpha << ',' << p.pieces[j].k
       << '\n';
}

}  // namespace wp
