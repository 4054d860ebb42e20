#include "wavepack/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavepack/parallel.hpp"

namespace wp {

void GridSpec::validate() const {
  if (n < 16 || (n & (n - 1)) != 0) throw DomainError("grid: n must be a power of two >= 16");
  if (!(domain_len > 0.0)) throw DomainError("grid: domain_len must be positive");
  if (!(dt > 0.0)) throw DomainError("grid: dt must be positive");
  if (nt < 3) throw StencilError("grid: nt must be >= 3 for centered time differences");
}

GridSpec make_grid(int n, int nt, double span, double t0) {
  GridSpec g;
  g.n = n;
  g.nt = nt;
  g.dt = span / (nt - 1);
  g.t0 = t0;
  return g;
}

SpacetimeField::SpacetimeField(const GridSpec& g) : grid(g), data(g.points() * g.nt) {}

Slice SpacetimeField::slice_copy(int k) const {
  const cplx* p = slice(k);
  return Slice(p, p + grid.points());
}

void SpacetimeField::set_slice(int k, const Slice& s) {
  std::copy(s.begin(), s.end(), slice(k));
}

void SpacetimeField::check_finite() const {
  for (const auto& z : data)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw DomainError("field contains non-finite entries");
}

bool is_dyadic(double v) {
  if (!(v > 0.0)) return false;
  int e;
  return std::frexp(v, &e) == 0.5;
}

int dyadic_floor(double v) {
  int p = 1;
  while (2.0 * p <= v * (1.0 + 1e-12)) p *= 2;
  return p;
}

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

double lp_cutoff(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 1.0 - smooth_step(r - 1.0);
}

double lp_block(double r, double lam) {
  if (lam <= 1.0) return lp_cutoff(r);
  return lp_cutoff(r / lam) - lp_cutoff(2.0 * r / lam);
}

double lp_low(double r, double mu) {
  if (mu <= 1.0) return 0.0;
  return lp_cutoff(2.0 * r / mu);
}

Slice apply_multiplier(const Slice& f, int n, double len,
                       const std::function<double(double, double)>& m) {
  const Fft& F = fft_plan(n, n);
  Slice hat(f.size()), out(f.size());
  F.forward(f.data(), hat.data());
  const double u = kTwoPi / len;
  for (int i = 0; i < n; ++i) {
    double k1 = freq_index(i, n) * u;
    for (int j = 0; j < n; ++j) hat[i * n + j] *= m(k1, freq_index(j, n) * u);
  }
  F.backward(hat.data(), out.data());
  return out;
}

Slice lp_project_slice(const Slice& f, int n, double len, double lam) {
  return apply_multiplier(f, n, len, [lam](double a, double b) {
    return lp_block(std::hypot(a, b), lam);
  });
}

SpacetimeField lp_project(const SpacetimeField& f, double lam, LpKind kind) {
  const GridSpec& g = f.grid;
  if (!is_dyadic(lam)) throw DomainError("lp_project: lam must be dyadic");
  const double kmax = (g.n / 4) * g.dual_unit();
  if (lam > kmax) throw ResolutionError("lp_project: lam exceeds the resolvable band n/4");
  SpacetimeField out(g);
  if (kind == LpKind::spatial) {
    parallel_for(g.nt, [&](std::size_t k) {
      out.set_slice(static_cast<int>(k), lp_project_slice(f.slice_copy(static_cast<int>(k)), g.n, g.domain_len, lam));
    });
    return out;
  }
  if (lam > kPi / g.dt) throw ResolutionError("lp_project: lam exceeds the time Nyquist frequency");
  const std::size_t P = g.points();
  const Fft& F2 = fft_plan(g.n, g.n);
  std::vector<cplx> hat(f.data.size());
  parallel_for(g.nt, [&](std::size_t k) {
    F2.forward(f.slice(static_cast<int>(k)), hat.data() + k * P);
  });
  const Fft& F1 = fft_plan(g.nt);
  const double u = g.dual_unit();
  const double tu = kTwoPi / (g.nt * g.dt);
  const std::size_t nb = (P + 255) / 256;
  parallel_for(nb, [&](std::size_t b) {
    std::vector<cplx> col(g.nt), colh(g.nt);
    for (std::size_t p = b * 256; p < std::min(P, (b + 1) * 256); ++p) {
      int i = static_cast<int>(p / g.n), j = static_cast<int>(p % g.n);
      double k2 = std::pow(freq_index(i, g.n) * u, 2) + std::pow(freq_index(j, g.n) * u, 2);
      for (int k = 0; k < g.nt; ++k) col[k] = hat[k * P + p];
      F1.forward(col.data(), colh.data());
      for (int m = 0; m < g.nt; ++m) {
        int mm = m <= g.nt / 2 ? m : m - g.nt;
        colh[m] *= lp_block(std::sqrt(k2 + std::pow(mm * tu, 2)), lam);
      }
      F1.backward(colh.data(), col.data());
      for (int k = 0; k < g.nt; ++k) hat[k * P + p] = col[k];
    }
  });
  parallel_for(g.nt, [&](std::size_t k) {
    F2.backward(hat.data() + k * P, out.slice(static_cast<int>(k)));
  });
  return out;
}

Slice spectral_derivative(const Slice& f, int n, double len, int d1, int d2) {
  const double u = kTwoPi / len;
  const Fft& F = fft_plan(n, n);
  Slice hat(f.size()), out(f.size());
  F.forward(f.data(), hat.data());
  for (int i = 0; i < n; ++i) {
    cplx a1 = std::pow(cplx(0, freq_index(i, n) * u), d1);
    if ((d1 & 1) && i == n / 2) a1 = 0.0;
    for (int j = 0; j < n; ++j) {
      cplx a2 = std::pow(cplx(0, freq_index(j, n) * u), d2);
      if ((d2 & 1) && j == n / 2) a2 = 0.0;
      hat[i * n + j] *= a1 * a2;
    }
  }
  F.backward(hat.data(), out.data());
  return out;
}

SliceDerivs spectral_derivs(const Slice& f, int n, double len, bool second) {
  const Fft& F = fft_plan(n, n);
  const double u = kTwoPi / len;
  Slice hat(f.size()), tmp(f.size());
  F.forward(f.data(), hat.data());
  SliceDerivs d;
  auto make = [&](Slice& out, auto mult) {
    for (int i = 0; i < n; ++i) {
      double k1 = freq_index(i, n) * u;
      for (int j = 0; j < n; ++j) {
        double k2 = freq_index(j, n) * u;
        tmp[i * n + j] = hat[i * n + j] * mult(i, j, k1, k2);
      }
    }
    out.resize(f.size());
    F.backward(tmp.data(), out.data());
  };
  const int ny = n / 2;
  make(d.d1, [&](int i, int, double k1, double) { return i == ny ? cplx(0) : cplx(0, k1); });
  make(d.d2, [&](int, int j, double, double k2) { return j == ny ? cplx(0) : cplx(0, k2); });
  if (second) {
    make(d.d11, [&](int, int, double k1, double) { return cplx(-k1 * k1); });
    make(d.d12, [&](int i, int j, double k1, double k2) {
      return (i == ny || j == ny) ? cplx(0) : cplx(-k1 * k2);
    });
    make(d.d22, [&](int, int, double, double k2) { return cplx(-k2 * k2); });
  }
  return d;
}

double l2_norm(const cplx* f, int n, double len) {
  const std::size_t P = static_cast<std::size_t>(n) * n;
  std::vector<double> a(P);
  for (std::size_t i = 0; i < P; ++i) a[i] = std::norm(f[i]);
  double h = len / n;
  return std::sqrt(h * h * pairwise_sum(a.data(), P));
}

double l2_norm(const Slice& f, int n, double len) { return l2_norm(f.data(), n, len); }

double inner_re(const Slice& a, const Slice& b, int n, double len) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = (std::conj(a[i]) * b[i]).real();
  double h = len / n;
  return h * h * pairwise_sum(v.data(), v.size());
}

double hs_norm(const Slice& f, int n, double len, double s) {
  Slice hat(f.size());
  fft_plan(n, n).forward(f.data(), hat.data());
  const double u = kTwoPi / len;
  std::vector<double> a(f.size());
  for (int i = 0; i < n; ++i) {
    double k1 = freq_index(i, n) * u;
    for (int j = 0; j < n; ++j) {
      double k2 = freq_index(j, n) * u;
      a[i * n + j] = std::pow(1.0 + k1 * k1 + k2 * k2, s) * std::norm(hat[i * n + j]);
    }
  }
  return len * std::sqrt(pairwise_sum(a.data(), a.size()));
}

namespace {
std::vector<double> slice_l2(const SpacetimeField& f) {
  std::vector<double> v(f.grid.nt);
  parallel_for(f.grid.nt, [&](std::size_t k) {
    v[k] = l2_norm(f.slice(static_cast<int>(k)), f.grid.n, f.grid.domain_len);
  });
  return v;
}

double trapezoid(const std::vector<double>& v, double dt) {
  if (v.size() == 1) return v[0];
  std::vector<double> w(v);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return dt * pairwise_sum(w.data(), w.size());
}
}  // namespace

double spacetime_l2(const SpacetimeField& f) {
  auto v = slice_l2(f);
  for (auto& x : v) x *= x;
  return std::sqrt(trapezoid(v, f.grid.dt));
}

double linf_l2(const SpacetimeField& f) {
  auto v = slice_l2(f);
  return *std::max_element(v.begin(), v.end());
}

double l1_l2(const SpacetimeField& f) { return trapezoid(slice_l2(f), f.grid.dt); }

SpacetimeField time_derivative(const SpacetimeField& f, int order) {
  const GridSpec& g = f.grid;
  const int nt = g.nt;
  if (order == 4 && nt < 5) throw StencilError("time_derivative: order 4 needs nt >= 5");
  if (nt < 3) throw StencilError("time_derivative: needs nt >= 3");
  SpacetimeField out(g);
  const std::size_t P = g.points();
  parallel_for(nt, [&](std::size_t kk) {
    int k = static_cast<int>(kk);
    cplx* o = out.slice(k);
    auto s = [&](int m) { return f.slice(m); };
    if (order == 4) {
      const double c = 1.0 / (12.0 * g.dt);
      if (k >= 2 && k <= nt - 3) {
        const cplx *a = s(k - 2), *b = s(k - 1), *d = s(k + 1), *e = s(k + 2);
        for (std::size_t p = 0; p < P; ++p) o[p] = c * (a[p] - 8.0 * b[p] + 8.0 * d[p] - e[p]);
      } else {
        static const double w0[5] = {-25, 48, -36, 16, -3};
        static const double w1[5] = {-3, -10, 18, -6, 1};
        const double* w = (k == 0 || k == nt - 1) ? w0 : w1;
        bool tail = k >= nt - 2;
        double sg = tail ? -1.0 : 1.0;
        for (std::size_t p = 0; p < P; ++p) {
          cplx acc = 0.0;
          for (int q = 0; q < 5; ++q) acc += w[q] * s(tail ? nt - 1 - q : q)[p];
          o[p] = sg * c * acc;
        }
      }
    } else {
      const double c = 1.0 / (2.0 * g.dt);
      if (k >= 1 && k <= nt - 2) {
        const cplx *a = s(k - 1), *b = s(k + 1);
        for (std::size_t p = 0; p < P; ++p) o[p] = c * (b[p] - a[p]);
      } else if (k == 0) {
        for (std::size_t p = 0; p < P; ++p) o[p] = c * (-3.0 * s(0)[p] + 4.0 * s(1)[p] - s(2)[p]);
      } else {
        for (std::size_t p = 0; p < P; ++p)
          o[p] = c * (3.0 * s(nt - 1)[p] - 4.0 * s(nt - 2)[p] + s(nt - 3)[p]);
      }
    }
  });
  return out;
}

double data_norm(const Slice& u, const Slice& ut, int n, double len, double s) {
  double a = hs_norm(u, n, len, s), b = hs_norm(ut, n, len, s - 1.0);
  return std::sqrt(a * a + b * b);
}

double energy_norm(const SpacetimeField& u, double s) {
  const GridSpec& g = u.grid;
  SpacetimeField ut = time_derivative(u, g.nt >= 5 ? 4 : 2);
  std::vector<double> v(g.nt);
  parallel_for(g.nt, [&](std::size_t k) {
    v[k] = data_norm(u.slice_copy(static_cast<int>(k)), ut.slice_copy(static_cast<int>(k)), g.n, g.domain_len, s);
  });
  return *std::max_element(v.begin(), v.end());
}

Slice resample_slice(const Slice& f, int n, int m) {
  if (static_cast<int>(std::sqrt(static_cast<double>(f.size()))) != n)
    throw DomainError("resample_slice: size mismatch");
  if (n == m) return f;
  Slice F(f.size());
  fft_plan(n, n).forward(f.data(), F.data());
  Slice G(static_cast<std::size_t>(m) * m, 0.0);
  const int half = std::min(n, m) / 2;
  for (int i = 0; i < n; ++i) {
    const int a = freq_index(i, n);
    if (std::abs(a) >= half) continue;
    for (int j = 0; j < n; ++j) {
      const int b = freq_index(j, n);
      if (std::abs(b) >= half) continue;
      G[static_cast<std::size_t>((a + m) % m) * m + (b + m) % m] = F[static_cast<std::size_t>(i) * n + j];
    }
  }
  Slice g(G.size());
  fft_plan(m, m).backward(G.data(), g.data());
  return g;
}

NormReport make_report(const std::string& name, double value, double bound, double tol,
                       const std::string& anchor) {
  NormReport r;
  r.name = name;
  r.value = value;
  r.bound = bound;
  r.anchor = anchor;
  if (bound > 0.0)
    r.ratio = value / bound;
  else
    r.ratio = value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  r.pass = std::isfinite(value) && r.ratio <= tol;
  return r;
}

}  // namespace wp
