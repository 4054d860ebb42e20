#include "wavepack/box.hpp"

#include <cmath>

#include "wavepack/parallel.hpp"

namespace wp {

const Slice& SliceWindow::get(int k) {
  auto it = cache_.find(k);
  if (it != cache_.end()) return it->second;
  while (cache_.size() >= keep_) {
    // drop whichever cached slice is farthest from k
    auto lo = cache_.begin();
    auto hi = std::prev(cache_.end());
    cache_.erase(std::abs(lo->first - k) >= std::abs(hi->first - k) ? lo : hi);
  }
  return cache_.emplace(k, src_(k)).first->second;
}

namespace {
Slice combo(SliceWindow& w, std::initializer_list<std::pair<int, double>> terms, double scale) {
  Slice out;
  for (auto [k, c] : terms) {
    const Slice& s = w.get(k);
    if (out.empty()) out.assign(s.size(), 0.0);
    for (std::size_t p = 0; p < s.size(); ++p) out[p] += c * s[p];
  }
  for (auto& z : out) z *= scale;
  return out;
}
}  // namespace

bool box_one_sided(const GridSpec& g, int k) { return g.nt > 3 && (k == 0 || k == g.nt - 1); }

Slice time_d1(SliceWindow& w, const GridSpec& g, int k) {
  const int nt = g.nt;
  const double s = 1.0 / (2.0 * g.dt);
  if (k == 0) return combo(w, {{0, -3.0}, {1, 4.0}, {2, -1.0}}, s);
  if (k == nt - 1) return combo(w, {{nt - 1, 3.0}, {nt - 2, -4.0}, {nt - 3, 1.0}}, s);
  return combo(w, {{k + 1, 1.0}, {k - 1, -1.0}}, s);
}

Slice time_d2(SliceWindow& w, const GridSpec& g, int k) {
  const int nt = g.nt;
  const double s = 1.0 / (g.dt * g.dt);
  if (nt == 3) return combo(w, {{0, 1.0}, {1, -2.0}, {2, 1.0}}, s);
  if (k == 0) return combo(w, {{0, 2.0}, {1, -5.0}, {2, 4.0}, {3, -1.0}}, s);
  if (k == nt - 1) return combo(w, {{nt - 1, 2.0}, {nt - 2, -5.0}, {nt - 3, 4.0}, {nt - 4, -1.0}}, s);
  return combo(w, {{k + 1, 1.0}, {k, -2.0}, {k - 1, 1.0}}, s);
}

Slice box_slice(const MetricField& g, const GridSpec& grid, SliceWindow& u, int k) {
  if (grid.nt < 3) throw StencilError("apply_box: needs at least 3 time slices");
  const int n = grid.n;
  const double len = grid.domain_len;
  Slice utt = time_d2(u, grid, k);
  Slice ut = time_d1(u, grid, k);
  SliceDerivs dt_ = spectral_derivs(ut, n, len, false);
  SliceDerivs dx = spectral_derivs(u.get(k), n, len, true);
  MetricSlice m = g.slice(grid.time(k), n);
  Slice out(utt.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    out[p] = utt[p] + 2.0 * (m.b1[p] * dt_.d1[p] + m.b2[p] * dt_.d2[p]) -
             (m.c11[p] * dx.d11[p] + 2.0 * m.c12[p] * dx.d12[p] + m.c22[p] * dx.d22[p]);
  }
  return out;
}

SpacetimeField apply_box(const MetricField& g, const SpacetimeField& u, double moll,
                         std::vector<bool>* flags) {
  const GridSpec& grid = u.grid;
  if (grid.nt < 3) throw StencilError("apply_box: needs at least 3 time slices");
  MetricField gm = moll > 0.0 ? mollify_metric(g, moll) : g;
  SpacetimeField out(grid);
  parallel_for(grid.nt, [&](std::size_t kk) {
    int k = static_cast<int>(kk);
    SliceWindow w([&](int j) { return u.slice_copy(j); }, 8);
    out.set_slice(k, box_slice(gm, grid, w, k));
  });
  if (flags) {
    flags->assign(grid.nt, false);
    for (int k = 0; k < grid.nt; ++k) (*flags)[k] = box_one_sided(grid, k);
  }
  return out;
}

namespace {
void check_block_args(double lam, double d) {
  if (!is_dyadic(lam) || !is_dyadic(d)) throw DomainError("xnorm_block: lam and d must be dyadic");
  if (d < 1.0 || d > lam) throw DomainError("xnorm_block: need 1 <= d <= lam");
}
}  // namespace

double block_from_parts(const BlockParts& p, double s, double theta, double lam, double d) {
  check_block_args(lam, d);
  double a = std::pow(lam, s) * std::pow(d, theta) * p.u_l2;
  double b = std::pow(lam, s - 1.0) * std::pow(d, theta - 1.0) * p.box_l2;
  return std::sqrt(a * a + b * b);
}

BlockParts block_parts_stream(const MetricField& g, const GridSpec& grid, const SliceProvider& u,
                              double mu) {
  if (grid.nt < 3) throw StencilError("xnorm_block: needs at least 3 time slices");
  MetricField gm = mu > 0.0 ? mollify_metric(g, mu) : g;
  SliceWindow w(u, 6);
  std::vector<double> a(grid.nt), b(grid.nt);
  for (int k = 0; k < grid.nt; ++k) {
    double wk = (k == 0 || k == grid.nt - 1) ? 0.5 : 1.0;
    double nu = l2_norm(w.get(k), grid.n, grid.domain_len);
    double nb = l2_norm(box_slice(gm, grid, w, k), grid.n, grid.domain_len);
    a[k] = wk * nu * nu;
    b[k] = wk * nb * nb;
  }
  BlockParts p;
  p.u_l2 = std::sqrt(grid.dt * pairwise_sum(a.data(), a.size()));
  p.box_l2 = std::sqrt(grid.dt * pairwise_sum(b.data(), b.size()));
  return p;
}

double xnorm_block_stream(const MetricField& g, const GridSpec& grid, const SliceProvider& u,
                          double s, double theta, double lam, double d) {
  check_block_args(lam, d);
  return block_from_parts(block_parts_stream(g, grid, u, dyadic_floor(std::sqrt(lam))), s, theta,
                          lam, d);
}

double xnorm_block(const MetricField& g, const SpacetimeField& u, double s, double theta,
                   double lam, double d) {
  check_block_args(lam, d);
  const double mu = dyadic_floor(std::sqrt(lam));
  SpacetimeField bx = apply_box(g, u, mu);
  BlockParts p{spacetime_l2(u), spacetime_l2(bx)};
  return block_from_parts(p, s, theta, lam, d);
}

SpacetimeField nullform_eval(const MetricField& g, const SpacetimeField& u, const SpacetimeField& v,
                             double moll) {
  const GridSpec& grid = u.grid;
  if (v.grid.n != grid.n || v.grid.nt != grid.nt) throw DomainError("nullform_eval: grid mismatch");
  MetricField gm = moll > 0.0 ? mollify_metric(g, moll) : g;
  SpacetimeField out(grid);
  const int n = grid.n;
  const double len = grid.domain_len;
  parallel_for(grid.nt, [&](std::size_t kk) {
    int k = static_cast<int>(kk);
    SliceWindow wu([&](int j) { return u.slice_copy(j); }, 4);
    SliceWindow wv([&](int j) { return v.slice_copy(j); }, 4);
    Slice ut = time_d1(wu, grid, k), vt = time_d1(wv, grid, k);
    SliceDerivs du = spectral_derivs(wu.get(k), n, len, false);
    SliceDerivs dv = spectral_derivs(wv.get(k), n, len, false);
    MetricSlice m = gm.slice(grid.time(k), n);
    cplx* o = out.slice(k);
    for (std::size_t p = 0; p < ut.size(); ++p) {
      o[p] = ut[p] * vt[p] + m.b1[p] * (du.d1[p] * vt[p] + ut[p] * dv.d1[p]) +
             m.b2[p] * (du.d2[p] * vt[p] + ut[p] * dv.d2[p]) -
             (m.c11[p] * du.d1[p] * dv.d1[p] + m.c12[p] * (du.d1[p] * dv.d2[p] + du.d2[p] * dv.d1[p]) +
              m.c22[p] * du.d2[p] * dv.d2[p]);
    }
  });
  return out;
}

}  // namespace wp
