#include <algorithm>
#include <cmath>
#include <fstream>

#include "wavepack/eikonal.hpp"
#include "wavepack/parallel.hpp"

namespace wp {

namespace {

void dual_at(const MetricSlice& m, std::size_t p, double G[3][3]) {
  G[0][0] = 1.0;
  G[0][1] = G[1][0] = m.b1[p];
  G[0][2] = G[2][0] = m.b2[p];
  G[1][1] = -m.c11[p];
  G[1][2] = G[2][1] = -m.c12[p];
  G[2][2] = -m.c22[p];
}

void neg_inverse(const double G[3][3], double g[3][3]) {
  double c00 = G[1][1] * G[2][2] - G[1][2] * G[2][1];
  double c01 = G[1][2] * G[2][0] - G[1][0] * G[2][2];
  double c02 = G[1][0] * G[2][1] - G[1][1] * G[2][0];
  double det = G[0][0] * c00 + G[0][1] * c01 + G[0][2] * c02;
  double inv[3][3];
  inv[0][0] = c00;
  inv[1][0] = c01;
  inv[2][0] = c02;
  inv[0][1] = G[0][2] * G[2][1] - G[0][1] * G[2][2];
  inv[1][1] = G[0][0] * G[2][2] - G[0][2] * G[2][0];
  inv[2][1] = G[0][1] * G[2][0] - G[0][0] * G[2][1];
  inv[0][2] = G[0][1] * G[1][2] - G[0][2] * G[1][1];
  inv[1][2] = G[0][2] * G[1][0] - G[0][0] * G[1][2];
  inv[2][2] = G[0][0] * G[1][1] - G[0][1] * G[1][0];
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) g[a][b] = -inv[a][b] / det;
}

double gdot(const double g[3][3], const double u[3], const double v[3]) {
  double s = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += g[a][b] * u[a] * v[b];
  return s;
}

struct FramePoint {
  double L[3], Lb[3], E[3];
};

FramePoint frame_point(const double G[3][3], const double g[3][3], const double dphi[3],
                       const double th[2], const double thp[2]) {
  FramePoint f;
  for (int a = 0; a < 3; ++a) {
    f.L[a] = 0.0;
    for (int b = 0; b < 3; ++b) f.L[a] -= G[a][b] * dphi[b];
  }
  double pth = dphi[1] * th[0] + dphi[2] * th[1];
  double pperp = dphi[1] * thp[0] + dphi[2] * thp[1];
  double e[3] = {0.0, thp[0] - pperp / pth * th[0], thp[1] - pperp / pth * th[1]};
  double ne = std::sqrt(gdot(g, e, e));
  for (int a = 0; a < 3; ++a) f.E[a] = e[a] / ne;
  const double dt_[3] = {1.0, 0.0, 0.0};
  double gte = gdot(g, dt_, f.E);
  double W[3];
  for (int a = 0; a < 3; ++a) W[a] = dt_[a] - gte * f.E[a];
  double A = gdot(g, f.L, f.L), B = gdot(g, W, f.L), C = gdot(g, W, W);
  double disc = B * B - A * C;
  if (!(std::abs(B) > 1e-12) || disc < 0.0) throw FrameDegeneracyError("null frame: transversal null direction is singular");
  double kappa = -C / (B + std::copysign(std::sqrt(disc), B));
  double V[3];
  for (int a = 0; a < 3; ++a) V[a] = W[a] + kappa * f.L[a];
  double mu = -1.0 / gdot(g, f.L, V);
  for (int a = 0; a < 3; ++a) f.Lb[a] = mu * V[a];
  return f;
}

}  // namespace

void lower_metric(const MetricSlice& m, std::size_t p, double g[3][3]) {
  double G[3][3];
  dual_at(m, p, G);
  neg_inverse(G, g);
}

NullFrameSlice null_frame_slice(const Foliation& f, int k) {
  const GridSpec& gr = f.grid;
  const std::size_t P = gr.points();
  NullFrameSlice s;
  s.dphi = phi_derivs(f, k);
  s.m = f.sym.metric().slice(gr.time(k), gr.n);
  for (int a = 0; a < 3; ++a) {
    s.L[a].resize(P);
    s.Lbar[a].resize(P);
    s.E[a].resize(P);
  }
  for (std::size_t p = 0; p < P; ++p) {
    double G[3][3], g[3][3];
    dual_at(s.m, p, G);
    neg_inverse(G, g);
    double dphi[3] = {s.dphi.phit[p], s.dphi.p1[p], s.dphi.p2[p]};
    FramePoint fp = frame_point(G, g, dphi, f.theta, f.theta_perp);
    for (int a = 0; a < 3; ++a) {
      s.L[a][p] = fp.L[a];
      s.Lbar[a][p] = fp.Lb[a];
      s.E[a][p] = fp.E[a];
    }
  }
  return s;
}

FrameIdentities frame_identities(const Foliation& f, int slice_stride) {
  const GridSpec& gr = f.grid;
  const std::size_t P = gr.points();
  std::vector<int> ks;
  for (int k = 0; k < gr.nt; k += std::max(1, slice_stride)) ks.push_back(k);
  if (ks.back() != gr.nt - 1) ks.push_back(gr.nt - 1);
  std::vector<FrameIdentities> per(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    NullFrameSlice s = null_frame_slice(f, ks[i]);
    FrameIdentities r;
    for (std::size_t p = 0; p < P; ++p) {
      double g[3][3];
      lower_metric(s.m, p, g);
      double L[3], Lb[3], E[3];
      for (int a = 0; a < 3; ++a) {
        L[a] = s.L[a][p];
        Lb[a] = s.Lbar[a][p];
        E[a] = s.E[a][p];
      }
      r.gLL = std::max(r.gLL, std::abs(gdot(g, L, L)));
      r.gLE = std::max(r.gLE, std::abs(gdot(g, L, E)));
      r.gLLbar = std::max(r.gLLbar, std::abs(gdot(g, L, Lb) + 1.0));
      r.gLbarE = std::max(r.gLbarE, std::abs(gdot(g, Lb, E)));
      r.gEE = std::max(r.gEE, std::abs(gdot(g, E, E) - 1.0));
      r.gLbarLbar = std::max(r.gLbarLbar, std::abs(gdot(g, Lb, Lb)));
      double dphi[3] = {s.dphi.phit[p], s.dphi.p1[p], s.dphi.p2[p]};
      double dl = 0, de = 0;
      for (int a = 0; a < 3; ++a) {
        dl += dphi[a] * L[a];
        de += dphi[a] * E[a];
      }
      r.dphiL = std::max(r.dphiL, std::abs(dl));
      r.dphiE = std::max(r.dphiE, std::abs(de));
      MetricCoeffs c;
      c.b[0] = s.m.b1[p];
      c.b[1] = s.m.b2[p];
      c.c[0] = s.m.c11[p];
      c.c[1] = s.m.c12[p];
      c.c[2] = s.m.c22[p];
      double ax[2], axi[2];
      HalfWaveSymbol::grad_coeffs(c, f.sign, dphi[1], dphi[2], ax, axi);
      double V[3] = {1.0, axi[0], axi[1]};
      double cr[3] = {L[1] * V[2] - L[2] * V[1], L[2] * V[0] - L[0] * V[2], L[0] * V[1] - L[1] * V[0]};
      double nl = std::sqrt(L[0] * L[0] + L[1] * L[1] + L[2] * L[2]);
      double nv = std::sqrt(V[0] * V[0] + V[1] * V[1] + V[2] * V[2]);
      double sn = std::sqrt(cr[0] * cr[0] + cr[1] * cr[1] + cr[2] * cr[2]) / (nl * nv);
      r.angle_defect = std::max(r.angle_defect, std::asin(std::min(1.0, sn)));
    }
    per[i] = r;
  });
  FrameIdentities out;
  for (const auto& r : per) {
    out.gLL = std::max(out.gLL, r.gLL);
    out.gLE = std::max(out.gLE, r.gLE);
    out.gLLbar = std::max(out.gLLbar, r.gLLbar);
    out.gLbarE = std::max(out.gLbarE, r.gLbarE);
    out.gEE = std::max(out.gEE, r.gEE);
    out.gLbarLbar = std::max(out.gLbarLbar, r.gLbarLbar);
    out.dphiL = std::max(out.dphiL, r.dphiL);
    out.dphiE = std::max(out.dphiE, r.dphiE);
    out.angle_defect = std::max(out.angle_defect, r.angle_defect);
  }
  return out;
}

namespace {

const double kGLx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                        0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
const double kGLw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                        0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

}  // namespace

double surface_integral(const Foliation& f, const ComponentProvider& field, double h, double band,
                        int n_xp) {
  const double Hp = f.h_period();
  if (!(h >= 0.0 && h < Hp)) throw DomainError("surface_integral: h outside [0, h_period)");
  if (band < 0.0) throw DomainError("surface_integral: band must be >= 0");
  const GridSpec& gr = f.grid;
  int nx = n_xp;
  if (nx <= 0) {
    double want = gr.n * std::hypot(f.e[0], f.e[1]);
    nx = 16;
    while (nx < want - 1e-9) nx *= 2;
  }
  const double Xp = f.xp_period();
  std::vector<double> hs, hw;
  if (band > 0.0) {
    for (int i = 0; i < 8; ++i) {
      hs.push_back(h + band * kGLx[i]);
      hw.push_back(0.5 * kGLw[i]);
    }
  } else {
    hs.push_back(h);
    hw.push_back(1.0);
  }
  const int nh = static_cast<int>(hs.size()), nt = gr.nt;
  std::vector<double> xp(nx);
  for (int q = 0; q < nx; ++q) xp[q] = q * Xp / nx;
  // leaf graphs s[(k * nh + l) * nx + q]
  std::vector<double> s(static_cast<std::size_t>(nt) * nh * nx);
  parallel_for(nt, [&](std::size_t kk) {
    int k = static_cast<int>(kk);
    for (int l = 0; l < nh; ++l) {
      auto row = leaf_graph(f, k, hs[l], xp);
      std::copy(row.begin(), row.end(), s.begin() + (static_cast<std::size_t>(k) * nh + l) * nx);
    }
  });
  // surface element
  std::vector<double> dsig(s.size());
  const Fft& F = fft_plan(nx);
  for (int k = 0; k < nt; ++k) {
    for (int l = 0; l < nh; ++l) {
      std::vector<cplx> a(nx), ah(nx);
      const double* row = s.data() + (static_cast<std::size_t>(k) * nh + l) * nx;
      for (int q = 0; q < nx; ++q) a[q] = row[q];
      F.forward(a.data(), ah.data());
      for (int q = 0; q < nx; ++q) {
        int fq = freq_index(q, nx);
        ah[q] *= (2 * std::abs(fq) == nx) ? cplx(0) : cplx(0, fq * kTwoPi / Xp);
      }
      F.backward(ah.data(), a.data());
      auto at = [&](int kk) { return s.data() + (static_cast<std::size_t>(kk) * nh + l) * nx; };
      for (int q = 0; q < nx; ++q) {
        double pt;
        if (nt < 3) pt = 0.0;
        else if (k == 0) pt = (-3 * at(0)[q] + 4 * at(1)[q] - at(2)[q]) / (2 * gr.dt);
        else if (k == nt - 1) pt = (3 * at(nt - 1)[q] - 4 * at(nt - 2)[q] + at(nt - 3)[q]) / (2 * gr.dt);
        else pt = (at(k + 1)[q] - at(k - 1)[q]) / (2 * gr.dt);
        double px = a[q].real();
        dsig[(static_cast<std::size_t>(k) * nh + l) * nx + q] = std::sqrt(1.0 + pt * pt + px * px);
      }
    }
  }
  std::vector<double> per(nt, 0.0);
  for (int k = 0; k < nt; ++k) {
    std::vector<Slice> comps = field(k);
    std::vector<PeriodicSpline2<cplx>> sp;
    for (const auto& c : comps) sp.emplace_back(c.data(), gr.n, gr.domain_len);
    std::vector<double> acc(static_cast<std::size_t>(nh) * nx, 0.0);
    parallel_for(static_cast<std::size_t>(nh) * nx, [&](std::size_t idx) {
      int l = static_cast<int>(idx / nx), q = static_cast<int>(idx % nx);
      double sv = s[(static_cast<std::size_t>(k) * nh + l) * nx + q];
      double x1 = xp[q] * f.theta_perp[0] + sv * f.theta[0];
      double x2 = xp[q] * f.theta_perp[1] + sv * f.theta[1];
      double v = 0.0;
      for (const auto& c : sp) v += std::norm(c.value(x1, x2));
      acc[idx] = hw[l] * v * dsig[(static_cast<std::size_t>(k) * nh + l) * nx + q];
    });
    double wk = (nt > 1 && (k == 0 || k == nt - 1)) ? 0.5 : 1.0;
    per[k] = wk * pairwise_sum(acc.data(), acc.size());
  }
  double tw = nt > 1 ? gr.dt : 1.0;
  return tw * (Xp / nx) * pairwise_sum(per.data(), per.size());
}

void write_leaf_csv(const std::string& path, const Foliation& f, double h, int slice_stride) {
  std::ofstream o(path);
  if (!o) throw std::runtime_error("write_leaf_csv: cannot open " + path);
  o << "t,xp,x_theta,x1,x2\n";
  const int nx = 64;
  std::vector<double> xp(nx);
  for (int q = 0; q < nx; ++q) xp[q] = q * f.xp_period() / nx;
  char buf[256];
  for (int k = 0; k < f.grid.nt; k += std::max(1, slice_stride)) {
    auto s = leaf_graph(f, k, h, xp);
    for (int q = 0; q < nx; ++q) {
      double x1 = xp[q] * f.theta_perp[0] + s[q] * f.theta[0];
      double x2 = xp[q] * f.theta_perp[1] + s[q] * f.theta[1];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", f.grid.time(k), xp[q], s[q], x1, x2);
      o << buf;
    }
  }
}

}  // namespace wp
