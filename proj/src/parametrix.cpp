#include <algorithm>
#include <cmath>
#include <fstream>

#include "packet_eval.hpp"
#include "wavepack/interp.hpp"
#include "wavepack/parallel.hpp"
#include "wavepack/packets.hpp"

namespace wp {

double ParametrixCoeffs::l2sq() const { return u[0].l2sq() + u[1].l2sq() + v[0].l2sq() + v[1].l2sq(); }

namespace {

// Oversampled baseband of one direction's generators,
// G(q) = sum_zeta hgen(zeta) e^{2 pi i zeta.q / (P N)}, cropped to the footprint.
struct GeneratorTable {
  double s[2] = {0, 0};  // fine spacing L / (P N)
  int R[2] = {0, 0};     // footprint half-width in fine steps
  int W[2] = {0, 0};     // stored width, q in [-R-2, R+3]
  double Z[2] = {0, 0};  // footprint half-width R s
  // the footprint reaches the generator's period: cover [-L/2, L/2) once
  bool periodic[2] = {false, false};
  std::vector<cplx> phi, psi;

  void eval(double z1, double z2, cplx& gp, cplx& gs) const {
    double u1 = z1 / s[0], u2 = z2 / s[1];
    double f1 = std::floor(u1), f2 = std::floor(u2);
    int q1 = static_cast<int>(f1) + R[0] + 2 - 1, q2 = static_cast<int>(f2) + R[1] + 2 - 1;
    if (q1 < 0 || q2 < 0 || q1 + 3 >= W[0] || q2 + 3 >= W[1]) {
      gp = gs = 0.0;
      return;
    }
    double w1[4], w2[4];
    lagrange4_weights(u1 - f1, w1);
    lagrange4_weights(u2 - f2, w2);
    cplx ap = 0.0, as = 0.0;
    for (int a = 0; a < 4; ++a) {
      const std::size_t row = static_cast<std::size_t>(q1 + a) * W[1] + q2;
      cplx rp = w2[0] * phi[row] + w2[1] * phi[row + 1] + w2[2] * phi[row + 2] + w2[3] * phi[row + 3];
      cplx rs = w2[0] * psi[row] + w2[1] * psi[row + 1] + w2[2] * psi[row + 2] + w2[3] * psi[row + 3];
      ap += w1[a] * rp;
      as += w1[a] * rs;
    }
    gp = ap;
    gs = as;
  }
};

GeneratorTable build_table(const PacketFrame& fr, const PacketWindow& w, const ParametrixOptions& opt) {
  const int P = std::max(2, opt.oversample);
  const int M1 = P * w.N[0], M2 = P * w.N[1];
  const double L = fr.grid.domain_len;
  std::vector<cplx> buf(static_cast<std::size_t>(M1) * M2), gp(buf.size()), gs(buf.size());
  auto fill = [&](bool psi) {
    std::fill(buf.begin(), buf.end(), cplx(0.0));
    for (int a = 0; a < w.N[0]; ++a)
      for (int b = 0; b < w.N[1]; ++b) {
        std::size_t k = static_cast<std::size_t>(a) * w.N[1] + b;
        if (w.h[k] == 0.0) continue;
        int z1 = w.lo[0] + a, z2 = w.lo[1] + b;
        buf[static_cast<std::size_t>((z1 % M1 + M1) % M1) * M2 + (z2 % M2 + M2) % M2] =
            psi ? cplx(0.0, w.h[k] * w.vfac[k]) : cplx(w.h[k]);
      }
  };
  const Fft& plan = fft_plan(M1, M2);
  fill(false);
  plan.backward(buf.data(), gp.data());
  fill(true);
  plan.backward(buf.data(), gs.data());

  double peak_p = 0.0, peak_s = 0.0;
  for (std::size_t k = 0; k < buf.size(); ++k) {
    peak_p = std::max(peak_p, std::abs(gp[k]));
    peak_s = std::max(peak_s, std::abs(gs[k]));
  }
  GeneratorTable T;
  for (int i = 0; i < M1; ++i)
    for (int j = 0; j < M2; ++j) {
      std::size_t k = static_cast<std::size_t>(i) * M2 + j;
      if (std::abs(gp[k]) >= opt.footprint_tol * peak_p || std::abs(gs[k]) >= opt.footprint_tol * peak_s) {
        T.R[0] = std::max(T.R[0], std::abs(freq_index(i, M1)));
        T.R[1] = std::max(T.R[1], std::abs(freq_index(j, M2)));
      }
    }
  const int M[2] = {M1, M2};
  for (int a = 0; a < 2; ++a)
    if (T.R[a] > M[a] / 2 - 4) {
      T.R[a] = M[a] / 2;
      T.periodic[a] = true;
    }
  for (int a = 0; a < 2; ++a) {
    T.s[a] = L / (P * w.N[a]);
    T.W[a] = 2 * T.R[a] + 6;
    T.Z[a] = T.R[a] * T.s[a];
  }
  T.phi.resize(static_cast<std::size_t>(T.W[0]) * T.W[1]);
  T.psi.resize(T.phi.size());
  for (int a = 0; a < T.W[0]; ++a)
    for (int b = 0; b < T.W[1]; ++b) {
      int q1 = a - T.R[0] - 2, q2 = b - T.R[1] - 2;
      std::size_t src = static_cast<std::size_t>((q1 % M1 + M1) % M1) * M2 + (q2 % M2 + M2) % M2;
      T.phi[static_cast<std::size_t>(a) * T.W[1] + b] = gp[src];
      T.psi[static_cast<std::size_t>(a) * T.W[1] + b] = gs[src];
    }
  return T;
}

struct KeptTube {
  int omega, i, j;
  cplx alpha[2];  // u amplitude per sign
  cplx beta[2];   // v amplitude per sign
};

// Adds alpha u_T + beta v_T at one time to `out` over the footprint box
// |z_a| <= Z_a, z = Theta (y - x_T(t)).
void accumulate(const PacketFrame& fr, const PacketWindow& w, const GeneratorTable& tab,
                const SphereState& s, double a0, cplx alpha, cplx beta, bool exact, Slice& out,
                std::vector<cplx>& e1, std::vector<cplx>& e2) {
  const int n = fr.grid.n;
  const double h = fr.grid.dx(), du = fr.grid.dual_unit();
  const double Z1 = tab.Z[0], Z2 = tab.Z[1];
  // half-open on periodic axes so no point is counted twice
  const double eps = 1e-9 * h;
  const double Z1lo = tab.periodic[0] ? Z1 + eps : Z1, Z1hi = tab.periodic[0] ? Z1 - eps : Z1;
  const double Z2lo = tab.periodic[1] ? Z2 + eps : Z2, Z2hi = tab.periodic[1] ? Z2 - eps : Z2;
  const double T00 = s.th[0][0], T01 = s.th[0][1], T10 = s.th[1][0], T11 = s.th[1][1];
  // d = Theta^T z
  const double D1 = std::abs(T00) * Z1 + std::abs(T10) * Z2;
  // one spare row each side; the strips below decide membership
  const int i0 = static_cast<int>(std::ceil((s.x[0] - D1) / h)) - 1, i1 = static_cast<int>(std::floor((s.x[0] + D1) / h)) + 1;
  const cplx bsc = beta / a0;
  for (int ii = i0; ii <= i1; ++ii) {
    const double d1 = ii * h - s.x[0];
    double lo = -1e300, hi = 1e300;
    bool empty = false;
    auto strip = [&](double c0, double c1, double Zlo, double Zhi) {
      // -Zlo <= c0 d1 + c1 d2 <= Zhi
      if (std::abs(c1) < 1e-14) {
        if (c0 * d1 < -Zlo || c0 * d1 > Zhi) empty = true;
        return;
      }
      double a = (-Zlo - c0 * d1) / c1, b = (Zhi - c0 * d1) / c1;
      if (a > b) std::swap(a, b);
      lo = std::max(lo, a);
      hi = std::min(hi, b);
    };
    strip(T00, T01, Z1lo, Z1hi);
    strip(T10, T11, Z2lo, Z2hi);
    if (empty || hi < lo || lo == -1e300 || hi == 1e300) continue;
    const int j0 = static_cast<int>(std::ceil((s.x[1] + lo) / h)), j1 = static_cast<int>(std::floor((s.x[1] + hi) / h));
    const int row = ((ii % n) + n) % n;
    cplx* orow = out.data() + static_cast<std::size_t>(row) * n;
    for (int jj = j0; jj <= j1; ++jj) {
      const double d2 = jj * h - s.x[1];
      const double z[2] = {T00 * d1 + T01 * d2, T10 * d1 + T11 * d2};
      cplx val;
      if (exact) {
        val = 0.0;
        if (alpha != 0.0) val += alpha * detail::window_sum(fr, w, z, Generator::phi, e1, e2);
        if (bsc != 0.0) val += bsc * detail::window_sum(fr, w, z, Generator::psi, e1, e2);
      } else {
        cplx gp, gs;
        tab.eval(z[0], z[1], gp, gs);
        val = w.amp * std::polar(1.0, du * (w.xc[0] * z[0] + w.xc[1] * z[1])) * (alpha * gp + bsc * gs);
      }
      orow[((jj % n) + n) % n] += val;
    }
  }
}

}  // namespace

namespace {

// Fields at `evt` for the coefficient set; fills tubes_used and dropped_rel.
std::vector<Slice> evolve_coefficients(const PacketFrame& fr, const ParametrixCoeffs& C, const MetricField& g,
                                       const std::vector<double>& evt, const ParametrixOptions& opt,
                                       ParametrixResult& res) {
  for (double t : evt)
    if (!(t >= 0.0)) throw DomainError("parametrix: times must be nonnegative");
  for (int s = 0; s < 2; ++s)
    if (C.u[s].c.size() != fr.win.size() || C.v[s].c.size() != fr.win.size())
      throw DomainError("parametrix: coefficient layout does not match the frame");
  const double lam = fr.lam;
  double peak = 0.0;
  for (std::size_t w = 0; w < fr.win.size(); ++w)
    for (int s = 0; s < 2; ++s) {
      if (C.u[s].c[w].size() != fr.win[w].lattice_size() || C.v[s].c[w].size() != fr.win[w].lattice_size())
        throw DomainError("parametrix: lattice size mismatch");
      for (std::size_t k = 0; k < C.u[s].c[w].size(); ++k)
        peak = std::max({peak, std::abs(C.u[s].c[w][k]), std::abs(C.v[s].c[w][k])});
    }
  std::vector<std::vector<KeptTube>> kept(fr.win.size());
  std::vector<double> dropped(fr.win.size(), 0.0), total(fr.win.size(), 0.0);
  for (std::size_t w = 0; w < fr.win.size(); ++w) {
    const int N2 = fr.win[w].N[1];
    for (std::size_t k = 0; k < C.u[0].c[w].size(); ++k) {
      KeptTube kt{static_cast<int>(w), static_cast<int>(k / N2), static_cast<int>(k % N2), {}, {}};
      double mag = 0.0, e = 0.0;
      for (int s = 0; s < 2; ++s) {
        kt.alpha[s] = C.u[s].c[w][k];
        kt.beta[s] = C.v[s].c[w][k];
        mag = std::max({mag, std::abs(kt.alpha[s]), std::abs(kt.beta[s])});
        e += std::norm(kt.alpha[s]) + std::norm(kt.beta[s]);
      }
      total[w] += e;
      if (mag > 0.0 && mag >= opt.drop_rel * peak)
        kept[w].push_back(kt);
      else
        dropped[w] += e;
    }
  }
  const double tot = pairwise_sum(total.data(), total.size());
  res.dropped_rel = tot > 0.0 ? pairwise_sum(dropped.data(), dropped.size()) / tot : 0.0;

  double t_max = 0.0;
  for (double t : evt) t_max = std::max(t_max, t);
  const int musm = dyadic_floor(std::sqrt(lam));
  const HalfWaveSymbol syms[2] = {HalfWaveSymbol(g, 1, musm), HalfWaveSymbol(g, -1, musm)};
  std::vector<Slice> fields(evt.size(), Slice(fr.grid.points(), 0.0));

  std::vector<cplx> e1, e2;
  for (std::size_t w = 0; w < fr.win.size(); ++w) {
    if (kept[w].empty()) continue;
    const PacketWindow& win = fr.win[w];
    GeneratorTable tab = build_table(fr, win, opt);
    const std::size_t nk = kept[w].size();
    // states[(k * 2 + sign) * nt + it]
    std::vector<SphereState> states(nk * 2 * evt.size());
    std::vector<double> a0(nk * 2);
    std::vector<char> active(nk * 2, 0);
    for (std::size_t q = 0; q < nk * 2; ++q) {
      const KeptTube& kt = kept[w][q / 2];
      active[q] = kt.alpha[q % 2] != 0.0 || kt.beta[q % 2] != 0.0;
    }
    parallel_for(nk * 2, [&](std::size_t q) {
      if (!active[q]) return;
      const KeptTube& kt = kept[w][q / 2];
      Tube T = make_tube(fr, syms[q % 2], kt.omega, kt.i, kt.j, t_max, opt.dt_ray);
      a0[q] = T.a0;
      for (std::size_t it = 0; it < evt.size(); ++it) states[q * evt.size() + it] = T.ray.at(evt[it]);
    });
    for (std::size_t q = 0; q < nk * 2; ++q) {
      if (!active[q]) continue;
      const KeptTube& kt = kept[w][q / 2];
      for (std::size_t it = 0; it < evt.size(); ++it)
        accumulate(fr, win, tab, states[q * evt.size() + it], a0[q], kt.alpha[q % 2], kt.beta[q % 2], opt.exact,
                   fields[it], e1, e2);
      ++res.tubes_used;
    }
  }
  return fields;
}

}  // namespace

ParametrixResult parametrix_from_coefficients(const PacketFrame& fr, const ParametrixCoeffs& c,
                                              const MetricField& g, const std::vector<double>& times,
                                              const ParametrixOptions& opt) {
  ParametrixResult res;
  res.times = times;
  res.coeffs = c;
  res.coeff_l2sq = c.l2sq();
  res.fields = evolve_coefficients(fr, c, g, times, opt, res);
  return res;
}

ParametrixCoeffs sparse_coefficients(const PacketFrame& fr, const std::vector<std::array<int, 3>>& tubes,
                                     const std::vector<cplx>& alpha) {
  if (tubes.size() != alpha.size()) throw DomainError("sparse_coefficients: size mismatch");
  ParametrixCoeffs C;
  for (int s = 0; s < 2; ++s) {
    for (auto* T : {&C.u[s], &C.v[s]}) {
      T->lam = fr.lam;
      T->c.resize(fr.win.size());
      for (std::size_t w = 0; w < fr.win.size(); ++w) {
        T->c[w].assign(fr.win[w].lattice_size(), 0.0);
        T->dims.push_back({fr.win[w].N[0], fr.win[w].N[1]});
      }
    }
  }
  for (std::size_t q = 0; q < tubes.size(); ++q) {
    const int w = tubes[q][0], i = tubes[q][1], j = tubes[q][2];
    if (w < 0 || w >= static_cast<int>(fr.win.size()) || i < 0 || j < 0 || i >= fr.win[w].N[0] ||
        j >= fr.win[w].N[1])
      throw DomainError("sparse_coefficients: bad tube index");
    const std::size_t k = static_cast<std::size_t>(i) * fr.win[w].N[1] + j;
    C.u[0].c[w][k] += 0.5 * alpha[q];
    C.u[1].c[w][k] += 0.5 * alpha[q];
  }
  return C;
}

ParametrixResult parametrix_evolve(const PacketFrame& fr, const Slice& u0, const Slice& u1,
                                   const MetricField& g, const std::vector<double>& times,
                                   const ParametrixOptions& opt) {
  const int n = fr.grid.n;
  const double L = fr.grid.domain_len, lam = fr.lam;
  if (u0.size() != fr.grid.points() || u1.size() != fr.grid.points())
    throw DomainError("parametrix_evolve: data size does not match the frame grid");
  const double n0 = l2_norm(u0, n, L), n1 = l2_norm(u1, n, L);
  for (const Slice* f : {&u0, &u1}) {
    if (l2_norm(*f, n, L) == 0.0) continue;
    if (mass_outside(*f, n, L, 0.5 * lam, 2.0 * lam) > 1e-8)
      throw DomainError("parametrix_evolve: data not localized to [lam/2, 2 lam]");
  }

  ParametrixResult res;
  res.times = times;
  const double hm1 = hs_norm(u1, n, L, -1.0);
  res.data_normsq = n0 * n0 + hm1 * hm1;

  TubeCoefficients a = analyze(fr, u0), b = analyze(fr, u1);
  ParametrixCoeffs& C = res.coeffs;
  for (int sgn = 0; sgn < 2; ++sgn) {
    C.u[sgn] = a;
    C.v[sgn] = b;
    const double sv = (sgn == 0 ? 0.5 : -0.5) / lam;
    for (auto& row : C.u[sgn].c)
      for (auto& x : row) x *= 0.5;
    for (auto& row : C.v[sgn].c)
      for (auto& x : row) x *= sv;
  }
  res.coeff_l2sq = a.l2sq() + b.l2sq() / (lam * lam);

  // requested times plus 0, delta, 2 delta for the velocity check
  const double delta = 0.01 / lam;
  std::vector<double> evt = times;
  const std::size_t nreq = times.size();
  evt.push_back(0.0);
  evt.push_back(delta);
  evt.push_back(2.0 * delta);
  std::vector<Slice> fields = evolve_coefficients(fr, C, g, evt, opt, res);

  const Slice& w0 = fields[nreq];
  const Slice& w1 = fields[nreq + 1];
  const Slice& w2 = fields[nreq + 2];
  Slice diff(w0.size()), vel(w0.size());
  for (std::size_t k = 0; k < w0.size(); ++k) {
    diff[k] = w0[k] - u0[k];
    vel[k] = (-3.0 * w0[k] + 4.0 * w1[k] - w2[k]) / (2.0 * delta) - u1[k];
  }
  res.data_mismatch = n0 > 0.0 ? l2_norm(diff, n, L) / n0 : l2_norm(diff, n, L);
  const double vref = n1 > 0.0 ? n1 : lam * n0;
  res.velocity_mismatch = vref > 0.0 ? l2_norm(vel, n, L) / vref : l2_norm(vel, n, L);
  fields.resize(nreq);
  res.fields = std::move(fields);
  return res;
}

void write_coefficients_csv(const std::string& path, const ParametrixCoeffs& c) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "sign,omega_idx,lattice_i,lattice_j,re,im,v_re,v_im\n";
  os.precision(17);
  for (int sg = 0; sg < 2; ++sg) {
    const TubeCoefficients& U = c.u[sg];
    const TubeCoefficients& V = c.v[sg];
    for (std::size_t w = 0; w < U.c.size(); ++w) {
      const int N2 = w < U.dims.size() ? U.dims[w][1] : 1;
      for (std::size_t k = 0; k < U.c[w].size(); ++k) {
        cplx u = U.c[w][k], v = k < V.c[w].size() ? V.c[w][k] : cplx(0.0);
        if (u == 0.0 && v == 0.0) continue;
        os << (sg == 0 ? 1 : -1) << ',' << w << ',' << k / N2 << ',' << k % N2 << ',' << u.real() << ','
           << u.imag() << ',' << v.real() << ',' << v.imag() << '\n';
      }
    }
  }
}

}  // namespace wp
