#include "wavepack/metric.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wavepack/interp.hpp"
#include "wavepack/parallel.hpp"

namespace wp {

MetricKind parse_metric_kind(const std::string& s) {
  if (s == "minkowski") return MetricKind::minkowski;
  if (s == "bump") return MetricKind::bump;
  if (s == "random_smooth") return MetricKind::random_smooth;
  throw DomainError("unknown metric kind: " + s);
}

std::string to_string(MetricKind k) {
  switch (k) {
    case MetricKind::minkowski: return "minkowski";
    case MetricKind::bump: return "bump";
    case MetricKind::random_smooth: return "random_smooth";
  }
  return "?";
}

namespace {

// harmonic index h: 0 -> constant, 2m-1 -> cos(m t), 2m -> sin(m t)
int num_harmonics(int mmax) { return 2 * mmax + 1; }

void time_weights(double t, int mmax, double* w, double* dw = nullptr, double* ddw = nullptr) {
  w[0] = 1.0;
  if (dw) dw[0] = 0.0;
  if (ddw) ddw[0] = 0.0;
  for (int m = 1; m <= mmax; ++m) {
    double c = std::cos(m * t), s = std::sin(m * t);
    w[2 * m - 1] = c;
    w[2 * m] = s;
    if (dw) {
      dw[2 * m - 1] = -m * s;
      dw[2 * m] = m * c;
    }
    if (ddw) {
      ddw[2 * m - 1] = -m * m * c;
      ddw[2 * m] = -m * m * s;
    }
  }
}

// Real field Re sum_k C_k e^{i k.x} of one time harmonic, optionally
// differentiated d1 times in x1 and d2 times in x2.
std::vector<double> synth_harmonic(const std::vector<MetricTerm>& terms, const MetricField& g, int m,
                                   bool sine, int n, int d1, int d2) {
  const std::size_t P = static_cast<std::size_t>(n) * n;
  std::vector<cplx> hat(P, 0.0), out(P);
  const double du = g.grid.dual_unit();
  for (const auto& tm : terms) {
    if (tm.m != m) continue;
    cplx c = (sine ? tm.csin : tm.ccos) * g.mollifier(tm);
    if (c == 0.0) continue;
    c *= std::pow(cplx(0, tm.k1 * du), d1) * std::pow(cplx(0, tm.k2 * du), d2);
    int i = ((tm.k1 % n) + n) % n, j = ((tm.k2 % n) + n) % n;
    hat[static_cast<std::size_t>(i) * n + j] += c;
  }
  fft_plan(n, n).backward(hat.data(), out.data());
  std::vector<double> r(P);
  for (std::size_t p = 0; p < P; ++p) r[p] = out[p].real();
  return r;
}

}  // namespace

struct MetricField::Sampled {
  int n = 0, H = 0;
  // samples[comp * H + h]
  std::vector<std::vector<double>> samples;
};

struct MetricField::SplineStore {
  int n = 0, H = 0;
  double len = 0.0;
  // interleaved: coef[(i*n + j) * (kNumComp*H) + comp*H + h]
  std::vector<double> coef;
};

MetricField::MetricField() : raw_(std::make_shared<Terms>()), cache_(std::make_shared<Cache>()) {}

MetricField::MetricField(const GridSpec& g, MetricKind k, double e, std::uint64_t s, Terms raw)
    : grid(g), kind(k), eta(e), seed(s), raw_(std::make_shared<Terms>(std::move(raw))),
      cache_(std::make_shared<Cache>()) {}

bool MetricField::flat() const {
  std::call_once(cache_->flat_once, [this] {
    bool f = true;
    for (int c = 0; c < kNumComp && f; ++c)
      for (const auto& t : (*raw_)[c])
        if (mollifier(t) != 0.0 && (t.ccos != 0.0 || t.csin != 0.0)) {
          f = false;
          break;
        }
    cache_->flat = f;
  });
  return cache_->flat;
}

double MetricField::mollifier(const MetricTerm& t) const {
  if (moll <= 0.0) return 1.0;
  const double du = grid.dual_unit();
  double r = std::sqrt(double(t.m) * t.m + du * du * (double(t.k1) * t.k1 + double(t.k2) * t.k2));
  return lp_cutoff(2.0 * r / moll);
}

std::vector<MetricTerm> MetricField::terms(int comp) const {
  std::vector<MetricTerm> out;
  for (const auto& t : (*raw_)[comp]) {
    double f = mollifier(t);
    if (f == 0.0) continue;
    MetricTerm u = t;
    u.ccos *= f;
    u.csin *= f;
    out.push_back(u);
  }
  return out;
}

int MetricField::max_time_harmonic() const {
  int m = 0;
  for (const auto& v : *raw_)
    for (const auto& t : v) m = std::max(m, t.m);
  return m;
}

int MetricField::max_space_freq() const {
  int k = 0;
  for (const auto& v : *raw_)
    for (const auto& t : v) k = std::max({k, std::abs(t.k1), std::abs(t.k2)});
  return k;
}

const MetricField::Sampled& MetricField::sampled(int n) const {
  std::lock_guard<std::mutex> lock(cache_->mu);
  auto it = cache_->by_n.find(n);
  if (it != cache_->by_n.end()) return *it->second;
  if (2 * max_space_freq() >= n) throw ResolutionError("metric: coefficient spectrum exceeds grid Nyquist");
  auto s = std::make_shared<Sampled>();
  s->n = n;
  s->H = num_harmonics(max_time_harmonic());
  s->samples.resize(kNumComp * s->H);
  for (int c = 0; c < kNumComp; ++c) {
    auto tc = (*raw_)[c];
    for (int h = 0; h < s->H; ++h) {
      int m = (h + 1) / 2;
      bool sine = h > 0 && h % 2 == 0;
      s->samples[c * s->H + h] = synth_harmonic(tc, *this, m, sine, n, 0, 0);
    }
  }
  cache_->by_n[n] = s;
  return *s;
}

const MetricField::SplineStore& MetricField::splines() const {
  std::call_once(cache_->spl_once, [this] {
    const Sampled& s = sampled(grid.n);
    auto st = std::make_shared<SplineStore>();
    st->n = s.n;
    st->H = s.H;
    st->len = grid.domain_len;
    const std::size_t P = static_cast<std::size_t>(s.n) * s.n;
    const int stride = kNumComp * s.H;
    st->coef.assign(P * stride, 0.0);
    for (int q = 0; q < stride; ++q) {
      auto c = bspline_prefilter(s.samples[q].data(), s.n);
      for (std::size_t p = 0; p < P; ++p) st->coef[p * stride + q] = c[p];
    }
    cache_->spl = st;
  });
  return *cache_->spl;
}

MetricCoeffs MetricField::at(double t, double x1, double x2) const {
  MetricCoeffs r;
  if (flat()) return r;
  const SplineStore& st = splines();
  const int H = st.H, n = st.n, stride = kNumComp * H;
  double w[16];
  time_weights(t, (H - 1) / 2, w);
  const double h = st.len / n;
  double u1 = x1 / h, u2 = x2 / h;
  double f1 = std::floor(u1), f2 = std::floor(u2);
  double w1[4], d1[4], w2[4], d2[4];
  bspline_weights(u1 - f1, w1, d1);
  bspline_weights(u2 - f2, w2, d2);
  long i0 = static_cast<long>(f1) - 1, j0 = static_cast<long>(f2) - 1;
  auto wrap = [n](long i) { long q = i % n; return q < 0 ? q + n : q; };
  double v[kNumComp] = {0}, g1[kNumComp] = {0}, g2[kNumComp] = {0};
  for (int a = 0; a < 4; ++a) {
    long ii = wrap(i0 + a);
    double r0[kNumComp] = {0}, rd[kNumComp] = {0};
    for (int b = 0; b < 4; ++b) {
      const double* cf = st.coef.data() + (static_cast<std::size_t>(ii) * n + wrap(j0 + b)) * stride;
      for (int c = 0; c < kNumComp; ++c) {
        double s = 0.0;
        for (int q = 0; q < H; ++q) s += w[q] * cf[c * H + q];
        r0[c] += w2[b] * s;
        rd[c] += d2[b] * s;
      }
    }
    for (int c = 0; c < kNumComp; ++c) {
      v[c] += w1[a] * r0[c];
      g1[c] += d1[a] * r0[c];
      g2[c] += w1[a] * rd[c];
    }
  }
  r.b[0] = v[kB1];
  r.b[1] = v[kB2];
  r.c[0] = 1.0 + v[kC11];
  r.c[1] = v[kC12];
  r.c[2] = 1.0 + v[kC22];
  for (int j = 0; j < 2; ++j) {
    r.db[j][0] = g1[kB1 + j] / h;
    r.db[j][1] = g2[kB1 + j] / h;
  }
  for (int q = 0; q < 3; ++q) {
    r.dc[q][0] = g1[kC11 + q] / h;
    r.dc[q][1] = g2[kC11 + q] / h;
  }
  return r;
}

MetricCoeffs MetricField::exact(double t, double x1, double x2) const {
  MetricCoeffs r;
  const double du = grid.dual_unit();
  double v[kNumComp] = {0}, g1[kNumComp] = {0}, g2[kNumComp] = {0};
  for (int c = 0; c < kNumComp; ++c) {
    for (const auto& tm : (*raw_)[c]) {
      double f = mollifier(tm);
      if (f == 0.0) continue;
      double k1 = tm.k1 * du, k2 = tm.k2 * du;
      cplx amp = f * (tm.ccos * std::cos(tm.m * t) + tm.csin * std::sin(tm.m * t));
      cplx e = std::exp(cplx(0, k1 * x1 + k2 * x2));
      cplx z = amp * e;
      v[c] += z.real();
      g1[c] += (cplx(0, k1) * z).real();
      g2[c] += (cplx(0, k2) * z).real();
    }
  }
  r.b[0] = v[kB1];
  r.b[1] = v[kB2];
  r.c[0] = 1.0 + v[kC11];
  r.c[1] = v[kC12];
  r.c[2] = 1.0 + v[kC22];
  for (int j = 0; j < 2; ++j) {
    r.db[j][0] = g1[kB1 + j];
    r.db[j][1] = g2[kB1 + j];
  }
  for (int q = 0; q < 3; ++q) {
    r.dc[q][0] = g1[kC11 + q];
    r.dc[q][1] = g2[kC11 + q];
  }
  return r;
}

MetricSlice MetricField::slice(double t, int n) const {
  MetricSlice out;
  out.n = n;
  const std::size_t P = static_cast<std::size_t>(n) * n;
  std::vector<double>* dst[kNumComp] = {&out.b1, &out.b2, &out.c11, &out.c12, &out.c22};
  for (int c = 0; c < kNumComp; ++c) dst[c]->assign(P, (c == kC11 || c == kC22) ? 1.0 : 0.0);
  if (flat()) return out;
  const Sampled& s = sampled(n);
  double w[16];
  time_weights(t, (s.H - 1) / 2, w);
  for (int c = 0; c < kNumComp; ++c) {
    auto& d = *dst[c];
    for (int h = 0; h < s.H; ++h) {
      const auto& src = s.samples[c * s.H + h];
      const double wh = w[h];
      if (wh == 0.0) continue;
      for (std::size_t p = 0; p < P; ++p) d[p] += wh * src[p];
    }
  }
  return out;
}

void MetricField::dual_matrix(const MetricCoeffs& m, double G[3][3]) {
  G[0][0] = 1.0;
  G[0][1] = G[1][0] = m.b[0];
  G[0][2] = G[2][0] = m.b[1];
  G[1][1] = -m.c[0];
  G[1][2] = G[2][1] = -m.c[1];
  G[2][2] = -m.c[2];
}

namespace {

MetricField::Terms bump_shape(const GridSpec& grid) {
  const double sigma = 0.6;
  const double L = grid.domain_len, du = grid.dual_unit();
  const double x0 = L / 2.0;
  const int K = static_cast<int>(std::floor(15.0 / du));
  MetricField::Terms T;
  const double beta0[2] = {0.6, -0.3}, beta1[2] = {0.3, 0.2};
  const double M[3] = {1.0, 0.4, -0.7};
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      double kk = du * du * (double(k1) * k1 + double(k2) * k2);
      if (kk > 225.0 + 1e-9) continue;
      cplx G = (kTwoPi * sigma * sigma / (L * L)) * std::exp(-0.5 * sigma * sigma * kk) *
               std::exp(cplx(0, -du * (k1 + k2) * x0));
      for (int j = 0; j < 2; ++j) {
        T[kB1 + j].push_back({0, k1, k2, beta0[j] * G, 0.0});
        T[kB1 + j].push_back({1, k1, k2, 0.0, beta1[j] * G});
      }
      for (int q = 0; q < 3; ++q) {
        T[kC11 + q].push_back({0, k1, k2, M[q] * G, 0.0});
        T[kC11 + q].push_back({1, k1, k2, 0.5 * M[q] * G, 0.0});
      }
    }
  }
  return T;
}

MetricField::Terms random_shape(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  MetricField::Terms T;
  for (int c = 0; c < kNumComp; ++c) {
    for (int m = 0; m <= 2; ++m) {
      for (int k1 = -3; k1 <= 3; ++k1) {
        for (int k2 = -3; k2 <= 3; ++k2) {
          double decay = 1.0 / (1.0 + k1 * k1 + k2 * k2 + m * m);
          cplx a(N(rng), N(rng)), b(N(rng), N(rng));
          if (m == 0) b = 0.0;
          T[c].push_back({m, k1, k2, decay * a, decay * b});
        }
      }
    }
  }
  return T;
}

}  // namespace

MetricField make_metric(MetricKind kind, double eta, std::uint64_t seed, const GridSpec& grid) {
  grid.validate();
  if (!(eta >= 0.0 && eta <= 0.2)) throw DomainError("make_metric: eta must lie in [0, 0.2]");
  if (kind == MetricKind::minkowski || eta == 0.0) return MetricField(grid, kind, eta, seed, {});
  MetricField::Terms T = kind == MetricKind::bump ? bump_shape(grid) : random_shape(seed);
  MetricField unit(grid, kind, 1.0, seed, T);
  if (4 * unit.max_space_freq() > grid.n) {
    double meas = 0.0;
    throw MetricConstructionError("make_metric: coefficient spectrum needs n >= " +
                                      std::to_string(4 * unit.max_space_freq()),
                                  meas);
  }
  double b1 = measure_budget(unit).total();
  double eps = 0.9 * eta * eta / b1;
  for (auto& v : T)
    for (auto& t : v) {
      t.ccos *= eps;
      t.csin *= eps;
    }
  MetricField g(grid, kind, eta, seed, std::move(T));
  double meas = measure_budget(g).total();
  if (meas > eta * eta)
    throw MetricConstructionError("make_metric: measured budget exceeds eta^2", meas);
  return g;
}

MetricField metric_from_terms(const GridSpec& grid, double eta, MetricField::Terms terms) {
  return MetricField(grid, MetricKind::random_smooth, eta, 0, std::move(terms));
}

MetricField mollify_metric(const MetricField& g, double mu) {
  if (!(mu >= 1.0) || !is_dyadic(mu)) throw DomainError("mollify_metric: mu must be dyadic >= 1");
  MetricField out(g.grid, g.kind, g.eta, g.seed, g.raw_terms());
  out.moll = mu;
  return out;
}

BudgetParts measure_budget(const MetricField& g) {
  BudgetParts bp;
  if (g.flat()) return bp;
  const GridSpec& gr = g.grid;
  const int n = gr.n, nt = gr.nt;
  const std::size_t P = gr.points();
  const int mmax = g.max_time_harmonic();
  const int H = num_harmonics(mmax);
  std::vector<double> gsup(nt, 0.0), hsup(nt, 0.0);
  for (int c = 0; c < kNumComp; ++c) {
    auto tc = g.terms(c);
    if (tc.empty()) continue;
    // arrays[h][d]: d = 0 value, 1 d1, 2 d2, 3 d11, 4 d12, 5 d22
    static const int dd[6][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
    std::vector<std::array<std::vector<double>, 6>> A(H);
    for (int h = 0; h < H; ++h) {
      int m = (h + 1) / 2;
      bool sine = h > 0 && h % 2 == 0;
      for (int d = 0; d < 6; ++d) A[h][d] = synth_harmonic(tc, g, m, sine, n, dd[d][0], dd[d][1]);
    }
    parallel_for(nt, [&](std::size_t k) {
      double w[16], dw[16], ddw[16];
      time_weights(gr.time(static_cast<int>(k)), mmax, w, dw, ddw);
      double gm = 0.0, hm = 0.0;
      for (std::size_t p = 0; p < P; ++p) {
        double gt = 0, g1 = 0, g2 = 0, gtt = 0, gt1 = 0, gt2 = 0, g11 = 0, g12 = 0, g22 = 0;
        for (int h = 0; h < H; ++h) {
          const auto& a = A[h];
          gt += dw[h] * a[0][p];
          gtt += ddw[h] * a[0][p];
          g1 += w[h] * a[1][p];
          g2 += w[h] * a[2][p];
          gt1 += dw[h] * a[1][p];
          gt2 += dw[h] * a[2][p];
          g11 += w[h] * a[3][p];
          g12 += w[h] * a[4][p];
          g22 += w[h] * a[5][p];
        }
        gm = std::max(gm, std::sqrt(gt * gt + g1 * g1 + g2 * g2));
        hm = std::max(hm, std::sqrt(gtt * gtt + 2 * gt1 * gt1 + 2 * gt2 * gt2 + g11 * g11 +
                                    2 * g12 * g12 + g22 * g22));
      }
      gsup[k] = std::max(gsup[k], gm);
      hsup[k] = std::max(hsup[k], hm);
    });
  }
  bp.grad_sup = *std::max_element(gsup.begin(), gsup.end());
  std::vector<double> h2(nt);
  for (int k = 0; k < nt; ++k) h2[k] = hsup[k] * hsup[k] * ((k == 0 || k == nt - 1) ? 0.5 : 1.0);
  bp.hess_l2 = std::sqrt(gr.dt * pairwise_sum(h2.data(), h2.size()));
  return bp;
}

NormReport verify_budget(const MetricField& g) {
  return make_report("metric_budget", measure_budget(g).total(), g.eta * g.eta, 1.0,
                     "first plus second spacetime derivatives of the metric within eta^2");
}

HalfWaveSymbol::HalfWaveSymbol(const MetricField& g, int sign, double moll)
    : g_(moll > 0.0 ? mollify_metric(g, moll) : g), sign_(sign >= 0 ? 1 : -1) {}

double HalfWaveSymbol::eval_coeffs(const MetricCoeffs& m, int sign, double xi1, double xi2) {
  if (xi1 == 0.0 && xi2 == 0.0) throw DomainError("half-wave symbol: xi = 0");
  double B = m.b[0] * xi1 + m.b[1] * xi2;
  double C = m.c[0] * xi1 * xi1 + 2.0 * m.c[1] * xi1 * xi2 + m.c[2] * xi2 * xi2;
  return B + sign * std::sqrt(B * B + C);
}

double HalfWaveSymbol::grad_coeffs(const MetricCoeffs& m, int sign, double xi1, double xi2,
                                   double ax[2], double axi[2]) {
  if (xi1 == 0.0 && xi2 == 0.0) throw DomainError("half-wave symbol: xi = 0");
  double B = m.b[0] * xi1 + m.b[1] * xi2;
  double cx1 = m.c[0] * xi1 + m.c[1] * xi2, cx2 = m.c[1] * xi1 + m.c[2] * xi2;
  double C = cx1 * xi1 + cx2 * xi2;
  double R = std::sqrt(B * B + C);
  axi[0] = m.b[0] + sign * (B * m.b[0] + cx1) / R;
  axi[1] = m.b[1] + sign * (B * m.b[1] + cx2) / R;
  for (int a = 0; a < 2; ++a) {
    double dB = m.db[0][a] * xi1 + m.db[1][a] * xi2;
    double dC = m.dc[0][a] * xi1 * xi1 + 2.0 * m.dc[1][a] * xi1 * xi2 + m.dc[2][a] * xi2 * xi2;
    ax[a] = dB + sign * (B * dB + 0.5 * dC) / R;
  }
  return B + sign * R;
}

double HalfWaveSymbol::eval(double t, double x1, double x2, double xi1, double xi2) const {
  return eval_coeffs(g_.at(t, x1, x2), sign_, xi1, xi2);
}

double HalfWaveSymbol::grad(double t, double x1, double x2, double xi1, double xi2, double ax[2],
                            double axi[2]) const {
  return grad_coeffs(g_.at(t, x1, x2), sign_, xi1, xi2, ax, axi);
}

}  // namespace wp
