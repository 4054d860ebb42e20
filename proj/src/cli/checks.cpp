#include "wavepack/cli/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "wavepack/angular.hpp"
#include "wavepack/box.hpp"
#include "wavepack/eikonal.hpp"
#include "wavepack/packets.hpp"
#include "wavepack/solver.hpp"

namespace wp::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string lam_tag(double lam) { return " lam=" + fmt(lam); }

// Frame grid: the frame needs lam <= n/4.
int frame_n(const ExperimentConfig& cfg, double lam) { return std::max(cfg.n, static_cast<int>(4 * lam)); }

double rel_diff(const Slice& a, const Slice& b, int n, double len) {
  Slice d(a.size());
  for (std::size_t p = 0; p < a.size(); ++p) d[p] = a[p] - b[p];
  return l2_norm(d, n, len) / l2_norm(b, n, len);
}

double sup_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Random (omega, i, j) tubes with Gaussian amplitudes normalized to unit l2.
void random_tubes(const PacketFrame& fr, int count, std::mt19937_64& rng, std::vector<std::array<int, 3>>& tubes,
                  std::vector<cplx>& alpha) {
  std::normal_distribution<double> N;
  double s = 0.0;
  for (int k = 0; k < count; ++k) {
    const int w = static_cast<int>(rng() % fr.win.size());
    const int i = static_cast<int>(rng() % fr.win[w].N[0]), j = static_cast<int>(rng() % fr.win[w].N[1]);
    tubes.push_back({w, i, j});
    const double re = N(rng), im = N(rng);
    alpha.emplace_back(re, im);
    s += re * re + im * im;
  }
  for (auto& a : alpha) a /= std::sqrt(s);
}

// Time-affine field a(x) + t b(x) with smooth random a, b.
struct AffineField {
  Slice a, b;
};

AffineField random_affine(int n, double len, double kmax, std::mt19937_64& rng) {
  return {random_band(n, len, 0.0, kmax, rng, true), random_band(n, len, 0.0, kmax, rng, true)};
}

SpacetimeField sample_affine(const AffineField& f, const GridSpec& g) {
  SpacetimeField u(g);
  for (int k = 0; k < g.nt; ++k) {
    const double t = g.time(k);
    cplx* s = u.slice(k);
    for (std::size_t p = 0; p < g.points(); ++p) s[p] = f.a[p] + t * f.b[p];
  }
  return u;
}

}  // namespace

NormReport upper_check(const std::string& name, double value, double bound, const std::string& anchor) {
  NormReport r;
  r.name = name;
  r.value = value;
  r.bound = bound;
  r.ratio = 1.0 + value - bound;
  r.pass = std::isfinite(value) && value <= bound;
  r.anchor = anchor;
  return r;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size();
  if (m < 2 || y.size() != m) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32)};
  return std::mt19937_64(seq);
}

Slice random_band(int n, double len, double lo, double hi, std::mt19937_64& rng, bool real) {
  std::normal_distribution<double> N;
  const double du = kTwoPi / len;
  Slice F(static_cast<std::size_t>(n) * n, 0.0);
  // draw in a fixed order over the whole lattice so the stream position does
  // not depend on the band
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = N(rng), im = N(rng);
      const double r = du * std::hypot(freq_index(i, n), freq_index(j, n));
      if (r >= lo && r <= hi && 2 * std::abs(freq_index(i, n)) != n && 2 * std::abs(freq_index(j, n)) != n)
        F[static_cast<std::size_t>(i) * n + j] = cplx(re, im);
    }
  Slice f(F.size());
  fft_plan(n, n).backward(F.data(), f.data());
  if (real)
    for (auto& v : f) v = v.real();
  return f;
}

// ---------------------------------------------------------------- frames

SuiteResult frame_tightness(const ExperimentConfig& cfg) {
  SuiteResult r;
  CsvTable t{"tightness", {"lambda", "directions", "tubes", "parseval_rel", "reconstruction_rel", "partition_defect"}, {}};
  for (double lam : cfg.lambda_list) {
    const int n = frame_n(cfg, lam);
    const GridSpec g = make_grid(n, 3, 1.0);
    const PacketFrame fr = build_frame(lam, g);
    auto rng = stream(cfg.seed, 100 + static_cast<std::uint64_t>(lam));
    const Slice f = restrict_to_core(fr, random_band(n, g.domain_len, 0.6 * lam, 1.1 * lam, rng));
    const TubeCoefficients c = analyze(fr, f);
    const double fn = std::pow(l2_norm(f, n, g.domain_len), 2);
    const double parseval = std::abs(c.l2sq() - fn) / fn;
    const double recon = rel_diff(synthesize(fr, c), f, n, g.domain_len);
    double defect = 0.0;
    const int kmax = static_cast<int>(lam);
    for (int a = -kmax; a <= kmax; ++a)
      for (int b = -kmax; b <= kmax; ++b)
        if (a * a + b * b <= kmax * kmax)
          defect = std::max(defect, std::abs(partition_sum(a * g.dual_unit(), b * g.dual_unit(), lam) - 1.0));
    r.checks.push_back(make_report("frame Parseval" + lam_tag(lam), parseval, cfg.tol.frame, 1.0,
                                   "tight frame: sum |c_T|^2 = |f|^2"));
    r.checks.push_back(make_report("frame reconstruction" + lam_tag(lam), recon, cfg.tol.frame, 1.0,
                                   "tight frame: synthesis after analysis is the identity"));
    r.checks.push_back(make_report("frequency partition of unity" + lam_tag(lam), defect, cfg.tol.frame, 1.0,
                                   "dyadic and angular windows square-sum to one"));
    t.rows.push_back({lam, static_cast<double>(fr.M), static_cast<double>(fr.num_tubes()), parseval, recon, defect});
  }
  r.tables.push_back(std::move(t));
  return r;
}

SuiteResult packet_decay(const ExperimentConfig& cfg) {
  SuiteResult r;
  CsvTable t{"decay", {"lambda", "axis", "target_d", "distance", "sup_n0", "sup_n4"}, {}};
  const MetricField g = cfg.metric(cfg.grid());
  const double t_max = std::min(0.5, cfg.t_end);
  const std::vector<double> times = {0.0, 0.5 * t_max, t_max};
  const double targets[] = {0.0, 2.0, 4.0, 8.0};
  for (double lam : cfg.lambda_list) {
    const int n = frame_n(cfg, lam);
    const PacketFrame fr = build_frame(lam, make_grid(n, 3, 1.0));
    const HalfWaveSymbol sym(g, 1, dyadic_floor(std::sqrt(lam)));
    // direction 0 points along x1, so lattice steps in j are transversal
    const PacketWindow& w = fr.win[0];
    const int ia = w.N[0] / 2, ja = w.N[1] / 2;
    const Tube a = make_tube(fr, sym, 0, ia, ja, t_max);
    auto probe_at = [&](int i, int j) {
      Tube p;
      p.omega = 0;
      p.x[0] = fr.grid.domain_len * i / w.N[0];
      p.x[1] = fr.grid.domain_len * j / w.N[1];
      return p;
    };
    double prev = std::numeric_limits<double>::infinity(), worst_step = 0.0, worst_n4 = 0.0;
    for (double d : targets) {
      int bj = ja;
      double best = std::numeric_limits<double>::infinity();
      for (int dj = 0; dj <= w.N[1] / 2; ++dj) {
        const int j = (ja + dj) % w.N[1];
        const double gap = std::abs(tube_distance(fr, a, probe_at(ia, j)) - d);
        if (gap < best - 1e-12) {
          best = gap;
          bj = j;
        }
      }
      const Tube b = make_tube(fr, sym, 0, ia, bj, t_max);
      const double s0 = packet_tube_overlap(fr, a, b, 0, times);
      const double s4 = packet_tube_overlap(fr, a, b, 4, times);
      t.rows.push_back({lam, 0.0, d, tube_distance(fr, a, b), s0, s4});
      if (std::isfinite(prev)) worst_step = std::max(worst_step, s0 / prev);
      prev = s0;
      worst_n4 = std::max(worst_n4, s4);
    }
    // the nearest neighbour along omega sits one packet length away; listed
    // for reference only
    const Tube b = make_tube(fr, sym, 0, (ia + 1) % w.N[0], ja, t_max);
    t.rows.push_back({lam, 1.0, -1.0, tube_distance(fr, a, b), packet_tube_overlap(fr, a, b, 0, times),
                      packet_tube_overlap(fr, a, b, 4, times)});
    r.checks.push_back(make_report("packet decay monotone" + lam_tag(lam), worst_step, 1.0, 1.0,
                                   "packet overlaps decrease with tube distance"));
    r.checks.push_back(make_report("packet decay weighted N=4" + lam_tag(lam), worst_n4, cfg.tol.decay_const, 1.0,
                                   "lam^{-3/4} |u_T| <d>^N bounded uniformly in lam"));
  }
  r.tables.push_back(std::move(t));
  return r;
}

// ------------------------------------------------------------------ rays

SuiteResult ray_checks(const ExperimentConfig& cfg) {
  SuiteResult r;
  const GridSpec grid = cfg.grid();
  const MetricField g = cfg.metric(grid);
  const MetricField flat = make_metric(MetricKind::minkowski, 0.0, 0, grid);
  const double T = grid.t_end(), dt = 1.0 / 256.0;
  {
    const HalfWaveSymbol s(flat, 1);
    const double x0[2] = {1.0, 2.0}, xi0[2] = {3.0, 4.0};
    const RayState e = flow_end(s, x0, xi0, 0.0, T, dt);
    const double err = std::hypot(e.x[0] - (x0[0] + 0.6 * T), e.x[1] - (x0[1] + 0.8 * T)) +
                       std::hypot(e.xi[0] - xi0[0], e.xi[1] - xi0[1]);
    r.checks.push_back(make_report("flat rays are straight lines", err, 1e-12, 1.0,
                                   "Minkowski bicharacteristics move at unit speed"));
  }
  const HalfWaveSymbol sym(g, 1);
  auto rng = stream(cfg.seed, 200);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double rev = 0.0, hom = 0.0, vol = 0.0;
  std::vector<Bicharacteristic> rays;
  for (int q = 0; q < 8; ++q) {
    const double x0[2] = {grid.domain_len * U(rng), grid.domain_len * U(rng)};
    const double ang = kTwoPi * U(rng), rad = 8.0 + 56.0 * U(rng);
    const double xi0[2] = {rad * std::cos(ang), rad * std::sin(ang)};
    const RayState e = flow_end(sym, x0, xi0, 0.0, T, dt);
    const RayState back = flow_end(sym, e.x, e.xi, T, 0.0, dt);
    rev = std::max(rev, std::hypot(back.x[0] - x0[0], back.x[1] - x0[1]) +
                            std::hypot(back.xi[0] - xi0[0], back.xi[1] - xi0[1]) / rad);
    const double xi2[2] = {2 * xi0[0], 2 * xi0[1]};
    const RayState e2 = flow_end(sym, x0, xi2, 0.0, T, dt);
    hom = std::max(hom, std::hypot(e2.x[0] - e.x[0], e2.x[1] - e.x[1]) +
                            std::hypot(e2.xi[0] - 2 * e.xi[0], e2.xi[1] - 2 * e.xi[1]) / (2 * rad));
    if (q < 3) {
      const JacobianProbe J = jacobian_probe(sym, x0, xi0, T, 1e-5, dt);
      vol = std::max(vol, std::abs(J.J.determinant() - 1.0));
    }
    rays.push_back(flow(sym, x0, xi0, 0.0, T, 1.0 / 64.0));
  }
  r.checks.push_back(make_report("ray reversibility", rev, 1e-8, 1.0, "Hamilton flow run backwards returns to the start"));
  r.checks.push_back(make_report("ray homogeneity", hom, 1e-9, 1.0,
                                 "positions independent of |xi|, covectors scale linearly"));
  r.checks.push_back(make_report("flow preserves phase volume", vol, 1e-5, 1.0, "det of the flow Jacobian is one"));
  double sph = 0.0;
  for (int q = 0; q < 4; ++q) {
    const double x0[2] = {grid.domain_len * U(rng), grid.domain_len * U(rng)};
    const double ang = kTwoPi * U(rng);
    const double w0[2] = {std::cos(ang), std::sin(ang)};
    const SphereRay s = sphere_flow(sym, x0, w0, 0.0, T, dt, 64.0);
    for (const auto& st : s.samples) {
      const double th0 = st.th[0][0] * st.w[0] + st.th[0][1] * st.w[1];
      const double th1 = st.th[1][0] * st.w[0] + st.th[1][1] * st.w[1];
      const double orth = std::abs(st.th[0][0] * st.th[0][0] + st.th[1][0] * st.th[1][0] - 1.0) +
                          std::abs(st.th[0][0] * st.th[0][1] + st.th[1][0] * st.th[1][1]) +
                          std::abs(st.th[0][1] * st.th[0][1] + st.th[1][1] * st.th[1][1] - 1.0);
      sph = std::max({sph, std::abs(std::hypot(st.w[0], st.w[1]) - 1.0), std::hypot(th0 - w0[0], th1 - w0[1]), orth});
    }
  }
  r.checks.push_back(make_report("sphere flow frame", sph, 1e-10, 1.0,
                                 "unit covector and rotation frame with Theta w(t) = w(0)"));
  CsvTable t{"endpoints", {"ray", "t", "x1", "x2", "xi1", "xi2"}, {}};
  for (std::size_t q = 0; q < rays.size(); ++q) {
    const RayState& e = rays[q].samples.back();
    t.rows.push_back({static_cast<double>(q), e.t, e.x[0], e.x[1], e.xi[0], e.xi[1]});
  }
  r.tables.push_back(std::move(t));
  return r;
}

// --------------------------------------------------------------- eikonal

EikonalGroups eikonal_checks(const ExperimentConfig& cfg) {
  EikonalGroups out;
  const GridSpec grid = cfg.grid();
  const MetricField g = cfg.metric(grid);
  const HalfWaveSymbol sym(g, 1);
  CsvTable t{"directions",
             {"direction", "e1", "e2", "residual", "hessian", "gLL", "gLE", "gLLbar", "gLbarE", "gEE", "dphiL", "dphiE"},
             {}};
  EikonalReport worst;
  FrameIdentities fw;
  for (int k = 0; k < 16; ++k) {
    const auto e = canonical_direction(k);
    const Foliation f = solve_eikonal(sym, e, grid);
    const EikonalReport d = eikonal_diagnostics(f);
    const FrameIdentities fi = frame_identities(f);
    worst.residual = std::max(worst.residual, d.residual);
    worst.hess = std::max(worst.hess, d.hess);
    fw.gLL = std::max(fw.gLL, fi.gLL);
    fw.gLE = std::max(fw.gLE, fi.gLE);
    fw.gLLbar = std::max(fw.gLLbar, fi.gLLbar);
    fw.gLbarE = std::max(fw.gLbarE, fi.gLbarE);
    fw.gEE = std::max(fw.gEE, fi.gEE);
    fw.dphiL = std::max(fw.dphiL, fi.dphiL);
    fw.dphiE = std::max(fw.dphiE, fi.dphiE);
    t.rows.push_back({static_cast<double>(k), static_cast<double>(e[0]), static_cast<double>(e[1]), d.residual, d.hess,
                      fi.gLL, fi.gLE, fi.gLLbar, fi.gLbarE, fi.gEE, fi.dphiL, fi.dphiE});
  }
  const std::string a_eik = "optical functions solve the eikonal equation";
  out.fidelity.checks.push_back(make_report("eikonal residual", worst.residual, cfg.tol.eikonal_residual, 1.0, a_eik));
  // a flat metric has exactly linear optical functions
  const double hb = std::max(cfg.tol.hessian_factor * cfg.eta, 1e-9);
  out.fidelity.checks.push_back(make_report("optical function hessian", worst.hess, hb, 1.0,
                                            "second derivatives of Phi bounded by the metric budget"));
  out.fidelity.tables.push_back(std::move(t));
  const std::string a_fr = "null frame normalization";
  const double ft = cfg.tol.frame_identity, pt = cfg.tol.phi_identity;
  out.frame.checks.push_back(make_report("g(L,L)", fw.gLL, ft, 1.0, a_fr));
  out.frame.checks.push_back(make_report("g(L,E)", fw.gLE, ft, 1.0, a_fr));
  out.frame.checks.push_back(make_report("g(L,Lbar)+1", fw.gLLbar, ft, 1.0, a_fr));
  out.frame.checks.push_back(make_report("g(Lbar,E)", fw.gLbarE, ft, 1.0, a_fr));
  out.frame.checks.push_back(make_report("g(E,E)-1", fw.gEE, ft, 1.0, a_fr));
  out.frame.checks.push_back(make_report("dPhi(L)", fw.dphiL, pt, 1.0, "L and E are tangent to the leaves"));
  out.frame.checks.push_back(make_report("dPhi(E)", fw.dphiE, pt, 1.0, "L and E are tangent to the leaves"));
  return out;
}

// ------------------------------------------------------------ parametrix

SuiteResult parametrix_accuracy(const ExperimentConfig& cfg) {
  SuiteResult r;
  CsvTable t{"accuracy", {"lambda", "rel_error", "tubes", "n_frame", "n_solver"}, {}};
  const MetricField g = cfg.metric(cfg.grid());
  std::vector<double> lams, errs;
  for (double lam : cfg.lambda_list) {
    const int nf = frame_n(cfg, lam), ns = std::max(cfg.n, static_cast<int>(8 * lam));
    const GridSpec gf = make_grid(nf, 5, cfg.param_t_end), gs = make_grid(ns, 5, cfg.param_t_end);
    const PacketFrame fr = build_frame(lam, gf);
    auto rng = stream(cfg.seed, 300 + static_cast<std::uint64_t>(lam));
    std::vector<std::array<int, 3>> tubes;
    std::vector<cplx> alpha;
    random_tubes(fr, cfg.param_tubes, rng, tubes, alpha);
    const ParametrixCoeffs C = sparse_coefficients(fr, tubes, alpha);
    std::vector<double> times(5);
    for (int k = 0; k < 5; ++k) times[k] = gf.time(k);
    const ParametrixResult P = parametrix_from_coefficients(fr, C, g, times);
    // data: w(0) = sum alpha phi_T, zero velocity
    TubeCoefficients a;
    a.lam = lam;
    a.c = C.u[0].c;
    a.dims = C.u[0].dims;
    for (auto& row : a.c)
      for (auto& v : row) v *= 2.0;
    const Slice u0 = synthesize(fr, a), u1(u0.size(), 0.0);
    const SolverRun R = solve_linear(g, resample_slice(u0, nf, ns), resample_slice(u1, nf, ns), nullptr, gs);
    double emax = 0.0, umax = 0.0;
    for (int k = 0; k < 5; ++k) {
      const Slice ref = resample_slice(R.u[0].slice_copy(k), ns, nf);
      Slice d(ref.size());
      for (std::size_t p = 0; p < d.size(); ++p) d[p] = P.fields[k][p] - ref[p];
      emax = std::max(emax, l2_norm(d, nf, gf.domain_len));
      umax = std::max(umax, l2_norm(ref, nf, gf.domain_len));
    }
    const double err = emax / umax;
    lams.push_back(lam);
    errs.push_back(err);
    t.rows.push_back({lam, err, static_cast<double>(P.tubes_used), static_cast<double>(nf), static_cast<double>(ns)});
    r.checks.push_back(make_report("parametrix error" + lam_tag(lam), err, 1.0, 1.0,
                                   "relative L-inf-L2 distance to the reference solution (informational bound 1)"));
  }
  if (!lams.empty()) {
    if (lams.size() >= 2)
      r.checks.push_back(upper_check("parametrix error slope", loglog_slope(lams, errs), cfg.tol.param_slope,
                                     "parametrix error decays in lam"));
    r.checks.push_back(make_report("parametrix error at top frequency" + lam_tag(lams.back()), errs.back(),
                                   cfg.tol.param_abs, 1.0, "absolute parametrix accuracy"));
  }
  r.tables.push_back(std::move(t));
  return r;
}

SuiteResult parametrix_residual(const ExperimentConfig& cfg) {
  SuiteResult r;
  CsvTable t{"residual", {"lambda", "residual_l2", "field_l2", "coeff_l2"}, {}};
  const MetricField g = cfg.metric(cfg.grid());
  std::vector<double> lams, res;
  for (double lam : cfg.lambda_list) {
    const int nf = frame_n(cfg, lam);
    const PacketFrame fr = build_frame(lam, make_grid(nf, 3, 1.0));
    auto rng = stream(cfg.seed, 400 + static_cast<std::uint64_t>(lam));
    std::vector<std::array<int, 3>> tubes;
    std::vector<cplx> alpha;
    random_tubes(fr, cfg.param_tubes, rng, tubes, alpha);
    const ParametrixCoeffs C = sparse_coefficients(fr, tubes, alpha);
    const MetricField gm = mollify_metric(g, dyadic_floor(std::sqrt(lam)));
    // central differences in time at a step that balances truncation against
    // the table interpolation error
    const double delta = 0.04 / lam;
    double rmax = 0.0, umax = 0.0;
    for (int q = 1; q <= 3; ++q) {
      const double tc = 0.25 * q * cfg.param_t_end;
      const ParametrixResult P = parametrix_from_coefficients(fr, C, g, {tc - delta, tc, tc + delta});
      SpacetimeField u(make_grid(nf, 3, 2 * delta, tc - delta));
      for (int k = 0; k < 3; ++k) u.set_slice(k, P.fields[k]);
      const SpacetimeField B = apply_box(gm, u, 0.0);
      rmax = std::max(rmax, l2_norm(B.slice(1), nf, fr.grid.domain_len));
      umax = std::max(umax, l2_norm(u.slice(1), nf, fr.grid.domain_len));
    }
    lams.push_back(lam);
    res.push_back(rmax);
    t.rows.push_back({lam, rmax, umax, std::sqrt(C.l2sq())});
  }
  if (lams.size() >= 2)
    r.checks.push_back(upper_check("parametrix residual slope", loglog_slope(lams, res), cfg.tol.residual_slope,
                                   "|Box_{g<sqrt(lam)} u| at unit coefficient norm grows at most like lam"));
  r.tables.push_back(std::move(t));
  return r;
}

// ---------------------------------------------------------------- energy

SuiteResult energy_checks(const ExperimentConfig& cfg) {
  SuiteResult r;
  const int n = cfg.energy_n;
  const GridSpec grid = make_grid(n, cfg.nt, cfg.t_end);
  const double L = grid.domain_len;
  auto rng = stream(cfg.seed, 500);
  const Slice u0 = random_band(n, L, 0.0, n / 8.0, rng), u1 = random_band(n, L, 0.0, n / 8.0, rng);
  auto drift_of = [&](const MetricField& g) {
    const SolverRun run = solve_linear(g, u0, u1, nullptr, grid);
    const std::vector<double> E = quadratic_energy(run, g);
    double d = 0.0;
    for (double e : E) d = std::max(d, std::abs(e - E[0]) / E[0]);
    return d;
  };
  r.checks.push_back(make_report("flat energy conservation", drift_of(make_metric(MetricKind::minkowski, 0.0, 0, grid)),
                                 1e-10, 1.0, "energy is conserved for the flat wave equation"));
  MetricField::Terms terms;
  // constant coefficients at the size of the desk-scale perturbations
  terms[kB1].push_back({0, 0, 0, 0.02, 0.0});
  terms[kB2].push_back({0, 0, 0, -0.015, 0.0});
  terms[kC11].push_back({0, 0, 0, 0.03, 0.0});
  terms[kC12].push_back({0, 0, 0, 0.01, 0.0});
  terms[kC22].push_back({0, 0, 0, -0.025, 0.0});
  r.checks.push_back(make_report("constant coefficient energy conservation", drift_of(metric_from_terms(grid, 0.0, terms)),
                                 1e-8, 1.0, "energy is conserved when the coefficients are constant"));

  // energy inequality with forcing on the configured metric
  const MetricField g = cfg.metric(cfg.grid());
  SpacetimeField F(grid);
  {
    const Slice fa = random_band(n, L, 0.0, n / 8.0, rng), fb = random_band(n, L, 0.0, n / 8.0, rng);
    for (int k = 0; k < grid.nt; ++k) {
      const double tt = grid.time(k);
      for (std::size_t p = 0; p < grid.points(); ++p) F.slice(k)[p] = std::cos(3 * tt) * fa[p] + std::sin(5 * tt) * fb[p];
    }
  }
  const SolverRun run = solve_linear(g, u0, u1, &F, grid);
  double sup = 0.0;
  for (int k = 0; k < grid.nt; ++k)
    sup = std::max(sup, data_norm(run.u[0].slice_copy(k), run.ut[0].slice_copy(k), n, L, 1.0));
  const double rhs = data_norm(u0, u1, n, L, 1.0) + l1_l2(F);
  r.checks.push_back(make_report("energy inequality", sup, 2.0 * rhs, 1.0,
                                 "sup_t |u[t]|_{H^1 x L^2} <= C (|u[0]| + |Box u|_{L1 L2}) with C = 2"));
  return r;
}

SuiteResult characteristic_energy(const ExperimentConfig& cfg) {
  SuiteResult r;
  CsvTable t{"ce1", {"solution", "direction", "h", "lhs", "rhs", "ratio"}, {}};
  const int n = cfg.energy_n;
  const GridSpec grid = make_grid(n, cfg.nt, cfg.t_end);
  const double L = grid.domain_len;
  const MetricField g = cfg.metric(cfg.grid());
  const HalfWaveSymbol sym(g, 1);
  struct Frames {
    Foliation f;
    int dir;
    // L and E per slice, (t, x1, x2) components
    std::vector<std::array<std::vector<double>, 6>> LE;
  };
  std::vector<Frames> fols;
  for (int q = 0; q < cfg.energy_foliations; ++q) {
    const int dir = (q * 16) / cfg.energy_foliations;
    Frames fr{solve_eikonal(sym, canonical_direction(dir), grid), dir, {}};
    fr.LE.resize(grid.nt);
    for (int k = 0; k < grid.nt; ++k) {
      NullFrameSlice s = null_frame_slice(fr.f, k);
      for (int c = 0; c < 3; ++c) {
        fr.LE[k][c] = std::move(s.L[c]);
        fr.LE[k][3 + c] = std::move(s.E[c]);
      }
    }
    fols.push_back(std::move(fr));
  }
  auto rng = stream(cfg.seed, 600);
  double worst = 0.0;
  for (int s = 0; s < cfg.energy_solutions; ++s) {
    const Slice u0 = random_band(n, L, 0.0, n / 8.0, rng), u1 = random_band(n, L, 0.0, n / 8.0, rng);
    const Slice fa = random_band(n, L, 0.0, n / 8.0, rng);
    std::uniform_real_distribution<double> U(0.5, 4.0);
    const double om = U(rng);
    SpacetimeField F(grid);
    for (int k = 0; k < grid.nt; ++k)
      for (std::size_t p = 0; p < grid.points(); ++p) F.slice(k)[p] = std::cos(om * grid.time(k)) * fa[p];
    const SolverRun run = solve_linear(g, u0, u1, &F, grid);
    // right side: (1 + |dt|) sup_t |grad_{t,x} v|^2 + |Box v|_{L1 L2}^2
    double gsup = 0.0;
    for (int k = 0; k < grid.nt; ++k) {
      const SliceDerivs d = spectral_derivs(run.u[0].slice_copy(k), n, L, false);
      const double e = std::pow(l2_norm(run.ut[0].slice(k), n, L), 2) + std::pow(l2_norm(d.d1, n, L), 2) +
                       std::pow(l2_norm(d.d2, n, L), 2);
      gsup = std::max(gsup, e);
    }
    const double rhs = (1.0 + (grid.t_end() - grid.t0)) * gsup + std::pow(l1_l2(F), 2);
    for (const Frames& fr : fols) {
      ComponentProvider prov = [&](int k) {
        const SliceDerivs d = spectral_derivs(run.u[0].slice_copy(k), n, L, false);
        const cplx* vt = run.ut[0].slice(k);
        const auto& le = fr.LE[k];
        Slice Lv(grid.points()), Ev(grid.points());
        for (std::size_t p = 0; p < grid.points(); ++p) {
          Lv[p] = le[0][p] * vt[p] + le[1][p] * d.d1[p] + le[2][p] * d.d2[p];
          Ev[p] = le[3][p] * vt[p] + le[4][p] * d.d1[p] + le[5][p] * d.d2[p];
        }
        return std::vector<Slice>{std::move(Lv), std::move(Ev)};
      };
      for (double hf : {0.0, 0.5}) {
        const double h = hf * fr.f.h_period();
        const double lhs = surface_integral(fr.f, prov, h);
        worst = std::max(worst, lhs / rhs);
        t.rows.push_back({static_cast<double>(s), static_cast<double>(fr.dir), h, lhs, rhs, lhs / rhs});
      }
    }
  }
  r.checks.push_back(make_report("characteristic energy constant", worst, cfg.tol.ce_const, 1.0,
                                 "int_leaf |Lv|^2 + |Ev|^2 <= C [(1+T) |grad v|^2_{Linf L2} + |Box v|^2_{L1 L2}]"));
  r.tables.push_back(std::move(t));
  return r;
}

// -------------------------------------------------------------- nullform

SuiteResult nullform_checks(const ExperimentConfig& cfg) {
  SuiteResult r;
  const GridSpec grid = cfg.grid();
  const int n = grid.n;
  const double L = grid.domain_len;
  const MetricField g = cfg.metric(grid);
  auto rng = stream(cfg.seed, 700);
  double worst = 0.0;
  for (int q = 0; q < cfg.nullform_pairs; ++q) {
    const AffineField fu = random_affine(n, L, n / 8.0, rng), fv = random_affine(n, L, n / 8.0, rng);
    const SpacetimeField u = sample_affine(fu, grid), v = sample_affine(fv, grid);
    SpacetimeField uv(grid);
    for (std::size_t p = 0; p < uv.data.size(); ++p) uv.data[p] = u.data[p] * v.data[p];
    const SpacetimeField Q = nullform_eval(g, u, v, 0.0);
    const SpacetimeField Bu = apply_box(g, u, 0.0), Bv = apply_box(g, v, 0.0);
    SpacetimeField D = apply_box(g, uv, 0.0);
    SpacetimeField twoQ(grid);
    for (std::size_t p = 0; p < D.data.size(); ++p) {
      twoQ.data[p] = 2.0 * Q.data[p];
      D.data[p] -= u.data[p] * Bv.data[p] + v.data[p] * Bu.data[p] + twoQ.data[p];
    }
    worst = std::max(worst, spacetime_l2(D) / spacetime_l2(twoQ));
  }
  r.checks.push_back(make_report("null form product rule", worst, cfg.tol.nullform, 1.0,
                                 "2 Q_g(u,v) = Box(uv) - u Box v - v Box u"));

  // frame expansion on the leaves of one foliation
  const Foliation f = solve_eikonal(HalfWaveSymbol(g, 1), canonical_direction(1), grid);
  const AffineField fu = random_affine(n, L, n / 8.0, rng), fv = random_affine(n, L, n / 8.0, rng);
  const SpacetimeField u = sample_affine(fu, grid), v = sample_affine(fv, grid);
  const SpacetimeField Q = nullform_eval(g, u, v, 0.0);
  const SliceDerivs ua = spectral_derivs(fu.a, n, L, false), ub = spectral_derivs(fu.b, n, L, false);
  const SliceDerivs va = spectral_derivs(fv.a, n, L, false), vb = spectral_derivs(fv.b, n, L, false);
  double num = 0.0, den = 0.0;
  for (int k = 0; k < grid.nt; k += 8) {
    const NullFrameSlice s = null_frame_slice(f, k);
    const double tt = grid.time(k);
    for (std::size_t p = 0; p < grid.points(); ++p) {
      const cplx du[3] = {fu.b[p], ua.d1[p] + tt * ub.d1[p], ua.d2[p] + tt * ub.d2[p]};
      const cplx dv[3] = {fv.b[p], va.d1[p] + tt * vb.d1[p], va.d2[p] + tt * vb.d2[p]};
      auto along = [&](const std::array<std::vector<double>, 3>& X, const cplx* w) {
        return X[0][p] * w[0] + X[1][p] * w[1] + X[2][p] * w[2];
      };
      const cplx e = along(s.L, du) * along(s.Lbar, dv) + along(s.Lbar, du) * along(s.L, dv) -
                     along(s.E, du) * along(s.E, dv);
      num = std::max(num, std::abs(e - Q.slice(k)[p]));
      den = std::max(den, std::abs(Q.slice(k)[p]));
    }
  }
  r.checks.push_back(make_report("null form frame expansion", num / den, cfg.tol.nullform_frame, 1.0,
                                 "Q = Lu Lbar v + Lbar u Lv - Eu Ev"));
  return r;
}

// -------------------------------------------------------------- bilinear

SuiteResult bilinear_sweep(const ExperimentConfig& cfg) {
  SuiteResult r;
  CsvTable t{"sweep", {"lambda", "mu", "product_norm", "bound", "ratio", "theta"}, {}};
  const MetricField g = cfg.metric(cfg.grid());
  std::vector<double> ratios;
  for (double lam : cfg.bilinear_lambdas)
    for (double mu : cfg.mu_list) {
      if (4 * mu > lam) continue;
      const int nf = frame_n(cfg, lam);
      const GridSpec grid = make_grid(nf, cfg.nt, cfg.bilinear_t_end);
      const PacketFrame fr = build_frame(lam, grid);
      auto rng = stream(cfg.seed, 800 + static_cast<std::uint64_t>(lam) * 1000 + static_cast<std::uint64_t>(mu));
      std::vector<std::array<int, 3>> tubes;
      std::vector<cplx> alpha;
      random_tubes(fr, cfg.param_tubes, rng, tubes, alpha);
      std::vector<double> times(grid.nt);
      for (int k = 0; k < grid.nt; ++k) times[k] = grid.time(k);
      std::vector<Slice> uf =
          parametrix_from_coefficients(fr, sparse_coefficients(fr, tubes, alpha), g, times).fields;
      const Slice v0 = random_band(nf, grid.domain_len, mu / 2, 2 * mu, rng), v1(v0.size(), 0.0);
      SpacetimeField vf = std::move(solve_linear(g, v0, v1, nullptr, grid).u[0]);
      const SliceProvider pu = [&](int k) { return uf[k]; };
      const SliceProvider pv = [&](int k) { return vf.slice_copy(k); };
      const SliceProvider puv = [&](int k) {
        Slice s = uf[k];
        const cplx* b = vf.slice(k);
        for (std::size_t p = 0; p < s.size(); ++p) s[p] *= b[p];
        return s;
      };
      const BlockParts bu = block_parts_stream(g, grid, pu, dyadic_floor(std::sqrt(lam)));
      const BlockParts bv = block_parts_stream(g, grid, pv, dyadic_floor(std::sqrt(mu)));
      const BlockParts buv = block_parts_stream(g, grid, puv, dyadic_floor(std::sqrt(lam)));
      for (double th : cfg.theta_list) {
        const double prod = std::min(block_from_parts(buv, 0.0, th, lam, 1.0), block_from_parts(buv, 0.0, th, lam, mu));
        const double bound =
            std::pow(mu, 0.75) * block_from_parts(bu, 0.0, th, lam, 1.0) * block_from_parts(bv, 0.0, th, mu, 1.0);
        t.rows.push_back({lam, mu, prod, bound, prod / bound, th});
        ratios.push_back(prod / bound);
      }
    }
  if (!ratios.empty()) {
    const double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
    r.checks.push_back(make_report("bilinear constant spread", spread, cfg.tol.bilinear_spread, 1.0,
                                   "high-low product bound holds with a uniform constant"));
    r.warnings.push_back("block norms use one-sided time stencils on the first and last slices");
  }
  r.tables.push_back(std::move(t));
  return r;
}

// --------------------------------------------------------------- wavemap

SuiteResult wavemap_checks(const ExperimentConfig& cfg) {
  SuiteResult r;
  const int n = cfg.wavemap_n;
  const GridSpec out = make_grid(n, cfg.nt, cfg.t_end);
  const MetricField g = cfg.metric(cfg.grid());
  std::array<Slice, 3> u0, u1;
  wavemap_data(n, out.domain_len, cfg.wavemap_eps, cfg.seed, u0, u1);
  const SolverRun run = solve_wavemap_sphere(g, u0, u1, out);
  const std::vector<double> norm = energy_trace(run, 1.25);
  const double drift = sup_abs(run.drift), growth = sup_abs(norm) / norm[0];
  r.checks.push_back(make_report("sphere constraint drift", drift, cfg.tol.wavemap_drift, 1.0,
                                 "|u| = 1 is propagated by the extrinsic wave map equation"));
  r.checks.push_back(make_report("wave map norm growth", growth, cfg.tol.wavemap_growth, 1.0,
                                 "sup_t |u[t] - p|_{H^1.25 x H^0.25} stays comparable to the data"));
  CsvTable t{"trace", {"t", "drift", "norm"}, {}};
  for (int k = 0; k < out.nt; ++k) t.rows.push_back({out.time(k), run.drift[k], norm[k]});
  r.tables.push_back(std::move(t));
  return r;
}

// ------------------------------------------------------------- partition

SuiteResult partition_checks(const ExperimentConfig& cfg) {
  SuiteResult r;
  CsvTable t{"sums", {"alpha", "intervals", "max_pieces", "sum_defect"}, {}};
  for (double a : cfg.alpha_list) {
    const int level = static_cast<int>(std::lround(-std::log2(a)));
    double defect = 0.0;
    std::size_t pieces = 0;
    for (std::int64_t k = 0; k < (std::int64_t{1} << level); ++k) {
      const AngularPartition p = build_partition({k, level}, a);
      pieces = std::max(pieces, p.pieces.size());
      for (int s = 0; s < 4096; ++s) defect = std::max(defect, std::abs(p.sum(s / 4096.0) - 1.0));
    }
    r.checks.push_back(make_report("angular partition sum alpha=" + fmt(a), defect, cfg.tol.partition, 1.0,
                                   "angular pieces add up to one on the circle"));
    t.rows.push_back({a, std::ldexp(1.0, level), static_cast<double>(pieces), defect});
  }
  // every interval of width 1/4 .. 1/4096, both directions, until width 1/4
  double worst = 0.0;
  for (int level = 2; level <= 12; ++level)
    for (std::int64_t k = 0; k < (std::int64_t{1} << level); ++k)
      for (Direction d : {Direction::left, Direction::right}) {
        const auto seq = dyadic_sequence({k, level}, d, 2 * level);
        double sum = 0.0;
        for (const auto& th : seq) {
          if (th.level < 2) break;
          sum += th.width();
          worst = std::max(worst, sum / (4.0 * th.width()));
        }
      }
  r.checks.push_back(make_report("dyadic sequence prefix bound", worst, 1.0, 1.0,
                                 "sum_{j<=J} |theta_j| <= 4 |theta_J|"));
  r.tables.push_back(std::move(t));
  return r;
}

}  // namespace wp::cli
