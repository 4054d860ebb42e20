#ifndef WAVEPACK_METRIC_HPP
#define WAVEPACK_METRIC_HPP

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "wavepack/spectral.hpp"

namespace wp {

enum class MetricKind { minkowski, bump, random_smooth };
MetricKind parse_metric_kind(const std::string& s);
std::string to_string(MetricKind k);

// Raised when the requested budget cannot be met on the grid.
struct MetricConstructionError : std::runtime_error {
  MetricConstructionError(const std::string& what, double measured)
      : std::runtime_error(what), measured_budget(measured) {}
  double measured_budget;
};

// One spacetime Fourier term of a coefficient:
//   Re[(ccos cos(m t) + csin sin(m t)) e^{i (k1 x1 + k2 x2) 2pi/L}]
struct MetricTerm {
  int m = 0;
  int k1 = 0, k2 = 0;
  cplx ccos = 0.0, csin = 0.0;
};

// Coefficient components. The operator is
//   Box u = u_tt + 2 b.grad u_t - c(grad, grad) u
// with c = I + (perturbation stored in the c components).
enum MetricComp { kB1 = 0, kB2, kC11, kC12, kC22, kNumComp };

// Pointwise coefficients and their spatial gradients. db[j][a] = d_a b^j,
// dc[q][a] = d_a c_q with q = 11, 12, 22.
struct MetricCoeffs {
  double b[2] = {0, 0};
  double c[3] = {1, 0, 1};
  double db[2][2] = {{0, 0}, {0, 0}};
  double dc[3][2] = {{0, 0}, {0, 0}, {0, 0}};
};

// Exact coefficient samples on an n x n grid at one time.
struct MetricSlice {
  int n = 0;
  std::vector<double> b1, b2, c11, c12, c22;
};

class MetricField {
 public:
  using Terms = std::array<std::vector<MetricTerm>, kNumComp>;

  MetricField();
  MetricField(const GridSpec& grid, MetricKind kind, double eta, std::uint64_t seed, Terms raw);

  GridSpec grid;
  MetricKind kind = MetricKind::minkowski;
  double eta = 0.0;
  std::uint64_t seed = 0;
  // 0 for the unmollified field, else the dyadic mu of g_{<mu}
  double moll = 0.0;

  bool flat() const;
  // raw (unmollified) spacetime Fourier store
  const Terms& raw_terms() const { return *raw_; }
  // terms with the mollifier applied
  std::vector<MetricTerm> terms(int comp) const;
  double mollifier(const MetricTerm& t) const;
  int max_time_harmonic() const;
  // largest integer |k|_inf in the raw store
  int max_space_freq() const;

  // Spline interpolation in x, exact in t. Interpolates grid samples exactly.
  MetricCoeffs at(double t, double x1, double x2) const;
  // Exact synthesis from the Fourier store (any n, any point).
  MetricCoeffs exact(double t, double x1, double x2) const;
  // Exact samples on an n x n grid over the metric's domain.
  MetricSlice slice(double t, int n) const;

  // Dual metric G^{ab} at a point as a 3x3 matrix, index 0 = t.
  static void dual_matrix(const MetricCoeffs& m, double G[3][3]);

 private:
  struct Sampled;
  const Sampled& sampled(int n) const;
  struct SplineStore;
  const SplineStore& splines() const;

  std::shared_ptr<const Terms> raw_;
  struct Cache {
    std::mutex mu;
    std::map<int, std::shared_ptr<const Sampled>> by_n;
    std::once_flag spl_once, flat_once;
    std::shared_ptr<const SplineStore> spl;
    bool flat = true;
  };
  std::shared_ptr<Cache> cache_;
};

// Builds a metric whose measured budget is 0.9 eta^2 (exactly Minkowski for
// eta = 0 or kind = minkowski).
MetricField make_metric(MetricKind kind, double eta, std::uint64_t seed, const GridSpec& grid);
// Metric with the given raw terms used as-is; eta is only the declared budget.
MetricField metric_from_terms(const GridSpec& grid, double eta, MetricField::Terms terms);

// g_{<mu}: spacetime low-pass phi(2 |(m, k)| / mu) applied to the raw store.
MetricField mollify_metric(const MetricField& g, double mu);

// sup|d_{t,x} g| and (int sup_x |d^2_{t,x} g|^2 dt)^{1/2} over the grid's slab.
struct BudgetParts {
  double grad_sup = 0.0;
  double hess_l2 = 0.0;
  double total() const { return grad_sup + hess_l2; }
};
BudgetParts measure_budget(const MetricField& g);
NormReport verify_budget(const MetricField& g);

// Half-wave roots a^{+-} = b.xi +- sqrt((b.xi)^2 + c(xi,xi)), so that
// (tau + a^+)(tau + a^-) = tau^2 + 2 b.xi tau - c(xi,xi).
class HalfWaveSymbol {
 public:
  HalfWaveSymbol(const MetricField& g, int sign, double moll = 0.0);

  double eval(double t, double x1, double x2, double xi1, double xi2) const;
  // returns a; fills d_x a and d_xi a
  double grad(double t, double x1, double x2, double xi1, double xi2, double ax[2],
              double axi[2]) const;

  int sign() const { return sign_; }
  double moll() const { return g_.moll; }
  const MetricField& metric() const { return g_; }

  static double eval_coeffs(const MetricCoeffs& m, int sign, double xi1, double xi2);
  static double grad_coeffs(const MetricCoeffs& m, int sign, double xi1, double xi2,
                            double ax[2], double axi[2]);

 private:
  MetricField g_;
  int sign_;
};

}  // namespace wp

#endif
