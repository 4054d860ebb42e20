#ifndef WAVEPACK_BOX_HPP
#define WAVEPACK_BOX_HPP

#include <functional>
#include <map>
#include <vector>

#include "wavepack/metric.hpp"

namespace wp {

// Slice k of a field that is produced on demand.
using SliceProvider = std::function<Slice(int k)>;

// Small cache over a provider so stencils can revisit neighbors.
class SliceWindow {
 public:
  SliceWindow(SliceProvider p, std::size_t keep = 6) : src_(std::move(p)), keep_(keep) {}
  const Slice& get(int k);

 private:
  SliceProvider src_;
  std::size_t keep_;
  std::map<int, Slice> cache_;
};

// Second-order time differences on stored slices. The ends use one-sided
// stencils; with three slices the second difference of the middle slice is
// used everywhere.
Slice time_d1(SliceWindow& w, const GridSpec& g, int k);
Slice time_d2(SliceWindow& w, const GridSpec& g, int k);
bool box_one_sided(const GridSpec& g, int k);

// Box u at slice k with coefficients from g (already mollified if wanted).
Slice box_slice(const MetricField& g, const GridSpec& grid, SliceWindow& u, int k);

// Box_{g<moll} u over the whole field; moll = 0 means unmollified. flags[k]
// is set for slices computed with one-sided stencils.
SpacetimeField apply_box(const MetricField& g, const SpacetimeField& u, double moll,
                         std::vector<bool>* flags = nullptr);

// (lam^{2s} d^{2 theta} |u|^2 + lam^{2s-2} d^{2 theta - 2} |Box_{g<mu} u|^2)^{1/2}
// with spacetime L2 norms and mu the dyadic floor of sqrt(lam).
double xnorm_block(const MetricField& g, const SpacetimeField& u, double s, double theta,
                   double lam, double d);
// Same, with u supplied slice by slice (never holds the whole field).
double xnorm_block_stream(const MetricField& g, const GridSpec& grid, const SliceProvider& u,
                          double s, double theta, double lam, double d);
// The two spacetime L2 norms |u| and |Box_{g<mu} u| used by the block norm.
struct BlockParts {
  double u_l2 = 0.0;
  double box_l2 = 0.0;
};
BlockParts block_parts_stream(const MetricField& g, const GridSpec& grid, const SliceProvider& u,
                              double mu);
double block_from_parts(const BlockParts& p, double s, double theta, double lam, double d);

// Q_g(u, v) = G^{ab} d_a u d_b v with second-order time differences.
SpacetimeField nullform_eval(const MetricField& g, const SpacetimeField& u, const SpacetimeField& v,
                             double moll);

}  // namespace wp

#endif
