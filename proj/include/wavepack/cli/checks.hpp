#ifndef WAVEPACK_CLI_CHECKS_HPP
#define WAVEPACK_CLI_CHECKS_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "wavepack/cli/config.hpp"
#include "wavepack/cli/report.hpp"

namespace wp::cli {

// Each function runs one group of numerical checks and returns its reports,
// sweep tables and warnings (suite name left empty). Suites are built from
// these groups; the acceptance driver calls them directly.

// Parseval and reconstruction of the packet frame for every sweep frequency.
SuiteResult frame_tightness(const ExperimentConfig& cfg);
// Weighted packet overlaps against lattice neighbours at distance 0, 2, 4, 8.
SuiteResult packet_decay(const ExperimentConfig& cfg);
// Straight rays, reversibility, homogeneity, volume preservation, sphere flow.
SuiteResult ray_checks(const ExperimentConfig& cfg);

// Foliations in the 16 canonical directions: eikonal fidelity and the null
// frame identities come out of the same solves.
struct EikonalGroups {
  SuiteResult fidelity, frame;
};
EikonalGroups eikonal_checks(const ExperimentConfig& cfg);

// Parametrix against the reference solver, and the residual at fixed
// coefficient norm.
SuiteResult parametrix_accuracy(const ExperimentConfig& cfg);
SuiteResult parametrix_residual(const ExperimentConfig& cfg);

// Energy conservation for constant coefficients and the energy inequality.
SuiteResult energy_checks(const ExperimentConfig& cfg);
// Characteristic energy inequality on leaves of several foliations.
SuiteResult characteristic_energy(const ExperimentConfig& cfg);

SuiteResult nullform_checks(const ExperimentConfig& cfg);
SuiteResult bilinear_sweep(const ExperimentConfig& cfg);
SuiteResult wavemap_checks(const ExperimentConfig& cfg);
SuiteResult partition_checks(const ExperimentConfig& cfg);

// Report for thresholds that may be negative (fitted exponents): pass iff
// value <= bound, ratio = 1 + value - bound.
NormReport upper_check(const std::string& name, double value, double bound, const std::string& anchor);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Generator for one named stream of the run; streams do not overlap.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag);

// Random field with Gaussian Fourier coefficients on lo <= |k| <= hi
// (physical units). real = true keeps the real part.
Slice random_band(int n, double len, double lo, double hi, std::mt19937_64& rng, bool real = false);

}  // namespace wp::cli

#endif
