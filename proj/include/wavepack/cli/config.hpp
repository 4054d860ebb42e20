#ifndef WAVEPACK_CLI_CONFIG_HPP
#define WAVEPACK_CLI_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wavepack/metric.hpp"

namespace wp::cli {

// Invalid or unresolvable configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& msg)
      : std::runtime_error(key + ": " + msg), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct Tolerances {
  double frame = 1e-8;              // Parseval and reconstruction, relative
  double eikonal_residual = 1e-5;
  double hessian_factor = 10.0;     // |d^2 Phi| <= factor * eta
  double frame_identity = 1e-6;     // g(L,L) and friends
  double phi_identity = 1e-5;       // dPhi(L), dPhi(E)
  double nullform = 1e-8;
  double nullform_frame = 1e-6;
  double param_slope = -0.4;
  double param_abs = 0.15;
  double residual_slope = 1.1;
  double decay_const = 50.0;
  double ce_const = 10.0;
  double partition = 1e-10;
  double bilinear_spread = 3.0;
  double wavemap_drift = 1e-4;
  double wavemap_growth = 4.0;
  bool operator==(const Tolerances&) const = default;
};

// Experiment description. The text form is one `key = value` per line with
// dotted keys; `#` starts a comment; lists are comma separated.
struct ExperimentConfig {
  int n = 256;
  int nt = 129;
  double t_end = 1.0;

  MetricKind metric_kind = MetricKind::bump;
  double eta = 0.05;
  std::uint64_t metric_seed = 1;

  std::uint64_t seed = 1;
  std::vector<std::string> suites;

  std::vector<double> lambda_list = {16, 32, 64, 128};
  std::vector<double> mu_list = {8, 16};
  std::vector<double> theta_list = {0.5};
  std::vector<double> alpha_list = {1.0 / 16, 1.0 / 64};

  int param_tubes = 16;      // random tubes in the parametrix data
  double param_t_end = 0.5;  // comparison window of the parametrix suite
  int energy_solutions = 20;
  int energy_foliations = 4;
  int energy_n = 128;
  int nullform_pairs = 10;
  double bilinear_t_end = 0.125;
  std::vector<double> bilinear_lambdas = {64, 128};  // high frequencies of the product sweep
  double wavemap_eps = 0.01;
  int wavemap_n = 128;

  Tolerances tol;
  std::string out_dir = "wavepack-out";

  bool operator==(const ExperimentConfig&) const = default;

  GridSpec grid() const { return make_grid(n, nt, t_end); }
  MetricField metric(const GridSpec& g) const;
};

// Every known suite, in run order.
const std::vector<std::string>& suite_names();

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Inverse of parse_config; doubles are written with 17 significant digits.
std::string serialize_config(const ExperimentConfig& cfg);
// Throws ConfigError naming the first offending key.
void validate(const ExperimentConfig& cfg);

}  // namespace wp::cli

#endif
