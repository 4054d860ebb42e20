#ifndef WAVEPACK_CLI_SUITES_HPP
#define WAVEPACK_CLI_SUITES_HPP

#include <string>
#include <vector>

#include "wavepack/cli/config.hpp"
#include "wavepack/cli/report.hpp"

namespace wp::cli {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs one named suite. Unknown names raise UsageError.
SuiteResult run_suite(const ExperimentConfig& cfg, const std::string& suite);
// Runs the suites in order; an empty list means every suite.
std::vector<SuiteResult> run_suites(const ExperimentConfig& cfg, const std::vector<std::string>& suites);

}  // namespace wp::cli

#endif
