#ifndef WAVEPACK_CLI_REPORT_HPP
#define WAVEPACK_CLI_REPORT_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "wavepack/cli/config.hpp"
#include "wavepack/spectral.hpp"

namespace wp::cli {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Report format version; bump on any change to field names or CSV columns.
inline constexpr const char* kReportSchema = "wavepack-report/1";

// One sweep table; written as <suite>_<name>.csv with a header row.
struct CsvTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct SuiteResult {
  std::string suite;
  std::vector<NormReport> checks;
  std::vector<CsvTable> tables;
  // soft issues; --strict turns them into failures
  std::vector<std::string> warnings;
  bool passed() const;
};

bool all_passed(const std::vector<SuiteResult>& results, bool strict);

// UTC time in ISO 8601.
std::string utc_timestamp();

std::string csv_text(const CsvTable& t);
// Everything except the "timestamp" field is a function of the results and
// the configuration.
std::string report_json(const std::vector<SuiteResult>& results, const ExperimentConfig& cfg,
                        const std::string& timestamp);
// Summary table; failing checks are listed first.
std::string report_markdown(const std::vector<SuiteResult>& results, const std::string& timestamp);

// Writes report.json, report.md and one CSV per table into dir (created if
// needed). Throws IoError when dir cannot be written.
void emit_report(const std::vector<SuiteResult>& results, const ExperimentConfig& cfg, const std::string& dir,
                 const std::string& timestamp = utc_timestamp());

}  // namespace wp::cli

#endif
