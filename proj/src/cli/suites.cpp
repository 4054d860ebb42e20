#include "wavepack/cli/suites.hpp"

#include <algorithm>

#include "wavepack/cli/checks.hpp"

namespace wp::cli {

namespace {

void append(SuiteResult& into, SuiteResult&& part) {
  for (auto& c : part.checks) into.checks.push_back(std::move(c));
  for (auto& t : part.tables) into.tables.push_back(std::move(t));
  for (auto& w : part.warnings) into.warnings.push_back(std::move(w));
}

}  // namespace

SuiteResult run_suite(const ExperimentConfig& cfg, const std::string& suite) {
  SuiteResult r;
  r.suite = suite;
  if (suite == "frames") {
    append(r, frame_tightness(cfg));
    append(r, packet_decay(cfg));
  } else if (suite == "rays") {
    append(r, ray_checks(cfg));
  } else if (suite == "eikonal") {
    EikonalGroups e = eikonal_checks(cfg);
    append(r, std::move(e.fidelity));
    append(r, std::move(e.frame));
  } else if (suite == "parametrix") {
    append(r, parametrix_accuracy(cfg));
    append(r, parametrix_residual(cfg));
  } else if (suite == "energy") {
    append(r, energy_checks(cfg));
    append(r, characteristic_energy(cfg));
  } else if (suite == "nullform") {
    append(r, nullform_checks(cfg));
  } else if (suite == "bilinear") {
    append(r, bilinear_sweep(cfg));
  } else if (suite == "wavemap") {
    append(r, wavemap_checks(cfg));
  } else if (suite == "partition") {
    append(r, partition_checks(cfg));
  } else {
    throw UsageError("unknown suite '" + suite + "'");
  }
  return r;
}

std::vector<SuiteResult> run_suites(const ExperimentConfig& cfg, const std::vector<std::string>& suites) {
  const std::vector<std::string>& names = suites.empty() ? suite_names() : suites;
  for (const auto& s : names)
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
      throw UsageError("unknown suite '" + s + "'");
  std::vector<SuiteResult> out;
  for (const auto& s : names) out.push_back(run_suite(cfg, s));
  return out;
}

}  // namespace wp::cli
