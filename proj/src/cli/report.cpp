#include "wavepack/cli/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace wp::cli {

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no inf or nan; they are written as strings.
nlohmann::ordered_json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed: " + p.string());
}

}  // namespace

bool SuiteResult::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const NormReport& r) { return r.pass; });
}

bool all_passed(const std::vector<SuiteResult>& results, bool strict) {
  for (const auto& r : results) {
    if (!r.passed()) return false;
    if (strict && !r.warnings.empty()) return false;
  }
  return true;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_text(const CsvTable& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + num(row[i]);
    s += "\n";
  }
  return s;
}

std::string report_json(const std::vector<SuiteResult>& results, const ExperimentConfig& cfg,
                        const std::string& timestamp) {
  nlohmann::ordered_json j;
  j["schema"] = kReportSchema;
  j["timestamp"] = timestamp;
  j["seed"] = cfg.seed;
  j["config"] = serialize_config(cfg);
  auto checks = nlohmann::ordered_json::array();
  auto suites = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    nlohmann::ordered_json s;
    s["suite"] = r.suite;
    s["pass"] = r.passed();
    s["checks"] = r.checks.size();
    s["warnings"] = r.warnings;
    auto tables = nlohmann::ordered_json::array();
    for (const auto& t : r.tables) tables.push_back(r.suite + "_" + t.name + ".csv");
    s["tables"] = tables;
    suites.push_back(s);
    for (const auto& c : r.checks) {
      nlohmann::ordered_json e;
      e["suite"] = r.suite;
      e["name"] = c.name;
      e["value"] = jnum(c.value);
      e["bound"] = jnum(c.bound);
      e["ratio"] = jnum(c.ratio);
      e["pass"] = c.pass;
      e["anchor"] = c.anchor;
      checks.push_back(e);
    }
  }
  j["suites"] = suites;
  j["checks"] = checks;
  return j.dump(2) + "\n";
}

std::string report_markdown(const std::vector<SuiteResult>& results, const std::string& timestamp) {
  struct Row {
    const std::string* suite;
    const NormReport* r;
  };
  std::vector<Row> rows;
  std::size_t failed = 0;
  for (const auto& s : results)
    for (const auto& c : s.checks) {
      rows.push_back({&s.suite, &c});
      failed += c.pass ? 0 : 1;
    }
  std::stable_partition(rows.begin(), rows.end(), [](const Row& x) { return !x.r->pass; });
  std::string md = "# wavepack report\n\n";
  md += "Generated " + timestamp + ". " + std::to_string(rows.size()) + " checks, " + std::to_string(failed) +
        " failed.\n\n";
  md += "| status | suite | check | value | bound | ratio | anchor |\n";
  md += "|---|---|---|---|---|---|---|\n";
  char buf[64];
  for (const auto& x : rows) {
    md += std::string("| ") + (x.r->pass ? "PASS" : "**FAIL**") + " | " + *x.suite + " | " + x.r->name + " | ";
    std::snprintf(buf, sizeof buf, "%.4g | %.4g | %.4g", x.r->value, x.r->bound, x.r->ratio);
    md += buf;
    md += " | " + x.r->anchor + " |\n";
  }
  bool any_warn = false;
  for (const auto& s : results)
    for (const auto& w : s.warnings) {
      if (!any_warn) md += "\n## Warnings\n\n";
      any_warn = true;
      md += "- " + s.suite + ": " + w + "\n";
    }
  return md;
}

void emit_report(const std::vector<SuiteResult>& results, const ExperimentConfig& cfg, const std::string& dir,
                 const std::string& timestamp) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir);
  const fs::path base(dir);
  write_file(base / "report.json", report_json(results, cfg, timestamp));
  write_file(base / "report.md", report_markdown(results, timestamp));
  for (const auto& r : results)
    for (const auto& t : r.tables) write_file(base / (r.suite + "_" + t.name + ".csv"), csv_text(t));
}

}  // namespace wp::cli
