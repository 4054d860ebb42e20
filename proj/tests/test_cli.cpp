#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "wavepack/cli/checks.hpp"
#include "wavepack/cli/config.hpp"
#include "wavepack/cli/report.hpp"
#include "wavepack/cli/suites.hpp"
#include "wavepack/packets.hpp"

using namespace wp;
using namespace wp::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

SuiteResult sample_result() {
  SuiteResult r;
  r.suite = "demo";
  r.checks.push_back(make_report("good", 0.5, 1.0, 1.0, "first"));
  r.checks.push_back(make_report("bad", 2.0, 1.0, 1.0, "second"));
  r.tables.push_back({"table", {"a", "b"}, {{1.0, 0.1}, {2.0, std::nan("")}}});
  return r;
}

}  // namespace

TEST_CASE("config text round-trips through serialization") {
  ExperimentConfig c;
  c.n = 128;
  c.eta = 0.025;
  c.lambda_list = {16, 32};
  c.alpha_list = {1.0 / 32};
  c.suites = {"rays", "partition"};
  c.tol.decay_const = 40;
  c.out_dir = "somewhere";
  const std::string text = serialize_config(c);
  ExperimentConfig back = parse_config(text);
  CHECK(back == c);
  CHECK(serialize_config(back) == text);
  CHECK(parse_config(serialize_config(ExperimentConfig{})) == ExperimentConfig{});
}

TEST_CASE("config parsing: comments, fractions and key errors") {
  ExperimentConfig c = parse_config("# demo\ngrid.n = 128  # trailing\nsweep.alpha_list = 1/16, 1/64\n\nmetric.kind = minkowski\n");
  CHECK(c.n == 128);
  CHECK(c.alpha_list == std::vector<double>{1.0 / 16, 1.0 / 64});
  CHECK(c.metric_kind == MetricKind::minkowski);
  try {
    parse_config("grid.size = 3\n");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "grid.size");
  }
  try {
    parse_config("grid.n = many\n");
    FAIL("bad value accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "grid.n");
  }
  CHECK_THROWS_AS(parse_config("grid.n\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/wavepack.cfg"), std::exception);
}

TEST_CASE("config validation names the offending key") {
  auto key_of = [](ExperimentConfig c) {
    try {
      validate(c);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string();
  };
  CHECK(key_of(ExperimentConfig{}).empty());
  ExperimentConfig c;
  c.lambda_list = {24};
  CHECK(key_of(c) == "sweep.lambda_list");
  c = {};
  c.lambda_list = {256};
  CHECK(key_of(c) == "sweep.lambda_list");
  c = {};
  c.alpha_list = {0.25};
  CHECK(key_of(c) == "sweep.alpha_list");
  c = {};
  c.theta_list = {1.5};
  CHECK(key_of(c) == "sweep.theta_list");
  c = {};
  c.n = 100;
  CHECK(key_of(c) == "grid.n");
  c = {};
  c.suites = {"frames", "everything"};
  CHECK(key_of(c) == "run.suites");
  c = {};
  c.tol.frame = 0.0;
  CHECK(key_of(c) == "tol.frame");
  c = {};
  c.bilinear_lambdas = {8};
  CHECK(key_of(c) == "bilinear.lambda_list");
}

TEST_CASE("check helpers") {
  NormReport up = upper_check("slope", -0.5, -0.4, "x");
  CHECK(up.pass);
  CHECK(up.ratio == doctest::Approx(0.9));
  CHECK_FALSE(upper_check("slope", 0.0, -0.4, "x").pass);
  CHECK(loglog_slope({1, 2, 4, 8}, {3, 12, 48, 192}) == doctest::Approx(2.0));
  auto a = stream(1, 7), b = stream(1, 7), c = stream(1, 8);
  CHECK(a() == b());
  CHECK(stream(1, 7)() != c());
  auto r1 = stream(3, 1);
  Slice f = random_band(32, kTwoPi, 4, 8, r1, true);
  CHECK(mass_outside(f, 32, kTwoPi, 4, 8) < 1e-14);
  double im = 0;
  for (auto v : f) im = std::max(im, std::abs(v.imag()));
  CHECK(im < 1e-12);
}

TEST_CASE("JSON and markdown reports") {
  std::vector<SuiteResult> res{sample_result()};
  ExperimentConfig cfg;
  CHECK_FALSE(all_passed(res, false));
  const auto j = nlohmann::json::parse(report_json(res, cfg, "2026-01-01T00:00:00Z"));
  CHECK(j["schema"] == kReportSchema);
  CHECK(j["seed"] == 1);
  REQUIRE(j["suites"].size() == 1u);
  CHECK(j["suites"][0]["pass"] == false);
  CHECK(j["suites"][0]["tables"][0] == "demo_table.csv");
  REQUIRE(j["checks"].size() == 2u);
  CHECK(j["checks"][1]["name"] == "bad");
  CHECK(j["checks"][1]["ratio"] == 2.0);
  CHECK(parse_config(j["config"].get<std::string>()) == cfg);
  const std::string md = report_markdown(res, "2026-01-01T00:00:00Z");
  CHECK(md.find("bad") < md.find("good"));
  CHECK(md.find("FAIL") != std::string::npos);
  CHECK(csv_text(res[0].tables[0]).rfind("a,b\n1,0.10000000000000001\n", 0) == 0);

  SuiteResult ok;
  ok.suite = "clean";
  ok.checks.push_back(make_report("fine", 0.0, 0.0, 1.0, ""));
  ok.warnings.push_back("soft");
  CHECK(all_passed({ok}, false));
  CHECK_FALSE(all_passed({ok}, true));
  CHECK(ok.checks[0].ratio == 0.0);
}

TEST_CASE("emitted reports are byte identical up to the timestamp") {
  std::vector<SuiteResult> res{sample_result()};
  ExperimentConfig cfg;
  const fs::path d1 = fresh_dir("wavepack_cli_a"), d2 = fresh_dir("wavepack_cli_b");
  emit_report(res, cfg, d1.string(), "T1");
  emit_report(res, cfg, d2.string(), "T2");
  for (const char* f : {"report.json", "report.md", "demo_table.csv"}) {
    std::string a = slurp(d1 / f), b = slurp(d2 / f);
    REQUIRE_FALSE(a.empty());
    const auto pa = a.find("T1"), pb = b.find("T2");
    if (pa != std::string::npos) a.replace(pa, 2, "TT");
    if (pb != std::string::npos) b.replace(pb, 2, "TT");
    CHECK(a == b);
  }
  fs::remove_all(d1);
  fs::remove_all(d2);
  CHECK_THROWS_AS(emit_report(res, cfg, "/proc/wavepack_cannot_write"), IoError);
}

TEST_CASE("suite dispatch") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(run_suite(cfg, "nonsense"), UsageError);
  CHECK(suite_names().size() == 9u);

  // an empty sweep yields an empty, passing result with the fixed columns
  cfg.bilinear_lambdas.clear();
  SuiteResult b = run_suite(cfg, "bilinear");
  CHECK(b.suite == "bilinear");
  CHECK(b.checks.empty());
  CHECK(b.passed());
  REQUIRE(b.tables.size() == 1u);
  CHECK(b.tables[0].columns == std::vector<std::string>{"lambda", "mu", "product_norm", "bound", "ratio", "theta"});
  CHECK(b.tables[0].rows.empty());

  cfg.alpha_list = {1.0 / 16};
  std::vector<SuiteResult> all = run_suites(cfg, {"partition"});
  REQUIRE(all.size() == 1u);
  CHECK(all[0].passed());
  CHECK(all[0].checks.size() >= 2u);
}
