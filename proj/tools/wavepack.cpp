// wavepack: runs verification suites and writes JSON, Markdown and CSV reports.
//
// Exit status: 0 all checks passed, 1 a check failed (or a warning under
// --strict), 2 usage error, 3 configuration error, 4 I/O error, 5 numerical
// error raised by a suite.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wavepack/cli/config.hpp"
#include "wavepack/cli/report.hpp"
#include "wavepack/cli/suites.hpp"
#include "wavepack/parallel.hpp"

int main(int argc, char** argv) {
  using namespace wp::cli;
  CLI::App app{"Wave packet parametrix verification driver"};
  std::string config_path, suites_arg, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool strict = false, print_config = false;
  app.add_option("--config", config_path, "experiment config (key = value lines)");
  app.add_option("--suite", suites_arg, "comma-separated suites; default: run.suites or all");
  app.add_option("--out", out_dir, "output directory (WAVEPACK_OUT overrides)");
  auto* seed_opt = app.add_option("--seed", seed, "seed for random data");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");
  app.add_flag("--strict", strict, "treat warnings as failures");
  app.add_flag("--print-config", print_config, "print the resolved config and exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_config(config_path);
    if (*seed_opt) cfg.seed = seed;
    if (!suites_arg.empty()) {
      cfg.suites.clear();
      std::stringstream ss(suites_arg);
      std::string s;
      while (std::getline(ss, s, ','))
        if (!s.empty()) cfg.suites.push_back(s);
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (const char* env = std::getenv("WAVEPACK_OUT"); env && *env) cfg.out_dir = env;
    validate(cfg);
  } catch (const ConfigError& e) {
    const bool usage = e.key() == "run.suites";
    std::cerr << (usage ? "usage error: " : "config error: ") << e.what() << "\n";
    return usage ? 2 : 3;
  }
  if (print_config) {
    std::cout << serialize_config(cfg);
    return 0;
  }
  wp::set_threads(threads);

  std::vector<SuiteResult> results;
  try {
    for (const auto& name : cfg.suites.empty() ? suite_names() : cfg.suites) {
      std::cerr << "running " << name << "...\n";
      results.push_back(run_suite(cfg, name));
      const auto& r = results.back();
      std::size_t failed = 0;
      for (const auto& c : r.checks) failed += c.pass ? 0 : 1;
      std::cerr << "  " << r.checks.size() << " checks, " << failed << " failed\n";
    }
    emit_report(results, cfg, cfg.out_dir);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  const bool ok = all_passed(results, strict);
  std::cerr << (ok ? "all checks passed" : "some checks failed") << "; reports in " << cfg.out_dir << "\n";
  return ok ? 0 : 1;
}
