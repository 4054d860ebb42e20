#include "wavepack/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace wp::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  // fractions like 1/16 are accepted for convenience
  const auto slash = v.find('/');
  if (slash != std::string::npos)
    return to_double(key, trim(v.substr(0, slash))) / to_double(key, trim(v.substr(slash + 1)));
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "not a number: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(key, "not a number: '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long x = 0;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "not an integer: '" + v + "'");
  }
  if (used != v.size()) throw ConfigError(key, "not an integer: '" + v + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Entry {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
};

template <class T>
Entry int_entry(const char* key, T ExperimentConfig::*m) {
  return {key, [m](const ExperimentConfig& c) { return std::to_string(c.*m); },
          [m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            const long long x = to_int(k, v);
            if (x < 0 && std::is_unsigned_v<T>) throw ConfigError(k, "must be non-negative");
            c.*m = static_cast<T>(x);
          }};
}

Entry dbl_entry(const char* key, double ExperimentConfig::*m) {
  return {key, [m](const ExperimentConfig& c) { return fmt_double(c.*m); },
          [m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.*m = to_double(k, v); }};
}

Entry tol_entry(const char* key, double Tolerances::*m) {
  return {key, [m](const ExperimentConfig& c) { return fmt_double(c.tol.*m); },
          [m](ExperimentConfig& c, const std::string& k, const std::string& v) { c.tol.*m = to_double(k, v); }};
}

Entry list_entry(const char* key, std::vector<double> ExperimentConfig::*m) {
  return {key,
          [m](const ExperimentConfig& c) {
            std::string s;
            for (std::size_t i = 0; i < (c.*m).size(); ++i) s += (i ? ", " : "") + fmt_double((c.*m)[i]);
            return s;
          },
          [m](ExperimentConfig& c, const std::string& k, const std::string& v) {
            (c.*m).clear();
            for (const auto& item : split_list(v)) (c.*m).push_back(to_double(k, item));
          }};
}

const std::vector<Entry>& entries() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back(int_entry("grid.n", &ExperimentConfig::n));
    t.push_back(int_entry("grid.nt", &ExperimentConfig::nt));
    t.push_back(dbl_entry("grid.t_end", &ExperimentConfig::t_end));
    t.push_back({"metric.kind", [](const ExperimentConfig& c) { return to_string(c.metric_kind); },
                 [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                   try {
                     c.metric_kind = parse_metric_kind(v);
                   } catch (const std::exception&) {
                     throw ConfigError(k, "unknown metric kind '" + v + "'");
                   }
                 }});
    t.push_back(dbl_entry("metric.eta", &ExperimentConfig::eta));
    t.push_back(int_entry("metric.seed", &ExperimentConfig::metric_seed));
    t.push_back(int_entry("run.seed", &ExperimentConfig::seed));
    t.push_back({"run.suites",
                 [](const ExperimentConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.suites.size(); ++i) s += (i ? ", " : "") + c.suites[i];
                   return s;
                 },
                 [](ExperimentConfig& c, const std::string&, const std::string& v) { c.suites = split_list(v); }});
    t.push_back(list_entry("sweep.lambda_list", &ExperimentConfig::lambda_list));
    t.push_back(list_entry("sweep.mu_list", &ExperimentConfig::mu_list));
    t.push_back(list_entry("sweep.theta_list", &ExperimentConfig::theta_list));
    t.push_back(list_entry("sweep.alpha_list", &ExperimentConfig::alpha_list));
    t.push_back(int_entry("parametrix.tubes", &ExperimentConfig::param_tubes));
    t.push_back(dbl_entry("parametrix.t_end", &ExperimentConfig::param_t_end));
    t.push_back(int_entry("energy.solutions", &ExperimentConfig::energy_solutions));
    t.push_back(int_entry("energy.foliations", &ExperimentConfig::energy_foliations));
    t.push_back(int_entry("energy.n", &ExperimentConfig::energy_n));
    t.push_back(int_entry("nullform.pairs", &ExperimentConfig::nullform_pairs));
    t.push_back(dbl_entry("bilinear.t_end", &ExperimentConfig::bilinear_t_end));
    t.push_back(list_entry("bilinear.lambda_list", &ExperimentConfig::bilinear_lambdas));
    t.push_back(dbl_entry("wavemap.eps", &ExperimentConfig::wavemap_eps));
    t.push_back(int_entry("wavemap.n", &ExperimentConfig::wavemap_n));
    t.push_back(tol_entry("tol.frame", &Tolerances::frame));
    t.push_back(tol_entry("tol.eikonal_residual", &Tolerances::eikonal_residual));
    t.push_back(tol_entry("tol.hessian_factor", &Tolerances::hessian_factor));
    t.push_back(tol_entry("tol.frame_identity", &Tolerances::frame_identity));
    t.push_back(tol_entry("tol.phi_identity", &Tolerances::phi_identity));
    t.push_back(tol_entry("tol.nullform", &Tolerances::nullform));
    t.push_back(tol_entry("tol.nullform_frame", &Tolerances::nullform_frame));
    t.push_back(tol_entry("tol.param_slope", &Tolerances::param_slope));
    t.push_back(tol_entry("tol.param_abs", &Tolerances::param_abs));
    t.push_back(tol_entry("tol.residual_slope", &Tolerances::residual_slope));
    t.push_back(tol_entry("tol.decay_const", &Tolerances::decay_const));
    t.push_back(tol_entry("tol.ce_const", &Tolerances::ce_const));
    t.push_back(tol_entry("tol.partition", &Tolerances::partition));
    t.push_back(tol_entry("tol.bilinear_spread", &Tolerances::bilinear_spread));
    t.push_back(tol_entry("tol.wavemap_drift", &Tolerances::wavemap_drift));
    t.push_back(tol_entry("tol.wavemap_growth", &Tolerances::wavemap_growth));
    t.push_back({"output.dir", [](const ExperimentConfig& c) { return c.out_dir; },
                 [](ExperimentConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }});
    return t;
  }();
  return table;
}

void require(bool ok, const char* key, const std::string& msg) {
  if (!ok) throw ConfigError(key, msg);
}

}  // namespace

MetricField ExperimentConfig::metric(const GridSpec& g) const {
  return make_metric(metric_kind, eta, metric_seed, g);
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"frames", "rays",     "eikonal",  "parametrix", "energy",
                                                 "nullform", "bilinear", "wavemap", "partition"};
  return names;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& tab = entries();
    auto it = std::find_if(tab.begin(), tab.end(), [&](const Entry& e) { return key == e.key; });
    if (it == tab.end()) throw ConfigError(key, "unknown key");
    it->set(cfg, key, value);
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& e : entries()) out += std::string(e.key) + " = " + e.get(cfg) + "\n";
  return out;
}

void validate(const ExperimentConfig& cfg) {
  require(cfg.n >= 32 && (cfg.n & (cfg.n - 1)) == 0, "grid.n", "must be a power of two >= 32");
  require(cfg.nt >= 3, "grid.nt", "needs at least 3 slices");
  require(cfg.t_end > 0.0, "grid.t_end", "must be positive");
  require(cfg.eta >= 0.0 && cfg.eta < 0.5, "metric.eta", "must lie in [0, 0.5)");
  for (const auto& s : cfg.suites)
    require(std::find(suite_names().begin(), suite_names().end(), s) != suite_names().end(), "run.suites",
            "unknown suite '" + s + "'");
  for (double l : cfg.lambda_list)
    require(is_dyadic(l) && l >= 16 && l <= cfg.n / 2, "sweep.lambda_list",
            "frequency " + fmt_double(l) + " is not a dyadic in [16, n/2]");
  for (double m : cfg.mu_list)
    require(is_dyadic(m) && m >= 2 && m <= cfg.n / 2, "sweep.mu_list",
            "frequency " + fmt_double(m) + " is not a dyadic in [2, n/2]");
  for (double th : cfg.theta_list)
    require(th >= 0.0 && th <= 1.0, "sweep.theta_list", "theta must lie in [0, 1]");
  for (double a : cfg.alpha_list)
    require(is_dyadic(1.0 / a) && a >= 1.0 / 256 && a <= 1.0 / 8, "sweep.alpha_list",
            "angular scale " + fmt_double(a) + " is not a dyadic in [1/256, 1/8]");
  require(cfg.param_tubes >= 1, "parametrix.tubes", "must be positive");
  require(cfg.param_t_end > 0.0 && cfg.param_t_end <= cfg.t_end, "parametrix.t_end", "must lie in (0, grid.t_end]");
  require(cfg.energy_solutions >= 1, "energy.solutions", "must be positive");
  require(cfg.energy_foliations >= 1 && cfg.energy_foliations <= 16, "energy.foliations", "must lie in [1, 16]");
  require(cfg.energy_n >= 32 && (cfg.energy_n & (cfg.energy_n - 1)) == 0, "energy.n",
          "must be a power of two >= 32");
  require(cfg.nullform_pairs >= 1, "nullform.pairs", "must be positive");
  require(cfg.bilinear_t_end > 0.0, "bilinear.t_end", "must be positive");
  for (double l : cfg.bilinear_lambdas)
    require(is_dyadic(l) && l >= 16 && l <= cfg.n / 2, "bilinear.lambda_list",
            "frequency " + fmt_double(l) + " is not a dyadic in [16, n/2]");
  require(cfg.wavemap_eps > 0.0 && cfg.wavemap_eps < 0.5, "wavemap.eps", "must lie in (0, 0.5)");
  require(cfg.wavemap_n >= 32 && (cfg.wavemap_n & (cfg.wavemap_n - 1)) == 0, "wavemap.n",
          "must be a power of two >= 32");
  const Tolerances& t = cfg.tol;
  const std::pair<const char*, double> positive[] = {
      {"tol.frame", t.frame},
      {"tol.eikonal_residual", t.eikonal_residual},
      {"tol.hessian_factor", t.hessian_factor},
      {"tol.frame_identity", t.frame_identity},
      {"tol.phi_identity", t.phi_identity},
      {"tol.nullform", t.nullform},
      {"tol.nullform_frame", t.nullform_frame},
      {"tol.param_abs", t.param_abs},
      {"tol.residual_slope", t.residual_slope},
      {"tol.decay_const", t.decay_const},
      {"tol.ce_const", t.ce_const},
      {"tol.partition", t.partition},
      {"tol.bilinear_spread", t.bilinear_spread},
      {"tol.wavemap_drift", t.wavemap_drift},
      {"tol.wavemap_growth", t.wavemap_growth}};
  for (const auto& [key, v] : positive) require(v > 0.0 && std::isfinite(v), key, "must be positive");
  // the slope threshold is a signed exponent
  require(std::isfinite(t.param_slope), "tol.param_slope", "must be finite");
  require(!cfg.out_dir.empty(), "output.dir", "must not be empty");
}

}  // namespace wp::cli
