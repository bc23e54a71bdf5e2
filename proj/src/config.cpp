#include "msaw/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <set>
#include <sstream>

namespace msaw {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double_value(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

bool parse_int_value(const std::string& s, int& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (errno != 0 || end != s.c_str() + s.size()) return false;
  if (v < -2147483647LL || v > 2147483647LL) return false;
  out = int(v);
  return true;
}

bool parse_u64_value(const std::string& s, uint64_t& out) {
  if (s.empty() || s[0] == '-') return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoull(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

bool parse_list_value(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    double v;
    if (!parse_double_value(trim(item), v)) return false;
    out.push_back(v);
  }
  return !out.empty() && s.back() != ',';
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult res;
  std::set<std::string> seen;
  std::stringstream ss(text);
  std::string raw;
  int lineno = 0;
  auto err = [&](const std::string& msg) {
    res.errors.push_back("line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(ss, raw)) {
    ++lineno;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      err("expected key = value, got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) {
      err("missing key before '='");
      continue;
    }
    if (!seen.insert(key).second) {
      err("duplicate key '" + key + "'");
      continue;
    }
    auto want_double = [&](std::optional<double>& slot) {
      double v;
      if (parse_double_value(val, v))
        slot = v;
      else
        err("key '" + key + "': expected a number, got '" + val + "'");
    };
    auto want_int = [&](std::optional<int>& slot) {
      int v;
      if (parse_int_value(val, v))
        slot = v;
      else
        err("key '" + key + "': expected an integer, got '" + val + "'");
    };
    auto want_list = [&](std::optional<std::vector<double>>& slot) {
      std::vector<double> v;
      if (parse_list_value(val, v))
        slot = std::move(v);
      else
        err("key '" + key + "': expected comma-separated numbers, got '" + val + "'");
    };
    ExperimentConfig& c = res.config;
    if (key == "gamma")
      want_double(c.gamma);
    else if (key == "c")
      want_double(c.c);
    else if (key == "T")
      want_double(c.T);
    else if (key == "gsc_kappa")
      want_double(c.gsc_kappa);
    else if (key == "gsc_C")
      want_double(c.gsc_C);
    else if (key == "r_coeffs")
      want_list(c.r_coeffs);
    else if (key == "s_coeffs")
      want_list(c.s_coeffs);
    else if (key == "obs_times")
      want_list(c.obs_times);
    else if (key == "d")
      want_int(c.d);
    else if (key == "L")
      want_int(c.L);
    else if (key == "replicas")
      want_int(c.replicas);
    else if (key == "obs_count")
      want_int(c.obs_count);
    else if (key == "n_fields")
      want_int(c.n_fields);
    else if (key == "burn_in_sweeps")
      want_int(c.burn_in_sweeps);
    else if (key == "stride_sweeps")
      want_int(c.stride_sweeps);
    else if (key == "fock_n_max")
      want_int(c.fock_n_max);
    else if (key == "gsc_r")
      want_int(c.gsc_r);
    else if (key == "gsc_n1_max")
      want_int(c.gsc_n1_max);
    else if (key == "seed") {
      uint64_t v;
      if (parse_u64_value(val, v))
        c.seed = v;
      else
        err("key 'seed': expected a non-negative integer, got '" + val + "'");
    } else if (key == "init") {
      if (val == "flat" || val == "stationary")
        c.init = val;
      else
        err("key 'init': expected flat|stationary, got '" + val + "'");
    } else if (key == "jump_mode") {
      if (val == "inversion" || val == "thinning")
        c.jump_mode = val;
      else
        err("key 'jump_mode': expected inversion|thinning, got '" + val + "'");
    } else if (key == "out_dir") {
      if (val.empty())
        err("key 'out_dir': empty path");
      else
        c.out_dir = val;
    } else {
      err("unknown key '" + key + "'");
    }
  }
  return res;
}

namespace {

void need(std::vector<std::string>& errs, bool present, const char* key) {
  if (!present) errs.push_back(std::string("missing required key '") + key + "'");
}

}  // namespace

std::vector<std::string> validate_config(const ExperimentConfig& cfg, const std::string& task) {
  std::vector<std::string> errs;
  const bool model_task = task == "sample-gibbs" || task == "run-walk" || task == "estimate" ||
                          task == "full-verify";
  const bool run_task_kind = task == "run-walk" || task == "estimate" || task == "full-verify";
  if (task != "sample-gibbs" && task != "run-walk" && task != "estimate" &&
      task != "fock-check" && task != "gsc-threshold" && task != "full-verify") {
    errs.push_back("unknown task '" + task + "'");
    return errs;
  }
  need(errs, cfg.seed.has_value(), "seed");
  if (model_task) {
    need(errs, cfg.gamma.has_value(), "gamma");
    need(errs, cfg.c.has_value(), "c");
    need(errs, cfg.r_coeffs.has_value(), "r_coeffs");
    need(errs, cfg.s_coeffs.has_value(), "s_coeffs");
  }
  if (model_task || task == "fock-check") {
    need(errs, cfg.d.has_value(), "d");
    need(errs, cfg.L.has_value(), "L");
    if (cfg.d && (*cfg.d < 1 || *cfg.d > kMaxDim))
      errs.push_back("d must lie in [1, " + std::to_string(kMaxDim) + "]");
    if (cfg.L && *cfg.L < 2) errs.push_back("L must be >= 2");
    if (cfg.d && cfg.L) {
      double vol = 1.0;
      for (int a = 0; a < *cfg.d; ++a) vol *= double(*cfg.L);
      if (vol > double(int64_t(1) << 30)) errs.push_back("lattice volume exceeds 2^30 sites");
    }
  }
  if (run_task_kind) {
    need(errs, cfg.T.has_value(), "T");
    need(errs, cfg.replicas.has_value(), "replicas");
    if (cfg.T && !(*cfg.T > 0.0)) errs.push_back("T must be positive");
    if (cfg.replicas && *cfg.replicas < 1) errs.push_back("replicas must be >= 1");
    if (cfg.obs_times && cfg.obs_count)
      errs.push_back("obs_times and obs_count are mutually exclusive");
    if (cfg.obs_count && *cfg.obs_count < 1) errs.push_back("obs_count must be >= 1");
    if (cfg.obs_times && cfg.T) {
      std::vector<double> t = *cfg.obs_times;
      if (!std::is_sorted(t.begin(), t.end()))
        errs.push_back("obs_times must be non-decreasing");
      for (double v : t)
        if (!(v >= 0.0 && v <= *cfg.T)) {
          errs.push_back("obs_times must lie in [0, T]");
          break;
        }
    }
  }
  if (task == "sample-gibbs") {
    need(errs, cfg.n_fields.has_value(), "n_fields");
    if (cfg.n_fields && *cfg.n_fields < 1) errs.push_back("n_fields must be >= 1");
  }
  if (task == "gsc-threshold") {
    need(errs, cfg.gsc_r.has_value(), "gsc_r");
    need(errs, cfg.gsc_kappa.has_value(), "gsc_kappa");
    need(errs, cfg.gsc_C.has_value(), "gsc_C");
  }
  if (cfg.burn_in_sweeps && *cfg.burn_in_sweeps < 0)
    errs.push_back("burn_in_sweeps must be >= 0");
  if (cfg.stride_sweeps && *cfg.stride_sweeps < 1) errs.push_back("stride_sweeps must be >= 1");
  if (cfg.fock_n_max && *cfg.fock_n_max < 0) errs.push_back("fock_n_max must be >= 0");
  if (model_task && cfg.gamma && cfg.c && cfg.r_coeffs && cfg.s_coeffs) {
    const RateSpec spec = make_rate_spec(cfg);
    if (!spec.interaction_free()) {
      const RateValidation v = validate(spec);
      for (const auto& f : v.failures) errs.push_back("model: " + f);
    } else if (!(spec.gamma > 0.0)) {
      errs.push_back("model: gamma must be positive");
    }
  }
  return errs;
}

RateSpec make_rate_spec(const ExperimentConfig& cfg) {
  RateSpec spec;
  spec.gamma = cfg.gamma.value();
  spec.c = cfg.c.value();
  spec.r = Poly(cfg.r_coeffs.value());
  spec.s = Poly(cfg.s_coeffs.value());
  return spec;
}

Torus make_torus(const ExperimentConfig& cfg) { return Torus(cfg.d.value(), cfg.L.value()); }

std::vector<double> make_obs_times(const ExperimentConfig& cfg) {
  if (cfg.obs_times) return *cfg.obs_times;
  const double T = cfg.T.value();
  const int k = cfg.obs_count.value_or(10);
  std::vector<double> t(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) t[size_t(i)] = T * double(i + 1) / double(k);
  return t;
}

}  // namespace msaw
