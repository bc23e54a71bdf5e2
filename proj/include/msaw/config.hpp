#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msaw/rate.hpp"
#include "msaw/torus.hpp"

namespace msaw {

// flat key = value schema, '#' comments, strict: unknown keys, duplicates and
// malformed values are all reported (not just the first)
struct ExperimentConfig {
  std::optional<double> gamma, c, T;
  std::optional<std::vector<double>> r_coeffs, s_coeffs, obs_times;
  std::optional<int> d, L, replicas, obs_count, n_fields;
  std::optional<int> burn_in_sweeps, stride_sweeps, fock_n_max;
  std::optional<int> gsc_r, gsc_n1_max;
  std::optional<double> gsc_kappa, gsc_C;
  std::optional<uint64_t> seed;
  std::optional<std::string> init, jump_mode, out_dir;
};

struct ParseResult {
  ExperimentConfig config;
  std::vector<std::string> errors; // each "line N: message"
  bool ok() const { return errors.empty(); }
};

ParseResult parse_config(const std::string& text);

// task-dependent completeness and domain checks; returns all violations
std::vector<std::string> validate_config(const ExperimentConfig& cfg, const std::string& task);

RateSpec make_rate_spec(const ExperimentConfig& cfg);
Torus make_torus(const ExperimentConfig& cfg);
std::vector<double> make_obs_times(const ExperimentConfig& cfg);

}  // namespace msaw
