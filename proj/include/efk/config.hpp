#ifndef EFK_CONFIG_HPP
#define EFK_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "efk/types.hpp"

namespace efk {

// Run parameters shared by all commands. Parsed from line-oriented
// `key = value` config files with `--key value` command-line overrides;
// unknown keys are rejected.
struct RunConfig {
  std::string potential = "allen_cahn";
  double eps = 0.4;
  std::optional<double> beta;
  double half_length = 0.0;  // L; 0 = command default
  Index n = 0;               // 0 = command default
  double t_half_length = 12.0;
  Index nt = 401;
  Index nx = 401;
  double tol_g = 1e-9;
  double tol_e = 1e-13;
  double residual_tol = 1e-4;
  int max_iters = 20000;
  std::uint64_t seed = 20240817;
  std::string variant = "biharmonic";
  double a11 = 1.0, a12 = 2.0, a22 = 1.0, b1 = 0.0, b2 = 0.0;  // generalized only
  std::string out_dir = "out";
  bool emit_csv = true;
  bool emit_json = true;
  bool emit_binary = true;
  std::string weps_knots = "literal";  // or "squared"
  int probe_trials = 200;
  std::string certificate;  // doublelayer: path to an existing certificate JSON
  std::string resume;       // separation: directory with stored members
  std::string sweep;        // e.g. "eps=0.1:0.4:0.1"
  bool continuation = true;
  // Set once the output root has been resolved (sweep jobs), so EFKL_OUT is
  // not re-applied on top of a per-job subdirectory. Not a config key.
  bool out_resolved = false;

  // Canonical `key = value` listing (sorted); hashed into reports.
  std::string canonical() const;
  std::string hash() const;
};

RunConfig parse_config(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> read_config_file(const std::string& path);

// Applies "--key value" pairs on top of file values; returns remaining
// positional arguments (artifact paths for verify/report).
std::vector<std::string> apply_cli_overrides(std::map<std::string, std::string>& kv,
                                             const std::vector<std::string>& args);

// Range validation per the documented bounds; throws ConfigError.
void validate(const RunConfig& cfg);

std::uint64_t fnv1a(const std::string& text);

}  // namespace efk

#endif  // EFK_CONFIG_HPP
