#include "efk/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "efk/errors.hpp"

namespace efk {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid numeric value for " + key + ": '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("invalid integer value for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("invalid boolean value for " + key + ": '" + v + "'");
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string RunConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["potential"] = potential;
  kv["eps"] = fmt(eps);
  kv["beta"] = beta ? fmt(*beta) : "";
  kv["L"] = fmt(half_length);
  kv["n"] = std::to_string(n);
  kv["T"] = fmt(t_half_length);
  kv["nt"] = std::to_string(nt);
  kv["nx"] = std::to_string(nx);
  kv["tol_g"] = fmt(tol_g);
  kv["tol_e"] = fmt(tol_e);
  kv["residual_tol"] = fmt(residual_tol);
  kv["max_iters"] = std::to_string(max_iters);
  kv["seed"] = std::to_string(seed);
  kv["variant"] = variant;
  kv["a11"] = fmt(a11);
  kv["a12"] = fmt(a12);
  kv["a22"] = fmt(a22);
  kv["b1"] = fmt(b1);
  kv["b2"] = fmt(b2);
  kv["emit_csv"] = emit_csv ? "true" : "false";
  kv["emit_json"] = emit_json ? "true" : "false";
  kv["emit_binary"] = emit_binary ? "true" : "false";
  kv["weps_knots"] = weps_knots;
  kv["probe_trials"] = std::to_string(probe_trials);
  kv["continuation"] = continuation ? "true" : "false";
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  return os.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string RunConfig::hash() const {
  std::ostringstream os;
  os << std::hex << fnv1a(canonical());
  return os.str();
}

RunConfig parse_config(const std::map<std::string, std::string>& kv) {
  RunConfig cfg;
  for (const auto& [key, value] : kv) {
    if (key == "potential") {
      cfg.potential = value;
    } else if (key == "eps") {
      cfg.eps = parse_double(key, value);
    } else if (key == "beta") {
      cfg.beta = parse_double(key, value);
    } else if (key == "L") {
      cfg.half_length = parse_double(key, value);
    } else if (key == "n") {
      cfg.n = static_cast<Index>(parse_int(key, value));
    } else if (key == "T") {
      cfg.t_half_length = parse_double(key, value);
    } else if (key == "nt") {
      cfg.nt = static_cast<Index>(parse_int(key, value));
    } else if (key == "nx") {
      cfg.nx = static_cast<Index>(parse_int(key, value));
    } else if (key == "tol_g") {
      cfg.tol_g = parse_double(key, value);
    } else if (key == "tol_e") {
      cfg.tol_e = parse_double(key, value);
    } else if (key == "residual_tol") {
      cfg.residual_tol = parse_double(key, value);
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "variant") {
      cfg.variant = value;
    } else if (key == "a11") {
      cfg.a11 = parse_double(key, value);
    } else if (key == "a12") {
      cfg.a12 = parse_double(key, value);
    } else if (key == "a22") {
      cfg.a22 = parse_double(key, value);
    } else if (key == "b1") {
      cfg.b1 = parse_double(key, value);
    } else if (key == "b2") {
      cfg.b2 = parse_double(key, value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "emit_csv") {
      cfg.emit_csv = parse_bool(key, value);
    } else if (key == "emit_json") {
      cfg.emit_json = parse_bool(key, value);
    } else if (key == "emit_binary") {
      cfg.emit_binary = parse_bool(key, value);
    } else if (key == "weps_knots") {
      cfg.weps_knots = value;
    } else if (key == "probe_trials") {
      cfg.probe_trials = static_cast<int>(parse_int(key, value));
    } else if (key == "certificate") {
      cfg.certificate = value;
    } else if (key == "resume") {
      cfg.resume = value;
    } else if (key == "sweep") {
      cfg.sweep = value;
    } else if (key == "continuation") {
      cfg.continuation = parse_bool(key, value);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  return cfg;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
    }
    kv[key] = value;
  }
  return kv;
}

std::vector<std::string> apply_cli_overrides(std::map<std::string, std::string>& kv,
                                             const std::vector<std::string>& args) {
  std::vector<std::string> positional;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) == 0) {
      const std::string key = a.substr(2);
      const auto eq = key.find('=');
      if (eq != std::string::npos) {
        kv[key.substr(0, eq)] = key.substr(eq + 1);
      } else {
        if (i + 1 >= args.size()) throw ConfigError("missing value for --" + key);
        kv[key] = args[++i];
      }
    } else {
      positional.push_back(a);
    }
  }
  return positional;
}

void validate(const RunConfig& cfg) {
  if (cfg.potential != "allen_cahn" && cfg.potential != "ginzburg_landau" &&
      cfg.potential != "w_eps") {
    throw ConfigError("potential must be allen_cahn | ginzburg_landau | w_eps");
  }
  if (!(cfg.eps > 0.0 && cfg.eps < 1.0)) throw ConfigError("eps must lie in (0,1)");
  if (cfg.beta && !(*cfg.beta > 0.0)) throw ConfigError("beta must be > 0");
  if (cfg.half_length != 0.0 && cfg.half_length < 1.0) {
    throw ConfigError("L must be >= 1");
  }
  if (cfg.n != 0 && (cfg.n < 101 || cfg.n % 2 == 0)) {
    throw ConfigError("n must be odd and >= 101");
  }
  if (!(cfg.t_half_length >= 1.0)) throw ConfigError("T must be >= 1");
  if (cfg.nt < 101 || cfg.nx < 101) throw ConfigError("nt, nx must be >= 101");
  if (!(cfg.tol_g > 0.0) || !(cfg.tol_e > 0.0) || !(cfg.residual_tol > 0.0)) {
    throw ConfigError("tolerances must be > 0");
  }
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (cfg.probe_trials < 1) throw ConfigError("probe_trials must be >= 1");
  if (cfg.variant != "biharmonic" && cfg.variant != "split-quartic" &&
      cfg.variant != "generalized") {
    throw ConfigError("variant must be biharmonic | split-quartic | generalized");
  }
  if (cfg.variant == "generalized") {
    if (!(cfg.a11 > 0.0) || !(cfg.a22 > 0.0) || cfg.a12 < 0.0 || !(cfg.b1 > 0.0) ||
        !(cfg.b2 > 0.0)) {
      throw ConfigError("generalized coefficients must be positive (a12 >= 0)");
    }
  }
  if (cfg.weps_knots != "literal" && cfg.weps_knots != "squared") {
    throw ConfigError("weps_knots must be literal | squared");
  }
}

}  // namespace efk
