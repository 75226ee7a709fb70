#include "slavespin/config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace slavespin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Shortest text that reads back to the same double.
std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "cluster.nx", "cluster.ny", "model.t_hop_mhz", "model.u_mhz", "model.u_range_mhz",
      "quench.u_f_mhz", "quench.tau_ramp_us", "quench.duration_us", "quench.samples",
      "quench.window", "backend", "scf.eta", "scf.k", "scf.m0", "scf.warm_start",
      "scf.mean_bond_override_mhz", "noise.gamma_mhz", "noise.n_shots", "noise.epsilon",
      "noise.epsilon_prime", "noise.seed", "anneal.tau_max_us", "anneal.delta_start_mhz",
      "anneal.align_branch", "rydberg.c6", "rydberg.geometry", "geometry.max_iters",
      "geometry.grad_tol", "geometry.starts", "geometry.min_distance_um",
      "geometry.min_distance_weight", "geometry.u_mhz", "units.angular",
      "units.hopping_cyclic", "output.dir", "jobs"};
  return keys;
}

class Reader {
 public:
  explicit Reader(const KeyValueFile& f) : f_(f) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(f_.where(key) + ": key '" + key + "': " + what);
  }

  double number(const std::string& key) const {
    const std::string& s = f_.raw(key);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(v)) {
      fail(key, "expected a number, got '" + s + "'");
    }
    return v;
  }

  double number(const std::string& key, double fallback) const {
    return f_.has(key) ? number(key) : fallback;
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!f_.has(key)) return fallback;
    const std::string& s = f_.raw(key);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0' || errno == ERANGE) fail(key, "expected an integer, got '" + s + "'");
    return v;
  }

  std::uint64_t unsigned64(const std::string& key, std::uint64_t fallback) const {
    if (!f_.has(key)) return fallback;
    const std::string& s = f_.raw(key);
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || *end != '\0' || errno == ERANGE) {
      fail(key, "expected an unsigned 64-bit integer, got '" + s + "'");
    }
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!f_.has(key)) return fallback;
    const std::string& s = f_.raw(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    fail(key, "expected true or false, got '" + s + "'");
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return f_.has(key) ? f_.raw(key) : fallback;
  }

  std::vector<double> list(const std::string& key) const {
    const std::string& text = f_.raw(key);
    try {
      return parse_list(text, key);
    } catch (const ConfigError& e) {
      throw ConfigError(f_.where(key) + ": " + e.what());
    }
  }

 private:
  const KeyValueFile& f_;
};

}  // namespace

KeyValueFile KeyValueFile::parse(std::istream& in, const std::string& source) {
  KeyValueFile f;
  f.source_ = source;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string loc = source + ":" + std::to_string(number);
    if (eq == std::string::npos) throw ConfigError(loc + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(loc + ": empty key");
    if (!known_keys().count(key)) throw ConfigError(loc + ": unknown key '" + key + "'");
    if (f.entries_.count(key)) {
      throw ConfigError(loc + ": key '" + key + "' already set on line " +
                        std::to_string(f.entries_[key].line));
    }
    f.entries_[key] = {value, number};
  }
  return f;
}

KeyValueFile KeyValueFile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

const std::string& KeyValueFile::raw(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(source_ + ": missing required key '" + key + "'");
  return it->second.value;
}

std::string KeyValueFile::where(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end() || it->second.line == 0) return source_;
  return source_ + ":" + std::to_string(it->second.line);
}

std::vector<std::string> KeyValueFile::keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
  if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'");
  entries_[key] = {value, 0};
}

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0' || !std::isfinite(v)) {
      throw ConfigError("key '" + key + "': bad list entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

double RunConfig::energy(double mhz) const { return angular ? mhz : 2.0 * std::numbers::pi * mhz; }

double RunConfig::energy_to_config(double coefficient) const {
  return angular ? coefficient : coefficient / (2.0 * std::numbers::pi);
}

double RunConfig::hopping() const {
  return hopping_cyclic ? 2.0 * std::numbers::pi * t_hop_mhz : energy(t_hop_mhz);
}

BackendConfig RunConfig::backend_config() const {
  NoiseParams noise{n_shots, epsilon, epsilon_prime, seed};
  BackendConfig c = BackendConfig::preset(backend, noise, energy(gamma_mhz));
  c.geometry = geometry;
  c.anneal_time = tau_max_us;
  if (delta_start_mhz) c.delta_start = energy(*delta_start_mhz);
  c.align_branch = align_branch;
  c.c6 = c6;
  c.geometry_options.max_iterations = geometry_max_iters;
  c.geometry_options.gradient_tolerance = geometry_grad_tol;
  c.geometry_options.starts = geometry_starts;
  c.geometry_options.seed = seed;
  c.geometry_options.min_distance = geometry_min_distance_um;
  c.geometry_options.min_distance_weight = geometry_min_distance_weight;
  return c;
}

ScfConfig RunConfig::scf_config() const {
  ScfConfig c;
  c.eta = eta;
  c.k = k;
  c.m0 = m0;
  c.warm_start = warm_start;
  c.q_unit = hopping() / t_hop_mhz;
  if (mean_bond_override_mhz) c.mean_bond_override = energy(*mean_bond_override_mhz);
  return c;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
  };
  std::vector<std::pair<std::string, std::string>> e = {
      {"cluster.nx", std::to_string(nx)},
      {"cluster.ny", std::to_string(ny)},
      {"model.t_hop_mhz", fmt(t_hop_mhz)},
      {"model.u_mhz", join(u_mhz)},
      {"quench.u_f_mhz", join(u_f_mhz)},
      {"backend", backend_name(backend)},
      {"scf.eta", fmt(eta)},
      {"scf.k", std::to_string(k)},
      {"scf.m0", fmt(m0)},
      {"scf.warm_start", warm_start ? "true" : "false"},
      {"scf.mean_bond_override_mhz", mean_bond_override_mhz ? fmt(*mean_bond_override_mhz) : "none"},
      {"noise.gamma_mhz", fmt(gamma_mhz)},
      {"noise.n_shots", std::to_string(n_shots)},
      {"noise.epsilon", fmt(epsilon)},
      {"noise.epsilon_prime", fmt(epsilon_prime)},
      {"noise.seed", std::to_string(seed)},
      {"anneal.tau_max_us", fmt(tau_max_us)},
      {"anneal.delta_start_mhz", fmt(delta_start_mhz ? *delta_start_mhz : energy_to_config(kDefaultDeltaStart))},
      {"anneal.align_branch", align_branch ? "true" : "false"},
      {"quench.tau_ramp_us", fmt(tau_ramp_us)},
      {"quench.duration_us", fmt(duration_us)},
      {"quench.samples", std::to_string(samples)},
      {"quench.window", window == WindowKind::Hann ? "hann" : "rect"},
      {"rydberg.c6", fmt(c6)},
      {"rydberg.geometry", geometry == GeometryMode::Ideal ? "ideal" : "optimized"},
      {"geometry.max_iters", std::to_string(geometry_max_iters)},
      {"geometry.grad_tol", fmt(geometry_grad_tol)},
      {"geometry.starts", std::to_string(geometry_starts)},
      {"geometry.min_distance_um", fmt(geometry_min_distance_um)},
      {"geometry.min_distance_weight", fmt(geometry_min_distance_weight)},
      {"geometry.u_mhz", fmt(geometry_u_mhz)},
      {"units.angular", angular ? "true" : "false"},
      {"units.hopping_cyclic", hopping_cyclic ? "true" : "false"},
  };
  return e;
}

RunConfig load_run_config(const KeyValueFile& file, Workflow workflow) {
  const Reader r(file);
  RunConfig c;
  c.nx = static_cast<int>(r.integer("cluster.nx", 0));
  c.ny = static_cast<int>(r.integer("cluster.ny", 0));
  file.raw("cluster.nx");
  file.raw("cluster.ny");
  if (c.nx < 1) r.fail("cluster.nx", "must be at least 1");
  if (c.ny < 1) r.fail("cluster.ny", "must be at least 1");
  c.t_hop_mhz = r.number("model.t_hop_mhz");
  if (!(c.t_hop_mhz > 0.0)) r.fail("model.t_hop_mhz", "must be positive");

  if (file.has("model.u_mhz") && file.has("model.u_range_mhz")) {
    r.fail("model.u_range_mhz", "conflicts with model.u_mhz");
  }
  if (file.has("model.u_range_mhz")) {
    const std::vector<double> spec = r.list("model.u_range_mhz");
    if (spec.size() != 3 || spec[2] < 1 || spec[2] != std::floor(spec[2])) {
      r.fail("model.u_range_mhz", "expected 'start, stop, count'");
    }
    const int n = static_cast<int>(spec[2]);
    for (int i = 0; i < n; ++i) {
      c.u_mhz.push_back(n == 1 ? spec[0] : spec[0] + (spec[1] - spec[0]) * i / (n - 1));
    }
  } else if (file.has("model.u_mhz") || workflow == Workflow::Equilibrium) {
    c.u_mhz = r.list("model.u_mhz");
  }
  for (double u : c.u_mhz) {
    if (u < 0.0) r.fail(file.has("model.u_mhz") ? "model.u_mhz" : "model.u_range_mhz", "U must be non-negative");
  }
  if (file.has("quench.u_f_mhz") || workflow == Workflow::Quench) {
    c.u_f_mhz = r.list("quench.u_f_mhz");
    for (double u : c.u_f_mhz) {
      if (u < 0.0) r.fail("quench.u_f_mhz", "U_f must be non-negative");
    }
  }

  const std::string backend = r.text("backend", "exact");
  const auto kind = parse_backend(backend);
  if (!kind) r.fail("backend", "unknown backend '" + backend + "'; valid backends: " + valid_backend_names());
  c.backend = *kind;

  c.eta = r.number("scf.eta", c.eta);
  if (!(c.eta > 0.0)) r.fail("scf.eta", "must be positive");
  c.k = static_cast<int>(r.integer("scf.k", c.k));
  if (c.k < 1) r.fail("scf.k", "must be at least 1");
  c.m0 = r.number("scf.m0", c.m0);
  if (!(c.m0 > 0.0 && c.m0 <= 1.0)) r.fail("scf.m0", "must lie in (0, 1]");
  c.warm_start = r.boolean("scf.warm_start", c.warm_start);
  if (file.has("scf.mean_bond_override_mhz")) c.mean_bond_override_mhz = r.number("scf.mean_bond_override_mhz");

  c.gamma_mhz = r.number("noise.gamma_mhz", c.gamma_mhz);
  if (c.gamma_mhz < 0.0) r.fail("noise.gamma_mhz", "must be non-negative");
  c.n_shots = static_cast<int>(r.integer("noise.n_shots", c.n_shots));
  if (c.n_shots < 2) r.fail("noise.n_shots", "must be at least 2");
  c.epsilon = r.number("noise.epsilon", c.epsilon);
  if (c.epsilon < 0.0 || c.epsilon > 1.0) r.fail("noise.epsilon", "must lie in [0, 1]");
  c.epsilon_prime = r.number("noise.epsilon_prime", c.epsilon_prime);
  if (c.epsilon_prime < 0.0 || c.epsilon_prime > 1.0) r.fail("noise.epsilon_prime", "must lie in [0, 1]");
  c.seed = r.unsigned64("noise.seed", c.seed);

  c.tau_max_us = r.number("anneal.tau_max_us", c.tau_max_us);
  if (!(c.tau_max_us > 0.0)) r.fail("anneal.tau_max_us", "must be positive");
  if (file.has("anneal.delta_start_mhz")) c.delta_start_mhz = r.number("anneal.delta_start_mhz");
  c.align_branch = r.boolean("anneal.align_branch", c.align_branch);

  c.tau_ramp_us = r.number("quench.tau_ramp_us", c.tau_ramp_us);
  c.duration_us = r.number("quench.duration_us", c.duration_us);
  if (!(c.duration_us > 0.0)) r.fail("quench.duration_us", "must be positive");
  if (c.tau_ramp_us < 0.0 || c.tau_ramp_us >= c.duration_us) {
    r.fail("quench.tau_ramp_us", "must lie in [0, quench.duration_us)");
  }
  c.samples = static_cast<int>(r.integer("quench.samples", c.samples));
  if (c.samples < 63) r.fail("quench.samples", "must be at least 63 (64 grid points)");
  const std::string window = r.text("quench.window", "hann");
  if (window == "hann") {
    c.window = WindowKind::Hann;
  } else if (window == "rect") {
    c.window = WindowKind::Rectangular;
  } else {
    r.fail("quench.window", "expected hann or rect");
  }

  c.c6 = r.number("rydberg.c6", c.c6);
  if (!(c.c6 > 0.0)) r.fail("rydberg.c6", "must be positive");
  const std::string geometry = r.text("rydberg.geometry", "ideal");
  if (geometry == "ideal") {
    c.geometry = GeometryMode::Ideal;
  } else if (geometry == "optimized") {
    c.geometry = GeometryMode::Optimized;
  } else {
    r.fail("rydberg.geometry", "expected ideal or optimized");
  }
  c.geometry_max_iters = static_cast<int>(r.integer("geometry.max_iters", c.geometry_max_iters));
  if (c.geometry_max_iters < 0) r.fail("geometry.max_iters", "must be non-negative");
  c.geometry_grad_tol = r.number("geometry.grad_tol", c.geometry_grad_tol);
  if (!(c.geometry_grad_tol >= 0.0)) r.fail("geometry.grad_tol", "must be non-negative");
  c.geometry_starts = static_cast<int>(r.integer("geometry.starts", c.geometry_starts));
  if (c.geometry_starts < 1) r.fail("geometry.starts", "must be at least 1");
  c.geometry_min_distance_um = r.number("geometry.min_distance_um", c.geometry_min_distance_um);
  c.geometry_min_distance_weight = r.number("geometry.min_distance_weight", c.geometry_min_distance_weight);
  if (c.geometry_min_distance_um < 0.0) r.fail("geometry.min_distance_um", "must be non-negative");
  if (c.geometry_min_distance_weight < 0.0) r.fail("geometry.min_distance_weight", "must be non-negative");
  c.geometry_u_mhz = r.number("geometry.u_mhz", c.geometry_u_mhz);
  if (c.geometry_u_mhz < 0.0) r.fail("geometry.u_mhz", "must be non-negative");

  c.angular = r.boolean("units.angular", c.angular);
  c.hopping_cyclic = r.boolean("units.hopping_cyclic", c.hopping_cyclic);
  c.output_dir = r.text("output.dir", c.output_dir);
  c.jobs = static_cast<int>(r.integer("jobs", c.jobs));
  if (c.jobs < 1) r.fail("jobs", "must be at least 1");
  return c;
}

}  // namespace slavespin
