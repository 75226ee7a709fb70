#pragma once

#include "slavespin/backend.hpp"
#include "slavespin/quench.hpp"
#include "slavespin/scf.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace slavespin {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` text; `#` starts a comment, blank lines are ignored.
/// Keys are dotted names such as `cluster.nx`.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueFile load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  /// Raw value; throws ConfigError naming the key if absent.
  const std::string& raw(const std::string& key) const;
  /// "<source>:<line>" for diagnostics, or the source name for unknown keys.
  std::string where(const std::string& key) const;
  std::vector<std::string> keys() const;

  void set(const std::string& key, const std::string& value);

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source_;
  std::map<std::string, Entry> entries_;
};

enum class Workflow { Equilibrium, Quench, Geometry };

/// Everything a run needs, in the units of the config file.
struct RunConfig {
  int nx = 0;
  int ny = 0;
  double t_hop_mhz = 0.0;
  std::vector<double> u_mhz;
  std::vector<double> u_f_mhz;
  BackendKind backend = BackendKind::Exact;

  double eta = 0.01;
  int k = 5;
  double m0 = 0.5;
  bool warm_start = true;
  std::optional<double> mean_bond_override_mhz;

  double gamma_mhz = 0.0;
  int n_shots = 150;
  double epsilon = 0.0;
  double epsilon_prime = 0.0;
  std::uint64_t seed = 1;

  double tau_max_us = kDefaultAnnealTime;
  std::optional<double> delta_start_mhz;
  bool align_branch = true;

  double tau_ramp_us = kDefaultQuenchRamp;
  double duration_us = 4.0;
  int samples = 400;
  WindowKind window = WindowKind::Hann;

  double c6 = kDefaultC6;
  GeometryMode geometry = GeometryMode::Ideal;
  int geometry_max_iters = 2000;
  double geometry_grad_tol = 1e-9;
  int geometry_starts = 1;
  double geometry_min_distance_um = 0.0;
  double geometry_min_distance_weight = 0.0;
  double geometry_u_mhz = 0.0;

  bool angular = true;
  bool hopping_cyclic = true;

  std::string output_dir = "out";
  int jobs = 1;

  /// Config energy -> Hamiltonian coefficient (rad/us).
  double energy(double mhz) const;
  /// Hamiltonian coefficient -> config energy.
  double energy_to_config(double coefficient) const;
  double hopping() const;

  ClusterSpec cluster() const { return ClusterSpec(nx, ny); }
  BackendConfig backend_config() const;
  ScfConfig scf_config() const;

  /// Every knob that affects numerics, in a fixed order.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Keys required for each workflow; others fall back to defaults.
RunConfig load_run_config(const KeyValueFile& file, Workflow workflow);

std::vector<double> parse_list(const std::string& text, const std::string& key);

}  // namespace slavespin
