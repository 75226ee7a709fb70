#pragma once

#include "slavespin/fermions.hpp"
#include "slavespin/geometry.hpp"
#include "slavespin/lattice.hpp"
#include "slavespin/rydberg.hpp"
#include "slavespin/sampling.hpp"
#include "slavespin/spins.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace slavespin {

enum class BackendKind { Exact, AnnealNoiseless, AnnealNoisy };

/// Accepts "exact", "anneal-noiseless"/"anneal_noiseless", "anneal-noisy"/"anneal_noisy".
std::optional<BackendKind> parse_backend(const std::string& name);
std::string backend_name(BackendKind kind);
std::string valid_backend_names();

enum class Preparation { GroundState, Anneal };
enum class GeometryMode { Ideal, Optimized };

/// How the spin problem is solved: how the state is prepared, whether it is
/// read out exactly or with finite shots, and how couplings reach the atoms.
struct BackendConfig {
  Preparation preparation = Preparation::GroundState;
  GeometryMode geometry = GeometryMode::Ideal;
  /// Dephasing rate (rad/us); only used by the anneal.
  double gamma = 0.0;
  /// noise.shots == 0 reads out exact expectations (readout errors ignored).
  NoiseParams noise{0, 0.0, 0.0, 1};
  double anneal_time = kDefaultAnnealTime;
  double delta_start = kDefaultDeltaStart;
  /// Anneal on the branch the register starts in and relabel the outcome.
  bool align_branch = true;
  double c6 = kDefaultC6;
  GeometryOptions geometry_options;
  GroundStateOptions ground_state;
  EvolveOptions evolve;
  int max_sites = kDefaultMaxSites;

  /// exact: ground state, exact readout. anneal-noiseless: coherent anneal,
  /// exact readout. anneal-noisy: dephased anneal with `noise` shots.
  static BackendConfig preset(BackendKind kind, const NoiseParams& noise = {}, double gamma = 0.0);
  void validate() const;
};

/// Couplings as realised on the simulator for one target J.
struct Embedding {
  Eigen::MatrixXd target;
  /// Pair interactions V_ij on the atoms (rad/us).
  Eigen::MatrixXd interactions;
  /// Ising couplings actually simulated: -V/4.
  Eigen::MatrixXd effective;
  double mean_bond = 0.0;
  std::optional<GeometryResult> geometry;
};

struct SpinMeasurement {
  ZObservables observables;
  Eigen::VectorXd magnetization_err;
  double mean_err = 0.0;
  bool degenerate = false;
};

class SpinBackend {
 public:
  SpinBackend(BackendConfig config, ClusterSpec cluster);

  const BackendConfig& config() const { return config_; }
  const ClusterSpec& cluster() const { return cluster_; }

  /// `mean_bond` is the Jbar entering the mean field.
  Embedding embed(const Eigen::MatrixXd& j, double mean_bond) const;

  /// Solve the cluster problem at interaction `u` in the mean field of `mbar`.
  /// `stream` selects the random substream for shots.
  SpinMeasurement solve(const Embedding& embedding, double u, double mbar,
                        std::uint64_t stream) const;

 private:
  SpinMeasurement measure(const Eigen::VectorXd& probabilities, std::uint64_t stream) const;

  BackendConfig config_;
  ClusterSpec cluster_;
  std::vector<int> z_;
};

/// Reorder a distribution by complementing every bit of the basis index.
Eigen::VectorXd complement_bits(const Eigen::VectorXd& probabilities);

}  // namespace slavespin
