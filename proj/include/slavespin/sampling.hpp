#pragma once

#include "slavespin/spins.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace slavespin {

/// Finite-shot readout model.
struct NoiseParams {
  int shots = 150;
  /// P(read r | atom in g).
  double epsilon = 0.0;
  /// P(read g | atom in r).
  double epsilon_prime = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Random streams: the engine is std::mt19937_64, seeded per task with
/// splitmix64(seed ^ splitmix64(stream)). Uniform doubles take the top 53 bits
/// of one engine output, so results are identical on every platform.
std::uint64_t splitmix64(std::uint64_t x);
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);
double uniform01(std::mt19937_64& rng);

/// Measured bitstrings; bit i of each entry is site i, 1 = |r>.
struct ShotRecord {
  int sites = 0;
  std::vector<std::uint64_t> shots;
  double epsilon = 0.0;
  double epsilon_prime = 0.0;

  /// One line per shot, site 0 first, ASCII '0'/'1'.
  void write(std::ostream& os) const;
};

/// Draw `params.shots` bitstrings from the Born distribution, then flip each
/// bit g->r with probability epsilon and r->g with probability epsilon'.
ShotRecord sample_bitstrings(const Eigen::VectorXd& probabilities, int sites,
                             const NoiseParams& params, std::uint64_t stream = 0);

/// Sample means of S^z = 2b - 1 with their errors. `*_stat_err` is the
/// standard error of the mean, `*_readout_err` the bias the readout model
/// introduces at the estimated point, `*_err` the two added in quadrature.
struct ShotEstimates {
  Eigen::VectorXd magnetization;
  Eigen::VectorXd magnetization_err;
  Eigen::MatrixXd correlation;
  Eigen::MatrixXd correlation_err;
  double mean_magnetization = 0.0;
  double mean_stat_err = 0.0;
  double mean_readout_err = 0.0;
  double mean_err = 0.0;
};

ShotEstimates estimate_observables(const ShotRecord& record);

/// Infinite-shot limit of the estimators: observables of the distribution
/// after the readout channel.
ZObservables expected_observables(const Eigen::VectorXd& probabilities, int sites,
                                  double epsilon = 0.0, double epsilon_prime = 0.0);

}  // namespace slavespin
