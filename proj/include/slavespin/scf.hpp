#pragma once

#include "slavespin/backend.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace slavespin {

struct ScfConfig {
  /// Tolerance on |delta mbar| (inner) and ||delta Q||_F (outer).
  double eta = 0.01;
  /// Iteration cap per loop.
  int k = 5;
  /// Starting mbar of the first inner loop.
  double m0 = 0.5;
  /// Later inner loops start from the previous mbar instead of m0.
  bool warm_start = true;
  /// ||delta Q||_F is divided by this before the test against eta, so the
  /// tolerance applies in the units the hopping was given in.
  double q_unit = 1.0;
  /// Replaces the bond average Jbar in the mean field (needed for a 1x1 cluster).
  std::optional<double> mean_bond_override;
  void validate() const;
};

struct InnerStep {
  double mbar = 0.0;
  double delta_m = 0.0;
};

struct OuterStep {
  /// ||Q_l - Q_{l-1}||_F in units of ScfConfig::q_unit.
  double q_delta = 0.0;
  double mbar = 0.0;
  double z = 0.0;
  bool inner_converged = false;
  std::vector<InnerStep> inner;
};

struct ScfRecord {
  double u = 0.0;
  std::vector<OuterStep> steps;
  bool converged = false;
  int outer_iterations = 0;
  int inner_iterations_total = 0;
  double mbar = 0.0;
  double mbar_err = 0.0;
  double z = 0.0;
  double z_err = 0.0;
  Eigen::VectorXd magnetization;
  Eigen::VectorXd magnetization_err;
  Eigen::MatrixXd correlation;
  Eigen::MatrixXd q;
  Eigen::MatrixXd g;
  Eigen::MatrixXd j;
  double mean_bond = 0.0;
  bool degenerate = false;
  /// Non-empty when the point failed; the record then holds the last iterate.
  std::string error;
};

struct InnerResult {
  SpinMeasurement measurement;
  std::vector<InnerStep> steps;
  bool converged = false;
};

/// Iterate the mean field at fixed couplings until mbar stops moving.
InnerResult inner_loop(const SpinBackend& backend, const Embedding& embedding, double u,
                       double m_start, const ScfConfig& config, std::uint64_t stream_base);

/// Full self-consistent solution at one U. Numerical failures are recorded in
/// the returned record rather than thrown.
ScfRecord outer_loop(const Eigen::MatrixXd& hopping, double u, const SpinBackend& backend,
                     const ScfConfig& config, std::uint64_t stream_base = 0);

/// Independent outer loops for every U, run on up to `jobs` threads. Results
/// keep the order of `us` and do not depend on `jobs`.
std::vector<ScfRecord> sweep_equilibrium(const Eigen::MatrixXd& hopping,
                                         const std::vector<double>& us,
                                         const SpinBackend& backend, const ScfConfig& config,
                                         int jobs = 1);

/// Run `task(i)` for i in [0, count) on up to `jobs` threads.
void parallel_for(int count, int jobs, const std::function<void(int)>& task);

}  // namespace slavespin
