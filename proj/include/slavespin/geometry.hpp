#pragma once

#include "slavespin/lattice.hpp"
#include "slavespin/rydberg.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace slavespin {

/// Mismatch between the van der Waals couplings of `positions` and the target
/// -4 J_ij, summed over unordered pairs:
///   D = sqrt( sum_{i<j} (C6 / r_ij^6 + 4 J_ij)^2 ).
/// Returns +infinity when two atoms coincide.
double geometry_cost(const std::vector<Eigen::Vector2d>& positions, const Eigen::MatrixXd& j,
                     double c6);

/// Gradient of D with respect to every coordinate (x0, y0, x1, y1, ...).
Eigen::VectorXd geometry_cost_gradient(const std::vector<Eigen::Vector2d>& positions,
                                       const Eigen::MatrixXd& j, double c6);

/// Square-lattice placement with spacing max_ij (C6 / |4 J_ij|)^(1/6),
/// row-major like the cluster.
AtomArray initial_guess(const Eigen::MatrixXd& j, const ClusterSpec& cluster, double c6);

struct GeometryOptions {
  int max_iterations = 2000;
  /// Stop once ||grad D|| <= gradient_tolerance, or once no step lowers D
  /// while ||grad D|| * max|x| <= 1e-6 D (the rounding floor of D).
  double gradient_tolerance = 1e-9;
  /// Independent starts; starts after the first are jittered copies of the guess.
  int starts = 1;
  /// Jitter amplitude relative to the initial spacing.
  double jitter = 0.05;
  std::uint64_t seed = 7;
  /// Optional hardware constraint: quadratic penalty below this distance (um).
  double min_distance = 0.0;
  double min_distance_weight = 0.0;
};

struct GeometryResult {
  AtomArray array;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  /// Objective after every accepted step of the winning start
  /// (non-increasing). Equals D unless the distance penalty is active.
  std::vector<double> history;
  int iterations = 0;
  bool converged = false;
  /// Set when the line search could not make progress; the best point so far
  /// is returned.
  bool line_search_failed = false;
};

/// Local minimisation of D by Polak-Ribiere conjugate gradients with a
/// backtracking line search. Never returns a configuration worse than `start`
/// in the minimised objective.
GeometryResult optimize_geometry(const AtomArray& start, const Eigen::MatrixXd& j,
                                 const GeometryOptions& options = {});

}  // namespace slavespin
