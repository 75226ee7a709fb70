#pragma once

#include "slavespin/ising.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace slavespin {

/// z-basis observables: <S^z_i>, <S^z_i S^z_j> and their site average.
struct ZObservables {
  Eigen::VectorXd magnetization;
  Eigen::MatrixXd correlation;
  double mean_magnetization = 0.0;
};

/// Observables of a distribution over computational basis states.
ZObservables z_observables(const Eigen::VectorXd& probabilities, int sites);

/// Cluster spin Hamiltonian
///   sum_{i<j} J_ij S^z_i S^z_j + (U/4) sum_i S^x_i + sum_i h_i S^z_i
/// with Pauli operators; each unordered pair contributes once.
IsingHamiltonian build_cluster_hamiltonian(const Eigen::MatrixXd& j, double u,
                                           const Eigen::VectorXd& field,
                                           int max_sites = kDefaultMaxSites);

/// Mean field h_i = 2 z_i Jbar mbar acting on the cluster boundary.
Eigen::VectorXd mean_field(const std::vector<int>& external_neighbors, double mean_bond,
                           double mean_magnetization);

struct SpinSolution {
  Eigen::VectorXd state;
  double energy = 0.0;
  double residual = 0.0;
  ZObservables observables;
  /// Set when a degenerate ground doublet was resolved towards maximal mbar.
  bool degenerate = false;
};

class GroundStateError : public std::runtime_error {
 public:
  GroundStateError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct GroundStateOptions {
  /// Dense diagonalisation up to this many sites, Lanczos beyond.
  int dense_max_sites = 8;
  /// Required ||H psi - E psi|| relative to the norm bound of H.
  double relative_residual = 1e-8;
};

SpinSolution ground_state(const IsingHamiltonian& h, const GroundStateOptions& options = {});

}  // namespace slavespin
