#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace slavespin {

/// Raised when a dense Hermitian eigensolve fails to converge.
class EigensolverError : public std::runtime_error {
 public:
  EigensolverError(const std::string& what, double matrix_norm, int iterations)
      : std::runtime_error(what), matrix_norm_(matrix_norm), iterations_(iterations) {}
  double matrix_norm() const { return matrix_norm_; }
  int iterations() const { return iterations_; }

 private:
  double matrix_norm_;
  int iterations_;
};

/// Ground-state one-particle density matrix of H_f = sum_{ij,sigma} Q_ij f+_i f_j,
/// summed over both spin species. Modes with negative energy hold two fermions,
/// zero modes one (half filling of the degenerate shell), positive modes none.
Eigen::MatrixXd solve_density_matrix(const Eigen::MatrixXd& q);

/// Spin coupling J_ij = t_ij G_ij and its average over the bonds of the cluster.
struct SpinCoupling {
  Eigen::MatrixXd j;
  /// Average of J_ij over pairs with t_ij != 0; zero when there are none.
  double mean_bond = 0.0;
  int bond_count = 0;
};

SpinCoupling build_coupling(const Eigen::MatrixXd& hopping, const Eigen::MatrixXd& density);

}  // namespace slavespin
