#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace slavespin {

/// Largest cluster the 2^N state-vector code accepts by default.
inline constexpr int kDefaultMaxSites = 14;

/// Basis convention used throughout: bit i of a basis index is site i;
/// bit value 1 means S^z_i = +1, i.e. the Rydberg state |r>, n_i = 1.
inline double sz_value(std::uint64_t basis, int site) {
  return ((basis >> site) & 1U) ? 1.0 : -1.0;
}
inline double occupation(std::uint64_t basis, int site) {
  return static_cast<double>((basis >> site) & 1U);
}

/// Operator of the form  sum_a d_a |a><a| + c * sum_i X_i  on N spins.
/// Both the cluster spin model and the Rydberg resource Hamiltonian have this
/// shape: everything except the global transverse drive is diagonal.
struct IsingHamiltonian {
  int sites = 0;
  Eigen::VectorXd diagonal;
  double transverse = 0.0;

  Eigen::Index dimension() const { return diagonal.size(); }

  /// Upper bound on the spectral norm.
  double norm_bound() const;

  /// Dense matrix representation (only sensible for small N).
  Eigen::MatrixXd dense() const;

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;
  /// y = H x for every column of x.
  void apply(const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) const;

  double expectation(const Eigen::VectorXcd& psi) const;
};

/// Throws std::invalid_argument unless 1 <= sites <= max_sites.
void check_site_count(int sites, int max_sites = kDefaultMaxSites);

}  // namespace slavespin
