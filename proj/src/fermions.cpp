#include "slavespin/fermions.hpp"

#include <cmath>

namespace slavespin {

namespace {

constexpr double kRelativeZeroMode = 1e-9;
constexpr double kAbsoluteZeroMode = 1e-12;

}  // namespace

Eigen::MatrixXd solve_density_matrix(const Eigen::MatrixXd& q) {
  if (q.rows() != q.cols()) {
    throw std::invalid_argument("Q must be square");
  }
  const double asym = (q - q.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("Q must be symmetric");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(q);
  if (solver.info() != Eigen::Success) {
    // Eigen's tridiagonal QR gives up after 30 sweeps per row.
    throw EigensolverError("eigendecomposition of Q did not converge", q.norm(),
                           30 * static_cast<int>(q.rows()));
  }
  const Eigen::VectorXd& lambda = solver.eigenvalues();
  const double scale = lambda.size() ? lambda.cwiseAbs().maxCoeff() : 0.0;
  const double zero = scale > 0.0 ? kRelativeZeroMode * scale : kAbsoluteZeroMode;

  Eigen::VectorXd occupation(lambda.size());
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    if (lambda(k) < -zero) {
      occupation(k) = 2.0;
    } else if (lambda(k) > zero) {
      occupation(k) = 0.0;
    } else {
      occupation(k) = 1.0;
    }
  }
  const Eigen::MatrixXd& l = solver.eigenvectors();
  return l * occupation.asDiagonal() * l.transpose();
}

SpinCoupling build_coupling(const Eigen::MatrixXd& hopping, const Eigen::MatrixXd& density) {
  if (hopping.rows() != density.rows() || hopping.cols() != density.cols()) {
    throw std::invalid_argument("hopping and density matrix shapes differ");
  }
  SpinCoupling out;
  out.j = hopping.cwiseProduct(density);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < hopping.rows(); ++i) {
    for (Eigen::Index k = i + 1; k < hopping.cols(); ++k) {
      if (hopping(i, k) != 0.0) {
        sum += out.j(i, k);
        ++out.bond_count;
      }
    }
  }
  out.mean_bond = out.bond_count > 0 ? sum / out.bond_count : 0.0;
  return out;
}

}  // namespace slavespin
