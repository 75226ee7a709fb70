#include "slavespin/ising.hpp"

#include <stdexcept>
#include <string>

namespace slavespin {

void check_site_count(int sites, int max_sites) {
  if (sites < 1 || sites > max_sites) {
    throw std::invalid_argument("spin cluster of " + std::to_string(sites) +
                                " sites exceeds the supported range [1, " +
                                std::to_string(max_sites) + "]");
  }
}

double IsingHamiltonian::norm_bound() const {
  const double d = diagonal.size() ? diagonal.cwiseAbs().maxCoeff() : 0.0;
  return d + sites * std::abs(transverse);
}

Eigen::MatrixXd IsingHamiltonian::dense() const {
  const Eigen::Index dim = dimension();
  Eigen::MatrixXd h = diagonal.asDiagonal();
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (int i = 0; i < sites; ++i) {
      h(a ^ (Eigen::Index{1} << i), a) += transverse;
    }
  }
  return h;
}

namespace {

template <typename Vec>
void apply_impl(const IsingHamiltonian& h, const Vec& x, Vec& y) {
  const Eigen::Index dim = h.dimension();
  y.resize(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    typename Vec::Scalar flips(0);
    for (int i = 0; i < h.sites; ++i) {
      flips += x(a ^ (Eigen::Index{1} << i));
    }
    y(a) = h.diagonal(a) * x(a) + h.transverse * flips;
  }
}

}  // namespace

void IsingHamiltonian::apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  apply_impl(*this, x, y);
}

void IsingHamiltonian::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  apply_impl(*this, x, y);
}

void IsingHamiltonian::apply(const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y) const {
  const Eigen::Index dim = dimension();
  y.resize(dim, x.cols());
  for (Eigen::Index col = 0; col < x.cols(); ++col) {
    for (Eigen::Index a = 0; a < dim; ++a) {
      std::complex<double> flips(0.0);
      for (int i = 0; i < sites; ++i) {
        flips += x(a ^ (Eigen::Index{1} << i), col);
      }
      y(a, col) = diagonal(a) * x(a, col) + transverse * flips;
    }
  }
}

double IsingHamiltonian::expectation(const Eigen::VectorXcd& psi) const {
  Eigen::VectorXcd hpsi;
  apply(psi, hpsi);
  return psi.dot(hpsi).real();
}

}  // namespace slavespin
