#include "slavespin/lanczos.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace slavespin {

namespace {

void project_out(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis) {
  for (const auto& b : basis) v -= b.dot(v) * b;
}

}  // namespace

LanczosResult lanczos_lowest(const SymmetricOperator& apply, Eigen::Index dimension,
                             const LanczosOptions& options,
                             const std::vector<Eigen::VectorXd>& deflate) {
  if (dimension < 1) throw std::invalid_argument("Lanczos: empty operator");
  const int m_max = static_cast<int>(
      std::min<Eigen::Index>(options.krylov_dimension, dimension - Eigen::Index(deflate.size())));
  if (m_max < 1) throw std::invalid_argument("Lanczos: deflation exhausts the space");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  Eigen::VectorXd start(dimension);
  for (Eigen::Index a = 0; a < dimension; ++a) start(a) = uniform(rng);
  project_out(start, deflate);
  start.normalize();

  LanczosResult result;
  Eigen::MatrixXd v(dimension, m_max);
  Eigen::VectorXd w(dimension);

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(m_max);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(m_max);
    v.col(0) = start;
    int m = 0;
    for (int k = 0; k < m_max; ++k) {
      apply(v.col(k), w);
      ++result.matvecs;
      project_out(w, deflate);
      alpha(k) = v.col(k).dot(w);
      // Two passes of Gram-Schmidt against the whole basis.
      for (int pass = 0; pass < 2; ++pass) {
        w -= v.leftCols(k + 1) * (v.leftCols(k + 1).transpose() * w);
      }
      m = k + 1;
      const double b = w.norm();
      if (k + 1 == m_max) break;
      if (b < 1e-13) break;  // invariant subspace found
      beta(k) = b;
      v.col(k + 1) = w / b;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    if (m == 1) {
      result.value = alpha(0);
      start = v.col(0);
    } else {
      tri.computeFromTridiagonal(alpha.head(m), beta.head(m - 1), Eigen::ComputeEigenvectors);
      result.value = tri.eigenvalues()(0);
      start = v.leftCols(m) * tri.eigenvectors().col(0);
    }
    project_out(start, deflate);
    start.normalize();

    apply(start, w);
    ++result.matvecs;
    project_out(w, deflate);
    result.value = start.dot(w);
    result.residual = (w - result.value * start).norm();
    result.vector = start;
    if (result.residual <= options.tolerance) {
      result.converged = true;
      return result;
    }
  }
  return result;
}

}  // namespace slavespin
